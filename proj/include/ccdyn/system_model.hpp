#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include "errors.hpp"
#include "rational.hpp"

namespace ccdyn {

/// Global network parameters. gamma = t_bar / P with gcd(t_bar, P) = 1.
struct SystemParams {
    int alpha = 0; // spatial multiplexing gain (streams per transmission)
    int P = 0;     // number of caching profiles
    int t_bar = 0; // coded caching gain of the virtual network

    Rational gamma() const { return Rational(t_bar, P); }

    static SystemParams make(int alpha, int P, int t_bar) {
        if (alpha < 1)
            throw std::invalid_argument("alpha must be a positive integer");
        if (t_bar < 1 || t_bar >= P)
            throw std::invalid_argument("need 0 < t_bar < P");
        if (std::gcd(t_bar, P) != 1)
            throw std::invalid_argument("gcd(t_bar, P) must be 1");
        return SystemParams{alpha, P, t_bar};
    }
};

/// Quantities derived from the unifying profile length eta_hat.
///
/// eta_hat == 0 selects unicast-only mode: alpha_bar and b are not defined
/// there and rho falls back to alpha (subpacketization of the UC step).
///
/// b uses the convention b = ((alpha - 1) mod eta_hat) + 1, so b = eta_hat
/// when eta_hat divides alpha.  This keeps the identity
/// eta_hat * (t_bar + alpha_bar - 1) + b = rho valid in all cases.
struct DerivedParams {
    int eta_hat = 0;
    int alpha_bar = 0; // ceil(alpha / eta_hat)
    int b = 0;         // slots of the last index-set position per transmission
    int rho = 0;       // subpackets per packet

    bool uc_only() const { return eta_hat == 0; }

    static DerivedParams make(const SystemParams& sp, int eta_hat) {
        if (eta_hat < 0)
            throw std::invalid_argument("eta_hat must be >= 0");
        DerivedParams d;
        d.eta_hat = eta_hat;
        if (eta_hat == 0) {
            d.rho = sp.alpha;
            return d;
        }
        d.alpha_bar = (sp.alpha + eta_hat - 1) / eta_hat;
        d.b = (sp.alpha - 1) % eta_hat + 1;
        d.rho = eta_hat * sp.t_bar + sp.alpha;
        return d;
    }
};

/// P x P binary placement matrix: row p is the circular right-shift of row
/// p - 1, and the first row starts with t_bar ones.  All indices 0-based.
class PlacementMatrix {
public:
    PlacementMatrix(int P, int t_bar) : P_(P), t_bar_(t_bar) {}

    int P() const { return P_; }
    int t_bar() const { return t_bar_; }

    /// 1 iff packet p is cached under profile c.
    int at(int p, int c) const {
        check_index(p);
        check_index(c);
        return ((c - p) % P_ + P_) % P_ < t_bar_ ? 1 : 0;
    }

    std::vector<std::vector<int>> rows() const {
        std::vector<std::vector<int>> out(P_, std::vector<int>(P_, 0));
        for (int p = 0; p < P_; ++p)
            for (int c = 0; c < P_; ++c)
                out[p][c] = at(p, c);
        return out;
    }

private:
    void check_index(int i) const {
        if (i < 0 || i >= P_)
            throw std::out_of_range("placement matrix index out of range");
    }

    int P_;
    int t_bar_;
};

inline PlacementMatrix build_placement_matrix(int P, int t_bar) {
    if (t_bar < 1 || t_bar >= P)
        throw std::invalid_argument("need 0 < t_bar < P");
    return PlacementMatrix(P, t_bar);
}

/// Packet indices cached under a profile; size is always t_bar.
inline std::vector<int> cache_contents(const PlacementMatrix& V, int profile) {
    if (profile < 0 || profile >= V.P())
        throw std::out_of_range("profile out of range");
    std::vector<int> packets;
    for (int p = 0; p < V.P(); ++p)
        if (V.at(p, profile))
            packets.push_back(p);
    return packets;
}

inline std::vector<int> missing_packets(const PlacementMatrix& V, int profile) {
    std::vector<int> packets;
    for (int p = 0; p < V.P(); ++p)
        if (!V.at(p, profile))
            packets.push_back(p);
    return packets;
}

/// User/profile assignment at one time instant.
struct NetworkSnapshot {
    int P = 0;
    std::map<int, int> profile_of; // user id -> profile (0-based)
    std::vector<int> lengths;      // eta_p per profile

    int K() const { return static_cast<int>(profile_of.size()); }

    bool operator==(const NetworkSnapshot& o) const {
        return P == o.P && profile_of == o.profile_of && lengths == o.lengths;
    }

    /// Users 1..K, profile 0 getting the first lengths[0] ids and so on.
    static NetworkSnapshot from_lengths(int P, const std::vector<int>& lengths) {
        if (static_cast<int>(lengths.size()) != P)
            throw std::invalid_argument("lengths size must equal P");
        NetworkSnapshot s;
        s.P = P;
        s.lengths = lengths;
        int id = 1;
        for (int p = 0; p < P; ++p) {
            if (lengths[p] < 0)
                throw std::invalid_argument("profile lengths must be non-negative");
            for (int i = 0; i < lengths[p]; ++i)
                s.profile_of[id++] = p;
        }
        return s;
    }

    void validate() const {
        std::vector<int> counted(P, 0);
        for (const auto& [id, p] : profile_of) {
            if (p < 0 || p >= P)
                throw std::invalid_argument("profile index out of range");
            ++counted[p];
        }
        if (counted != lengths)
            throw std::invalid_argument("lengths inconsistent with user assignment");
    }
};

struct ChurnEvent {
    enum class Kind { Join, Leave };
    int time = 0;
    Kind kind = Kind::Join;
    int user = 0;
};

enum class AssignMode { RoundRobin, LeastLoaded, SeededRandom };

inline AssignMode assign_mode_from_name(const std::string& name) {
    if (name == "round-robin")
        return AssignMode::RoundRobin;
    if (name == "least-loaded")
        return AssignMode::LeastLoaded;
    if (name == "seeded-random")
        return AssignMode::SeededRandom;
    throw std::invalid_argument("unknown assignment policy: " + name);
}

/// Profile selection for joining users.  Holds the round-robin cursor and
/// the RNG state, so consecutive picks are reproducible for a fixed seed.
class AssignPolicy {
public:
    explicit AssignPolicy(AssignMode mode, std::uint64_t seed = 0)
        : mode_(mode), rng_(seed) {}

    int pick(const std::vector<int>& lengths) {
        const int P = static_cast<int>(lengths.size());
        switch (mode_) {
        case AssignMode::RoundRobin: {
            int p = rr_next_ % P;
            rr_next_ = p + 1;
            return p;
        }
        case AssignMode::LeastLoaded: {
            int best = 0;
            for (int p = 1; p < P; ++p)
                if (lengths[p] < lengths[best])
                    best = p;
            return best;
        }
        case AssignMode::SeededRandom: {
            std::uniform_int_distribution<int> dist(0, P - 1);
            return dist(rng_);
        }
        }
        throw std::logic_error("unreachable");
    }

private:
    AssignMode mode_;
    int rr_next_ = 0;
    std::mt19937_64 rng_;
};

inline NetworkSnapshot assign_profile(NetworkSnapshot snap, int user, AssignPolicy& policy) {
    if (snap.profile_of.count(user))
        throw std::invalid_argument("duplicate user id " + std::to_string(user));
    int p = policy.pick(snap.lengths);
    snap.profile_of[user] = p;
    ++snap.lengths[p];
    return snap;
}

inline NetworkSnapshot remove_user(NetworkSnapshot snap, int user) {
    auto it = snap.profile_of.find(user);
    if (it == snap.profile_of.end())
        throw std::invalid_argument("leave event for absent user " + std::to_string(user));
    --snap.lengths[it->second];
    snap.profile_of.erase(it);
    return snap;
}

/// Applies a time-ordered churn trace.
inline NetworkSnapshot apply_churn(NetworkSnapshot snap,
                                   const std::vector<ChurnEvent>& events,
                                   AssignPolicy& policy) {
    int last_time = std::numeric_limits<int>::min();
    for (const auto& ev : events) {
        if (ev.time < last_time)
            throw std::invalid_argument("churn events must be time-ordered");
        last_time = ev.time;
        if (ev.kind == ChurnEvent::Kind::Join)
            snap = assign_profile(std::move(snap), ev.user, policy);
        else
            snap = remove_user(std::move(snap), ev.user);
    }
    return snap;
}

} // namespace ccdyn
