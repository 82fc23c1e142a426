#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "system_model.hpp"
#include "virtual_scheduler.hpp"

namespace ccdyn {

enum class ExclusionRule { HighestIds, Seeded };

/// Which real users take part in the CC step.  Each profile gets exactly
/// eta_hat slots: its served users (ascending id) followed by phantoms.
struct ServingPlan {
    int eta_hat = 0;
    std::vector<std::vector<int>> served;   // per profile, ascending user ids
    std::vector<int> phantoms;              // per profile
    std::vector<std::vector<int>> excluded; // per profile, ascending user ids
    long long K_M = 0;
    long long K_U = 0;

    std::vector<int> excluded_users() const {
        std::vector<int> out;
        for (const auto& e : excluded)
            out.insert(out.end(), e.begin(), e.end());
        std::sort(out.begin(), out.end());
        return out;
    }
};

inline ServingPlan make_serving_plan(const NetworkSnapshot& snap, int eta_hat,
                                     ExclusionRule rule = ExclusionRule::HighestIds,
                                     std::uint64_t seed = 0) {
    if (eta_hat < 0)
        throw std::invalid_argument("eta_hat must be >= 0");
    ServingPlan plan;
    plan.eta_hat = eta_hat;
    plan.served.resize(snap.P);
    plan.excluded.resize(snap.P);
    plan.phantoms.assign(snap.P, 0);

    std::vector<std::vector<int>> users(snap.P);
    for (const auto& [id, p] : snap.profile_of)
        users[p].push_back(id); // map iteration gives ascending ids

    std::mt19937_64 rng(seed);
    for (int p = 0; p < snap.P; ++p) {
        auto& pool = users[p];
        const int eta_p = static_cast<int>(pool.size());
        if (eta_p > eta_hat) {
            if (rule == ExclusionRule::Seeded)
                std::shuffle(pool.begin(), pool.end(), rng);
            plan.excluded[p].assign(pool.begin() + eta_hat, pool.end());
            pool.resize(eta_hat);
            std::sort(pool.begin(), pool.end());
            std::sort(plan.excluded[p].begin(), plan.excluded[p].end());
        } else {
            plan.phantoms[p] = eta_hat - eta_p;
        }
        plan.served[p] = pool;
        plan.K_M += std::min(eta_hat, eta_p);
        plan.K_U += std::max(eta_p - eta_hat, 0);
    }
    return plan;
}

/// Identity of one CC slot; slots with index >= eta_p are phantoms.
struct SlotId {
    int profile = 0;
    int slot = 0;
    bool operator==(const SlotId& o) const { return profile == o.profile && slot == o.slot; }
};

/// One stream of a real transmission.  Phantom targets exist only in the
/// pre-removal view; suppression lists keep real users and phantoms apart
/// so phantom removal is a simple drop.
struct Stream {
    int user = 0; // valid iff !phantom
    bool phantom = false;
    SlotId slot;
    int packet = 0;
    int subpacket = 0; // 0-based
    std::vector<int> supp_users;
    std::vector<SlotId> supp_phantoms;

    size_t supp_size() const { return supp_users.size() + supp_phantoms.size(); }
};

struct ElevatedTransmission {
    int round = 0;
    int tx = 0;
    int delta = 0; // 0-based
    std::vector<Stream> raw;     // before phantom removal (rho streams)
    std::vector<Stream> streams; // surviving streams, phantom-free
};

/// Tracks which subpacket indices each (user, packet) pair has received.
/// claim() hands out the next unused index, so duplicates cannot occur.
class DeliveryLedger {
public:
    int claim(int user, int packet) {
        auto& v = delivered_[{user, packet}];
        v.push_back(static_cast<int>(v.size()));
        return v.back();
    }

    const std::vector<int>& delivered(int user, int packet) const {
        static const std::vector<int> empty;
        auto it = delivered_.find({user, packet});
        return it == delivered_.end() ? empty : it->second;
    }

    long long total() const {
        long long n = 0;
        for (const auto& [k, v] : delivered_)
            n += static_cast<long long>(v.size());
        return n;
    }

    const std::map<std::pair<int, int>, std::vector<int>>& entries() const { return delivered_; }

private:
    std::map<std::pair<int, int>, std::vector<int>> delivered_;
};

/// Expands one virtual transmission into eta_hat real transmission vectors.
///
/// Per delta, every non-last index-set position contributes all eta_hat
/// slots of its profile; the last position contributes the b slots with
/// (delta + slot) mod eta_hat < b, so each of its slots shows up in exactly
/// b of the eta_hat vectors.  Suppression sets hold every co-served slot
/// whose profile does not cache the stream's packet, except the target.
inline std::vector<ElevatedTransmission>
elevate(const VirtualTransmission& vt, const ServingPlan& plan, const PlacementMatrix& V,
        const SystemParams& sp, const DerivedParams& dp, DeliveryLedger& ledger,
        DeliveryLedger& phantom_ledger) {
    if (dp.eta_hat < 1)
        throw std::invalid_argument("elevation needs eta_hat >= 1");
    const size_t L = vt.set.members.size();
    std::vector<ElevatedTransmission> out;
    out.reserve(dp.eta_hat);

    for (int delta = 0; delta < dp.eta_hat; ++delta) {
        ElevatedTransmission et;
        et.round = vt.set.round;
        et.tx = vt.set.tx;
        et.delta = delta;

        for (size_t pos = 0; pos < L; ++pos) {
            const int profile = vt.set.members[pos];
            const int packet = vt.streams[pos].packet;
            const bool last = (pos + 1 == L);
            for (int slot = 0; slot < dp.eta_hat; ++slot) {
                if (last && (delta + slot) % dp.eta_hat >= dp.b)
                    continue;
                Stream s;
                s.slot = {profile, slot};
                s.packet = packet;
                if (slot < static_cast<int>(plan.served[profile].size())) {
                    s.user = plan.served[profile][slot];
                    s.subpacket = ledger.claim(s.user, packet);
                } else {
                    s.phantom = true;
                    // phantoms are keyed by a synthetic negative id
                    s.subpacket =
                        phantom_ledger.claim(-(profile * dp.eta_hat + slot) - 1, packet);
                }
                et.raw.push_back(std::move(s));
            }
        }

        for (auto& s : et.raw) {
            for (const auto& o : et.raw) {
                if (o.slot == s.slot)
                    continue;
                if (V.at(s.packet, o.slot.profile))
                    continue;
                if (o.phantom)
                    s.supp_phantoms.push_back(o.slot);
                else
                    s.supp_users.push_back(o.user);
            }
            std::sort(s.supp_users.begin(), s.supp_users.end());
            if (s.supp_size() > static_cast<size_t>(sp.alpha - 1))
                throw SuppressionBudgetError(
                    "stream needs " + std::to_string(s.supp_size()) +
                    " nulling directions but only " + std::to_string(sp.alpha - 1) +
                    " are available");
        }

        for (const auto& s : et.raw) {
            if (s.phantom)
                continue;
            Stream kept = s;
            kept.supp_phantoms.clear();
            et.streams.push_back(std::move(kept));
        }
        out.push_back(std::move(et));
    }
    return out;
}

struct CcResult {
    ServingPlan plan;
    std::vector<ElevatedTransmission> schedule;
    DeliveryLedger ledger;
    long long J_M = 0; // surviving streams
    long long T_M = 0; // transmissions
};

/// Runs the whole CC delivery step for one snapshot.
inline CcResult run_cc_step(const NetworkSnapshot& snap, int eta_hat, const SystemParams& sp,
                            ExclusionRule rule = ExclusionRule::HighestIds,
                            std::uint64_t seed = 0) {
    if (eta_hat < 1)
        throw std::invalid_argument("the CC step needs eta_hat >= 1");
    const auto dp = DerivedParams::make(sp, eta_hat);
    const auto V = build_placement_matrix(sp.P, sp.t_bar);
    const auto vts = build_virtual_schedule(sp, dp);

    CcResult res;
    res.plan = make_serving_plan(snap, eta_hat, rule, seed);
    DeliveryLedger phantom_ledger;
    for (const auto& vt : vts) {
        auto batch = elevate(vt, res.plan, V, sp, dp, res.ledger, phantom_ledger);
        for (auto& et : batch) {
            res.J_M += static_cast<long long>(et.streams.size());
            res.schedule.push_back(std::move(et));
        }
    }
    res.T_M = static_cast<long long>(res.schedule.size());
    return res;
}

/// True iff every surviving stream of every transmission is decodable by
/// its target: all co-scheduled interference is either cached or nulled.
inline bool check_real_decodability(const std::vector<ElevatedTransmission>& schedule,
                                    const NetworkSnapshot& snap, const PlacementMatrix& V) {
    for (const auto& et : schedule)
        for (const auto& s : et.streams) {
            const int profile = snap.profile_of.at(s.user);
            if (V.at(s.packet, profile))
                return false;
            for (const auto& o : et.streams) {
                if (o.user == s.user)
                    continue;
                bool cached = V.at(o.packet, profile) != 0;
                bool nulled = std::binary_search(o.supp_users.begin(), o.supp_users.end(), s.user);
                if (!cached && !nulled)
                    return false;
            }
        }
    return true;
}

} // namespace ccdyn
