#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "errors.hpp"
#include "system_model.hpp"

namespace ccdyn {

/// Ordered profile indices served by one virtual transmission.
/// The first t_bar members are consecutive profiles starting at the round
/// index; round r + 1 is the elementwise circular increment of round r.
struct VirtualIndexSet {
    int round = 0; // r, 0-based
    int tx = 0;    // j, 0-based
    std::vector<int> members;
};

/// One data stream of a virtual transmission.  The suppression set lists
/// the member profiles at which this stream must be nulled.
struct VirtualStream {
    int target = 0;
    int packet = 0;
    std::vector<int> suppressed;
};

/// Streams are kept in index-set position order (targets == members).
struct VirtualTransmission {
    VirtualIndexSet set;
    std::vector<VirtualStream> streams;
};

/// Builds the P * (P - t_bar) index sets.  The base round uses the window
/// rule [0..t_bar-1 ; ((i + j) mod (P - t_bar)) + t_bar], every other round
/// is a circular increment of the previous one.
inline std::vector<VirtualIndexSet> generate_index_sets(const SystemParams& sp, int alpha_bar) {
    if (alpha_bar < 1)
        throw std::invalid_argument("alpha_bar must be >= 1");
    const int P = sp.P;
    const int t = sp.t_bar;
    if (t + alpha_bar > P)
        throw UnsupportedRegimeError(
            "t_bar + alpha_bar > P: index-set window would contain duplicates");

    std::vector<std::vector<int>> base;
    for (int j = 0; j < P - t; ++j) {
        std::vector<int> m;
        for (int i = 0; i < t; ++i)
            m.push_back(i);
        for (int i = 0; i < alpha_bar; ++i)
            m.push_back((i + j) % (P - t) + t);
        base.push_back(std::move(m));
    }

    std::vector<VirtualIndexSet> out;
    out.reserve(static_cast<size_t>(P) * (P - t));
    for (int r = 0; r < P; ++r)
        for (int j = 0; j < P - t; ++j) {
            VirtualIndexSet s{r, j, base[j]};
            for (int& x : s.members)
                x = (x + r) % P;
            out.push_back(std::move(s));
        }
    return out;
}

/// count[p][m] = how often profile p appears as the m-th member.
inline std::vector<std::vector<long long>>
lemma1_census(const std::vector<VirtualIndexSet>& sets, int P) {
    if (sets.empty())
        return {};
    const size_t L = sets.front().members.size();
    std::vector<std::vector<long long>> count(P, std::vector<long long>(L, 0));
    for (const auto& s : sets)
        for (size_t m = 0; m < s.members.size(); ++m)
            ++count[s.members[m]][m];
    return count;
}

/// Closed-form packet assignment for t_bar = 1: every receiver gets the
/// packet cached by the holder (first member) and is nulled at the other
/// receivers; the holder gets the second member's packet, nulled at all
/// receivers but the first.
inline VirtualTransmission assign_packets(const VirtualIndexSet& set, const SystemParams& sp) {
    if (sp.t_bar != 1)
        throw UnsupportedRegimeError(
            "closed-form packet assignment requires t_bar = 1; "
            "use build_virtual_schedule for the constraint-search fallback");
    if (set.members.size() < 2)
        throw std::invalid_argument("index set must have at least two members");

    const int holder = set.members[0];
    const size_t L = set.members.size();
    VirtualTransmission vt{set, {}};

    VirtualStream hs;
    hs.target = holder;
    hs.packet = set.members[1];
    for (size_t i = 2; i < L; ++i)
        hs.suppressed.push_back(set.members[i]);
    vt.streams.push_back(std::move(hs));

    for (size_t i = 1; i < L; ++i) {
        VirtualStream rs;
        rs.target = set.members[i];
        rs.packet = holder;
        for (size_t l = 1; l < L; ++l)
            if (l != i)
                rs.suppressed.push_back(set.members[l]);
        vt.streams.push_back(std::move(rs));
    }
    return vt;
}

/// Checks the per-stream decodability rule of the virtual network.
inline bool check_virtual_decodability(const PlacementMatrix& V,
                                       const VirtualTransmission& vt,
                                       int alpha_bar) {
    for (const auto& s : vt.streams) {
        if (V.at(s.packet, s.target))
            return false; // target must not already cache its packet
        if (static_cast<int>(s.suppressed.size()) > alpha_bar - 1)
            return false;
        for (int m : vt.set.members) {
            if (m == s.target)
                continue;
            bool cached = V.at(s.packet, m) != 0;
            bool nulled =
                std::find(s.suppressed.begin(), s.suppressed.end(), m) != s.suppressed.end();
            if (!cached && !nulled)
                return false;
        }
    }
    return true;
}

namespace detail {

// Constraint search for t_bar > 1.  Packets are chosen for the base round
// only; the other rounds follow by circular shift.  Writing a chosen packet
// as target + d (mod P), the constraints are:
//   1. d in {1 .. P - t_bar}  (packet missing at the target),
//   2. per index-set position, the d values across the base-round sets form
//      a permutation of {1 .. P - t_bar}  (this makes every served user
//      collect exactly rho subpackets of each missing packet),
//   3. the members that do not cache the packet, minus the target, fit in
//      the virtual suppression budget alpha_bar - 1,
//   4. the elevated suppression set fits in the real budget alpha - 1:
//      eta_hat per non-caching non-last member plus b for the last one,
//      minus the target slot, must not exceed alpha - 1.
struct PacketSearch {
    const SystemParams& sp;
    const DerivedParams& dp;
    const PlacementMatrix& V;
    const std::vector<VirtualIndexSet>& base_sets; // round 0 only
    size_t L;                                      // members per set
    std::vector<std::vector<int>> chosen_d;        // [set][pos]
    std::vector<std::vector<bool>> used_d;         // [pos][d-1]

    bool feasible(const std::vector<int>& members, size_t pos, int d) const {
        const int target = members[pos];
        const int packet = (target + d) % sp.P;
        int nulled_virtual = 0;  // non-caching members other than the target
        long long supp_slots = 0; // real slots to null, target's slot excluded
        for (size_t i = 0; i < L; ++i) {
            const int m = members[i];
            if (V.at(packet, m))
                continue;
            const bool last = (i + 1 == L);
            supp_slots += last ? dp.b : dp.eta_hat;
            if (m != target)
                ++nulled_virtual;
        }
        if (nulled_virtual > dp.alpha_bar - 1)
            return false;
        if (supp_slots - 1 > sp.alpha - 1)
            return false;
        return true;
    }

    bool solve(size_t cell) {
        const size_t n_sets = base_sets.size();
        if (cell == n_sets * L)
            return true;
        const size_t j = cell / L;
        const size_t pos = cell % L;
        for (int d = 1; d <= sp.P - sp.t_bar; ++d) {
            if (used_d[pos][d - 1])
                continue;
            if (!feasible(base_sets[j].members, pos, d))
                continue;
            used_d[pos][d - 1] = true;
            chosen_d[j][pos] = d;
            if (solve(cell + 1))
                return true;
            used_d[pos][d - 1] = false;
        }
        return false;
    }
};

inline VirtualTransmission materialize(const VirtualIndexSet& set,
                                       const std::vector<int>& d_per_pos,
                                       const PlacementMatrix& V) {
    VirtualTransmission vt{set, {}};
    for (size_t pos = 0; pos < set.members.size(); ++pos) {
        VirtualStream s;
        s.target = set.members[pos];
        s.packet = (s.target + d_per_pos[pos]) % V.P();
        for (int m : set.members)
            if (m != s.target && !V.at(s.packet, m))
                s.suppressed.push_back(m);
        vt.streams.push_back(std::move(s));
    }
    return vt;
}

} // namespace detail

/// Full virtual schedule: index sets plus packet/suppression assignment.
/// t_bar = 1 uses the closed-form rule; t_bar > 1 runs the base-round
/// constraint search and shifts it to the other rounds.
inline std::vector<VirtualTransmission>
build_virtual_schedule(const SystemParams& sp, const DerivedParams& dp) {
    if (dp.uc_only())
        throw std::invalid_argument("eta_hat = 0 has no CC schedule");
    auto sets = generate_index_sets(sp, dp.alpha_bar);

    std::vector<VirtualTransmission> out;
    out.reserve(sets.size());

    if (sp.t_bar == 1) {
        for (const auto& s : sets)
            out.push_back(assign_packets(s, sp));
        return out;
    }

    const size_t per_round = static_cast<size_t>(sp.P - sp.t_bar);
    std::vector<VirtualIndexSet> base(sets.begin(), sets.begin() + per_round);
    const size_t L = base.front().members.size();

    detail::PacketSearch search{
        sp, dp, build_placement_matrix(sp.P, sp.t_bar), base, L,
        std::vector<std::vector<int>>(per_round, std::vector<int>(L, 0)),
        std::vector<std::vector<bool>>(L, std::vector<bool>(per_round, false))};
    if (!search.solve(0))
        throw InfeasibleScheduleError(
            "no packet assignment satisfies decodability and completeness for "
            "P=" + std::to_string(sp.P) + " t_bar=" + std::to_string(sp.t_bar) +
            " alpha=" + std::to_string(sp.alpha) +
            " eta_hat=" + std::to_string(dp.eta_hat));

    auto V = build_placement_matrix(sp.P, sp.t_bar);
    for (const auto& s : sets)
        out.push_back(detail::materialize(s, search.chosen_d[s.tx], V));
    return out;
}

/// Debug dump in 1-based labels, one line per index set.
inline std::string render_index_sets(const std::vector<VirtualIndexSet>& sets) {
    std::string out;
    for (const auto& s : sets) {
        out += "r=" + std::to_string(s.round + 1) + " j=" + std::to_string(s.tx + 1) + ": (";
        for (size_t i = 0; i < s.members.size(); ++i) {
            if (i)
                out += ",";
            out += std::to_string(s.members[i] + 1);
        }
        out += ")\n";
    }
    return out;
}

} // namespace ccdyn
