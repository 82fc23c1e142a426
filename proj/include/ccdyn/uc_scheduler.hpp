#pragma once

#include <algorithm>
#include <vector>

#include "cc_elevation.hpp"
#include "rational.hpp"
#include "system_model.hpp"

namespace ccdyn {

struct UcStream {
    int user = 0;
    int packet = 0;
    int subpacket = 0; // 0-based
};

struct UcTransmission {
    std::vector<UcStream> streams;
};

struct UcResult {
    std::vector<UcTransmission> schedule;
    long long J_U = 0;
    long long T_U = 0;
};

/// Greedy unicast delivery of everything owed to the excluded users.
///
/// Every excluded user starts with (P - t_bar) * rho missing subpackets.
/// Each round the users are sorted by remaining backlog (ties by id) and
/// the first min(alpha, remaining) get one subpacket each.  Subpackets are
/// handed out in packet order, next-unused index first, optionally into
/// the shared delivery ledger.
inline UcResult run_uc_step(const ServingPlan& plan, const PlacementMatrix& V,
                            const SystemParams& sp, const DerivedParams& dp,
                            DeliveryLedger* ledger = nullptr) {
    struct Item {
        int user;
        int profile;
        long long backlog;
        long long delivered = 0;
    };

    const long long per_user = static_cast<long long>(sp.P - sp.t_bar) * dp.rho;
    std::vector<Item> items;
    for (int p = 0; p < static_cast<int>(plan.excluded.size()); ++p)
        for (int u : plan.excluded[p])
            items.push_back({u, p, per_user});
    std::sort(items.begin(), items.end(),
              [](const Item& a, const Item& b) { return a.user < b.user; });

    std::vector<std::vector<int>> missing(V.P());
    for (int p = 0; p < V.P(); ++p)
        missing[p] = missing_packets(V, p);

    UcResult res;
    while (true) {
        std::vector<Item*> active;
        for (auto& it : items)
            if (it.backlog > 0)
                active.push_back(&it);
        if (active.empty())
            break;
        std::sort(active.begin(), active.end(), [](const Item* a, const Item* b) {
            if (a->backlog != b->backlog)
                return a->backlog > b->backlog;
            return a->user < b->user;
        });
        const size_t width = std::min<size_t>(sp.alpha, active.size());

        UcTransmission tx;
        for (size_t i = 0; i < width; ++i) {
            Item& it = *active[i];
            const int packet = missing[it.profile][it.delivered / dp.rho];
            const int sub = static_cast<int>(it.delivered % dp.rho);
            if (ledger)
                ledger->claim(it.user, packet);
            tx.streams.push_back({it.user, packet, sub});
            ++it.delivered;
            --it.backlog;
            ++res.J_U;
        }
        res.schedule.push_back(std::move(tx));
        ++res.T_U;
    }
    return res;
}

/// Exact unicast-only DoF, J_U / T_U.
inline Rational uc_dof(long long J_U, long long T_U) {
    if (T_U < 1)
        throw std::domain_error("uc_dof undefined without UC transmissions");
    return Rational(J_U, T_U);
}

inline Rational uc_dof(const UcResult& res) { return uc_dof(res.J_U, res.T_U); }

} // namespace ccdyn
