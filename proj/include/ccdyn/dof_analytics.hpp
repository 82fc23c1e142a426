#pragma once

#include <numeric>
#include <vector>

#include "cc_elevation.hpp"
#include "rational.hpp"
#include "system_model.hpp"
#include "uc_scheduler.hpp"
#include "virtual_scheduler.hpp"

namespace ccdyn {

/// All delivery-phase counts for one configuration, with the DoF computed
/// both by counting the generated schedule and from the closed form.
/// verified == false means the schedule could not be realized (regime or
/// feasibility limits) and dof_counted just mirrors the closed form.
struct DofReport {
    int eta_hat = 0;
    long long K_M = 0, K_U = 0;
    long long J_M = 0, T_M = 0;
    long long J_U = 0, T_U = 0;
    Rational dof_counted;
    Rational dof_closed_form;
    bool verified = false;
};

inline long long sum_lengths(const std::vector<int>& lengths) {
    return std::accumulate(lengths.begin(), lengths.end(), 0LL);
}

/// Closed-form DoF per the three K_U cases; eta_hat = 0 is unicast-only.
inline Rational closed_form_dof(const std::vector<int>& lengths, int eta_hat,
                                const SystemParams& sp) {
    const auto dp = DerivedParams::make(sp, eta_hat);
    const long long K = sum_lengths(lengths);
    const long long Pt = sp.P - sp.t_bar; // = P - P*gamma, always integer

    if (eta_hat == 0) {
        if (K == 0)
            throw std::domain_error("unicast-only DoF undefined for an empty network");
        const long long J_U = K * Pt * dp.rho;
        const long long T_U = ceil_div(J_U, std::min<long long>(K, sp.alpha));
        return Rational(J_U, T_U);
    }

    long long K_M = 0, K_U = 0;
    for (int eta_p : lengths) {
        K_M += std::min(eta_p, eta_hat);
        K_U += std::max(eta_p - eta_hat, 0);
    }

    if (K_U == 0)
        return Rational(K_M) * sp.gamma() +
               Rational(K_M * sp.alpha, static_cast<long long>(sp.P) * eta_hat);

    const long long num = (K_M + K_U) * Pt * dp.rho;
    const long long T_M = static_cast<long long>(sp.P) * Pt * eta_hat;
    if (K_U < sp.alpha)
        return Rational(num, T_M + Pt * dp.rho);
    return Rational(num, T_M + ceil_div(K_U * Pt * dp.rho, sp.alpha));
}

/// Full-multicast DoF, K*gamma + alpha * eta_avg / eta_hat.
inline Rational remark_dof(long long K, const Rational& gamma, int alpha,
                           const Rational& eta_avg, int eta_hat) {
    if (eta_hat < 1)
        throw std::domain_error("remark_dof needs eta_hat >= 1");
    if (K < 1)
        throw std::domain_error("remark_dof needs K >= 1");
    if (Rational(eta_hat) < eta_avg)
        throw std::domain_error("remark_dof needs eta_hat >= eta_avg");
    return Rational(K) * gamma + Rational(alpha) * eta_avg / Rational(eta_hat);
}

inline Rational remark_dof(const std::vector<int>& lengths, const SystemParams& sp,
                           int eta_hat) {
    const long long K = sum_lengths(lengths);
    const int max_len = lengths.empty() ? 0 : *std::max_element(lengths.begin(), lengths.end());
    if (eta_hat < max_len)
        throw std::domain_error("full multicasting needs eta_hat >= max eta_p");
    return remark_dof(K, sp.gamma(), sp.alpha, Rational(K, sp.P), eta_hat);
}

/// Builds the actual CC + UC schedule, counts every quantity, evaluates the
/// closed form and asserts equality.  If the CC schedule is not realizable
/// the report carries the closed-form value only, flagged unverified.
inline DofReport verify_against_schedule(const NetworkSnapshot& snap, int eta_hat,
                                         const SystemParams& sp) {
    DofReport rep;
    rep.eta_hat = eta_hat;
    rep.dof_closed_form = closed_form_dof(snap.lengths, eta_hat, sp);

    const auto dp = DerivedParams::make(sp, eta_hat);
    const auto V = build_placement_matrix(sp.P, sp.t_bar);
    const auto plan = make_serving_plan(snap, eta_hat);
    rep.K_M = plan.K_M;
    rep.K_U = plan.K_U;

    bool schedulable = true;
    if (eta_hat >= 1) {
        try {
            auto cc = run_cc_step(snap, eta_hat, sp);
            rep.J_M = cc.J_M;
            rep.T_M = cc.T_M;
        } catch (const ScheduleError&) {
            schedulable = false;
        }
    }
    if (!schedulable) {
        rep.dof_counted = rep.dof_closed_form;
        rep.verified = false;
        return rep;
    }

    auto uc = run_uc_step(plan, V, sp, dp);
    rep.J_U = uc.J_U;
    rep.T_U = uc.T_U;
    if (rep.T_M + rep.T_U == 0)
        throw std::domain_error("DoF undefined: no transmissions at all");
    rep.dof_counted = Rational(rep.J_M + rep.J_U, rep.T_M + rep.T_U);
    rep.verified = true;
    if (rep.dof_counted != rep.dof_closed_form)
        throw std::logic_error("counted DoF " + to_fraction_string(rep.dof_counted) +
                               " disagrees with closed form " +
                               to_fraction_string(rep.dof_closed_form));
    return rep;
}

struct DofPoint {
    int eta_hat = 0;
    Rational dof;
    bool schedulable = false; // window construction valid (eta_hat = 0 counts)
};

struct DofCurve {
    std::vector<DofPoint> points;
    int best_eta_hat = 0; // smallest maximizer
    Rational dof_max;
};

/// Exhaustive line search over eta_hat in {0 .. max eta_p}.
inline DofCurve optimize_eta_hat(const std::vector<int>& lengths, const SystemParams& sp) {
    if (sum_lengths(lengths) < 1)
        throw std::invalid_argument("optimize_eta_hat needs at least one user");
    const int max_len = *std::max_element(lengths.begin(), lengths.end());

    DofCurve curve;
    for (int eta = 0; eta <= max_len; ++eta) {
        DofPoint pt;
        pt.eta_hat = eta;
        pt.dof = closed_form_dof(lengths, eta, sp);
        pt.schedulable =
            eta == 0 || sp.t_bar + DerivedParams::make(sp, eta).alpha_bar <= sp.P;
        curve.points.push_back(pt);
    }
    curve.best_eta_hat = curve.points.front().eta_hat;
    curve.dof_max = curve.points.front().dof;
    for (const auto& pt : curve.points)
        if (pt.dof > curve.dof_max) {
            curve.dof_max = pt.dof;
            curve.best_eta_hat = pt.eta_hat;
        }
    return curve;
}

} // namespace ccdyn
