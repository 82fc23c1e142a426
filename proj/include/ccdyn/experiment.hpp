#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "dof_analytics.hpp"
#include "system_model.hpp"

namespace ccdyn {

/// A profile-length vector together with its standard deviation,
/// sigma^2 = (1/P) * sum_p (eta_p - eta_avg)^2.
struct LengthDistribution {
    std::vector<int> lengths;
    Rational sigma_sq;
    double sigma = 0.0;
};

inline Rational sigma_sq_of(const std::vector<int>& lengths) {
    const long long P = static_cast<long long>(lengths.size());
    long long K = 0, sq = 0;
    for (int x : lengths) {
        K += x;
        sq += static_cast<long long>(x) * x;
    }
    // (1/P) sum (eta_p - K/P)^2 = (P * sum eta_p^2 - K^2) / P^2
    return Rational(P * sq - K * K, P * P);
}

inline double sigma_of(const std::vector<int>& lengths) {
    return std::sqrt(to_double(sigma_sq_of(lengths)));
}

inline LengthDistribution make_distribution(std::vector<int> lengths) {
    LengthDistribution d;
    d.sigma_sq = sigma_sq_of(lengths);
    d.sigma = std::sqrt(to_double(d.sigma_sq));
    d.lengths = std::move(lengths);
    return d;
}

namespace detail {

inline void compositions_rec(int remaining, int parts, int cap, std::vector<int>& cur,
                             std::vector<std::vector<int>>& out) {
    if (parts == 1) {
        if (remaining <= cap) {
            cur.push_back(remaining);
            out.push_back(cur);
            cur.pop_back();
        }
        return;
    }
    for (int x = std::min(remaining, cap); x * parts >= remaining; --x) {
        cur.push_back(x);
        compositions_rec(remaining - x, parts - 1, x, cur, out);
        cur.pop_back();
    }
}

} // namespace detail

/// All non-increasing integer compositions of K into P parts.
inline std::vector<std::vector<int>> nonincreasing_compositions(int K, int P) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    detail::compositions_rec(K, P, K, cur, out);
    return out;
}

/// Enumerates every non-increasing length vector of K users over P profiles
/// whose sigma lies within tolerance of the target.
inline std::vector<LengthDistribution>
generate_lengths(int K, int P, double sigma_target, double tolerance) {
    if (sigma_target < 0 || tolerance < 0)
        throw std::invalid_argument("sigma target and tolerance must be >= 0");
    std::vector<LengthDistribution> out;
    for (auto& c : nonincreasing_compositions(K, P)) {
        auto d = make_distribution(std::move(c));
        if (std::abs(d.sigma - sigma_target) <= tolerance)
            out.push_back(std::move(d));
    }
    if (out.empty())
        throw std::invalid_argument("no length distribution matches sigma=" +
                                    std::to_string(sigma_target) + " within tolerance");
    return out;
}

/// Seeded random subset of the feasible set (all of it if count is larger).
inline std::vector<LengthDistribution>
sample_lengths(int K, int P, double sigma_target, double tolerance, int count,
               std::mt19937_64& rng) {
    auto all = generate_lengths(K, P, sigma_target, tolerance);
    if (count <= 0 || count >= static_cast<int>(all.size()))
        return all;
    std::shuffle(all.begin(), all.end(), rng);
    all.resize(count);
    std::sort(all.begin(), all.end(), [](const LengthDistribution& a,
                                         const LengthDistribution& b) {
        return a.lengths < b.lengths;
    });
    return all;
}

struct EtaSweepRow {
    int eta_hat = 0;
    double eta_ratio = 0.0;
    Rational dof;
    Rational dof_norm;
    bool verified = false;
};

/// DoF over eta_hat in {0 .. max eta_p}; verified rows went through full
/// schedule counting, the rest carry the closed form.
inline std::vector<EtaSweepRow> sweep_eta(const std::vector<int>& lengths,
                                          const SystemParams& sp) {
    const auto snap = NetworkSnapshot::from_lengths(sp.P, lengths);
    const int max_len = *std::max_element(lengths.begin(), lengths.end());

    std::vector<EtaSweepRow> rows;
    Rational dof_max;
    for (int eta = 0; eta <= max_len; ++eta) {
        auto rep = verify_against_schedule(snap, eta, sp);
        EtaSweepRow row;
        row.eta_hat = eta;
        row.eta_ratio = static_cast<double>(eta) / max_len;
        row.dof = rep.verified ? rep.dof_counted : rep.dof_closed_form;
        row.verified = rep.verified;
        if (rows.empty() || row.dof > dof_max)
            dof_max = row.dof;
        rows.push_back(std::move(row));
    }
    for (auto& row : rows)
        row.dof_norm = row.dof / dof_max;
    return rows;
}

struct SigmaSweepRow {
    double sigma = 0.0;
    Rational dof_M;   // best DoF over eta_hat for this distribution
    Rational dof_opt; // uniform benchmark K*gamma + alpha
    Rational ratio;
    Rational uc_only_ratio;
};

/// One row per sampled distribution per sigma target.
inline std::vector<SigmaSweepRow>
sweep_sigma(int K, const SystemParams& sp, const std::vector<double>& sigma_targets,
            double tolerance, int samples_per_sigma, std::uint64_t seed) {
    const Rational dof_opt = Rational(K) * sp.gamma() + Rational(sp.alpha);
    std::mt19937_64 rng(seed);

    std::vector<SigmaSweepRow> rows;
    for (double target : sigma_targets) {
        auto dists = sample_lengths(K, sp.P, target, tolerance, samples_per_sigma, rng);
        for (const auto& d : dists) {
            SigmaSweepRow row;
            row.sigma = d.sigma;
            row.dof_M = optimize_eta_hat(d.lengths, sp).dof_max;
            row.dof_opt = dof_opt;
            row.ratio = row.dof_M / dof_opt;
            row.uc_only_ratio = closed_form_dof(d.lengths, 0, sp) / dof_opt;
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

struct DynamicsRow {
    int interval = 0;
    int K = 0;
    double sigma = 0.0;
    int eta_hat = 0;
    Rational dof;
    bool verified = false;
};

/// Trace-driven churn simulation.  Interval 1 is the initial snapshot; one
/// further interval per distinct event time.  eta_policy: nullopt means
/// line-search per interval, otherwise the fixed value is used.
inline std::vector<DynamicsRow>
simulate_dynamics(NetworkSnapshot snap, const std::vector<ChurnEvent>& trace,
                  const SystemParams& sp, std::optional<int> fixed_eta,
                  AssignPolicy& policy) {
    std::vector<DynamicsRow> rows;
    auto emit = [&](int interval) {
        DynamicsRow row;
        row.interval = interval;
        row.K = snap.K();
        row.sigma = sigma_of(snap.lengths);
        if (snap.K() == 0) {
            row.eta_hat = 0;
            rows.push_back(row);
            return;
        }
        row.eta_hat = fixed_eta ? *fixed_eta
                                : optimize_eta_hat(snap.lengths, sp).best_eta_hat;
        auto rep = verify_against_schedule(snap, row.eta_hat, sp);
        row.dof = rep.verified ? rep.dof_counted : rep.dof_closed_form;
        row.verified = rep.verified;
        rows.push_back(row);
    };

    emit(1);
    size_t i = 0;
    while (i < trace.size()) {
        const int t = trace[i].time;
        std::vector<ChurnEvent> batch;
        while (i < trace.size() && trace[i].time == t)
            batch.push_back(trace[i++]);
        snap = apply_churn(std::move(snap), batch, policy);
        emit(t);
    }
    return rows;
}

// ---- CSV rendering (UTF-8, LF, header line, 12 significant digits) ----

inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

inline std::string to_csv(const std::vector<EtaSweepRow>& rows) {
    std::string out = "eta_hat,eta_ratio,dof,dof_norm,verified\n";
    for (const auto& r : rows)
        out += std::to_string(r.eta_hat) + "," + format_double(r.eta_ratio) + "," +
               to_decimal_string(r.dof) + "," + to_decimal_string(r.dof_norm) + "," +
               (r.verified ? "true" : "false") + "\n";
    return out;
}

inline std::string to_csv(const std::vector<SigmaSweepRow>& rows) {
    std::string out = "sigma,dof_M,dof_opt,ratio,uc_only_ratio\n";
    for (const auto& r : rows)
        out += format_double(r.sigma) + "," + to_decimal_string(r.dof_M) + "," +
               to_decimal_string(r.dof_opt) + "," + to_decimal_string(r.ratio) + "," +
               to_decimal_string(r.uc_only_ratio) + "\n";
    return out;
}

inline std::string to_csv(const std::vector<DynamicsRow>& rows) {
    std::string out = "interval,K,sigma,eta_hat,dof,verified\n";
    for (const auto& r : rows)
        out += std::to_string(r.interval) + "," + std::to_string(r.K) + "," +
               format_double(r.sigma) + "," + std::to_string(r.eta_hat) + "," +
               to_decimal_string(r.dof) + "," + (r.verified ? "true" : "false") + "\n";
    return out;
}

} // namespace ccdyn
