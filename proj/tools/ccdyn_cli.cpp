// Command-line harness: schedule dumps, DoF reports, eta/sigma sweeps,
// churn simulation and a built-in selftest.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <ccdyn/experiment.hpp>
#include <ccdyn/io.hpp>

using namespace ccdyn;
using nlohmann::json;

namespace {

struct Options {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_path;
    std::string format = "text";
};

json load_config(const Options& opt) {
    if (opt.config_path.empty())
        throw std::invalid_argument("--config is required for this subcommand");
    std::ifstream in(opt.config_path);
    if (!in)
        throw std::invalid_argument("cannot open config file: " + opt.config_path);
    json j;
    in >> j;
    return j;
}

SystemParams params_from(const json& cfg) {
    return SystemParams::make(cfg.at("alpha").get<int>(), cfg.at("P").get<int>(),
                              cfg.at("t_bar").get<int>());
}

std::uint64_t effective_seed(const json& cfg, const Options& opt) {
    if (opt.seed)
        return *opt.seed;
    return cfg.value("seed", std::uint64_t{0});
}

// Either an explicit "lengths" array, or one seeded sample drawn from the
// (K, sigma_target) population.
std::vector<int> resolve_lengths(const json& cfg, const SystemParams& sp,
                                 const Options& opt) {
    const bool has_lengths = cfg.contains("lengths");
    const bool has_sigma = cfg.contains("K") && cfg.contains("sigma_target");
    if (has_lengths == has_sigma)
        throw std::invalid_argument(
            "config needs exactly one of \"lengths\" or (\"K\", \"sigma_target\")");
    if (has_lengths) {
        auto lengths = cfg.at("lengths").get<std::vector<int>>();
        if (static_cast<int>(lengths.size()) != sp.P)
            throw std::invalid_argument("\"lengths\" must have P entries");
        return lengths;
    }
    std::mt19937_64 rng(effective_seed(cfg, opt));
    auto dists = sample_lengths(cfg.at("K").get<int>(), sp.P,
                                cfg.at("sigma_target").get<double>(),
                                cfg.value("tolerance", 0.5), 1, rng);
    return dists.front().lengths;
}

// eta_hat: integer, or absent / "optimize" for the line search.
int resolve_eta_hat(const json& cfg, const std::vector<int>& lengths,
                    const SystemParams& sp) {
    if (cfg.contains("eta_hat") && cfg.at("eta_hat").is_number_integer())
        return cfg.at("eta_hat").get<int>();
    return optimize_eta_hat(lengths, sp).best_eta_hat;
}

void emit(const Options& opt, const std::string& text) {
    if (opt.out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(opt.out_path, std::ios::binary);
    if (!out)
        throw std::invalid_argument("cannot open output file: " + opt.out_path);
    out << text;
}

int run_schedule(const Options& opt) {
    auto cfg = load_config(opt);
    auto sp = params_from(cfg);
    auto lengths = resolve_lengths(cfg, sp, opt);
    const int eta_hat = resolve_eta_hat(cfg, lengths, sp);
    if (opt.format != "text")
        throw std::invalid_argument("schedule supports --format text only");

    auto snap = NetworkSnapshot::from_lengths(sp.P, lengths);
    std::string out;
    if (eta_hat >= 1) {
        auto cc = run_cc_step(snap, eta_hat, sp);
        out += render_cc_schedule(cc.schedule, cc.plan, cfg.value("raw", false));
        auto uc = run_uc_step(cc.plan, build_placement_matrix(sp.P, sp.t_bar), sp,
                              DerivedParams::make(sp, eta_hat));
        out += render_uc_schedule(uc.schedule);
    } else {
        auto plan = make_serving_plan(snap, 0);
        auto uc = run_uc_step(plan, build_placement_matrix(sp.P, sp.t_bar), sp,
                              DerivedParams::make(sp, 0));
        out += render_uc_schedule(uc.schedule);
    }
    emit(opt, out);
    return 0;
}

int run_dof(const Options& opt) {
    auto cfg = load_config(opt);
    auto sp = params_from(cfg);
    auto lengths = resolve_lengths(cfg, sp, opt);
    const int eta_hat = resolve_eta_hat(cfg, lengths, sp);

    auto rep = verify_against_schedule(NetworkSnapshot::from_lengths(sp.P, lengths),
                                       eta_hat, sp);
    if (opt.format == "csv") {
        std::string out =
            "eta_hat,K_M,K_U,J_M,T_M,J_U,T_U,dof_counted,dof_closed_form,verified\n";
        out += std::to_string(rep.eta_hat) + "," + std::to_string(rep.K_M) + "," +
               std::to_string(rep.K_U) + "," + std::to_string(rep.J_M) + "," +
               std::to_string(rep.T_M) + "," + std::to_string(rep.J_U) + "," +
               std::to_string(rep.T_U) + "," + to_decimal_string(rep.dof_counted) + "," +
               to_decimal_string(rep.dof_closed_form) + "," +
               (rep.verified ? "true" : "false") + "\n";
        emit(opt, out);
    } else {
        emit(opt, render_dof_report(rep));
    }
    return 0;
}

int run_sweep_eta(const Options& opt) {
    auto cfg = load_config(opt);
    auto sp = params_from(cfg);
    auto rows = sweep_eta(resolve_lengths(cfg, sp, opt), sp);
    if (opt.format == "csv") {
        emit(opt, to_csv(rows));
        return 0;
    }
    std::string out;
    for (const auto& r : rows)
        out += "eta_hat=" + std::to_string(r.eta_hat) +
               " eta_ratio=" + format_double(r.eta_ratio) + " dof=" +
               to_fraction_string(r.dof) + " (" + to_decimal_string(r.dof) + ")" +
               " dof_norm=" + to_decimal_string(r.dof_norm) +
               (r.verified ? " verified" : " closed-form-only") + "\n";
    emit(opt, out);
    return 0;
}

int run_sweep_sigma(const Options& opt) {
    auto cfg = load_config(opt);
    auto sp = params_from(cfg);
    auto rows = sweep_sigma(cfg.at("K").get<int>(), sp,
                            cfg.at("sigma_targets").get<std::vector<double>>(),
                            cfg.value("tolerance", 0.5),
                            cfg.value("samples_per_sigma", 0), effective_seed(cfg, opt));
    if (opt.format == "csv") {
        emit(opt, to_csv(rows));
        return 0;
    }
    std::string out;
    for (const auto& r : rows)
        out += "sigma=" + format_double(r.sigma) + " dof_M=" + to_decimal_string(r.dof_M) +
               " dof_opt=" + to_decimal_string(r.dof_opt) +
               " ratio=" + to_decimal_string(r.ratio) +
               " uc_only_ratio=" + to_decimal_string(r.uc_only_ratio) + "\n";
    emit(opt, out);
    return 0;
}

ChurnEvent event_from(const json& j) {
    ChurnEvent ev;
    ev.time = j.at("time").get<int>();
    ev.user = j.at("user").get<int>();
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "join")
        ev.kind = ChurnEvent::Kind::Join;
    else if (kind == "leave")
        ev.kind = ChurnEvent::Kind::Leave;
    else
        throw std::invalid_argument("event kind must be \"join\" or \"leave\"");
    return ev;
}

int run_dynamics(const Options& opt) {
    auto cfg = load_config(opt);
    auto sp = params_from(cfg);
    auto snap = NetworkSnapshot::from_lengths(sp.P, resolve_lengths(cfg, sp, opt));

    std::vector<ChurnEvent> trace;
    for (const auto& j : cfg.value("trace", json::array()))
        trace.push_back(event_from(j));

    AssignPolicy policy(assign_mode_from_name(cfg.value("policy", "least-loaded")),
                        effective_seed(cfg, opt));
    std::optional<int> fixed_eta;
    if (cfg.contains("eta_hat") && cfg.at("eta_hat").is_number_integer())
        fixed_eta = cfg.at("eta_hat").get<int>();

    auto rows = simulate_dynamics(std::move(snap), trace, sp, fixed_eta, policy);
    if (opt.format == "csv") {
        emit(opt, to_csv(rows));
        return 0;
    }
    std::string out;
    for (const auto& r : rows)
        out += "interval=" + std::to_string(r.interval) + " K=" + std::to_string(r.K) +
               " sigma=" + format_double(r.sigma) +
               " eta_hat=" + std::to_string(r.eta_hat) +
               " dof=" + to_decimal_string(r.dof) +
               (r.verified ? " verified" : " closed-form-only") + "\n";
    emit(opt, out);
    return 0;
}

// Golden checks on the worked example network (P=3, t_bar=1, alpha=4,
// lengths (2,3,3)) and the uniform simulation setup.
int run_selftest(const Options& opt) {
    int failures = 0;
    auto check = [&](const std::string& name, bool ok) {
        std::cout << (ok ? "ok" : "FAIL") << " " << name << "\n";
        if (!ok)
            ++failures;
    };
    (void)opt;

    auto sp = SystemParams::make(4, 3, 1);
    auto snap = NetworkSnapshot::from_lengths(3, {2, 3, 3});

    auto sets = generate_index_sets(sp, 2);
    check("first index set is (1,2,3)",
          sets.front().members == std::vector<int>{0, 1, 2});

    auto cc3 = run_cc_step(snap, 3, sp);
    check("eta_hat=3 first transmission",
          render_cc_schedule({cc3.schedule.front()}, cc3.plan) ==
              "CC r=1 j=1 d=1: (1,2,1,{2,6}) (2,2,1,{1,6}) (3,1,1,{4,5,6}) "
              "(4,1,1,{3,5,6}) (5,1,1,{3,4,6}) (6,1,1,{3,4,5})\n");
    check("eta_hat=3 counts", cc3.T_M == 18 && cc3.J_M == 112);

    auto r2 = verify_against_schedule(snap, 2, sp);
    auto r3 = verify_against_schedule(snap, 3, sp);
    check("eta_hat=2 DoF = 4", r2.verified && r2.dof_counted == Rational(4));
    check("eta_hat=3 DoF = 56/9", r3.verified && r3.dof_counted == Rational(56, 9));

    auto sim = SystemParams::make(50, 4, 1);
    auto curve = optimize_eta_hat({25, 25, 25, 25}, sim);
    check("uniform setup peaks at 75 for eta_hat=25",
          curve.best_eta_hat == 25 && curve.dof_max == Rational(75));

    if (failures) {
        std::cout << failures << " selftest check(s) FAILED\n";
        return 1;
    }
    std::cout << "selftest passed\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"deterministic multi-antenna coded-caching delivery simulator"};
    app.require_subcommand(1);

    Options opt;
    std::uint64_t seed_arg = 0;
    bool seed_set = false;
    app.add_option("--config", opt.config_path, "path to a JSON scenario config")
        ->expected(1);
    auto* seed_opt = app.add_option("--seed", seed_arg, "RNG seed (overrides config)");
    app.add_option("--out", opt.out_path, "output file (default: stdout)");
    app.add_option("--format", opt.format, "output format")
        ->check(CLI::IsMember({"csv", "text"}));

    auto* schedule = app.add_subcommand("schedule", "dump the CC and UC schedules");
    auto* dof = app.add_subcommand("dof", "single DoF report");
    auto* sweep_eta_cmd = app.add_subcommand("sweep-eta", "DoF over eta_hat");
    auto* sweep_sigma_cmd = app.add_subcommand("sweep-sigma", "DoF ratio over sigma");
    auto* dynamics = app.add_subcommand("dynamics", "trace-driven churn simulation");
    auto* selftest = app.add_subcommand("selftest", "run built-in golden checks");
    for (auto* sub : {schedule, dof, sweep_eta_cmd, sweep_sigma_cmd, dynamics, selftest})
        sub->fallthrough();

    CLI11_PARSE(app, argc, argv);
    seed_set = seed_opt->count() > 0;
    if (seed_set)
        opt.seed = seed_arg;

    try {
        if (schedule->parsed())
            return run_schedule(opt);
        if (dof->parsed())
            return run_dof(opt);
        if (sweep_eta_cmd->parsed())
            return run_sweep_eta(opt);
        if (sweep_sigma_cmd->parsed())
            return run_sweep_sigma(opt);
        if (dynamics->parsed())
            return run_dynamics(opt);
        if (selftest->parsed())
            return run_selftest(opt);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    std::cerr << "error: no subcommand selected\n";
    return 1;
}
