// Command-line front end: `fhc run --config FILE` for the full pipeline and
// one subcommand per module for poking at the pieces.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "fhc/experiment.hpp"

namespace {

using namespace fhc;

constexpr int kExitUsage = 1;
constexpr int kExitInvariant = 2;
constexpr int kExitCertification = 3;

// Operator flags shared by certify / construct / orbit. Flags override the
// values loaded from --config.
struct OperatorFlags {
    std::string config;
    std::string kind, w, space, twist;
    double p = 0, a = 0, b = 0, lambda = 0;
    int k = 0, power = 0, targets = 0;
    long long horizon = 0, cap = 0;
    std::vector<std::pair<CLI::Option*, std::function<void(ExperimentConfig&)>>> set;

    void add(CLI::App* app, bool with_horizon) {
        app->add_option("--config", config, "INI experiment config to start from")->check(CLI::ExistingFile);
        reg(app->add_option("--op", kind, "operator: shift | differentiation | translation"),
            [this](ExperimentConfig& c) { c.kind = kind; });
        reg(app->add_option("--w", w, "shift weight (complex literal, e.g. 2 or 0.6+0.8i)"),
            [this](ExperimentConfig& c) { c.w = parse_complex(w); });
        reg(app->add_option("--space", space, "lp | c0 | hardy | ck"), [this](ExperimentConfig& c) { c.space = space; });
        reg(app->add_option("--p", p, "l_p exponent"), [this](ExperimentConfig& c) { c.p = p; });
        reg(app->add_option("--k", k, "C^k order"), [this](ExperimentConfig& c) { c.k = k; });
        reg(app->add_option("--a", a, "C^k interval start"), [this](ExperimentConfig& c) { c.a = a; });
        reg(app->add_option("--b", b, "C^k interval end"), [this](ExperimentConfig& c) { c.b = b; });
        reg(app->add_option("--lambda", lambda, "translation growth rate"),
            [this](ExperimentConfig& c) { c.lambda = lambda; });
        reg(app->add_option("--twist", twist, "unimodular rotation (complex literal)"),
            [this](ExperimentConfig& c) { c.twist = parse_complex(twist); });
        reg(app->add_option("--power", power, "power transform r"), [this](ExperimentConfig& c) { c.power = power; });
        reg(app->add_option("--L", targets, "number of targets"), [this](ExperimentConfig& c) { c.targets = targets; });
        reg(app->add_option("--cap", cap, "threshold search cap"), [this](ExperimentConfig& c) { c.cap = cap; });
        if (with_horizon) {
            reg(app->add_option("--horizon", horizon, "construction horizon"),
                [this](ExperimentConfig& c) { c.horizon = horizon; });
        }
    }

    void reg(CLI::Option* opt, std::function<void(ExperimentConfig&)> apply) { set.emplace_back(opt, std::move(apply)); }

    ExperimentConfig resolve() const {
        ExperimentConfig cfg = config.empty() ? ExperimentConfig{} : load_config(config);
        for (const auto& [opt, apply] : set) {
            if (opt->count() > 0) apply(cfg);
        }
        cfg.validate();
        return cfg;
    }
};

void write_file(const std::string& path, const std::string& text) {
    if (path.empty()) return;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write '" + path + "'");
    f << text;
}

std::string join(const std::vector<Index>& xs) {
    std::string s = "[";
    for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + std::to_string(xs[i]);
    return s + "]";
}

// ---------------------------------------------------------------------------

int cmd_run(const std::string& config, const std::string& out_dir) {
    ExperimentConfig cfg = load_config(config);
    if (!out_dir.empty()) cfg.dir = out_dir;
    const RunResult r = run_experiment(cfg, std::cout);
    for (const auto& path : r.written) std::cout << "wrote " << path.string() << "\n";
    for (const auto& f : r.failures) std::cerr << "invariant violated: " << f.name << ": " << f.detail << "\n";
    if (!r.failures.empty()) std::cerr << r.failures.size() << " invariant failure(s)\n";
    return r.exit_code();
}

int cmd_partition(const std::string& pairs_text, Index horizon, const std::string& csv) {
    const auto pairs = parse_pairs(pairs_text);
    const PartitionSchedule sched(pairs);
    for (const auto& rp : sched.ranked_pairs()) {
        const auto ms = sched.members(rp.key, horizon);
        std::printf("A(%lld,%lld) rank %d block %lld: %s\n", static_cast<long long>(rp.key.l),
                    static_cast<long long>(rp.key.nu), rp.rank, static_cast<long long>(rp.block_length),
                    join(ms).c_str());
        std::printf("  density floor on [%lld,%lld] %.6g, analytic %.6g\n",
                    static_cast<long long>(std::max<Index>(1, horizon / 10)), static_cast<long long>(horizon),
                    sched.density_floor(rp.key, std::max<Index>(1, horizon / 10), horizon),
                    sched.analytic_density(rp.key));
    }
    if (!csv.empty()) {
        std::ostringstream os;
        write_members_csv(os, sched, horizon);
        write_file(csv, os.str());
    }
    return 0;
}

int cmd_certify(const ExperimentConfig& cfg, const std::string& json) {
    const OperatorCertificate cert = cfg.certificate();
    const TailCertificate tc = compute_thresholds(cert, cfg.cap);
    std::cout << cert.op.name() << "\n";
    for (const auto& r : tc.records) {
        std::printf("N_%d = %lld   forward tail %.6g, inverse tail %.6g, own inverse tail %.6g, identity residual %.3g\n",
                    r.l, static_cast<long long>(r.N), r.forward_tail_bound, r.inverse_tail_bound, r.own_inverse_tail,
                    r.identity_residual);
    }
    write_file(json, to_json(tc).dump(2) + "\n");
    return 0;
}

int cmd_construct(const ExperimentConfig& cfg, const std::string& json) {
    const TailCertificate tc = compute_thresholds(cfg.certificate(), cfg.cap);
    const FhcPlacement p = assign_placements(tc, cfg.horizon);
    std::printf("horizon %lld: %zu placements, truncation tail bound %.6g, evaluation window %lld (tail %.3g)\n",
                static_cast<long long>(cfg.horizon), p.placements.size(), p.truncation_tail_bound,
                static_cast<long long>(p.window), p.window_tail);
    for (int l = 1; l <= tc.target_count(); ++l) {
        const auto ms = p.schedule.members({l, tc.threshold(l)}, std::min<Index>(cfg.horizon, 200));
        std::printf("  l=%d N_l=%lld first members %s\n", l, static_cast<long long>(tc.threshold(l)), join(ms).c_str());
    }
    write_file(json, to_json(p).dump(2) + "\n");
    return 0;
}

int cmd_orbit(const ExperimentConfig& cfg, std::vector<long long> ns, long long from, long long to,
              const std::string& csv) {
    const TailCertificate tc = compute_thresholds(cfg.certificate(), cfg.cap);
    const FhcPlacement p = assign_placements(tc, cfg.horizon);
    if (ns.empty()) {
        for (long long n = from; n <= to; ++n) ns.push_back(n);
    }
    std::ostringstream out;
    out << "n,target,distance,certified_error,forward_norm,backward_norm,middle_residual\n";
    std::printf("%8s %6s %14s %12s %12s %12s %12s\n", "n", "target", "distance", "error", "forward", "backward",
                "middle");
    for (long long n : ns) {
        const OrbitValue v = orbit_eval(p, n);
        // distance only means something at a placement
        char dist[32] = "-";
        if (v.target) std::snprintf(dist, sizeof dist, "%.12g", distance_to_target(p, v, v.target));
        std::printf("%8lld %6d %14.14s %12.3g %12.3g %12.3g %12.3g\n", n, v.target, dist, v.certified_error,
                    v.forward_norm, v.backward_norm, v.middle_residual);
        char line[256];
        std::snprintf(line, sizeof line, "%lld,%d,%s,%.12g,%.12g,%.12g,%.12g\n", n, v.target, v.target ? dist : "",
                      v.certified_error, v.forward_norm, v.backward_norm, v.middle_residual);
        out << line;
    }
    write_file(csv, out.str());
    return 0;
}

int cmd_density(const std::string& input) {
    const auto reports = read_reports_json(input);
    std::printf("%3s %12s %8s %8s %14s %9s\n", "l", "eps", "N", "visits", "density_floor", "covering");
    for (const auto& r : reports) {
        std::printf("%3d %12.6g %8lld %8zu %14.6g %9s\n", r.l, r.eps, static_cast<long long>(r.N), r.visit_count(),
                    r.density_floor, r.covering_set_check ? "yes" : "no");
    }
    return 0;
}

int cmd_semigroup(double lambda, double c, int trials, std::uint64_t seed, double eps, const std::string& json) {
    RegularizedSemigroup sg{lambda, c == 1.0 ? CModel{IdentityC{}} : CModel{ScalarC{c}}};
    sg.validate();

    // semigroup law on random rational tents and times
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> num(0, 64);
    double worst_law = 0.0;
    for (int i = 0; i < trials; ++i) {
        const Rational t(num(rng), 16), s(num(rng), 16);
        const Rational left(num(rng), 8), width(1 + num(rng), 8), peak(num(rng) - 32, 4);
        const auto tent = PiecewiseLinear<Rational>::tent(left, left + width / 2, left + width, peak);
        worst_law = std::max(worst_law, semigroup_law_residual(sg, t, s, ScaledFn<Rational>{tent, Rational(0)}));
    }
    std::printf("semigroup law: max residual %.3g over %d rational samples\n", worst_law, trials);

    const SmoothBump bump = standard_bump();
    Json steps = Json::array();
    for (double h : {1e-2, 1e-3, 1e-4}) {
        const double r = generator_residual(sg, bump, h);
        const double halved = generator_residual(sg, bump, h / 2);
        std::printf("generator residual at step %-6g %.6g, at step/2 %.6g, ratio %.4f\n", h, r, halved, halved / r);
        steps.push_back({{"t_step", h}, {"residual", r}, {"halved", halved}});
    }

    ExperimentConfig cfg;
    cfg.kind = "translation";
    cfg.lambda = lambda;
    cfg.targets = 1;
    const TailCertificate tc = compute_thresholds(cfg.certificate(), cfg.cap);
    const FhcPlacement p = assign_placements(tc, std::max<Index>(tc.max_threshold(), 16));
    const SolutionOrbit orbit(p);
    const auto& y = std::get<PiecewiseLinearFn>(p.target(1));
    const ContinuityWindow w = continuity_window(orbit, y, eps);
    std::printf("continuity window for the unit tent at eps %g: delta %.6g, eps' %.6g\n", eps, w.delta, w.eps_prime);

    write_file(json, Json{{"law_residual", worst_law},
                          {"generator", steps},
                          {"continuity_window", {{"eps", eps}, {"delta", w.delta}, {"eps_prime", w.eps_prime}}}}
                         .dump(2) +
                         "\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fhc: frequently hypercyclic vectors for unbounded operators"};
    app.require_subcommand(1);
    int status = 0;

    auto* run = app.add_subcommand("run", "certify, schedule, construct, verify and export from a config");
    std::string run_config, run_out;
    run->add_option("--config", run_config, "INI experiment config")->required()->check(CLI::ExistingFile);
    run->add_option("--output-dir", run_out, "output directory (FHC_OUTPUT_DIR still wins)");

    auto* partition = app.add_subcommand("partition", "print the disjoint index sets A(l, nu)");
    std::string pairs, partition_csv;
    long long partition_horizon = 100;
    partition->add_option("--pairs", pairs, "pairs like \"(1,2),(2,3)\"")->required();
    partition->add_option("--horizon", partition_horizon, "largest index listed")->check(CLI::PositiveNumber);
    partition->add_option("--csv", partition_csv, "write n,l,nu rows here");

    auto* certify = app.add_subcommand("certify", "compute the thresholds N_l of a certificate");
    OperatorFlags certify_flags;
    certify_flags.add(certify, false);
    std::string certify_json;
    certify->add_option("--json", certify_json, "write the tail certificate here");

    auto* construct = app.add_subcommand("construct", "place the targets and report the truncation tail");
    OperatorFlags construct_flags;
    construct_flags.add(construct, true);
    std::string construct_json;
    construct->add_option("--json", construct_json, "write the placement here");

    auto* orbit = app.add_subcommand("orbit", "evaluate T^n x through the three-part decomposition");
    OperatorFlags orbit_flags;
    orbit_flags.add(orbit, true);
    std::vector<long long> orbit_ns;
    long long orbit_from = 1, orbit_to = 20;
    std::string orbit_csv;
    orbit->add_option("--n", orbit_ns, "orbit indices (repeatable)");
    orbit->add_option("--from", orbit_from, "first index when --n is absent");
    orbit->add_option("--to", orbit_to, "last index when --n is absent");
    orbit->add_option("--csv", orbit_csv, "write the table here");

    auto* density = app.add_subcommand("density", "print the density table of a stored report");
    std::string density_input;
    density->add_option("--input", density_input, "report.json from a run")->required()->check(CLI::ExistingFile);

    auto* semigroup = app.add_subcommand("semigroup", "check the regularized translation semigroup");
    double sg_lambda = 1.0, sg_c = 1.0, sg_eps = 0.5;
    int sg_trials = 100;
    std::uint64_t sg_seed = 1;
    std::string sg_json;
    semigroup->add_option("--lambda", sg_lambda, "growth rate");
    semigroup->add_option("--c", sg_c, "scalar C (1 = identity)");
    semigroup->add_option("--trials", sg_trials, "random samples for the semigroup law");
    semigroup->add_option("--seed", sg_seed, "sampling seed");
    semigroup->add_option("--eps", sg_eps, "ball radius for the continuity window");
    semigroup->add_option("--json", sg_json, "write the results here");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) status = cmd_run(run_config, run_out);
        if (*partition) status = cmd_partition(pairs, partition_horizon, partition_csv);
        if (*certify) status = cmd_certify(certify_flags.resolve(), certify_json);
        if (*construct) status = cmd_construct(construct_flags.resolve(), construct_json);
        if (*orbit) status = cmd_orbit(orbit_flags.resolve(), orbit_ns, orbit_from, orbit_to, orbit_csv);
        if (*density) status = cmd_density(density_input);
        if (*semigroup) status = cmd_semigroup(sg_lambda, sg_c, sg_trials, sg_seed, sg_eps, sg_json);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const CertificationError& e) {
        std::cerr << "certification failed: " << e.what() << "\n";
        return kExitCertification;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return status == 0 ? 0 : kExitInvariant;
}
