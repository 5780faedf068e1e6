#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fhc/regularized_semigroup.hpp"
#include "oracles.hpp"

using namespace fhc;

namespace {

const TailCertificate& shift5() {
    static const TailCertificate tc = compute_thresholds(make_certificate(make_shift(2.0), 5));
    return tc;
}

double exact_distance(const SparseVector<Rational>& x, const SparseVector<Rational>& y) {
    return std::sqrt(static_cast<double>(exact_norm_pow(x - y, 2)));
}

std::filesystem::path scratch(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / "fhc_test_verifier";
    std::filesystem::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST_CASE("density proxy: hand cases and brute-force counting") {
    std::vector<Index> all(100);
    for (Index i = 0; i < 100; ++i) all[static_cast<std::size_t>(i)] = i + 1;
    CHECK(density_proxy(all, 100) == 1.0);
    CHECK(density_proxy({}, 100) == 0.0);
    // even numbers: the window starts at n = 100 and |[1,n] ∩ 2N| / n is
    // smallest at the first odd n, 50/101
    std::vector<Index> even;
    for (Index i = 2; i <= 1000; i += 2) even.push_back(i);
    CHECK(density_proxy(even, 1000) == doctest::Approx(50.0 / 101.0));
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Index> v;
        for (Index n = 1; n <= 2000; ++n) {
            if (oracle::uniform(0, 3) == 0) v.push_back(n);
        }
        CHECK(density_proxy(v, 2000, 0.25) == doctest::Approx(oracle::lower_density(v, 500, 2000)).epsilon(1e-15));
    }
    CHECK_THROWS(density_proxy(all, 0));
}

TEST_CASE("discrete visits: sound and complete against exact distances") {
    const FhcPlacement p = assign_placements(shift5(), 140);
    const auto targets = enumerate_sequences_exact(SequenceSpace::lp(2), 5);
    const std::vector<double> radii{1.0, 1.0, 0.3, 0.2, 0.1};
    const auto reports = discrete_visits_all(p, radii, 100);
    for (int l = 1; l <= 5; ++l) {
        const auto& r = reports[static_cast<std::size_t>(l - 1)];
        std::vector<Index> sure;  // visits with room to spare
        for (Index n = 1; n <= 100; ++n) {
            // placements past 140 move T^n x by less than 2^-700 for n <= 100
            const double d = exact_distance(orbit_eval_exact(p, n), targets[static_cast<std::size_t>(l - 1)]);
            const bool reported = std::binary_search(r.visit_times.begin(), r.visit_times.end(), n);
            if (reported) CHECK(d < r.eps);
            if (d + 1e-9 < r.eps) sure.push_back(n);
        }
        CHECK(std::includes(r.visit_times.begin(), r.visit_times.end(), sure.begin(), sure.end()));
        CHECK(r.covering_set_check);
        CHECK(r.visit_count() == r.visit_times.size());
    }
    const OrbitReport single = discrete_visits(p, 3, 0.3, 100);
    CHECK(single.visit_times == reports[2].visit_times);
    CHECK_THROWS_AS(discrete_visits_all(p, radii, 141), std::out_of_range);
}

TEST_CASE("covering check flips when the radius is below the achieved distance") {
    const FhcPlacement p = assign_placements(shift5(), 400);
    const OrbitReport r = discrete_visits(p, 1, 1e-300, 400);
    CHECK_FALSE(r.covering_set_check);
    CHECK_FALSE(r.guarantee);
    const OrbitReport ok = discrete_visits(p, 1, 1.2 * proximity_bound(1), 400);
    CHECK(ok.guarantee);
    CHECK(ok.covering_set_check);
}

TEST_CASE("CSV layout and number formatting") {
    OrbitReport a;
    a.l = 2;
    a.eps = 1.5;
    a.N = 10;
    a.visit_times = {1, 4, 9};
    a.density_floor = 1.0 / 3.0;
    a.covering_set_check = true;
    a.proof_bound = 1.25;
    a.certified_error = std::numeric_limits<double>::infinity();
    std::ostringstream os;
    write_reports_csv(os, {a});
    CHECK(os.str() ==
          "l,eps,N,visits,density_floor,covering_set_check,proof_bound,certified_error\n"
          "2,1.5,10,3,0.333333333333,true,1.25,inf\n");
}

TEST_CASE("JSON round trip, including infinities") {
    OrbitReport a;
    a.mode = "continuous";
    a.l = 1;
    a.eps = 0.5;
    a.N = 7;
    a.visit_intervals = {{0.0, 0.25}, {1.0, 1.5}};
    a.inner_measure = 0.75;
    a.outer_measure = 1.0;
    a.certified_error = std::numeric_limits<double>::infinity();
    OrbitReport b;
    b.visit_times = {2, 3};
    b.eps = std::numeric_limits<double>::infinity();
    const Json j = reports_to_json({a, b});
    CHECK(j.at("reports").at(0).at("certified_error") == "inf");
    CHECK(reports_from_json(j) == std::vector<OrbitReport>{a, b});

    const auto csv = scratch("r.csv"), js = scratch("r.json");
    report_export({a, b}, csv, js);
    CHECK(read_reports_json(js) == std::vector<OrbitReport>{a, b});
    CHECK(std::filesystem::file_size(csv) > 0);
}

TEST_CASE("export failures name the path") {
    const auto blocker = scratch("not_a_dir");
    std::ofstream(blocker) << "x";
    const auto bad = blocker / "report.csv";
    try {
        report_export({}, bad, {});
        FAIL("expected a write error");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find(bad.string()) != std::string::npos);
    }
    CHECK_THROWS_AS(read_reports_json(scratch("missing.json")), std::runtime_error);
}

TEST_CASE("continuity window solves its defining inequality") {
    const TailCertificate tc = compute_thresholds(make_certificate(make_translation(1.0), 1));
    const FhcPlacement p = assign_placements(tc, 50);
    const SolutionOrbit orbit(p);
    const auto& y = std::get<PiecewiseLinearFn>(p.target(1));
    for (double eps : {0.5, 0.1, 2.0}) {
        const ContinuityWindow w = continuity_window(orbit, y, eps);
        const auto excess = [&](double s) { return std::expm1(s) * norm(y) + std::exp(s) * y.lipschitz() * s; };
        CHECK(w.delta > 0.0);
        CHECK(excess(w.delta) < eps / 2);
        CHECK(excess(w.delta * (1 + 1e-9)) >= eps / 2 * (1 - 1e-9));
        CHECK(w.eps_prime == doctest::Approx(eps / 2 * std::exp(-w.delta)));
    }
}

TEST_CASE("continuous visits: inner set is certified, outer set covers the sampled visits") {
    const TailCertificate tc = compute_thresholds(make_certificate(make_translation(1.0), 1));
    const FhcPlacement p = assign_placements(tc, 100);
    const SolutionOrbit orbit(p);
    const auto& y = std::get<PiecewiseLinearFn>(p.target(1));
    const double eps = 0.5, grid = 1.0 / 32;
    const OrbitReport r = continuous_visits(orbit, y, eps, 60.0, grid);
    CHECK(r.mode == "continuous");
    CHECK(r.inner_measure > 0.0);
    CHECK(r.inner_measure <= r.outer_measure);
    double sampled = 0.0;
    const int per = 8;
    for (int i = 0; i < 60 * 32 * per; ++i) {
        const double t = (i + 0.5) * grid / per;
        const auto s = orbit.at(t);
        const double d = norm(s.value - y);
        const bool inside_inner = std::any_of(r.visit_intervals.begin(), r.visit_intervals.end(),
                                              [&](const auto& iv) { return iv.first <= t && t <= iv.second; });
        if (inside_inner) CHECK(d + s.error < eps);
        if (d + s.error < eps) sampled += grid / per;
    }
    CHECK(sampled <= r.outer_measure + 1e-9);
    CHECK(sampled >= r.inner_measure - 1e-9);
}

TEST_CASE("bridge: inner measure beats delta times the certified integer visits") {
    const TailCertificate tc = compute_thresholds(make_certificate(make_translation(1.0), 1));
    const FhcPlacement p = assign_placements(tc, 200);
    const SolutionOrbit orbit(p);
    const auto& y = std::get<PiecewiseLinearFn>(p.target(1));
    const BridgeReport b = continuous_bridge(orbit, y, 0.5, 200, 1.0 / 64);
    CHECK(b.window.delta > 0.0);
    CHECK(b.certified_integer_visits >= static_cast<Index>(p.placements.size()) - 1);
    CHECK(b.required == doctest::Approx(b.window.delta * static_cast<double>(b.certified_integer_visits)));
    CHECK(b.holds);
}
