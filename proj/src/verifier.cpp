#include "fhc/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

namespace fhc {

namespace {

Json number_to_json(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return x;
}

double number_from_json(const Json& j) {
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        throw std::invalid_argument("json: bad number '" + s + "'");
    }
    return j.get<double>();
}

std::string fmt(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

Index window_start(Index N, double fraction) {
    return std::max<Index>(1, static_cast<Index>(std::ceil(fraction * static_cast<double>(N))));
}

}  // namespace

double density_proxy(const std::vector<Index>& visits, Index N, double window_fraction) {
    if (N < 1 || !(window_fraction >= 0.0 && window_fraction <= 1.0)) {
        throw std::invalid_argument("density_proxy: empty window");
    }
    const Index start = window_start(N, window_fraction);
    double best = 1.0;
    std::size_t count = 0;
    auto it = visits.begin();
    for (Index n = 1; n <= N; ++n) {
        while (it != visits.end() && *it <= n) {
            ++count;
            ++it;
        }
        if (n >= start) best = std::min(best, static_cast<double>(count) / static_cast<double>(n));
    }
    return best;
}

std::vector<OrbitReport> discrete_visits_all(const FhcPlacement& p, const std::vector<double>& eps, Index N,
                                             double window_fraction) {
    if (N < 1 || N > p.horizon) throw std::out_of_range("discrete_visits: need 1 <= N <= horizon");
    if (eps.size() > static_cast<std::size_t>(p.target_count())) {
        throw std::invalid_argument("discrete_visits: more radii than targets");
    }
    std::vector<OrbitReport> reports(eps.size());
    for (std::size_t i = 0; i < eps.size(); ++i) {
        OrbitReport& r = reports[i];
        r.l = static_cast<int>(i + 1);
        r.eps = eps[i];
        r.N = N;
        r.proof_bound = proximity_bound(r.l);
    }
    double worst_error = 0.0;
    for (Index n = 1; n <= N; ++n) {
        const OrbitValue v = orbit_eval(p, n);
        worst_error = std::max(worst_error, v.certified_error);
        for (auto& r : reports) {
            if (distance_to_target(p, v, r.l) + v.certified_error < r.eps) r.visit_times.push_back(n);
        }
    }
    for (auto& r : reports) {
        r.certified_error = worst_error;
        r.guarantee = r.eps > r.proof_bound + worst_error;
        const auto members = p.schedule.members({r.l, p.tc.threshold(r.l)}, N);
        r.covering_set_check = std::includes(r.visit_times.begin(), r.visit_times.end(), members.begin(), members.end());
        r.density_floor = density_proxy(r.visit_times, N, window_fraction);
    }
    return reports;
}

OrbitReport discrete_visits(const FhcPlacement& p, int l, double eps, Index N, double window_fraction) {
    if (l < 1 || l > p.target_count()) throw std::out_of_range("discrete_visits: no target l=" + std::to_string(l));
    std::vector<double> radii(static_cast<std::size_t>(l), -1.0);  // negative radius: nothing visits
    radii.back() = eps;
    return discrete_visits_all(p, radii, N, window_fraction).back();
}

// ---------------------------------------------------------------------------
// Continuous

OrbitReport continuous_visits(const ContinuousOrbitSource& src, const PiecewiseLinearFn& y, double eps, double t_max,
                              double grid, double window_fraction) {
    if (!(grid > 0.0) || !(t_max > 0.0)) throw std::invalid_argument("continuous_visits: need grid > 0 and T_max > 0");
    OrbitReport r;
    r.mode = "continuous";
    r.eps = eps;
    r.N = static_cast<Index>(std::ceil(t_max));
    const auto cells = static_cast<Index>(std::ceil(t_max / grid));
    const double growth = std::exp(src.growth() * grid);

    std::vector<std::pair<double, double>> cumulative;  // (cell end, inner measure so far)
    for (Index i = 0; i < cells; ++i) {
        const double t0 = static_cast<double>(i) * grid;
        const double t1 = std::min(t_max, t0 + grid);
        const auto s = src.at(t0);
        const double d = norm(s.value - y);
        // sup over h in [0, t1 - t0] of ||u(t0 + h) - u(t0)||
        const double drift = src.modulus(s.value, t1 - t0) + (growth + 1.0) * s.error;
        if (d + s.error + drift < eps) {
            r.inner_measure += t1 - t0;
            if (!r.visit_intervals.empty() && r.visit_intervals.back().second == t0) {
                r.visit_intervals.back().second = t1;
            } else {
                r.visit_intervals.emplace_back(t0, t1);
            }
        }
        if (d - s.error - drift < eps) r.outer_measure += t1 - t0;
        r.certified_error = std::max(r.certified_error, s.error);
        cumulative.emplace_back(t1, r.inner_measure);
    }
    double best = 1.0;
    for (const auto& [t, m] : cumulative) {
        if (t >= window_fraction * t_max) best = std::min(best, m / t);
    }
    r.density_floor = best;
    return r;
}

ContinuityWindow continuity_window(const ContinuousOrbitSource& src, const PiecewiseLinearFn& y, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("continuity_window: eps must be positive");
    const double lambda = src.growth();
    const double ny = norm(y);
    const double lip = y.lipschitz();
    const auto excess = [&](double s) { return std::expm1(lambda * s) * ny + std::exp(lambda * s) * lip * s; };
    double lo = 0.0, hi = 1.0;
    while (excess(hi) < eps / 2.0 && hi < 1e6) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (excess(mid) < eps / 2.0 ? lo : hi) = mid;
    }
    return {lo, eps / 2.0 * std::exp(-lambda * lo)};
}

BridgeReport continuous_bridge(const ContinuousOrbitSource& src, const PiecewiseLinearFn& y, double eps, Index N,
                               double grid) {
    BridgeReport b;
    b.window = continuity_window(src, y, eps);
    for (Index n = 1; n <= N - 1; ++n) {
        const auto s = src.at(static_cast<double>(n));
        if (norm(s.value - y) + s.error < b.window.eps_prime) ++b.certified_integer_visits;
    }
    b.inner_measure = continuous_visits(src, y, eps, static_cast<double>(N), grid).inner_measure;
    b.required = b.window.delta * static_cast<double>(b.certified_integer_visits);
    b.holds = b.window.delta > 0.0 && b.inner_measure >= b.required;
    return b;
}

// ---------------------------------------------------------------------------
// Export

void write_reports_csv(std::ostream& out, const std::vector<OrbitReport>& reports) {
    out << "l,eps,N,visits,density_floor,covering_set_check,proof_bound,certified_error\n";
    for (const auto& r : reports) {
        out << r.l << ',' << fmt(r.eps) << ',' << r.N << ',' << r.visit_count() << ',' << fmt(r.density_floor) << ','
            << (r.covering_set_check ? "true" : "false") << ',' << fmt(r.proof_bound) << ','
            << fmt(r.certified_error) << '\n';
    }
}

Json to_json(const OrbitReport& r) {
    Json intervals = Json::array();
    for (const auto& [a, b] : r.visit_intervals) intervals.push_back(Json::array({number_to_json(a), number_to_json(b)}));
    return {{"mode", r.mode},
            {"l", r.l},
            {"eps", number_to_json(r.eps)},
            {"N", r.N},
            {"visit_times", r.visit_times},
            {"visit_intervals", intervals},
            {"inner_measure", number_to_json(r.inner_measure)},
            {"outer_measure", number_to_json(r.outer_measure)},
            {"density_floor", number_to_json(r.density_floor)},
            {"covering_set_check", r.covering_set_check},
            {"guarantee", r.guarantee},
            {"proof_bound", number_to_json(r.proof_bound)},
            {"certified_error", number_to_json(r.certified_error)}};
}

OrbitReport orbit_report_from_json(const Json& j) {
    OrbitReport r;
    r.mode = j.at("mode").get<std::string>();
    r.l = j.at("l").get<int>();
    r.eps = number_from_json(j.at("eps"));
    r.N = j.at("N").get<Index>();
    r.visit_times = j.at("visit_times").get<std::vector<Index>>();
    for (const auto& iv : j.at("visit_intervals")) r.visit_intervals.emplace_back(number_from_json(iv.at(0)), number_from_json(iv.at(1)));
    r.inner_measure = number_from_json(j.at("inner_measure"));
    r.outer_measure = number_from_json(j.at("outer_measure"));
    r.density_floor = number_from_json(j.at("density_floor"));
    r.covering_set_check = j.at("covering_set_check").get<bool>();
    r.guarantee = j.at("guarantee").get<bool>();
    r.proof_bound = number_from_json(j.at("proof_bound"));
    r.certified_error = number_from_json(j.at("certified_error"));
    return r;
}

Json reports_to_json(const std::vector<OrbitReport>& reports) {
    Json arr = Json::array();
    for (const auto& r : reports) arr.push_back(to_json(r));
    return {{"reports", arr}};
}

std::vector<OrbitReport> reports_from_json(const Json& j) {
    std::vector<OrbitReport> out;
    for (const auto& r : j.at("reports")) out.push_back(orbit_report_from_json(r));
    return out;
}

void report_export(const std::vector<OrbitReport>& reports, const std::filesystem::path& csv_path,
                   const std::filesystem::path& json_path) {
    const auto open = [](const std::filesystem::path& path) {
        if (path.has_parent_path()) {
            std::error_code ec;
            std::filesystem::create_directories(path.parent_path(), ec);
        }
        std::ofstream f(path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write report file '" + path.string() + "'");
        return f;
    };
    if (!csv_path.empty()) {
        auto f = open(csv_path);
        write_reports_csv(f, reports);
        if (!f) throw std::runtime_error("write failed for '" + csv_path.string() + "'");
    }
    if (!json_path.empty()) {
        auto f = open(json_path);
        f << reports_to_json(reports).dump(2) << '\n';
        if (!f) throw std::runtime_error("write failed for '" + json_path.string() + "'");
    }
}

std::vector<OrbitReport> read_reports_json(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot read report file '" + path.string() + "'");
    try {
        return reports_from_json(Json::parse(f));
    } catch (const Json::exception& e) {
        throw std::runtime_error("malformed report file '" + path.string() + "': " + e.what());
    }
}

}  // namespace fhc
