#pragma once

#include <filesystem>
#include <iosfwd>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "fhc/constructor.hpp"

namespace fhc {

struct OrbitReport {
    std::string mode = "discrete";  // or "continuous"
    int l = 1;
    double eps = 0.0;
    Index N = 0;
    std::vector<Index> visit_times;                        // discrete visits in [1, N]
    std::vector<std::pair<double, double>> visit_intervals; // continuous inner visit set
    double inner_measure = 0.0;
    double outer_measure = 0.0;
    double density_floor = 0.0;
    bool covering_set_check = false;
    bool guarantee = false;  // eps exceeds proof bound + certified error
    double proof_bound = 0.0;
    double certified_error = 0.0;  // largest error over the evaluated orbit points

    std::size_t visit_count() const { return mode == "discrete" ? visit_times.size() : visit_intervals.size(); }
    friend bool operator==(const OrbitReport&, const OrbitReport&) = default;
};

inline constexpr double kDefaultWindowFraction = 0.1;

/// min over n in [ceil(fraction N), N] of |visits ∩ [1, n]| / n.
double density_proxy(const std::vector<Index>& visits, Index N, double window_fraction = kDefaultWindowFraction);

/// Visits of the orbit of x to the ball of radius eps around y_l.
OrbitReport discrete_visits(const FhcPlacement& p, int l, double eps, Index N,
                            double window_fraction = kDefaultWindowFraction);

/// The same for several targets at once; each orbit point is evaluated once.
/// eps[i] is the radius for target l = i + 1.
std::vector<OrbitReport> discrete_visits_all(const FhcPlacement& p, const std::vector<double>& eps, Index N,
                                             double window_fraction = kDefaultWindowFraction);

// ---------------------------------------------------------------------------
// Continuous orbits

/// A continuous orbit t -> u(t) in C_0(R+), evaluated up to a known error.
class ContinuousOrbitSource {
public:
    struct Sample {
        PiecewiseLinearFn value;
        double error = 0.0;  // ||u(t) - value||
    };

    virtual ~ContinuousOrbitSource() = default;
    virtual Sample at(double t) const = 0;
    /// Bound on ||e^{hA} f - f|| for an exactly known f, 0 <= h.
    virtual double modulus(const PiecewiseLinearFn& f, double h) const = 0;
    /// Operator-norm bound of e^{hA} is exp(growth() h).
    virtual double growth() const = 0;
};

/// Grid-cell measurement of {t in [0, T_max] : ||u(t) - y|| < eps}. Cells
/// of width `grid` count toward the inner measure when the whole cell is
/// certified inside the ball, and toward the outer measure unless the whole
/// cell is certified outside.
OrbitReport continuous_visits(const ContinuousOrbitSource& src, const PiecewiseLinearFn& y, double eps, double t_max,
                              double grid, double window_fraction = kDefaultWindowFraction);

struct ContinuityWindow {
    double delta = 0.0;      // every t in [n, n + delta] visits when n visits with margin
    double eps_prime = 0.0;  // the margin: ||u(n) - y|| < eps_prime
};

/// Largest delta (by bisection) with (e^{lambda delta} - 1)||y|| +
/// e^{lambda delta} Lip(y) delta < eps / 2, and eps' = (eps / 2) e^{-lambda delta}.
ContinuityWindow continuity_window(const ContinuousOrbitSource& src, const PiecewiseLinearFn& y, double eps);

struct BridgeReport {
    ContinuityWindow window;
    Index certified_integer_visits = 0;  // 1 <= n <= N - 1 with margin
    double inner_measure = 0.0;
    double required = 0.0;  // delta * certified_integer_visits
    bool holds = false;
};

BridgeReport continuous_bridge(const ContinuousOrbitSource& src, const PiecewiseLinearFn& y, double eps, Index N,
                               double grid);

// ---------------------------------------------------------------------------
// Export

/// Columns: l,eps,N,visits,density_floor,covering_set_check,proof_bound,certified_error
void write_reports_csv(std::ostream& out, const std::vector<OrbitReport>& reports);
Json to_json(const OrbitReport& r);
OrbitReport orbit_report_from_json(const Json& j);
Json reports_to_json(const std::vector<OrbitReport>& reports);
std::vector<OrbitReport> reports_from_json(const Json& j);

/// Writes either file when its path is non-empty; failures name the path.
void report_export(const std::vector<OrbitReport>& reports, const std::filesystem::path& csv_path,
                   const std::filesystem::path& json_path);
std::vector<OrbitReport> read_reports_json(const std::filesystem::path& path);

}  // namespace fhc
