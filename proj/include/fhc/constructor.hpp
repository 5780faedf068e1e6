#pragma once

#include <utility>
#include <vector>

#include "fhc/criterion.hpp"
#include "fhc/density_partition.hpp"

namespace fhc {

/// The vector x = sum_n S_n z_n with z_n = y_l for n in A(l, N_l) and 0
/// otherwise. Placements are recorded up to `horizon`; the schedule itself
/// is unbounded, so orbit evaluation can reach placements past it.
struct FhcPlacement {
    TailCertificate tc;
    PartitionSchedule schedule{std::vector<PairKey>{{1, 1}}};
    Index horizon = 0;
    std::vector<std::pair<Index, int>> placements;  // (n, l), sorted by n, n <= horizon
    double truncation_tail_bound = 0.0;             // omitted placements n > horizon

    // Backward terms S^(j-n) z_j with j - n > window are not summed by
    // orbit_eval; window_tail bounds all of them together.
    Index window = 1;
    double window_tail = 0.0;

    int target_count() const { return tc.target_count(); }
    const Element& target(int l) const { return tc.cert.target(static_cast<std::size_t>(l)); }
    /// l with n in A(l, N_l), or 0.
    int target_at(Index n) const;
};

/// Largest total tail accepted when choosing the evaluation window.
inline constexpr double kWindowTolerance = 1e-30;
inline constexpr Index kMaxWindow = 4096;

FhcPlacement assign_placements(const TailCertificate& tc, Index horizon);

struct Materialized {
    Element x;
    Index M = 0;
    double tail_bound = 0.0;  // bound on ||x_full - x||
};

Materialized materialize(const FhcPlacement& p, Index M);

struct OrbitValue {
    Index n = 0;
    int target = 0;  // l when n is placed, else 0
    Element value;   // T_n x up to certified_error
    double certified_error = 0.0;

    Element forward_part;   // sum_{j<n} T_n S_j z_j
    Element backward_part;  // sum_{n<j<=n+window} T_n S_j z_j
    double forward_norm = 0.0;
    double backward_norm = 0.0;     // includes the omitted-tail bound
    double middle_residual = 0.0;   // ||T_n S_n z_n - y_l||
};

OrbitValue orbit_eval(const FhcPlacement& p, Index n);

/// ||T_n x - y_l|| for the orbit value, without the certified error.
double distance_to_target(const FhcPlacement& p, const OrbitValue& v, int l);

/// 5 / 2^l, assembled from the two one-sided bounds and the middle term.
double proximity_bound(int l);
double one_sided_bound(int l);  // 2 / 2^l
double middle_bound(int l);     // 1 / 2^l

// Exact-rational evaluation for weighted shifts with a dyadic real weight
// and twist +-1; used as a brute-force cross-check of the floating path.
bool supports_exact(const FhcPlacement& p);
SparseVector<Rational> materialize_exact(const FhcPlacement& p, Index M);
SparseVector<Rational> orbit_eval_exact(const FhcPlacement& p, Index n);
/// T_n applied directly to an exact vector.
SparseVector<Rational> forward_exact(const FhcPlacement& p, const SparseVector<Rational>& v, Index n);

Json to_json(const FhcPlacement& p);
FhcPlacement placement_from_json(const Json& j);

}  // namespace fhc
