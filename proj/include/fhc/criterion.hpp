#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "fhc/density_partition.hpp"
#include "fhc/json_io.hpp"
#include "fhc/operators.hpp"

namespace fhc {

/// Which series a tail bound refers to: sum_n T^n y (forward) or
/// sum_n S^n y (inverse), where T and S are the certificate's actions.
enum class Direction { forward, inverse };

/// Raised when no threshold N <= cap satisfies the inequalities.
class CertificationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ThresholdRecord {
    int l = 1;
    Index N = 1;
    double forward_tail_bound = 0.0;  // max over lambda <= l of the forward tail of y_lambda
    double inverse_tail_bound = 0.0;  // max over lambda <= l of the inverse tail of y_lambda
    double own_inverse_tail = 0.0;    // inverse tail of y_l alone
    double identity_residual = 0.0;   // max over sampled n >= N of ||T_n S_n y_l - y_l||

    friend bool operator==(const ThresholdRecord&, const ThresholdRecord&) = default;
};

struct TailCertificate {
    OperatorCertificate cert;
    std::vector<ThresholdRecord> records;  // records[l - 1]

    const ThresholdRecord& record(int l) const { return records.at(static_cast<std::size_t>(l - 1)); }
    Index threshold(int l) const { return record(l).N; }
    Index max_threshold() const;
    int target_count() const { return static_cast<int>(records.size()); }
};

/// 1/(l 2^l) and 1/2^l.
double cross_tail_limit(int l);
double own_tail_limit(int l);

/// Upper bound on sup ||sum_{n in F} X^n y|| over finite F subset of [N, inf),
/// X the forward or inverse action. Closed-form majorants; exact zero once
/// a forward tail is past the extinction index.
double tail_norm(const OperatorCertificate& cert, const Element& y, Index N, Direction dir);

/// ||sum_{n in F} X^n y||, summed term by term. Uses the attained norm, so
/// a value above a tail bound is a genuine violation.
double subsum_norm(const OperatorCertificate& cert, const Element& y, const std::vector<Index>& F, Direction dir);

/// ||T_n S_n y - y|| at a single n.
double identity_residual(const OperatorCertificate& cert, const Element& y, Index n);

/// Number of n values (N, N+1, ...) sampled for the identity residual.
inline constexpr Index kIdentitySamples = 17;

TailCertificate compute_thresholds(const OperatorCertificate& cert, Index cap = 10000);

/// Largest ||sum_{n in F} X^n y|| over `trials` random subsets F of
/// [N, N + window). Deterministic in the seed.
double unconditional_probe(const OperatorCertificate& cert, const Element& y, Index N, int trials,
                           std::uint64_t seed, Index window = 64, Direction dir = Direction::inverse);

Json to_json(const OperatorModel& op);
Json to_json(const OperatorCertificate& cert);
Json to_json(const TailCertificate& tc);
OperatorModel operator_model_from_json(const Json& j);
OperatorCertificate certificate_from_json(const Json& j);
TailCertificate tail_certificate_from_json(const Json& j);

}  // namespace fhc
