#include "fhc/criterion.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <sstream>

namespace fhc {

namespace {

// Relative slack added to every closed-form bound so that rounding in the
// evaluation cannot push a true tail above the reported value.
constexpr double kBoundSlack = 1e-12;

double inflate(double x) { return x * (1.0 + kBoundSlack); }

// log of sum_{n >= N} exp(logterm(n)) for a sequence whose successive ratios
// are nonincreasing and eventually below 1. Works in the log domain so that
// super-geometric decay does not underflow the leading term.
double log_tail_sum(const std::function<double(Index)>& logterm, Index N) {
    const double l0 = logterm(N);
    if (l0 == -std::numeric_limits<double>::infinity()) return l0;
    double acc = 1.0;
    double prev = l0;
    for (Index n = N + 1;; ++n) {
        const double ln = logterm(n);
        const double rel = std::exp(ln - l0);
        const double q = std::exp(ln - prev);
        acc += rel;
        if (q < 1.0 && rel <= 1e-18 * acc) {
            // with nonincreasing ratios the rest is at most rel * q / (1 - q)
            acc += rel * q / (1.0 - q);
            break;
        }
        if (n - N > 10'000'000) throw CertificationError("tail series does not decay");
        prev = ln;
    }
    return l0 + std::log(acc);
}

bool raw_forward_direction(const OperatorCertificate& cert, Direction dir) {
    return (dir == Direction::forward) != cert.swapped;
}

// Smallest m with A^m y = 0 for the untwisted model.
std::int64_t raw_extinction(const Element& y) {
    return std::visit(
        [](const auto& v) -> std::int64_t {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, SparseVector<Complex>>) {
                return v.support_max();
            } else if constexpr (std::is_same_v<T, PolySeries<Complex>>) {
                return v.degree() + 1;
            } else {
                return v.empty() ? 0 : static_cast<std::int64_t>(std::ceil(v.breakpoints().back()));
            }
        },
        y);
}

double forward_tail(const OperatorCertificate& cert, const Element& y, Index N) {
    const std::int64_t r = cert.power;
    const std::int64_t extinct = raw_extinction(y);
    double sum = 0.0;
    for (Index n = N; r * n < extinct; ++n) sum += norm(raw_forward(cert.op, y, r * n));
    return inflate(sum);
}

double shift_inverse_tail(const WeightedBackwardShift& s, const SparseVector<Complex>& y, std::int64_t r, Index N) {
    const double logw = std::log(std::abs(s.w));
    const bool c0 = s.space.kind == SequenceSpace::Kind::c0;
    const double p = c0 ? 1.0 : s.space.p;
    double total = 0.0;
    for (const auto& [k, c] : y.entries()) {
        // B^m e_k = w^-(mk + m(m-1)/2) e_{k+m}; distinct m land on distinct
        // coordinates, so the l_p norm of any sub-sum is the l_p norm of the
        // selected weights.
        const auto logterm = [&, k = k](Index n) {
            const double m = static_cast<double>(r * n);
            const double e = m * static_cast<double>(k) + m * (m - 1.0) / 2.0;
            return -p * e * logw;
        };
        const double log_part = c0 ? logterm(N) : log_tail_sum(logterm, N) / p;
        total += std::abs(c) * std::exp(log_part);
    }
    return inflate(total);
}

double hardy_inverse_tail(const PolySeries<Complex>& y, std::int64_t r, Index N) {
    double total = 0.0;
    for (int k = 0; k <= y.degree(); ++k) {
        const double c = std::abs(y.coeff(k));
        if (c == 0.0) continue;
        // B^m z^k = k!/(k+m)! z^(k+m): orthogonal monomials in H^2.
        const auto logterm = [&](Index n) {
            const double m = static_cast<double>(r * n);
            return 2.0 * (std::lgamma(k + 1.0) - std::lgamma(k + m + 1.0));
        };
        total += c * std::exp(log_tail_sum(logterm, N) / 2.0);
    }
    return inflate(total);
}

double ck_inverse_tail(const PolySeries<Complex>& y, std::int64_t r, Index N) {
    const PolyModel& m = y.model();
    const double width = m.b - m.a;
    std::vector<double> sup;  // sup |y^(j)| on [a, b], j = 0..k
    for (int j = 0; j <= m.k; ++j) sup.push_back(sup_interval(derivative(y, j), m).hi);
    if (sup[0] == 0.0) return 0.0;

    // |B^j y| <= width^j / j! sup|y| on [a, b]
    const auto g = [&](std::int64_t j) { return std::exp(j * std::log(width) - std::lgamma(j + 1.0)); };
    // ||B^mm y||_{C^k}: derivative i of B^mm y is B^(mm-i) y for i <= mm, and
    // y^(i-mm) otherwise.
    const auto beta = [&](std::int64_t mm) {
        double best = 0.0;
        for (int i = 0; i <= m.k; ++i) {
            best = std::max(best, i <= mm ? g(mm - i) * sup[0] : sup[static_cast<std::size_t>(i - mm)]);
        }
        return best;
    };
    double sum = 0.0;
    for (Index n = N;; ++n) {
        const std::int64_t mm = r * n;
        const double term = beta(mm);
        sum += term;
        // Once mm - k >= 2 width, g decreases with ratio <= 1/2 per step and
        // beta(mm') <= sup|y| g(mm' - k); the rest is at most twice the next term.
        if (static_cast<double>(mm - m.k) >= 2.0 * width + 1.0 && term <= 1e-18 * sum) {
            sum += 2.0 * sup[0] * g(r * (n + 1) - m.k);
            break;
        }
        if (n - N > 10'000'000) throw CertificationError("tail series does not decay");
    }
    return inflate(sum);
}

double inverse_tail(const OperatorCertificate& cert, const Element& y, Index N) {
    const std::int64_t r = cert.power;
    return std::visit(
        [&](const auto& op) -> double {
            using T = std::decay_t<decltype(op)>;
            if constexpr (std::is_same_v<T, WeightedBackwardShift>) {
                return shift_inverse_tail(op, std::get<SparseVector<Complex>>(y), r, N);
            } else if constexpr (std::is_same_v<T, Differentiation>) {
                const auto& f = std::get<PolySeries<Complex>>(y);
                if (op.model.kind == PolyModel::Kind::hardy) return hardy_inverse_tail(f, r, N);
                return ck_inverse_tail(f, r, N);
            } else {
                // ||B^m y|| = e^(-lambda m) ||y||, summed termwise
                const double q = std::exp(-op.lambda * static_cast<double>(r));
                return inflate(norm(y) * std::pow(q, static_cast<double>(N)) / (1.0 - q));
            }
        },
        cert.op.kind);
}

Element action(const OperatorCertificate& cert, const Element& y, Index n, Direction dir) {
    return dir == Direction::forward ? apply_forward(cert, y, n) : apply_inverse(cert, y, n);
}

}  // namespace

Index TailCertificate::max_threshold() const {
    Index best = 0;
    for (const auto& r : records) best = std::max(best, r.N);
    return best;
}

double cross_tail_limit(int l) { return std::ldexp(1.0 / l, -l); }
double own_tail_limit(int l) { return std::ldexp(1.0, -l); }

double tail_norm(const OperatorCertificate& cert, const Element& y, Index N, Direction dir) {
    if (N < 1) throw std::invalid_argument("tail_norm: N must be >= 1");
    if (!(space_of(y) == cert.op.space())) throw std::invalid_argument("tail_norm: element outside the operator's space");
    if (is_zero_element(y)) return 0.0;
    if (raw_forward_direction(cert, dir)) return forward_tail(cert, y, N);
    return inverse_tail(cert, y, N);
}

double subsum_norm(const OperatorCertificate& cert, const Element& y, const std::vector<Index>& F, Direction dir) {
    if (F.empty()) return 0.0;
    Element acc = zero_like(y);
    for (Index n : F) acc = linear_combine(Complex{1.0}, acc, Complex{1.0}, action(cert, y, n, dir));
    return norm_attained(acc);
}

double identity_residual(const OperatorCertificate& cert, const Element& y, Index n) {
    const Element tsy = apply_round_trip(cert, y, n);
    return norm(linear_combine(Complex{1.0}, tsy, Complex{-1.0}, y));
}

TailCertificate compute_thresholds(const OperatorCertificate& cert, Index cap) {
    const int L = static_cast<int>(cert.target_count());
    if (L < 1) throw std::invalid_argument("compute_thresholds: certificate has no targets");
    TailCertificate tc;
    tc.cert = cert;
    for (int l = 1; l <= L; ++l) {
        const double cross = cross_tail_limit(l);
        const double own = own_tail_limit(l);
        std::string failing;
        bool found = false;
        for (Index N = 1; N <= cap && !found; ++N) {
            ThresholdRecord rec{l, N, 0.0, 0.0, 0.0, 0.0};
            bool ok = true;
            for (int lam = 1; lam <= l && ok; ++lam) {
                const Element& y = cert.target(static_cast<std::size_t>(lam));
                const double f = tail_norm(cert, y, N, Direction::forward);
                const double b = tail_norm(cert, y, N, Direction::inverse);
                rec.forward_tail_bound = std::max(rec.forward_tail_bound, f);
                rec.inverse_tail_bound = std::max(rec.inverse_tail_bound, b);
                if (f > cross) {
                    ok = false;
                    failing = "forward tail of y_" + std::to_string(lam);
                } else if (b > cross) {
                    ok = false;
                    failing = "inverse tail of y_" + std::to_string(lam);
                }
            }
            if (!ok) continue;
            const Element& yl = cert.target(static_cast<std::size_t>(l));
            rec.own_inverse_tail = tail_norm(cert, yl, N, Direction::inverse);
            if (rec.own_inverse_tail > own) {
                failing = "own inverse tail";
                continue;
            }
            for (Index n = N; n < N + kIdentitySamples; ++n) {
                rec.identity_residual = std::max(rec.identity_residual, identity_residual(cert, yl, n));
            }
            if (rec.identity_residual > own) {
                failing = "identity residual ||T_n S_n y - y||";
                continue;
            }
            tc.records.push_back(rec);
            found = true;
        }
        if (!found) {
            std::ostringstream os;
            os << "no threshold N <= " << cap << " certifies target l=" << l << " for " << cert.op.name()
               << " (last failing condition: " << failing << ")";
            throw CertificationError(os.str());
        }
    }
    return tc;
}

double unconditional_probe(const OperatorCertificate& cert, const Element& y, Index N, int trials,
                           std::uint64_t seed, Index window, Direction dir) {
    if (trials < 1) throw std::invalid_argument("unconditional_probe: trials must be >= 1");
    if (N < 1 || window < 1) throw std::invalid_argument("unconditional_probe: need N >= 1 and window >= 1");
    std::vector<Element> terms;
    terms.reserve(static_cast<std::size_t>(window));
    for (Index n = N; n < N + window; ++n) terms.push_back(action(cert, y, n, dir));

    std::mt19937_64 rng(seed);
    double best = 0.0;
    for (int t = 0; t < trials; ++t) {
        Element acc = zero_like(y);
        for (const Element& term : terms) {
            if (rng() & 1U) acc = linear_combine(Complex{1.0}, acc, Complex{1.0}, term);
        }
        best = std::max(best, norm_attained(acc));
    }
    return best;
}

// ---------------------------------------------------------------------------
// JSON

Json to_json(const OperatorModel& op) {
    return std::visit(
        [](const auto& k) -> Json {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, WeightedBackwardShift>) {
                return {{"kind", "shift"}, {"w", scalar_to_json(k.w)}, {"space", to_json(k.space)}};
            } else if constexpr (std::is_same_v<T, Differentiation>) {
                return {{"kind", "differentiation"}, {"model", to_json(k.model)}};
            } else {
                return {{"kind", "translation"}, {"lambda", k.lambda}};
            }
        },
        op.kind);
}

OperatorModel operator_model_from_json(const Json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "shift") {
        return make_shift(scalar_from_json<Complex>(j.at("w")), sequence_space_from_json(j.at("space")));
    }
    if (kind == "differentiation") return make_differentiation(poly_model_from_json(j.at("model")));
    if (kind == "translation") return make_translation(j.at("lambda").get<double>());
    throw std::invalid_argument("json: unknown operator kind '" + kind + "'");
}

Json to_json(const OperatorCertificate& cert) {
    Json targets = Json::array();
    for (const auto& y : cert.targets) targets.push_back(to_json(y));
    return {{"op", to_json(cert.op)},
            {"twist", scalar_to_json(cert.twist)},
            {"power", cert.power},
            {"swapped", cert.swapped},
            {"targets", targets}};
}

OperatorCertificate certificate_from_json(const Json& j) {
    OperatorCertificate cert;
    cert.op = operator_model_from_json(j.at("op"));
    cert.twist = scalar_from_json<Complex>(j.at("twist"));
    cert.power = j.at("power").get<int>();
    cert.swapped = j.at("swapped").get<bool>();
    for (const auto& t : j.at("targets")) cert.targets.push_back(element_from_json(t));
    if (cert.power < 1) throw std::invalid_argument("json: certificate power must be >= 1");
    return cert;
}

Json to_json(const TailCertificate& tc) {
    Json recs = Json::array();
    for (const auto& r : tc.records) {
        recs.push_back({{"l", r.l},
                        {"N", r.N},
                        {"forward_tail_bound", r.forward_tail_bound},
                        {"inverse_tail_bound", r.inverse_tail_bound},
                        {"own_inverse_tail", r.own_inverse_tail},
                        {"identity_residual", r.identity_residual}});
    }
    return {{"certificate", to_json(tc.cert)}, {"records", recs}};
}

TailCertificate tail_certificate_from_json(const Json& j) {
    TailCertificate tc;
    tc.cert = certificate_from_json(j.at("certificate"));
    for (const auto& r : j.at("records")) {
        tc.records.push_back({r.at("l").get<int>(), r.at("N").get<Index>(), r.at("forward_tail_bound").get<double>(),
                              r.at("inverse_tail_bound").get<double>(), r.at("own_inverse_tail").get<double>(),
                              r.at("identity_residual").get<double>()});
    }
    return tc;
}

}  // namespace fhc
