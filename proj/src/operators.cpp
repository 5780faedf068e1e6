#include "fhc/operators.hpp"

#include <sstream>

namespace fhc {

namespace {

constexpr double kUnitTolerance = 1e-12;

template <typename... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

Element scale_element(const Complex& a, const Element& v) {
    if (a == Complex{1.0, 0.0}) return v;
    return std::visit(
        [&](const auto& x) -> Element {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, PiecewiseLinearFn>) {
                if (a.imag() != 0.0) throw std::invalid_argument("translation certificates accept real twists only");
                return scale(a.real(), x);
            } else {
                return scale(a, x);
            }
        },
        v);
}

[[noreturn]] void mismatch(const OperatorModel& op, const char* what) {
    throw std::invalid_argument(std::string(what) + ": element does not live in the space of " + op.name());
}

}  // namespace

void OperatorModel::validate() const {
    std::visit(overloaded{
                   [](const WeightedBackwardShift& s) {
                       if (!(std::abs(s.w) > 1.0)) throw std::invalid_argument("weighted shift: need |w| > 1");
                       s.space.validate();
                   },
                   [](const Differentiation& d) { d.model.validate(); },
                   [](const TranslationGenerator& t) {
                       if (!(t.lambda > 0.0)) throw std::invalid_argument("translation: need lambda > 0");
                   },
               },
               kind);
}

SpaceSpec OperatorModel::space() const {
    return std::visit(overloaded{
                          [](const WeightedBackwardShift& s) -> SpaceSpec { return s.space; },
                          [](const Differentiation& d) -> SpaceSpec { return d.model; },
                          [](const TranslationGenerator&) -> SpaceSpec { return FunctionSpace{}; },
                      },
                      kind);
}

std::string OperatorModel::name() const {
    std::ostringstream os;
    std::visit(overloaded{
                   [&](const WeightedBackwardShift& s) {
                       os << "weighted backward shift (w=" << s.w.real();
                       if (s.w.imag() != 0.0) os << (s.w.imag() < 0 ? "" : "+") << s.w.imag() << "i";
                       if (s.space.kind == SequenceSpace::Kind::c0) {
                           os << ", c0)";
                       } else {
                           os << ", l" << s.space.p << ")";
                       }
                   },
                   [&](const Differentiation& d) {
                       if (d.model.kind == PolyModel::Kind::hardy) {
                           os << "differentiation on H2";
                       } else {
                           os << "differentiation on C^" << d.model.k << "[" << d.model.a << "," << d.model.b << "]";
                       }
                   },
                   [&](const TranslationGenerator& t) { os << "translation generator (lambda=" << t.lambda << ")"; },
               },
               kind);
    return os.str();
}

OperatorModel make_shift(Complex w, SequenceSpace space) {
    OperatorModel op{WeightedBackwardShift{w, space}};
    op.validate();
    return op;
}

OperatorModel make_differentiation(PolyModel model) {
    OperatorModel op{Differentiation{model}};
    op.validate();
    return op;
}

OperatorModel make_translation(double lambda) {
    OperatorModel op{TranslationGenerator{lambda}};
    op.validate();
    return op;
}

OperatorCertificate make_certificate(const OperatorModel& op, std::size_t target_count) {
    op.validate();
    if (target_count < 1) throw std::invalid_argument("certificate: need at least one target");
    OperatorCertificate cert;
    cert.op = op;
    cert.targets = enumerate_targets(op.space(), target_count);
    return cert;
}

Element raw_forward(const OperatorModel& op, const Element& v, std::int64_t m) {
    if (m < 0) throw std::invalid_argument("raw_forward: negative iteration count");
    return std::visit(
        overloaded{
            [&](const WeightedBackwardShift& s) -> Element {
                const auto* x = std::get_if<SparseVector<Complex>>(&v);
                if (!x || !(x->space() == s.space)) mismatch(op, "apply_forward");
                return shift_forward(*x, s.w, m);
            },
            [&](const Differentiation& d) -> Element {
                const auto* x = std::get_if<PolySeries<Complex>>(&v);
                if (!x || !(x->model() == d.model)) mismatch(op, "apply_forward");
                if (m > x->degree()) return PolySeries<Complex>(d.model);
                return derivative(*x, static_cast<int>(m));
            },
            [&](const TranslationGenerator& t) -> Element {
                const auto* x = std::get_if<PiecewiseLinearFn>(&v);
                if (!x) mismatch(op, "apply_forward");
                if (m == 0) return *x;
                const double shift = static_cast<double>(m);
                return translate(*x, shift, std::exp(t.lambda * shift));
            },
        },
        op.kind);
}

Element raw_inverse(const OperatorModel& op, const Element& v, std::int64_t m) {
    if (m < 0) throw std::invalid_argument("raw_inverse: negative iteration count");
    return std::visit(
        overloaded{
            [&](const WeightedBackwardShift& s) -> Element {
                const auto* x = std::get_if<SparseVector<Complex>>(&v);
                if (!x || !(x->space() == s.space)) mismatch(op, "apply_inverse");
                return shift_inverse(*x, s.w, m);
            },
            [&](const Differentiation& d) -> Element {
                const auto* x = std::get_if<PolySeries<Complex>>(&v);
                if (!x || !(x->model() == d.model)) mismatch(op, "apply_inverse");
                return integrate(*x, m);
            },
            [&](const TranslationGenerator& t) -> Element {
                const auto* x = std::get_if<PiecewiseLinearFn>(&v);
                if (!x) mismatch(op, "apply_inverse");
                if (m == 0) return *x;
                const double shift = static_cast<double>(m);
                return translate(*x, -shift, std::exp(-t.lambda * shift));
            },
        },
        op.kind);
}

Element apply_forward(const OperatorCertificate& cert, const Element& v, std::int64_t n) {
    if (n < 0) throw std::invalid_argument("apply_forward: negative iteration count");
    const std::int64_t steps = n * cert.power;
    if (!cert.swapped) return scale_element(ipow(cert.twist, steps), raw_forward(cert.op, v, steps));
    return scale_element(ipow(std::conj(cert.twist), steps), raw_inverse(cert.op, v, steps));
}

Element apply_inverse(const OperatorCertificate& cert, const Element& v, std::int64_t n) {
    if (n < 0) throw std::invalid_argument("apply_inverse: negative iteration count");
    const std::int64_t steps = n * cert.power;
    if (!cert.swapped) return scale_element(ipow(std::conj(cert.twist), steps), raw_inverse(cert.op, v, steps));
    return scale_element(ipow(cert.twist, steps), raw_forward(cert.op, v, steps));
}

namespace {

// prod_{j<up} (top - j) / prod_{i=1..down} (base + i), multiplied pairwise
// from the largest factors down so the running value stays near 1 (and a
// pair of equal factors contributes exactly 1).
double factorial_ratio(std::int64_t base, std::int64_t down, std::int64_t top, std::int64_t up) {
    double f = 1.0;
    std::int64_t i = down, j = 0;
    while (i >= 1 || j < up) {
        if (i >= 1 && j < up) {
            f *= static_cast<double>(top - j++) / static_cast<double>(base + i--);
        } else if (j < up) {
            f *= static_cast<double>(top - j++);
        } else {
            f /= static_cast<double>(base + i--);
        }
    }
    return f;
}

// A^a B^b v (inverse_first) or B^a A^b v, one pass where possible.
Element raw_compose(const OperatorModel& op, const Element& v, std::int64_t a, std::int64_t b, bool inverse_first) {
    const auto e = [](std::int64_t k, std::int64_t m) { return m * k + m * (m - 1) / 2; };
    if (const auto* s = std::get_if<WeightedBackwardShift>(&op.kind)) {
        const auto& x = std::get<SparseVector<Complex>>(v);
        SparseVector<Complex> out(x.space());
        for (const auto& [k, c] : x.entries()) {
            if (inverse_first) {
                const std::int64_t k2 = k + b - a;
                if (k2 >= 1) out.set(k2, c * weight_power(s->w, e(k2, a) - e(k, b)));
            } else {
                const std::int64_t mid = k - b;
                if (mid >= 1) out.set(mid + a, c * weight_power(s->w, e(mid, b) - e(mid, a)));
            }
        }
        return out;
    }
    if (const auto* d = std::get_if<Differentiation>(&op.kind)) {
        const bool zero_base = d->model.kind == PolyModel::Kind::hardy || d->model.a == 0.0;
        const auto& f = std::get<PolySeries<Complex>>(v);
        if (zero_base) {
            std::vector<Complex> cs;
            for (int k = 0; k <= f.degree(); ++k) {
                const Complex c = f.coeff(k);
                if (c == Complex{}) continue;
                std::int64_t deg;
                double factor;
                if (inverse_first) {
                    // z^k -> k!/(k+b)! z^(k+b) -> k!/(k+b-a)! z^(k+b-a)
                    deg = k + b - a;
                    if (deg < 0) continue;
                    factor = factorial_ratio(k, b, k + b, a);
                } else {
                    // z^k -> k!/(k-b)! z^(k-b) -> k!/(k-b+a)! z^(k-b+a)
                    if (k < b) continue;
                    deg = k - b + a;
                    factor = factorial_ratio(k - b, a, k, b);
                }
                if (cs.size() <= static_cast<std::size_t>(deg)) cs.resize(static_cast<std::size_t>(deg) + 1);
                cs[static_cast<std::size_t>(deg)] += c * factor;
            }
            return PolySeries<Complex>(f.model(), std::move(cs));
        }
    }
    if (const auto* t = std::get_if<TranslationGenerator>(&op.kind); t && inverse_first) {
        // a right shift never clips, so A^a B^b is a single shift by a - b
        const double shift = static_cast<double>(a - b);
        return translate(std::get<PiecewiseLinearFn>(v), shift, std::exp(t->lambda * shift));
    }
    if (inverse_first) return raw_forward(op, raw_inverse(op, v, b), a);
    return raw_inverse(op, raw_forward(op, v, b), a);
}

}  // namespace

Element apply_round_trip(const OperatorCertificate& cert, const Element& v, std::int64_t n) {
    if (n < 0) throw std::invalid_argument("apply_round_trip: negative iteration count");
    const std::int64_t steps = n * cert.power;
    // twist^steps conj(twist)^steps in either orientation
    const Complex unit = ipow(cert.twist, steps) * ipow(std::conj(cert.twist), steps);
    return scale_element(unit, raw_compose(cert.op, v, steps, steps, !cert.swapped));
}

double right_inverse_identity_check(const OperatorCertificate& cert, const Element& v) {
    const Element abv = apply_forward(cert, apply_inverse(cert, v, 1), 1);
    return norm(linear_combine(Complex{1.0}, abv, Complex{-1.0}, v));
}

OperatorCertificate transform_power(const OperatorCertificate& cert, int r) {
    if (r < 1) throw std::invalid_argument("transform_power: r must be >= 1");
    OperatorCertificate out = cert;
    out.power = cert.power * r;
    return out;
}

OperatorCertificate transform_rotation(const OperatorCertificate& cert, Complex lambda) {
    if (std::abs(std::abs(lambda) - 1.0) > kUnitTolerance) {
        throw std::invalid_argument("transform_rotation: |lambda| must equal 1");
    }
    if (std::holds_alternative<TranslationGenerator>(cert.op.kind) && lambda.imag() != 0.0) {
        throw std::invalid_argument("transform_rotation: translation certificates accept real twists only");
    }
    OperatorCertificate out = cert;
    // The forward action of a swapped certificate is conj(twist) B, so the
    // stored twist absorbs conj(lambda) there.
    out.twist = cert.swapped ? std::conj(lambda) * cert.twist : lambda * cert.twist;
    return out;
}

OperatorCertificate transform_inverse(const OperatorCertificate& cert) {
    OperatorCertificate out = cert;
    out.swapped = !cert.swapped;
    return out;
}

std::int64_t forward_extinction(const OperatorCertificate& cert, const Element& v) {
    if (cert.swapped) return -1;
    const std::int64_t r = cert.power;
    const auto ceil_div = [](std::int64_t a, std::int64_t b) { return (a + b - 1) / b; };
    return std::visit(
        overloaded{
            [&](const SparseVector<Complex>& x) { return ceil_div(x.support_max(), r); },
            [&](const PolySeries<Complex>& x) { return ceil_div(x.degree() + 1, r); },
            [&](const PiecewiseLinearFn& x) -> std::int64_t {
                if (x.empty()) return 0;
                return static_cast<std::int64_t>(std::ceil(x.breakpoints().back() / static_cast<double>(r)));
            },
        },
        v);
}

}  // namespace fhc
