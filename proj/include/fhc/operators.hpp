#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "fhc/spaces.hpp"

namespace fhc {

// ---------------------------------------------------------------------------
// Action primitives, templated on the scalar so the exact-rational and
// floating paths share one implementation.

/// w^e for integer e, without NaNs from overflowing complex products.
template <typename S>
S weight_power(const S& w, long long e) {
    if constexpr (std::is_same_v<S, Complex>) {
        const double logmag = std::log(std::abs(w)) * static_cast<double>(e);
        if (std::abs(logmag) < 600.0) return ipow(w, e);
        return std::polar(std::exp(logmag), std::arg(w) * static_cast<double>(e));
    } else {
        return ipow(w, e);
    }
}

/// A^m of the weighted backward shift (x_k) -> (w^k x_{k+1}):
/// (A^m x)_k = w^{k + (k+1) + ... + (k+m-1)} x_{k+m}.
template <typename S>
SparseVector<S> shift_forward(const SparseVector<S>& v, const S& w, std::int64_t m) {
    if (m == 0) return v;
    SparseVector<S> out(v.space());
    for (const auto& [j, x] : v.entries()) {
        const std::int64_t k = j - m;
        if (k < 1) continue;
        out.set(k, x * weight_power(w, m * k + m * (m - 1) / 2));
    }
    return out;
}

/// B^m of the right inverse B(x) = (0, x_1/w, x_2/w^2, ...):
/// B^m e_k = w^{-(k + (k+1) + ... + (k+m-1))} e_{k+m}.
template <typename S>
SparseVector<S> shift_inverse(const SparseVector<S>& v, const S& w, std::int64_t m) {
    if (m == 0) return v;
    SparseVector<S> out(v.space());
    for (const auto& [k, x] : v.entries()) {
        out.set(k + m, x * weight_power(w, -(m * k + m * (m - 1) / 2)));
    }
    return out;
}

/// m-fold antiderivative vanishing at the model's base point (0 for H^2,
/// a for C^k[a,b]).
template <typename S>
PolySeries<S> integrate(const PolySeries<S>& f, std::int64_t m) {
    if (m == 0 || f.empty()) return f;
    const PolyModel& model = f.model();
    const bool zero_base = model.kind == PolyModel::Kind::hardy || model.a == 0.0;
    if (zero_base) {
        // B^m z^j = j!/(j+m)! z^{j+m}
        std::vector<S> cs(static_cast<std::size_t>(f.degree() + 1 + m), S(0));
        for (int j = 0; j <= f.degree(); ++j) {
            S c = f.coeff(j);
            for (std::int64_t i = 1; i <= m && !is_zero(c); ++i) c /= S(static_cast<double>(j + i));
            cs[static_cast<std::size_t>(j + m)] = c;
        }
        return PolySeries<S>(model, std::move(cs));
    }
    const S base = from_double<S>(model.a);
    PolySeries<S> g = f;
    for (std::int64_t step = 0; step < m && !g.empty(); ++step) {
        std::vector<S> cs(static_cast<std::size_t>(g.degree() + 2), S(0));
        for (int j = 0; j <= g.degree(); ++j) cs[static_cast<std::size_t>(j + 1)] = g.coeff(j) / S(j + 1);
        PolySeries<S> anti(model, cs);
        cs[0] = -anti.template evaluate<S>(base);
        g = PolySeries<S>(model, std::move(cs));
    }
    return g;
}

// ---------------------------------------------------------------------------
// Operator models

struct WeightedBackwardShift {
    Complex w{2.0, 0.0};
    SequenceSpace space{};
};

/// Differentiation D on H^2 or C^k[a,b]; right inverse is integration from
/// the model's base point.
struct Differentiation {
    PolyModel model{};
};

/// Generator f' + lambda f of W(t) f(x) = e^{lambda t} f(x + t) on C_0(R+),
/// discretised at t = 1: A f(x) = e^lambda f(x + 1), B y(x) = e^-lambda y(x - 1).
struct TranslationGenerator {
    double lambda = 1.0;
};

struct OperatorModel {
    std::variant<WeightedBackwardShift, Differentiation, TranslationGenerator> kind;

    void validate() const;
    SpaceSpec space() const;
    std::string name() const;
};

OperatorModel make_shift(Complex w, SequenceSpace space = SequenceSpace::lp(2.0));
OperatorModel make_differentiation(PolyModel model = PolyModel::hardy());
OperatorModel make_translation(double lambda = 1.0);

/// Operator A, right inverse B, dense targets y_1..y_L and the
/// transforms (twist lambda with |lambda| = 1, power r, role swap).
struct OperatorCertificate {
    OperatorModel op;
    std::vector<Element> targets;
    Complex twist{1.0, 0.0};  // multiplies A; B is multiplied by conj(twist)
    int power = 1;
    bool swapped = false;  // forward acts by B, inverse by A

    std::size_t target_count() const { return targets.size(); }
    const Element& target(std::size_t l) const { return targets.at(l - 1); }  // 1-based
};

OperatorCertificate make_certificate(const OperatorModel& op, std::size_t target_count);

/// Raw A^m / B^m of the underlying model, no twist, power or swap.
Element raw_forward(const OperatorModel& op, const Element& v, std::int64_t m);
Element raw_inverse(const OperatorModel& op, const Element& v, std::int64_t m);

Element apply_forward(const OperatorCertificate& cert, const Element& v, std::int64_t n);
Element apply_inverse(const OperatorCertificate& cert, const Element& v, std::int64_t n);

/// T^n S^n v in one pass with the combined weights, so that a large n does
/// not underflow the intermediate S^n v. Sequential fallback where no
/// closed form is available (C^k with a != 0, clipped translations).
Element apply_round_trip(const OperatorCertificate& cert, const Element& v, std::int64_t n);

/// ||A(B v) - v|| for the certificate's forward/inverse actions.
double right_inverse_identity_check(const OperatorCertificate& cert, const Element& v);

OperatorCertificate transform_power(const OperatorCertificate& cert, int r);
OperatorCertificate transform_rotation(const OperatorCertificate& cert, Complex lambda);
OperatorCertificate transform_inverse(const OperatorCertificate& cert);

/// Smallest n with apply_forward(cert, v, n') = 0 for every n' >= n when the
/// forward action is A (finite for every element of the dense sets); -1 if
/// the forward action is B.
std::int64_t forward_extinction(const OperatorCertificate& cert, const Element& v);

}  // namespace fhc
