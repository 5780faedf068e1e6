#pragma once

#include <variant>
#include <vector>

#include "fhc/verifier.hpp"

namespace fhc {

// Injective bounded multipliers C.
struct IdentityC {};
struct ScalarC {
    double c = 1.0;  // C f = c f, c != 0
};
/// (C x)_k = ratio^k x_k on sequence spaces; 0 < |ratio| <= 1.
struct DiagonalDecayC {
    double ratio = 0.5;
};

using CModel = std::variant<IdentityC, ScalarC, DiagonalDecayC>;

/// W(t) f(x) = C (e^{lambda t} f(x + t)) on C_0(R+), with W(0) = C and
/// W(t) W(s) = C W(t + s).
struct RegularizedSemigroup {
    double lambda = 1.0;
    CModel c = IdentityC{};

    void validate() const;
    bool acts_on_functions() const { return !std::holds_alternative<DiagonalDecayC>(c); }
};

/// A function stored as exp(log_scale) * shape, so that the factors
/// e^{lambda t} compose by exact addition of exponents.
template <typename S>
struct ScaledFn {
    PiecewiseLinear<S> shape;
    S log_scale = S(0);

    PiecewiseLinearFn materialize() const {
        std::vector<double> xs, vs;
        const double k = std::exp(to_double(log_scale));
        for (const auto& x : shape.breakpoints()) xs.push_back(to_double(x));
        for (const auto& v : shape.values()) vs.push_back(k * to_double(v));
        return PiecewiseLinearFn(std::move(xs), std::move(vs));
    }
};

/// Multiplier of a function-space C as a scalar of type S.
template <typename S>
S c_factor(const RegularizedSemigroup& sg) {
    if (const auto* s = std::get_if<ScalarC>(&sg.c)) return from_double<S>(s->c);
    if (std::holds_alternative<IdentityC>(sg.c)) return S(1);
    throw std::invalid_argument("semigroup: the diagonal C model acts on sequences only");
}

template <typename S>
ScaledFn<S> apply_c(const RegularizedSemigroup& sg, const ScaledFn<S>& f) {
    return {scale(c_factor<S>(sg), f.shape), f.log_scale};
}

/// W(t) f with t and lambda in the scalar type S (exact for Rational).
template <typename S>
ScaledFn<S> w_apply(const RegularizedSemigroup& sg, const S& t, const ScaledFn<S>& f) {
    if (t < S(0)) throw std::invalid_argument("w_apply: t must be >= 0");
    const S lambda = from_double<S>(sg.lambda);
    return apply_c(sg, ScaledFn<S>{translate(f.shape, t), f.log_scale + lambda * t});
}

PiecewiseLinearFn w_apply(const RegularizedSemigroup& sg, double t, const PiecewiseLinearFn& f);

/// ||W(t) W(s) f - C W(t + s) f||_inf. Zero exactly in rational mode
/// whenever the law holds for the representation.
template <typename S>
double semigroup_law_residual(const RegularizedSemigroup& sg, const S& t, const S& s, const ScaledFn<S>& f) {
    if (t < S(0) || s < S(0)) throw std::invalid_argument("semigroup_law_residual: t, s must be >= 0");
    const ScaledFn<S> lhs = w_apply(sg, t, w_apply(sg, s, f));
    const ScaledFn<S> rhs = apply_c(sg, w_apply(sg, S(t + s), f));
    if (lhs.log_scale == rhs.log_scale) {
        const double k = std::exp(to_double(lhs.log_scale));
        return k * norm(lhs.shape - rhs.shape);
    }
    return norm(lhs.materialize() - rhs.materialize());
}

/// Polynomial on [a, b], zero elsewhere; C^1 on R+ when f and f' vanish at
/// both ends.
struct SmoothBump {
    std::vector<double> coeffs;
    double a = 0.0;
    double b = 1.0;

    double operator()(double x) const;
    double derivative(double x) const;
    bool is_zero() const;
};

/// x^2 (1 - x)^2 on [0, 1].
SmoothBump standard_bump();

/// Grid sup of |C^-1 (W(h) f - C f) / h - (f' + lambda f)| on [0, b].
/// Rejects bumps that are not C^1 across the support ends.
double generator_residual(const RegularizedSemigroup& sg, const SmoothBump& f, double t_step, int grid_points = 4001);

/// ||C^-1 x||, the [Im(C)] norm for injective C. Throws when x is not in
/// the range of C (the preimage is not finite or does not map back).
double imc_norm(const RegularizedSemigroup& sg, const SparseVector<Complex>& x);
double imc_norm(const RegularizedSemigroup& sg, const PiecewiseLinearFn& x);
/// C x for sequences.
SparseVector<Complex> apply_c(const RegularizedSemigroup& sg, const SparseVector<Complex>& x);

/// t -> e^{tA} x for the vector x built from a translation certificate,
/// evaluated term by term as e^{lambda (t - j)} z_j(. + t - j).
class SolutionOrbit : public ContinuousOrbitSource {
public:
    explicit SolutionOrbit(const FhcPlacement& placement);

    Sample at(double t) const override;
    double modulus(const PiecewiseLinearFn& f, double h) const override;
    double growth() const override { return lambda_; }

private:
    const FhcPlacement* placement_;
    double lambda_;
    double reach_ = 0.0;        // largest right end of a target's support
    double tail_factor_ = 0.0;  // sum_l ||y_l|| / (1 - e^-lambda)
};

SolutionOrbit solution_orbit(const FhcPlacement& placement);

}  // namespace fhc
