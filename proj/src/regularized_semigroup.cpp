#include "fhc/regularized_semigroup.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fhc {

void RegularizedSemigroup::validate() const {
    if (!(lambda > 0.0)) throw std::invalid_argument("semigroup: lambda must be > 0");
    if (const auto* s = std::get_if<ScalarC>(&c); s && !(s->c != 0.0 && std::isfinite(s->c))) {
        throw std::invalid_argument("semigroup: scalar C must be finite and nonzero");
    }
    if (const auto* d = std::get_if<DiagonalDecayC>(&c); d && !(d->ratio != 0.0 && std::abs(d->ratio) <= 1.0)) {
        throw std::invalid_argument("semigroup: diagonal C needs 0 < |ratio| <= 1");
    }
}

PiecewiseLinearFn w_apply(const RegularizedSemigroup& sg, double t, const PiecewiseLinearFn& f) {
    sg.validate();
    return w_apply(sg, t, ScaledFn<double>{f, 0.0}).materialize();
}

// ---------------------------------------------------------------------------
// Generator

double SmoothBump::operator()(double x) const {
    if (x < a || x > b) return 0.0;
    double acc = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
    return acc;
}

double SmoothBump::derivative(double x) const {
    if (x < a || x > b) return 0.0;
    double acc = 0.0;
    for (std::size_t i = coeffs.size(); i-- > 1;) acc = acc * x + static_cast<double>(i) * coeffs[i];
    return acc;
}

bool SmoothBump::is_zero() const {
    return std::all_of(coeffs.begin(), coeffs.end(), [](double c) { return c == 0.0; });
}

SmoothBump standard_bump() {
    // x^2 (1 - x)^2 = x^2 - 2 x^3 + x^4
    return {{0.0, 0.0, 1.0, -2.0, 1.0}, 0.0, 1.0};
}

double generator_residual(const RegularizedSemigroup& sg, const SmoothBump& f, double t_step, int grid_points) {
    sg.validate();
    if (!(t_step > 0.0)) throw std::invalid_argument("generator_residual: t_step must be > 0");
    if (!(f.a >= 0.0 && f.a < f.b)) throw std::invalid_argument("generator_residual: need 0 <= a < b");
    if (f.is_zero()) return 0.0;
    double scale = 0.0;
    for (double c : f.coeffs) scale = std::max(scale, std::abs(c));
    scale *= static_cast<double>(f.coeffs.size()) * std::pow(std::max(1.0, std::abs(f.b)), f.coeffs.size());
    const double tol = 1e-12 * scale;
    for (double end : {f.a, f.b}) {
        if (std::abs(f(end)) > tol || std::abs(f.derivative(end)) > tol) {
            throw std::invalid_argument("generator_residual: bump is not C^1 at the ends of its support");
        }
    }
    // C commutes with the translation part, so C^-1 W(h) f = e^{lambda h} f(. + h).
    const double lambda = sg.lambda;
    const double grow = std::exp(lambda * t_step);
    double worst = 0.0;
    for (int i = 0; i < grid_points; ++i) {
        const double x = f.b * static_cast<double>(i) / static_cast<double>(grid_points - 1);
        const double quotient = (grow * f(x + t_step) - f(x)) / t_step;
        worst = std::max(worst, std::abs(quotient - (f.derivative(x) + lambda * f(x))));
    }
    return worst;
}

// ---------------------------------------------------------------------------
// [Im(C)] norm

SparseVector<Complex> apply_c(const RegularizedSemigroup& sg, const SparseVector<Complex>& x) {
    sg.validate();
    return std::visit(
        [&](const auto& c) -> SparseVector<Complex> {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, IdentityC>) {
                return x;
            } else if constexpr (std::is_same_v<T, ScalarC>) {
                return scale(Complex{c.c}, x);
            } else {
                SparseVector<Complex> out(x.space());
                for (const auto& [k, v] : x.entries()) out.set(k, v * std::pow(c.ratio, static_cast<double>(k)));
                return out;
            }
        },
        sg.c);
}

double imc_norm(const RegularizedSemigroup& sg, const SparseVector<Complex>& x) {
    sg.validate();
    SparseVector<Complex> pre(x.space());
    for (const auto& [k, v] : x.entries()) {
        const double factor = std::visit(
            [&, k = k](const auto& c) -> double {
                using T = std::decay_t<decltype(c)>;
                if constexpr (std::is_same_v<T, IdentityC>) {
                    return 1.0;
                } else if constexpr (std::is_same_v<T, ScalarC>) {
                    return c.c;
                } else {
                    return std::pow(c.ratio, static_cast<double>(k));
                }
            },
            sg.c);
        const Complex p = v / factor;
        if (factor == 0.0 || !std::isfinite(p.real()) || !std::isfinite(p.imag())) {
            throw std::domain_error("imc_norm: vector is not in the range of C");
        }
        pre.set(k, p);
    }
    // the preimage must map back onto x
    const SparseVector<Complex> back = apply_c(sg, pre);
    const double scale = std::max(norm(x), std::numeric_limits<double>::min());
    if (norm(back - x) > 1e-12 * scale) throw std::domain_error("imc_norm: vector is not in the range of C");
    return norm(pre);
}

double imc_norm(const RegularizedSemigroup& sg, const PiecewiseLinearFn& x) {
    sg.validate();
    return norm(x) / std::abs(c_factor<double>(sg));
}

// ---------------------------------------------------------------------------
// Solution orbit

SolutionOrbit::SolutionOrbit(const FhcPlacement& placement) : placement_(&placement) {
    const auto& cert = placement.tc.cert;
    const auto* tr = std::get_if<TranslationGenerator>(&cert.op.kind);
    if (!tr) throw std::invalid_argument("solution_orbit: placement must come from a translation certificate");
    if (cert.swapped || cert.power != 1 || cert.twist != Complex{1.0, 0.0}) {
        throw std::invalid_argument("solution_orbit: needs the untransformed translation certificate");
    }
    lambda_ = tr->lambda;
    double mass = 0.0;
    for (int l = 1; l <= placement.target_count(); ++l) {
        const auto& y = std::get<PiecewiseLinearFn>(placement.target(l));
        if (!y.empty()) reach_ = std::max(reach_, y.breakpoints().back());
        mass += norm(y);
    }
    tail_factor_ = mass / -std::expm1(-lambda_);
}

ContinuousOrbitSource::Sample SolutionOrbit::at(double t) const {
    if (t < 0.0) throw std::invalid_argument("solution_orbit: t must be >= 0");
    const FhcPlacement& p = *placement_;
    const auto term = [&](Index j) {
        const double shift = t - static_cast<double>(j);
        return translate(std::get<PiecewiseLinearFn>(p.target(p.target_at(j))), shift, std::exp(lambda_ * shift));
    };
    std::size_t terms = 0;
    double mass = 0.0;
    PiecewiseLinearFn acc;
    const auto add = [&](const PiecewiseLinearFn& f) {
        acc = acc + f;
        ++terms;
        mass += norm(f);
    };

    const auto first = std::max<Index>(1, static_cast<Index>(std::floor(t - reach_)));
    const auto whole = static_cast<Index>(std::floor(t));
    const bool integer_time = static_cast<double>(whole) == t;
    const Index last_forward = integer_time ? whole - 1 : whole;
    for (Index j = first; j <= last_forward; ++j) {
        if (p.target_at(j)) add(term(j));
    }
    const auto last = static_cast<Index>(std::floor(t + static_cast<double>(p.window)));
    for (Index j = whole + 1; j <= last; ++j) {
        if (p.target_at(j)) add(term(j));
    }
    if (integer_time && whole >= 1 && p.target_at(whole)) add(term(whole));

    // omitted j > t + window: sum_l ||y_l|| sum_m e^{-lambda (window + m)}
    const double omitted = tail_factor_ * std::exp(-lambda_ * static_cast<double>(p.window));
    const double slack = static_cast<double>(terms + 1) * 4.0 * std::numeric_limits<double>::epsilon() * mass;
    return {std::move(acc), omitted + slack};
}

double SolutionOrbit::modulus(const PiecewiseLinearFn& f, double h) const {
    // ||e^{lambda h} f(. + h) - f|| <= (e^{lambda h} - 1)||f|| + e^{lambda h} Lip(f) h
    return std::expm1(lambda_ * h) * norm(f) + std::exp(lambda_ * h) * f.lipschitz() * h;
}

SolutionOrbit solution_orbit(const FhcPlacement& placement) { return SolutionOrbit(placement); }

}  // namespace fhc
