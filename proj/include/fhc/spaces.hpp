#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "fhc/scalar.hpp"

namespace fhc {

// ---------------------------------------------------------------------------
// Space descriptors

/// l_p (1 <= p < inf) or c_0 over the index set {1, 2, ...}.
struct SequenceSpace {
    enum class Kind { lp, c0 };
    Kind kind = Kind::lp;
    double p = 2.0;

    static SequenceSpace lp(double p) { return {Kind::lp, p}; }
    static SequenceSpace c0() { return {Kind::c0, 0.0}; }

    void validate() const {
        if (kind == Kind::lp && !(p >= 1.0 && std::isfinite(p))) {
            throw std::invalid_argument("sequence space: p must lie in [1, inf)");
        }
    }
    friend bool operator==(const SequenceSpace& a, const SequenceSpace& b) {
        return a.kind == b.kind && (a.kind == Kind::c0 || a.p == b.p);
    }
};

/// Polynomial model: H^2 of the disc (l2 of Taylor coefficients) or C^k[a,b].
struct PolyModel {
    enum class Kind { hardy, ck };
    Kind kind = Kind::hardy;
    int k = 0;
    double a = 0.0;
    double b = 1.0;
    double mesh = 1e-4;  // sampling mesh for C^k sup norms

    static PolyModel hardy() { return {}; }
    static PolyModel ck(int k, double a = 0.0, double b = 1.0, double mesh = 1e-4) {
        return {Kind::ck, k, a, b, mesh};
    }

    void validate() const {
        if (kind == Kind::ck) {
            if (k < 0) throw std::invalid_argument("C^k model: k must be >= 0");
            if (!(a < b)) throw std::invalid_argument("C^k model: need a < b");
            if (!(mesh > 0.0)) throw std::invalid_argument("C^k model: mesh must be positive");
        }
    }
    friend bool operator==(const PolyModel& x, const PolyModel& y) {
        if (x.kind != y.kind) return false;
        return x.kind == Kind::hardy || (x.k == y.k && x.a == y.a && x.b == y.b && x.mesh == y.mesh);
    }
};

/// C_0(R+) with the sup norm.
struct FunctionSpace {
    friend bool operator==(const FunctionSpace&, const FunctionSpace&) { return true; }
};

using SpaceSpec = std::variant<SequenceSpace, PolyModel, FunctionSpace>;

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

// ---------------------------------------------------------------------------
// SparseVector

/// Finitely supported sequence x = sum_k x_k e_k with k >= 1. Zero entries
/// are never stored.
template <typename S>
class SparseVector {
public:
    using Scalar = S;

    SparseVector() = default;
    explicit SparseVector(SequenceSpace space) : space_(space) { space_.validate(); }

    static SparseVector unit(SequenceSpace space, std::int64_t k, const S& value = S(1)) {
        SparseVector v(space);
        v.set(k, value);
        return v;
    }

    const SequenceSpace& space() const { return space_; }
    const std::map<std::int64_t, S>& entries() const { return entries_; }
    bool empty() const { return entries_.empty(); }
    std::size_t size() const { return entries_.size(); }

    S get(std::int64_t k) const {
        auto it = entries_.find(k);
        return it == entries_.end() ? S(0) : it->second;
    }

    void set(std::int64_t k, const S& value) {
        if (k < 1) throw std::out_of_range("SparseVector: indices start at 1");
        if (is_zero(value)) {
            entries_.erase(k);
        } else {
            entries_[k] = value;
        }
    }

    /// Largest index carrying a nonzero entry, 0 for the zero vector.
    std::int64_t support_max() const { return entries_.empty() ? 0 : entries_.rbegin()->first; }

    friend bool operator==(const SparseVector& a, const SparseVector& b) {
        return a.space_ == b.space_ && a.entries_ == b.entries_;
    }

private:
    SequenceSpace space_{};
    std::map<std::int64_t, S> entries_;
};

// ---------------------------------------------------------------------------
// PolySeries

/// Polynomial c_0 + c_1 z + ... + c_d z^d; the leading coefficient is
/// nonzero or the list is empty (zero polynomial).
template <typename S>
class PolySeries {
public:
    using Scalar = S;

    PolySeries() = default;
    explicit PolySeries(PolyModel model, std::vector<S> coeffs = {}) : model_(model), coeffs_(std::move(coeffs)) {
        model_.validate();
        trim();
    }

    static PolySeries monomial(PolyModel model, int degree, const S& c = S(1)) {
        std::vector<S> cs(static_cast<std::size_t>(degree) + 1, S(0));
        cs.back() = c;
        return PolySeries(model, std::move(cs));
    }

    const PolyModel& model() const { return model_; }
    const std::vector<S>& coeffs() const { return coeffs_; }
    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    bool empty() const { return coeffs_.empty(); }

    S coeff(int i) const {
        return (i >= 0 && i < static_cast<int>(coeffs_.size())) ? coeffs_[static_cast<std::size_t>(i)] : S(0);
    }

    template <typename X>
    X evaluate(const X& x) const {
        X acc(0);
        for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + X(*it);
        return acc;
    }

    friend bool operator==(const PolySeries& a, const PolySeries& b) {
        return a.model_ == b.model_ && a.coeffs_ == b.coeffs_;
    }

private:
    void trim() {
        while (!coeffs_.empty() && is_zero(coeffs_.back())) coeffs_.pop_back();
    }

    PolyModel model_{};
    std::vector<S> coeffs_;
};

template <typename S>
PolySeries<S> derivative(const PolySeries<S>& f, int times = 1) {
    const int d = f.degree();
    if (times <= 0) return f;
    if (d < times) return PolySeries<S>(f.model());
    std::vector<S> out(static_cast<std::size_t>(d - times + 1), S(0));
    for (int j = times; j <= d; ++j) {
        S c = f.coeff(j);
        for (int i = 0; i < times; ++i) c *= S(j - i);
        out[static_cast<std::size_t>(j - times)] = c;
    }
    return PolySeries<S>(f.model(), std::move(out));
}

// ---------------------------------------------------------------------------
// PiecewiseLinear

/// Continuous piecewise-linear function on R+ given by strictly increasing
/// nonnegative breakpoints, linear in between and zero outside
/// [front, back]. The value at the last breakpoint is 0; the value at the
/// first breakpoint is 0 unless that breakpoint is the boundary x = 0.
/// The empty function is the zero function.
template <typename S>
class PiecewiseLinear {
public:
    using Scalar = S;

    PiecewiseLinear() = default;
    PiecewiseLinear(std::vector<S> breakpoints, std::vector<S> values)
        : x_(std::move(breakpoints)), v_(std::move(values)) {
        validate();
        trim_zero_runs();
    }

    /// Tent supported on [left, right] with the given peak at `mid`.
    static PiecewiseLinear tent(const S& left, const S& mid, const S& right, const S& peak) {
        return PiecewiseLinear({left, mid, right}, {S(0), peak, S(0)});
    }

    const std::vector<S>& breakpoints() const { return x_; }
    const std::vector<S>& values() const { return v_; }
    bool empty() const { return x_.empty(); }
    std::size_t size() const { return x_.size(); }

    S operator()(const S& x) const {
        if (x_.empty() || x < x_.front() || x > x_.back()) return S(0);
        auto it = std::upper_bound(x_.begin(), x_.end(), x);
        if (it == x_.end()) return v_.back();
        const std::size_t i = static_cast<std::size_t>(it - x_.begin());
        if (i == 0) return v_.front();
        const S& x0 = x_[i - 1];
        const S& x1 = x_[i];
        if (x == x0) return v_[i - 1];
        return v_[i - 1] + (v_[i] - v_[i - 1]) * ((x - x0) / (x1 - x0));
    }

    /// Largest absolute slope; bounds the sup-norm modulus |f(x+h) - f(x)| <= L h.
    double lipschitz() const {
        double best = 0.0;
        for (std::size_t i = 1; i < x_.size(); ++i) {
            best = std::max(best, magnitude(S((v_[i] - v_[i - 1]) / (x_[i] - x_[i - 1]))));
        }
        return best;
    }

    friend bool operator==(const PiecewiseLinear& a, const PiecewiseLinear& b) {
        return a.x_ == b.x_ && a.v_ == b.v_;
    }

private:
    void validate() const {
        if (x_.size() != v_.size()) throw std::invalid_argument("PiecewiseLinear: breakpoint/value size mismatch");
        if (x_.empty()) return;
        if (x_.size() < 2) throw std::invalid_argument("PiecewiseLinear: need at least two breakpoints");
        if (x_.front() < S(0)) throw std::invalid_argument("PiecewiseLinear: breakpoints must be >= 0");
        for (std::size_t i = 1; i < x_.size(); ++i) {
            if (!(x_[i - 1] < x_[i])) throw std::invalid_argument("PiecewiseLinear: breakpoints must increase strictly");
        }
        if (!is_zero(v_.back())) throw std::invalid_argument("PiecewiseLinear: value at the last breakpoint must be 0");
        if (!is_zero(v_.front()) && !is_zero(x_.front())) {
            throw std::invalid_argument("PiecewiseLinear: value at the first breakpoint must be 0 unless it is x = 0");
        }
    }

    // Drops breakpoints that sit inside a run of zeros.
    void trim_zero_runs() {
        std::vector<S> x, v;
        x.reserve(x_.size());
        v.reserve(v_.size());
        for (std::size_t i = 0; i < x_.size(); ++i) {
            const bool zl = i == 0 || is_zero(v_[i - 1]);
            const bool zr = i + 1 == x_.size() || is_zero(v_[i + 1]);
            if (is_zero(v_[i]) && zl && zr) continue;
            x.push_back(x_[i]);
            v.push_back(v_[i]);
        }
        // A lone surviving breakpoint can only be a nonzero boundary value at
        // x = 0 whose neighbour was dropped; that cannot happen because the
        // neighbour of a nonzero value is always kept.
        x_ = std::move(x);
        v_ = std::move(v);
    }

    std::vector<S> x_;
    std::vector<S> v_;
};

using PiecewiseLinearFn = PiecewiseLinear<double>;

/// Removes interior breakpoints where the function is exactly collinear.
template <typename S>
PiecewiseLinear<S> canonical(const PiecewiseLinear<S>& f) {
    const auto& x = f.breakpoints();
    const auto& v = f.values();
    if (x.size() < 3) return f;
    std::vector<S> xs{x.front()}, vs{v.front()};
    for (std::size_t i = 1; i + 1 < x.size(); ++i) {
        const S lhs = (v[i] - vs.back()) * (x[i + 1] - x[i]);
        const S rhs = (v[i + 1] - v[i]) * (x[i] - xs.back());
        if (lhs == rhs) continue;
        xs.push_back(x[i]);
        vs.push_back(v[i]);
    }
    xs.push_back(x.back());
    vs.push_back(v.back());
    return PiecewiseLinear<S>(std::move(xs), std::move(vs));
}

/// g(x) = scale * f(x + shift) on x >= 0. A positive shift moves the graph
/// left and clips whatever crosses x = 0; a negative shift moves it right.
template <typename S>
PiecewiseLinear<S> translate(const PiecewiseLinear<S>& f, const S& shift, const S& scale = S(1)) {
    if (f.empty() || is_zero(scale)) return {};
    const auto& x = f.breakpoints();
    const auto& v = f.values();
    if (x.back() - shift <= S(0)) return {};
    std::vector<S> xs, vs;
    xs.reserve(x.size() + 1);
    vs.reserve(x.size() + 1);
    const bool clipped = x.front() - shift < S(0);
    if (clipped) {
        xs.push_back(S(0));
        vs.push_back(scale * f(shift));
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
        const S xi = x[i] - shift;
        if (clipped ? !(S(0) < xi) : xi < S(0)) continue;
        xs.push_back(xi);
        vs.push_back(scale * v[i]);
    }
    return PiecewiseLinear<S>(std::move(xs), std::move(vs));
}

// ---------------------------------------------------------------------------
// Norms

namespace detail {

inline double lp_norm(const std::vector<double>& mags, double p) {
    double m = 0.0;
    for (double a : mags) m = std::max(m, a);
    if (m == 0.0) return 0.0;
    double acc = 0.0;
    for (double a : mags) acc += std::pow(a / m, p);
    return m * std::pow(acc, 1.0 / p);
}

}  // namespace detail

template <typename S>
double norm(const SparseVector<S>& v) {
    std::vector<double> mags;
    mags.reserve(v.size());
    for (const auto& [k, x] : v.entries()) mags.push_back(magnitude(x));
    if (v.space().kind == SequenceSpace::Kind::c0) {
        double m = 0.0;
        for (double a : mags) m = std::max(m, a);
        return m;
    }
    return detail::lp_norm(mags, v.space().p);
}

/// sum_k |x_k|^p computed exactly (integer p, rational entries).
inline Rational exact_norm_pow(const SparseVector<Rational>& v, int p) {
    Rational acc(0);
    for (const auto& [k, x] : v.entries()) acc += ipow(exact_magnitude(x), p);
    return acc;
}

inline Rational exact_norm_sup(const SparseVector<Rational>& v) {
    Rational m(0);
    for (const auto& [k, x] : v.entries()) m = std::max(m, exact_magnitude(x));
    return m;
}

/// Sup-norm bracket of f^(i) on [a, b] for the C^k model: grid sample with
/// mesh h plus the Lipschitz correction h * sum_j |c_j| j max(|a|,|b|)^(j-1).
template <typename S>
Interval sup_interval(const PolySeries<S>& f, const PolyModel& m) {
    if (f.empty()) return {0.0, 0.0};
    const auto steps = static_cast<std::int64_t>(std::ceil((m.b - m.a) / m.mesh));
    const double h = (m.b - m.a) / static_cast<double>(steps);
    double sample = 0.0;
    for (std::int64_t i = 0; i <= steps; ++i) {
        const double x = (i == steps) ? m.b : m.a + h * static_cast<double>(i);
        Complex acc{};
        for (auto it = f.coeffs().rbegin(); it != f.coeffs().rend(); ++it) acc = acc * x + to_complex(*it);
        sample = std::max(sample, std::abs(acc));
    }
    const double r = std::max(std::abs(m.a), std::abs(m.b));
    double lip = 0.0;
    for (int j = 1; j <= f.degree(); ++j) {
        lip += magnitude(f.coeff(j)) * j * std::pow(r, j - 1);
    }
    return {sample, sample + h * lip};
}

template <typename S>
Interval norm_interval(const PolySeries<S>& f) {
    const PolyModel& m = f.model();
    if (m.kind == PolyModel::Kind::hardy) {
        std::vector<double> mags;
        for (const S& c : f.coeffs()) mags.push_back(magnitude(c));
        const double n = detail::lp_norm(mags, 2.0);
        return {n, n};
    }
    Interval out;
    PolySeries<S> g = f;
    for (int i = 0; i <= m.k; ++i) {
        const Interval s = sup_interval(g, m);
        out.lo = std::max(out.lo, s.lo);
        out.hi = std::max(out.hi, s.hi);
        g = derivative(g);
    }
    return out;
}

/// H^2: exact l2 of coefficients. C^k: the rigorous upper end of the
/// sampled bracket, so the value is a true upper bound of the norm.
template <typename S>
double norm(const PolySeries<S>& f) {
    return norm_interval(f).hi;
}

template <typename S>
double norm(const PiecewiseLinear<S>& f) {
    double m = 0.0;
    for (const S& v : f.values()) m = std::max(m, magnitude(v));
    return m;
}

inline Rational exact_norm_sup(const PiecewiseLinear<Rational>& f) {
    Rational m(0);
    for (const auto& v : f.values()) m = std::max(m, exact_magnitude(v));
    return m;
}

// ---------------------------------------------------------------------------
// Linear combinations

template <typename S>
SparseVector<S> linear_combine(const S& a, const SparseVector<S>& u, const S& b, const SparseVector<S>& v) {
    if (!(u.space() == v.space())) throw std::invalid_argument("linear_combine: sequence spaces differ");
    SparseVector<S> out(u.space());
    for (const auto& [k, x] : u.entries()) out.set(k, a * x);
    for (const auto& [k, x] : v.entries()) out.set(k, out.get(k) + b * x);
    return out;
}

template <typename S>
PolySeries<S> linear_combine(const S& a, const PolySeries<S>& u, const S& b, const PolySeries<S>& v) {
    if (!(u.model() == v.model())) throw std::invalid_argument("linear_combine: polynomial models differ");
    const std::size_t n = std::max(u.coeffs().size(), v.coeffs().size());
    std::vector<S> cs(n, S(0));
    for (std::size_t i = 0; i < n; ++i) {
        cs[i] = a * u.coeff(static_cast<int>(i)) + b * v.coeff(static_cast<int>(i));
    }
    return PolySeries<S>(u.model(), std::move(cs));
}

template <typename S>
PiecewiseLinear<S> linear_combine(const S& a, const PiecewiseLinear<S>& u, const S& b, const PiecewiseLinear<S>& v) {
    std::vector<S> xs;
    xs.reserve(u.size() + v.size());
    std::merge(u.breakpoints().begin(), u.breakpoints().end(), v.breakpoints().begin(), v.breakpoints().end(),
               std::back_inserter(xs));
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    if (xs.empty()) return {};
    std::vector<S> vs;
    vs.reserve(xs.size());
    for (const S& x : xs) vs.push_back(a * u(x) + b * v(x));
    // A union whose ends are interior to neither input keeps zero ends; the
    // only nonzero end value can sit at x = 0.
    return PiecewiseLinear<S>(std::move(xs), std::move(vs));
}

template <typename V>
V operator+(const V& u, const V& v)
    requires requires { typename V::Scalar; linear_combine(typename V::Scalar(1), u, typename V::Scalar(1), v); }
{
    using S = typename V::Scalar;
    return linear_combine(S(1), u, S(1), v);
}

template <typename V>
V operator-(const V& u, const V& v)
    requires requires { typename V::Scalar; linear_combine(typename V::Scalar(1), u, typename V::Scalar(-1), v); }
{
    using S = typename V::Scalar;
    return linear_combine(S(1), u, S(-1), v);
}

template <typename S>
SparseVector<S> scale(const S& a, const SparseVector<S>& v) {
    SparseVector<S> out(v.space());
    for (const auto& [k, x] : v.entries()) out.set(k, a * x);
    return out;
}

template <typename S>
PolySeries<S> scale(const S& a, const PolySeries<S>& v) {
    std::vector<S> cs = v.coeffs();
    for (S& c : cs) c *= a;
    return PolySeries<S>(v.model(), std::move(cs));
}

template <typename S>
PiecewiseLinear<S> scale(const S& a, const PiecewiseLinear<S>& f) {
    if (is_zero(a)) return {};
    std::vector<S> vs = f.values();
    for (S& v : vs) v *= a;
    return PiecewiseLinear<S>(f.breakpoints(), std::move(vs));
}

// ---------------------------------------------------------------------------
// Elements used by the operator and construction layers

/// A point of one of the three concrete spaces, in floating mode.
using Element = std::variant<SparseVector<Complex>, PolySeries<Complex>, PiecewiseLinearFn>;

double norm(const Element& e);
/// A value the true norm certainly reaches: equal to norm() except for
/// C^k polynomials, where it is the sampled lower end of the bracket.
double norm_attained(const Element& e);
Element linear_combine(const Complex& a, const Element& u, const Complex& b, const Element& v);
Element zero_like(const Element& e);
bool is_zero_element(const Element& e);
SpaceSpec space_of(const Element& e);

// ---------------------------------------------------------------------------
// Dense target enumeration
//
// Stage s = 1, 2, ... covers the coefficient grid 2^-(s-1) Z ∩ [-s, s] on a
// stage-dependent slot set:
//   sequences:  slots e_1 .. e_s
//   polynomials: slots z^0 .. z^(s-1)
//   C_0(R+):    nodes i * 2^-(s-1), 0 < i < (s+1) 2^(s-1), of a
//               piecewise-linear function vanishing at 0 and at s + 1
// Within a stage, candidates are ordered by number of nonzero slots, then
// lexicographically by slot subset, then by value tuple (last slot fastest)
// with values ordered 1, -1, 2, -2, ... in units of 2^-(s-1). A candidate
// already emitted by an earlier stage (same exact element) is skipped.

std::vector<SparseVector<Rational>> enumerate_sequences_exact(const SequenceSpace& space, std::size_t count);
std::vector<PolySeries<Rational>> enumerate_polynomials_exact(const PolyModel& model, std::size_t count);
std::vector<PiecewiseLinear<Rational>> enumerate_functions_exact(std::size_t count);

std::vector<Element> enumerate_targets(const SpaceSpec& space, std::size_t count);

SparseVector<Complex> to_float(const SparseVector<Rational>& v);
PolySeries<Complex> to_float(const PolySeries<Rational>& v);
PiecewiseLinearFn to_float(const PiecewiseLinear<Rational>& v);

}  // namespace fhc
