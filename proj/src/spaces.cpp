#include "fhc/spaces.hpp"

#include <functional>
#include <set>
#include <sstream>

namespace fhc {

std::string rational_to_string(const Rational& q) {
    std::ostringstream os;
    os << numerator(q);
    if (denominator(q) != 1) os << '/' << denominator(q);
    return os.str();
}

Rational rational_from_string(const std::string& s) {
    const auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rational(boost::multiprecision::cpp_int(s));
        const boost::multiprecision::cpp_int num(s.substr(0, slash));
        const boost::multiprecision::cpp_int den(s.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("zero denominator");
        return Rational(num, den);
    } catch (const std::exception&) {
        throw std::invalid_argument("not a rational literal: '" + s + "'");
    }
}

// ---------------------------------------------------------------------------
// Element helpers

double norm(const Element& e) {
    return std::visit([](const auto& v) { return norm(v); }, e);
}

double norm_attained(const Element& e) {
    if (const auto* p = std::get_if<PolySeries<Complex>>(&e)) return norm_interval(*p).lo;
    return norm(e);
}

namespace {

double real_coefficient(const Complex& a) {
    if (a.imag() != 0.0) throw std::invalid_argument("C_0(R+) elements are real; complex coefficient rejected");
    return a.real();
}

}  // namespace

Element linear_combine(const Complex& a, const Element& u, const Complex& b, const Element& v) {
    if (u.index() != v.index()) throw std::invalid_argument("linear_combine: elements live in different spaces");
    return std::visit(
        [&](const auto& uu) -> Element {
            using T = std::decay_t<decltype(uu)>;
            const T& vv = std::get<T>(v);
            if constexpr (std::is_same_v<T, PiecewiseLinearFn>) {
                return linear_combine(real_coefficient(a), uu, real_coefficient(b), vv);
            } else {
                return linear_combine(a, uu, b, vv);
            }
        },
        u);
}

Element zero_like(const Element& e) {
    return std::visit(
        [](const auto& v) -> Element {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, SparseVector<Complex>>) {
                return SparseVector<Complex>(v.space());
            } else if constexpr (std::is_same_v<T, PolySeries<Complex>>) {
                return PolySeries<Complex>(v.model());
            } else {
                return PiecewiseLinearFn{};
            }
        },
        e);
}

bool is_zero_element(const Element& e) {
    return std::visit([](const auto& v) { return v.empty(); }, e);
}

SpaceSpec space_of(const Element& e) {
    return std::visit(
        [](const auto& v) -> SpaceSpec {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, SparseVector<Complex>>) {
                return v.space();
            } else if constexpr (std::is_same_v<T, PolySeries<Complex>>) {
                return v.model();
            } else {
                return FunctionSpace{};
            }
        },
        e);
}

// ---------------------------------------------------------------------------
// Enumeration

namespace {

// Visits the stage-s candidates in the documented order until `emit`
// returns false. Each candidate is given as (slot, value) pairs.
using Candidate = std::vector<std::pair<int, Rational>>;

bool visit_stage(int s, int slots, const std::function<bool(const Candidate&)>& emit) {
    const std::int64_t unit = std::int64_t{1} << (s - 1);
    const std::int64_t bound = static_cast<std::int64_t>(s) * unit;
    std::vector<Rational> values;
    values.reserve(static_cast<std::size_t>(2 * bound));
    for (std::int64_t a = 1; a <= bound; ++a) {
        values.emplace_back(a, unit);
        values.emplace_back(-a, unit);
    }
    const std::size_t nv = values.size();

    for (int m = 1; m <= slots; ++m) {
        std::vector<int> subset(static_cast<std::size_t>(m));
        for (int i = 0; i < m; ++i) subset[static_cast<std::size_t>(i)] = i;
        while (true) {
            std::vector<std::size_t> digits(static_cast<std::size_t>(m), 0);
            while (true) {
                Candidate c;
                c.reserve(static_cast<std::size_t>(m));
                for (int i = 0; i < m; ++i) {
                    c.emplace_back(subset[static_cast<std::size_t>(i)], values[digits[static_cast<std::size_t>(i)]]);
                }
                if (!emit(c)) return false;
                int pos = m - 1;
                while (pos >= 0 && ++digits[static_cast<std::size_t>(pos)] == nv) {
                    digits[static_cast<std::size_t>(pos)] = 0;
                    --pos;
                }
                if (pos < 0) break;
            }
            // next subset in lexicographic order
            int pos = m - 1;
            while (pos >= 0 && subset[static_cast<std::size_t>(pos)] == slots - m + pos) --pos;
            if (pos < 0) break;
            ++subset[static_cast<std::size_t>(pos)];
            for (int i = pos + 1; i < m; ++i) {
                subset[static_cast<std::size_t>(i)] = subset[static_cast<std::size_t>(i - 1)] + 1;
            }
        }
    }
    return true;
}

template <typename T>
std::vector<T> enumerate_generic(std::size_t count, const std::function<int(int)>& slots_of_stage,
                                 const std::function<T(int, const Candidate&)>& build,
                                 const std::function<std::string(const T&)>& key) {
    std::vector<T> out;
    std::set<std::string> seen;
    for (int s = 1; out.size() < count; ++s) {
        visit_stage(s, slots_of_stage(s), [&](const Candidate& c) {
            T t = build(s, c);
            if (seen.insert(key(t)).second) out.push_back(std::move(t));
            return out.size() < count;
        });
    }
    return out;
}

}  // namespace

std::vector<SparseVector<Rational>> enumerate_sequences_exact(const SequenceSpace& space, std::size_t count) {
    space.validate();
    return enumerate_generic<SparseVector<Rational>>(
        count, [](int s) { return s; },
        [&](int, const Candidate& c) {
            SparseVector<Rational> v(space);
            for (const auto& [slot, val] : c) v.set(slot + 1, val);
            return v;
        },
        [](const SparseVector<Rational>& v) {
            std::string k;
            for (const auto& [i, x] : v.entries()) k += std::to_string(i) + ':' + rational_to_string(x) + ';';
            return k;
        });
}

std::vector<PolySeries<Rational>> enumerate_polynomials_exact(const PolyModel& model, std::size_t count) {
    model.validate();
    return enumerate_generic<PolySeries<Rational>>(
        count, [](int s) { return s; },
        [&](int s, const Candidate& c) {
            std::vector<Rational> cs(static_cast<std::size_t>(s), Rational(0));
            for (const auto& [slot, val] : c) cs[static_cast<std::size_t>(slot)] = val;
            return PolySeries<Rational>(model, std::move(cs));
        },
        [](const PolySeries<Rational>& p) {
            std::string k;
            for (const auto& x : p.coeffs()) k += rational_to_string(x) + ';';
            return k;
        });
}

std::vector<PiecewiseLinear<Rational>> enumerate_functions_exact(std::size_t count) {
    const auto nodes = [](int s) { return static_cast<int>((static_cast<std::int64_t>(s) + 1) << (s - 1)) - 1; };
    return enumerate_generic<PiecewiseLinear<Rational>>(
        count, nodes,
        [&](int s, const Candidate& c) {
            const int n = nodes(s);
            const Rational h(1, std::int64_t{1} << (s - 1));
            std::vector<Rational> xs, vs(static_cast<std::size_t>(n) + 2, Rational(0));
            for (int i = 0; i <= n + 1; ++i) xs.push_back(h * i);
            for (const auto& [slot, val] : c) vs[static_cast<std::size_t>(slot) + 1] = val;
            return canonical(PiecewiseLinear<Rational>(std::move(xs), std::move(vs)));
        },
        [](const PiecewiseLinear<Rational>& f) {
            std::string k;
            for (std::size_t i = 0; i < f.size(); ++i) {
                k += rational_to_string(f.breakpoints()[i]) + ':' + rational_to_string(f.values()[i]) + ';';
            }
            return k;
        });
}

SparseVector<Complex> to_float(const SparseVector<Rational>& v) {
    SparseVector<Complex> out(v.space());
    for (const auto& [k, x] : v.entries()) out.set(k, to_complex(x));
    return out;
}

PolySeries<Complex> to_float(const PolySeries<Rational>& v) {
    std::vector<Complex> cs;
    cs.reserve(v.coeffs().size());
    for (const auto& c : v.coeffs()) cs.push_back(to_complex(c));
    return PolySeries<Complex>(v.model(), std::move(cs));
}

PiecewiseLinearFn to_float(const PiecewiseLinear<Rational>& v) {
    std::vector<double> xs, vs;
    for (const auto& x : v.breakpoints()) xs.push_back(to_double(x));
    for (const auto& y : v.values()) vs.push_back(to_double(y));
    return PiecewiseLinearFn(std::move(xs), std::move(vs));
}

std::vector<Element> enumerate_targets(const SpaceSpec& space, std::size_t count) {
    std::vector<Element> out;
    out.reserve(count);
    std::visit(
        [&](const auto& sp) {
            using T = std::decay_t<decltype(sp)>;
            if constexpr (std::is_same_v<T, SequenceSpace>) {
                for (const auto& v : enumerate_sequences_exact(sp, count)) out.emplace_back(to_float(v));
            } else if constexpr (std::is_same_v<T, PolyModel>) {
                for (const auto& v : enumerate_polynomials_exact(sp, count)) out.emplace_back(to_float(v));
            } else {
                for (const auto& v : enumerate_functions_exact(count)) out.emplace_back(to_float(v));
            }
        },
        space);
    return out;
}

}  // namespace fhc
