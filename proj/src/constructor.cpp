#include "fhc/constructor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fhc {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Rounding allowance for a sum of `terms` floating terms of total norm `mass`.
double rounding_slack(std::size_t terms, double mass) { return static_cast<double>(terms + 1) * 4.0 * kEps * mass; }

void require_unswapped(const FhcPlacement& p, const char* what) {
    if (p.tc.cert.swapped) {
        throw std::invalid_argument(std::string(what) +
                                    ": swapped certificates do not satisfy the right-inverse identity on the dense set");
    }
}

struct Accumulator {
    Element sum;
    std::size_t terms = 0;
    double mass = 0.0;

    explicit Accumulator(const Element& like) : sum(zero_like(like)) {}

    void add(const Element& t) {
        sum = linear_combine(Complex{1.0}, sum, Complex{1.0}, t);
        ++terms;
        mass += norm(t);
    }
};

}  // namespace

int FhcPlacement::target_at(Index n) const {
    if (n < 1) return 0;
    const auto key = schedule.locate(n);
    return key ? static_cast<int>(key->l) : 0;
}

FhcPlacement assign_placements(const TailCertificate& tc, Index horizon) {
    const int L = tc.target_count();
    if (L < 1) throw std::invalid_argument("assign_placements: empty tail certificate");
    if (horizon < tc.max_threshold()) {
        throw std::invalid_argument("assign_placements: horizon " + std::to_string(horizon) +
                                    " is below the largest threshold N_l = " + std::to_string(tc.max_threshold()));
    }
    std::vector<PairKey> pairs;
    for (int l = 1; l <= L; ++l) pairs.push_back({l, tc.threshold(l)});

    FhcPlacement p;
    p.tc = tc;
    p.schedule = build_schedule(pairs);
    p.horizon = horizon;
    for (const auto& [n, key] : p.schedule.all_members(horizon)) p.placements.emplace_back(n, static_cast<int>(key.l));

    const OperatorCertificate& cert = tc.cert;
    for (int l = 1; l <= L; ++l) {
        const Index from = std::max(horizon + 1, tc.threshold(l));
        p.truncation_tail_bound += tail_norm(cert, cert.target(static_cast<std::size_t>(l)), from, Direction::inverse);
    }

    const auto tail_after = [&](Index w) {
        double t = 0.0;
        for (int l = 1; l <= L; ++l) t += tail_norm(cert, cert.target(static_cast<std::size_t>(l)), w + 1, Direction::inverse);
        return t;
    };
    p.window = 1;
    p.window_tail = tail_after(1);
    while (p.window_tail > kWindowTolerance && p.window < kMaxWindow) {
        ++p.window;
        p.window_tail = tail_after(p.window);
    }
    return p;
}

Materialized materialize(const FhcPlacement& p, Index M) {
    if (M < 0 || M > p.horizon) throw std::out_of_range("materialize: need 0 <= M <= horizon");
    const OperatorCertificate& cert = p.tc.cert;
    Accumulator acc(p.target(1));
    for (const auto& [n, l] : p.placements) {
        if (n > M) break;
        acc.add(apply_inverse(cert, p.target(l), n));
    }
    Materialized out;
    out.x = std::move(acc.sum);
    out.M = M;
    for (int l = 1; l <= p.target_count(); ++l) {
        const Index from = std::max(M + 1, p.tc.threshold(l));
        out.tail_bound += tail_norm(cert, p.target(l), from, Direction::inverse);
    }
    out.tail_bound += rounding_slack(acc.terms, acc.mass);
    return out;
}

OrbitValue orbit_eval(const FhcPlacement& p, Index n) {
    require_unswapped(p, "orbit_eval");
    if (n < 0 || n > p.horizon) throw std::out_of_range("orbit_eval: need 0 <= n <= horizon");
    const OperatorCertificate& cert = p.tc.cert;
    const Element& like = p.target(1);

    OrbitValue out;
    out.n = n;
    if (n == 0) {
        Materialized m = materialize(p, p.horizon);
        out.value = m.x;
        out.certified_error = m.tail_bound;
        out.forward_part = zero_like(like);
        out.backward_part = m.x;
        out.backward_norm = norm(m.x) + m.tail_bound;
        return out;
    }

    // j < n: T_n S_j z_j = T_(n-j) z_j, which vanishes once n - j reaches
    // the forward extinction index of z_j.
    Index reach = 0;
    for (int l = 1; l <= p.target_count(); ++l) reach = std::max(reach, forward_extinction(cert, p.target(l)));
    Accumulator fwd(like);
    for (Index j = std::max<Index>(1, n - reach + 1); j < n; ++j) {
        if (const int l = p.target_at(j)) fwd.add(apply_forward(cert, p.target(l), n - j));
    }

    // j > n: T_n S_j z_j = S_(j-n) z_j.
    Accumulator bwd(like);
    for (Index j = n + 1; j <= n + p.window; ++j) {
        if (const int l = p.target_at(j)) bwd.add(apply_inverse(cert, p.target(l), j - n));
    }

    out.target = p.target_at(n);
    out.forward_part = fwd.sum;
    out.backward_part = bwd.sum;
    out.forward_norm = norm(fwd.sum);
    const double slack = rounding_slack(fwd.terms + bwd.terms + 1, fwd.mass + bwd.mass);
    out.backward_norm = norm(bwd.sum) + p.window_tail;

    Element value = linear_combine(Complex{1.0}, fwd.sum, Complex{1.0}, bwd.sum);
    if (out.target) {
        // the middle term T_n S_n z_n, evaluated rather than assumed to be z_n
        const Element& z = p.target(out.target);
        const Element middle = apply_round_trip(cert, z, n);
        value = linear_combine(Complex{1.0}, value, Complex{1.0}, middle);
        out.middle_residual = norm(linear_combine(Complex{1.0}, middle, Complex{-1.0}, z));
    }
    out.value = std::move(value);
    out.certified_error = p.window_tail + slack;
    return out;
}

double distance_to_target(const FhcPlacement& p, const OrbitValue& v, int l) {
    return norm(linear_combine(Complex{1.0}, v.value, Complex{-1.0}, p.target(l)));
}

double proximity_bound(int l) {
    if (l < 1) throw std::invalid_argument("proximity_bound: l must be >= 1");
    return std::ldexp(5.0, -l);
}

double one_sided_bound(int l) { return std::ldexp(2.0, -l); }
double middle_bound(int l) { return std::ldexp(1.0, -l); }

// ---------------------------------------------------------------------------
// Exact path

namespace {

struct ExactShift {
    Rational w;
    int sign = 1;  // twist
    int power = 1;
    std::vector<SparseVector<Rational>> targets;
};

ExactShift exact_shift(const FhcPlacement& p) {
    if (!supports_exact(p)) {
        throw std::invalid_argument("exact evaluation needs a weighted shift with real weight and twist +-1");
    }
    const auto& cert = p.tc.cert;
    const auto& s = std::get<WeightedBackwardShift>(cert.op.kind);
    ExactShift e;
    e.w = Rational(s.w.real());
    e.sign = cert.twist.real() > 0 ? 1 : -1;
    e.power = cert.power;
    e.targets = enumerate_sequences_exact(s.space, cert.target_count());
    for (std::size_t i = 0; i < e.targets.size(); ++i) {
        if (!(Element(to_float(e.targets[i])) == cert.targets[i])) {
            throw std::invalid_argument("exact evaluation: certificate targets differ from the enumeration");
        }
    }
    return e;
}

SparseVector<Rational> signed_power(const ExactShift& e, SparseVector<Rational> v, Index steps) {
    if (e.sign < 0 && (steps % 2 != 0)) v = scale(Rational(-1), v);
    return v;
}

SparseVector<Rational> fwd(const ExactShift& e, const SparseVector<Rational>& v, Index n) {
    const Index steps = n * e.power;
    return signed_power(e, shift_forward(v, e.w, steps), steps);
}

SparseVector<Rational> inv(const ExactShift& e, const SparseVector<Rational>& v, Index n) {
    const Index steps = n * e.power;
    return signed_power(e, shift_inverse(v, e.w, steps), steps);
}

}  // namespace

bool supports_exact(const FhcPlacement& p) {
    const auto& cert = p.tc.cert;
    const auto* s = std::get_if<WeightedBackwardShift>(&cert.op.kind);
    if (!s || s->w.imag() != 0.0 || cert.swapped) return false;
    return cert.twist == Complex{1.0, 0.0} || cert.twist == Complex{-1.0, 0.0};
}

SparseVector<Rational> materialize_exact(const FhcPlacement& p, Index M) {
    if (M < 0 || M > p.horizon) throw std::out_of_range("materialize_exact: need 0 <= M <= horizon");
    const ExactShift e = exact_shift(p);
    SparseVector<Rational> x(e.targets.front().space());
    for (const auto& [n, l] : p.placements) {
        if (n > M) break;
        x = x + inv(e, e.targets[static_cast<std::size_t>(l - 1)], n);
    }
    return x;
}

SparseVector<Rational> orbit_eval_exact(const FhcPlacement& p, Index n) {
    if (n < 0 || n > p.horizon) throw std::out_of_range("orbit_eval_exact: need 0 <= n <= horizon");
    const ExactShift e = exact_shift(p);
    SparseVector<Rational> out(e.targets.front().space());
    for (const auto& [j, l] : p.placements) {
        const auto& y = e.targets[static_cast<std::size_t>(l - 1)];
        if (j < n) {
            out = out + fwd(e, y, n - j);
        } else if (j == n) {
            out = out + fwd(e, inv(e, y, n), n);
        } else {
            out = out + inv(e, y, j - n);
        }
    }
    return out;
}

SparseVector<Rational> forward_exact(const FhcPlacement& p, const SparseVector<Rational>& v, Index n) {
    return fwd(exact_shift(p), v, n);
}

// ---------------------------------------------------------------------------
// JSON

Json to_json(const FhcPlacement& p) {
    Json places = Json::array();
    for (const auto& [n, l] : p.placements) places.push_back(Json::array({n, l}));
    return {{"tail_certificate", to_json(p.tc)},
            {"horizon", p.horizon},
            {"placements", places},
            {"truncation_tail_bound", p.truncation_tail_bound},
            {"window", p.window},
            {"window_tail", p.window_tail}};
}

FhcPlacement placement_from_json(const Json& j) {
    FhcPlacement p = assign_placements(tail_certificate_from_json(j.at("tail_certificate")), j.at("horizon").get<Index>());
    std::vector<std::pair<Index, int>> stored;
    for (const auto& e : j.at("placements")) stored.emplace_back(e.at(0).get<Index>(), e.at(1).get<int>());
    if (stored != p.placements) throw std::invalid_argument("json: placements disagree with the rebuilt schedule");
    return p;
}

}  // namespace fhc
