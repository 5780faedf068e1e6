#pragma once

// JSON schema for the space types.
//
//   scalar      double -> number, Complex -> [re, im], Rational -> "p/q"
//   space       {"kind": "lp", "p": 2} | {"kind": "c0"}
//   model       {"kind": "hardy"} | {"kind": "ck", "k": 1, "a": 0, "b": 1, "mesh": 1e-4}
//   sparse      {"type": "sparse_vector", "space": ..., "entries": [{"k": 1, "value": scalar}, ...]}
//   polynomial  {"type": "poly_series", "model": ..., "coeffs": [scalar, ...]}
//   function    {"type": "piecewise_linear", "breakpoints": [scalar...], "values": [scalar...]}
//
// Doubles are written in shortest round-trip form; rationals round-trip
// exactly.

#include <json.hpp>

#include "fhc/spaces.hpp"

namespace fhc {

using Json = nlohmann::json;

inline Json scalar_to_json(double x) { return x; }
inline Json scalar_to_json(const Complex& x) { return Json::array({x.real(), x.imag()}); }
inline Json scalar_to_json(const Rational& x) { return rational_to_string(x); }

template <typename S>
S scalar_from_json(const Json& j) {
    if constexpr (std::is_same_v<S, double>) {
        return j.get<double>();
    } else if constexpr (std::is_same_v<S, Complex>) {
        if (j.is_number()) return {j.get<double>(), 0.0};
        return {j.at(0).get<double>(), j.at(1).get<double>()};
    } else {
        if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
        return rational_from_string(j.get<std::string>());
    }
}

Json to_json(const SequenceSpace& s);
Json to_json(const PolyModel& m);
SequenceSpace sequence_space_from_json(const Json& j);
PolyModel poly_model_from_json(const Json& j);

template <typename S>
Json to_json(const SparseVector<S>& v) {
    Json entries = Json::array();
    for (const auto& [k, x] : v.entries()) entries.push_back({{"k", k}, {"value", scalar_to_json(x)}});
    return {{"type", "sparse_vector"}, {"space", to_json(v.space())}, {"entries", entries}};
}

template <typename S>
Json to_json(const PolySeries<S>& p) {
    Json cs = Json::array();
    for (const auto& c : p.coeffs()) cs.push_back(scalar_to_json(c));
    return {{"type", "poly_series"}, {"model", to_json(p.model())}, {"coeffs", cs}};
}

template <typename S>
Json to_json(const PiecewiseLinear<S>& f) {
    Json xs = Json::array(), vs = Json::array();
    for (const auto& x : f.breakpoints()) xs.push_back(scalar_to_json(x));
    for (const auto& v : f.values()) vs.push_back(scalar_to_json(v));
    return {{"type", "piecewise_linear"}, {"breakpoints", xs}, {"values", vs}};
}

template <typename S>
SparseVector<S> sparse_vector_from_json(const Json& j) {
    if (j.at("type") != "sparse_vector") throw std::invalid_argument("json: expected sparse_vector");
    SparseVector<S> v(sequence_space_from_json(j.at("space")));
    for (const auto& e : j.at("entries")) v.set(e.at("k").get<std::int64_t>(), scalar_from_json<S>(e.at("value")));
    return v;
}

template <typename S>
PolySeries<S> poly_series_from_json(const Json& j) {
    if (j.at("type") != "poly_series") throw std::invalid_argument("json: expected poly_series");
    std::vector<S> cs;
    for (const auto& c : j.at("coeffs")) cs.push_back(scalar_from_json<S>(c));
    return PolySeries<S>(poly_model_from_json(j.at("model")), std::move(cs));
}

template <typename S>
PiecewiseLinear<S> piecewise_linear_from_json(const Json& j) {
    if (j.at("type") != "piecewise_linear") throw std::invalid_argument("json: expected piecewise_linear");
    std::vector<S> xs, vs;
    for (const auto& x : j.at("breakpoints")) xs.push_back(scalar_from_json<S>(x));
    for (const auto& v : j.at("values")) vs.push_back(scalar_from_json<S>(v));
    return PiecewiseLinear<S>(std::move(xs), std::move(vs));
}

Json to_json(const Element& e);
Element element_from_json(const Json& j);

}  // namespace fhc
