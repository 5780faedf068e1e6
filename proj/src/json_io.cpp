#include "fhc/json_io.hpp"

namespace fhc {

Json to_json(const SequenceSpace& s) {
    if (s.kind == SequenceSpace::Kind::c0) return {{"kind", "c0"}};
    return {{"kind", "lp"}, {"p", s.p}};
}

Json to_json(const PolyModel& m) {
    if (m.kind == PolyModel::Kind::hardy) return {{"kind", "hardy"}};
    return {{"kind", "ck"}, {"k", m.k}, {"a", m.a}, {"b", m.b}, {"mesh", m.mesh}};
}

SequenceSpace sequence_space_from_json(const Json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "c0") return SequenceSpace::c0();
    if (kind == "lp") {
        SequenceSpace s = SequenceSpace::lp(j.at("p").get<double>());
        s.validate();
        return s;
    }
    throw std::invalid_argument("json: unknown sequence space kind '" + kind + "'");
}

PolyModel poly_model_from_json(const Json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "hardy") return PolyModel::hardy();
    if (kind == "ck") {
        PolyModel m = PolyModel::ck(j.at("k").get<int>(), j.value("a", 0.0), j.value("b", 1.0), j.value("mesh", 1e-4));
        m.validate();
        return m;
    }
    throw std::invalid_argument("json: unknown polynomial model kind '" + kind + "'");
}

Json to_json(const Element& e) {
    return std::visit([](const auto& v) { return to_json(v); }, e);
}

Element element_from_json(const Json& j) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "sparse_vector") return sparse_vector_from_json<Complex>(j);
    if (type == "poly_series") return poly_series_from_json<Complex>(j);
    if (type == "piecewise_linear") return piecewise_linear_from_json<double>(j);
    throw std::invalid_argument("json: unknown element type '" + type + "'");
}

}  // namespace fhc
