#include "fhc/experiment.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <ostream>
#include <regex>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace fhc {

namespace {

const std::vector<std::string> kInvariants = {
    "right_inverse_identity", "tail_soundness",     "proof_bound",   "component_forward",
    "component_backward",     "component_middle",   "covering_set_check", "density_floor",
    "continuous_bridge",      "exact_decomposition",
};

const std::map<std::string, std::set<std::string>> kSchema = {
    {"operator", {"kind", "w", "space", "p", "k", "a", "b", "lambda", "twist", "power"}},
    {"run", {"targets", "horizon", "mode", "precision", "seed", "probe_trials", "cap", "grid"}},
    {"radii", {"factor"}},
    {"output", {"dir", "csv", "json"}},
    {"debug", {"inject_violation"}},
};

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_double(const std::string& text) {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument("trailing characters");
    return v;
}

long long parse_integer(const std::string& text) {
    std::size_t used = 0;
    const long long v = std::stoll(text, &used);
    if (used != text.size()) throw std::invalid_argument("trailing characters");
    return v;
}

}  // namespace

Complex parse_complex(const std::string& raw) {
    std::string s;
    for (char ch : raw) {
        if (ch != ' ' && ch != '\t') s.push_back(ch);
    }
    if (s.empty()) throw std::invalid_argument("empty complex literal");
    try {
        if (s.back() != 'i') return {parse_double(s), 0.0};
        const std::string body = s.substr(0, s.size() - 1);
        // split at the last sign that is not the leading one or part of an exponent
        std::size_t split = std::string::npos;
        for (std::size_t i = body.size(); i-- > 1;) {
            if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
                split = i;
                break;
            }
        }
        const std::string re = split == std::string::npos ? "" : body.substr(0, split);
        const std::string im = split == std::string::npos ? body : body.substr(split);
        double imag;
        if (im.empty() || im == "+") {
            imag = 1.0;
        } else if (im == "-") {
            imag = -1.0;
        } else {
            imag = parse_double(im);
        }
        return {re.empty() ? 0.0 : parse_double(re), imag};
    } catch (const std::exception&) {
        throw std::invalid_argument("not a complex literal: '" + raw + "'");
    }
}

std::vector<PairKey> parse_pairs(const std::string& text) {
    static const std::regex pair_re(R"(\(\s*(\d+)\s*,\s*(\d+)\s*\))");
    std::vector<PairKey> out;
    for (std::sregex_iterator it(text.begin(), text.end(), pair_re), end; it != end; ++it) {
        out.push_back({std::stoll((*it)[1]), std::stoll((*it)[2])});
    }
    const std::string stripped = std::regex_replace(text, pair_re, "");
    if (out.empty() || stripped.find_first_not_of(" ,;\t") != std::string::npos) {
        throw std::invalid_argument("pairs must look like \"(1,2),(3,4)\"; got '" + text + "'");
    }
    return out;
}

// ---------------------------------------------------------------------------
// Config

void ExperimentConfig::validate() const {
    if (kind != "shift" && kind != "differentiation" && kind != "translation") {
        throw ConfigError("operator.kind must be shift, differentiation or translation (got '" + kind + "')");
    }
    if (targets < 1) throw ConfigError("run.targets must be >= 1");
    if (horizon < 1) throw ConfigError("run.horizon must be >= 1");
    if (!(factor > 1.0)) throw ConfigError("radii.factor must be > 1 (got " + std::to_string(factor) + ")");
    if (mode != "discrete" && mode != "continuous") throw ConfigError("run.mode must be discrete or continuous");
    if (precision != "float" && precision != "rational") throw ConfigError("run.precision must be float or rational");
    if (mode == "continuous" && kind != "translation") {
        throw ConfigError("run.mode = continuous needs operator.kind = translation");
    }
    if (precision == "rational" && (kind != "shift" || w.imag() != 0.0 || twist.imag() != 0.0)) {
        throw ConfigError("run.precision = rational needs a shift with real weight and twist +-1");
    }
    if (power < 1) throw ConfigError("operator.power must be >= 1");
    if (probe_trials < 1) throw ConfigError("run.probe_trials must be >= 1");
    if (cap < 1) throw ConfigError("run.cap must be >= 1");
    if (!(grid > 0.0)) throw ConfigError("run.grid must be > 0");
    if (!inject_violation.empty() &&
        std::find(kInvariants.begin(), kInvariants.end(), inject_violation) == kInvariants.end()) {
        throw ConfigError("debug.inject_violation names no known invariant: '" + inject_violation + "'");
    }
    try {
        certificate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("operator: ") + e.what());
    }
}

OperatorModel ExperimentConfig::operator_model() const {
    if (kind == "shift") {
        if (space.empty() || space == "lp") return make_shift(w, SequenceSpace::lp(p));
        if (space == "c0") return make_shift(w, SequenceSpace::c0());
        throw std::invalid_argument("shift space must be lp or c0 (got '" + space + "')");
    }
    if (kind == "differentiation") {
        if (space.empty() || space == "hardy") return make_differentiation(PolyModel::hardy());
        if (space == "ck") return make_differentiation(PolyModel::ck(k, a, b));
        throw std::invalid_argument("differentiation space must be hardy or ck (got '" + space + "')");
    }
    return make_translation(lambda);
}

OperatorCertificate ExperimentConfig::certificate() const {
    OperatorCertificate cert = make_certificate(operator_model(), static_cast<std::size_t>(targets));
    cert = transform_rotation(cert, twist);
    return transform_power(cert, power);
}

double ExperimentConfig::radius(int l) const { return factor * proximity_bound(l); }

ExperimentConfig parse_config(std::istream& in, const std::string& source_name) {
    const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};

    // line index for diagnostics, and schema checks on section/key names
    std::map<std::string, int> line_of;  // "section.key" -> line
    {
        std::istringstream lines(text);
        std::string line, section;
        for (int no = 1; std::getline(lines, line); ++no) {
            const std::string t = trim(line);
            if (t.empty() || t[0] == ';' || t[0] == '#') continue;
            if (t.front() == '[' && t.back() == ']') {
                section = trim(t.substr(1, t.size() - 2));
                if (!kSchema.count(section)) {
                    throw ConfigError(source_name + ":" + std::to_string(no) + ": unknown section [" + section + "]");
                }
                continue;
            }
            const auto eq = t.find('=');
            if (eq == std::string::npos) continue;  // the INI parser reports this one
            const std::string key = trim(t.substr(0, eq));
            if (section.empty() || !kSchema.at(section).count(key)) {
                throw ConfigError(source_name + ":" + std::to_string(no) + ": unknown key '" + key + "'" +
                                  (section.empty() ? " outside any section" : " in [" + section + "]"));
            }
            line_of[section + "." + key] = no;
        }
    }

    boost::property_tree::ptree tree;
    try {
        std::istringstream ini(text);
        boost::property_tree::read_ini(ini, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError(source_name + ":" + std::to_string(e.line()) + ": " + e.message());
    }

    ExperimentConfig cfg;
    const auto with = [&](const std::string& path, auto&& assign) {
        const auto v = tree.get_optional<std::string>(path);
        if (!v) return;
        try {
            assign(trim(*v));
        } catch (const std::exception& e) {
            throw ConfigError(source_name + ":" + std::to_string(line_of[path]) + ": bad value for " + path + ": '" +
                              trim(*v) + "' (" + e.what() + ")");
        }
    };
    with("operator.kind", [&](const std::string& v) { cfg.kind = v; });
    with("operator.w", [&](const std::string& v) { cfg.w = parse_complex(v); });
    with("operator.space", [&](const std::string& v) { cfg.space = v; });
    with("operator.p", [&](const std::string& v) { cfg.p = parse_double(v); });
    with("operator.k", [&](const std::string& v) { cfg.k = static_cast<int>(parse_integer(v)); });
    with("operator.a", [&](const std::string& v) { cfg.a = parse_double(v); });
    with("operator.b", [&](const std::string& v) { cfg.b = parse_double(v); });
    with("operator.lambda", [&](const std::string& v) { cfg.lambda = parse_double(v); });
    with("operator.twist", [&](const std::string& v) { cfg.twist = parse_complex(v); });
    with("operator.power", [&](const std::string& v) { cfg.power = static_cast<int>(parse_integer(v)); });
    with("run.targets", [&](const std::string& v) { cfg.targets = static_cast<int>(parse_integer(v)); });
    with("run.horizon", [&](const std::string& v) { cfg.horizon = parse_integer(v); });
    with("run.mode", [&](const std::string& v) { cfg.mode = v; });
    with("run.precision", [&](const std::string& v) { cfg.precision = v; });
    with("run.seed", [&](const std::string& v) { cfg.seed = static_cast<std::uint64_t>(parse_integer(v)); });
    with("run.probe_trials", [&](const std::string& v) { cfg.probe_trials = static_cast<int>(parse_integer(v)); });
    with("run.cap", [&](const std::string& v) { cfg.cap = parse_integer(v); });
    with("run.grid", [&](const std::string& v) { cfg.grid = parse_double(v); });
    with("radii.factor", [&](const std::string& v) { cfg.factor = parse_double(v); });
    with("output.dir", [&](const std::string& v) { cfg.dir = v; });
    with("output.csv", [&](const std::string& v) { cfg.csv = v; });
    with("output.json", [&](const std::string& v) { cfg.json = v; });
    with("debug.inject_violation", [&](const std::string& v) { cfg.inject_violation = v; });

    try {
        cfg.validate();
    } catch (const ConfigError& e) {
        // point at the offending key when the message names one
        const std::string msg = e.what();
        std::size_t first = std::string::npos;
        int line = 0;
        for (const auto& [path, no] : line_of) {
            if (const auto at = msg.find(path); at < first) {
                first = at;
                line = no;
            }
        }
        throw ConfigError(source_name + (line ? ":" + std::to_string(line) : std::string()) + ": " + msg);
    }
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file '" + path.string() + "'");
    return parse_config(f, path.string());
}

std::filesystem::path output_dir(const ExperimentConfig& cfg) {
    if (const char* env = std::getenv("FHC_OUTPUT_DIR"); env && *env) return env;
    return cfg.dir;
}

// ---------------------------------------------------------------------------
// Pipeline

namespace {

class Checker {
public:
    Checker(const ExperimentConfig& cfg, std::vector<InvariantFailure>& out, std::ostream& log)
        : inject_(cfg.inject_violation), out_(out), log_(log) {}

    void operator()(const std::string& name, bool ok, const std::string& detail) {
        if (name == inject_ && !injected_) {
            ok = false;
            injected_ = true;
            out_.push_back({name, "injected violation: " + detail});
            log_ << "  invariant " << name << " FAILED (injected)\n";
            return;
        }
        if (!ok) {
            out_.push_back({name, detail});
            log_ << "  invariant " << name << " FAILED: " << detail << "\n";
        }
    }

private:
    std::string inject_;
    bool injected_ = false;
    std::vector<InvariantFailure>& out_;
    std::ostream& log_;
};

std::string describe(double x) {
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

void write_text(const std::filesystem::path& path, const std::string& text, std::vector<std::filesystem::path>& written) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
    f << text;
    if (!f) throw std::runtime_error("write failed for '" + path.string() + "'");
    written.push_back(path);
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& cfg, std::ostream& log) {
    cfg.validate();
    RunResult result;
    Checker check(cfg, result.failures, log);
    const auto dir = output_dir(cfg);
    std::filesystem::create_directories(dir);

    const OperatorCertificate cert = cfg.certificate();
    log << "operator: " << cert.op.name() << ", twist " << cert.twist << ", power " << cert.power << "\n";

    // certify
    result.tail = compute_thresholds(cert, cfg.cap);
    const TailCertificate& tc = result.tail;
    log << "thresholds:";
    for (const auto& r : tc.records) log << " N_" << r.l << "=" << r.N;
    log << "\n";
    write_text(dir / "certificate.json", to_json(tc).dump(2) + "\n", result.written);

    for (int l = 1; l <= tc.target_count(); ++l) {
        const Element& y = cert.target(static_cast<std::size_t>(l));
        const double res = right_inverse_identity_check(cert, y);
        check("right_inverse_identity", res <= 1e-12 * (1.0 + norm(y)),
              "||A B y_" + std::to_string(l) + " - y_" + std::to_string(l) + "|| = " + describe(res));
    }

    // tail soundness: random sub-sums past N_l stay under the certified bound
    for (int l = 1; l <= tc.target_count(); ++l) {
        const Element& y = cert.target(static_cast<std::size_t>(l));
        const Index N = tc.threshold(l);
        for (Direction dir_ : {Direction::inverse, Direction::forward}) {
            const double bound = tail_norm(cert, y, N, dir_);
            const double seen = unconditional_probe(cert, y, N, cfg.probe_trials, cfg.seed + static_cast<std::uint64_t>(l),
                                                    64, dir_);
            check("tail_soundness", seen <= bound,
                  "l=" + std::to_string(l) + ": probe " + describe(seen) + " > bound " + describe(bound));
        }
    }

    // schedule and construction
    const FhcPlacement placement = assign_placements(tc, cfg.horizon);
    log << "placements up to " << cfg.horizon << ": " << placement.placements.size()
        << ", truncation tail bound " << describe(placement.truncation_tail_bound) << "\n";
    {
        std::ostringstream csv;
        write_members_csv(csv, placement.schedule, cfg.horizon);
        write_text(dir / "schedule.csv", csv.str(), result.written);
    }
    write_text(dir / "placement.json", to_json(placement).dump(2) + "\n", result.written);

    if (cfg.mode == "discrete") {
        // proof-bound compliance on every placed n
        for (const auto& [n, l] : placement.placements) {
            const OrbitValue v = orbit_eval(placement, n);
            const double dist = distance_to_target(placement, v, l);
            const std::string at = "n=" + std::to_string(n) + ", l=" + std::to_string(l);
            check("proof_bound", dist + v.certified_error <= proximity_bound(l),
                  at + ": " + describe(dist + v.certified_error) + " > " + describe(proximity_bound(l)));
            check("component_forward", v.forward_norm <= one_sided_bound(l), at + ": " + describe(v.forward_norm));
            check("component_backward", v.backward_norm <= one_sided_bound(l), at + ": " + describe(v.backward_norm));
            check("component_middle", v.middle_residual <= middle_bound(l), at + ": " + describe(v.middle_residual));
        }
        std::vector<double> radii;
        for (int l = 1; l <= tc.target_count(); ++l) radii.push_back(cfg.radius(l));
        result.reports = discrete_visits_all(placement, radii, cfg.horizon);
        for (const auto& r : result.reports) {
            const auto members = placement.schedule.members({r.l, tc.threshold(r.l)}, cfg.horizon);
            const double floor_a = density_proxy(members, cfg.horizon);
            if (r.guarantee) {
                check("covering_set_check", r.covering_set_check, "l=" + std::to_string(r.l));
                check("density_floor", r.density_floor >= floor_a,
                      "l=" + std::to_string(r.l) + ": " + describe(r.density_floor) + " < " + describe(floor_a));
            }
        }
    } else {
        const SolutionOrbit orbit(placement);
        const double t_max = static_cast<double>(cfg.horizon);
        for (int l = 1; l <= tc.target_count(); ++l) {
            const auto& y = std::get<PiecewiseLinearFn>(placement.target(l));
            const double eps = cfg.radius(l);
            OrbitReport r = continuous_visits(orbit, y, eps, t_max, cfg.grid);
            r.l = l;
            r.proof_bound = proximity_bound(l);
            r.covering_set_check = true;
            for (Index n : placement.schedule.members({l, tc.threshold(l)}, cfg.horizon)) {
                const auto s = orbit.at(static_cast<double>(n));
                if (!(norm(s.value - y) + s.error < eps)) r.covering_set_check = false;
            }
            r.guarantee = eps > r.proof_bound + r.certified_error;
            if (r.guarantee) check("covering_set_check", r.covering_set_check, "l=" + std::to_string(l));
            const BridgeReport b = continuous_bridge(orbit, y, eps, cfg.horizon, cfg.grid);
            log << "  l=" << l << ": delta=" << describe(b.window.delta) << ", certified integer visits "
                << b.certified_integer_visits << ", inner measure " << describe(b.inner_measure) << "\n";
            check("continuous_bridge", b.holds,
                  "l=" + std::to_string(l) + ": inner " + describe(b.inner_measure) + " < " + describe(b.required));
            result.reports.push_back(std::move(r));
        }
    }

    if (cfg.precision == "rational") {
        const Index h = std::max<Index>(std::min<Index>(cfg.horizon, 64), tc.max_threshold());
        const FhcPlacement small = assign_placements(tc, h);
        const auto x = materialize_exact(small, h);
        for (Index n = 0; n <= h; ++n) {
            const bool same = orbit_eval_exact(small, n) == forward_exact(small, x, n);
            check("exact_decomposition", same, "n=" + std::to_string(n));
        }
        log << "exact decomposition checked for n <= " << h << "\n";
    }

    report_export(result.reports, cfg.csv.empty() ? std::filesystem::path{} : dir / cfg.csv,
                  cfg.json.empty() ? std::filesystem::path{} : dir / cfg.json);
    if (!cfg.csv.empty()) result.written.push_back(dir / cfg.csv);
    if (!cfg.json.empty()) result.written.push_back(dir / cfg.json);

    log << "  l   N_l   eps        visits  density_floor  covering\n";
    for (const auto& r : result.reports) {
        char line[128];
        std::snprintf(line, sizeof line, "  %-3d %-5lld %-10.6g %-7zu %-14.6g %s\n", r.l,
                      static_cast<long long>(tc.threshold(r.l)), r.eps, r.visit_count(), r.density_floor,
                      r.covering_set_check ? "yes" : "no");
        log << line;
    }
    return result;
}

}  // namespace fhc
