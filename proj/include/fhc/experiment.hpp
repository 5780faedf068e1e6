#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fhc/regularized_semigroup.hpp"

namespace fhc {

/// Parsed experiment configuration. Every field has the schema default.
struct ExperimentConfig {
    // [operator]
    std::string kind = "shift";  // shift | differentiation | translation
    Complex w{2.0, 0.0};
    std::string space;  // lp | c0 (shift), hardy | ck (differentiation); empty = default
    double p = 2.0;
    int k = 1;
    double a = 0.0;
    double b = 1.0;
    double lambda = 1.0;
    Complex twist{1.0, 0.0};
    int power = 1;

    // [run]
    int targets = 5;
    Index horizon = 10000;
    std::string mode = "discrete";  // discrete | continuous
    std::string precision = "float";  // float | rational
    std::uint64_t seed = 1;
    int probe_trials = 1000;
    Index cap = 10000;
    double grid = 1.0 / 64.0;  // continuous mode cell width

    // [radii]
    double factor = 1.2;

    // [output]
    std::filesystem::path dir = "fhc_out";
    std::string csv = "report.csv";
    std::string json = "report.json";

    // [debug]
    std::string inject_violation;

    void validate() const;
    OperatorModel operator_model() const;
    OperatorCertificate certificate() const;
    /// eps_l = factor * 5 / 2^l
    double radius(int l) const;
};

/// Parses "1", "-1", "i", "-i", "0.6+0.8i", "2" and similar.
Complex parse_complex(const std::string& text);

/// Errors carry "path:line: message" when a line is known.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(std::istream& in, const std::string& source_name);

/// Output directory after the FHC_OUTPUT_DIR override.
std::filesystem::path output_dir(const ExperimentConfig& cfg);

struct InvariantFailure {
    std::string name;
    std::string detail;
};

struct RunResult {
    TailCertificate tail;
    std::vector<OrbitReport> reports;
    std::vector<InvariantFailure> failures;
    std::vector<std::filesystem::path> written;

    int exit_code() const { return failures.empty() ? 0 : 2; }
};

/// certify -> schedule -> construct -> verify -> export. Progress goes to
/// `log`; report files go to output_dir(cfg).
RunResult run_experiment(const ExperimentConfig& cfg, std::ostream& log);

/// "(1,2),(1,1)" -> pairs.
std::vector<PairKey> parse_pairs(const std::string& text);

}  // namespace fhc
