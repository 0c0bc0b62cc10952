#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rmlab/ensembles.hpp"
#include "rmlab/estimators.hpp"

namespace rmlab {

/// Parsed key/value document: sections of `key = value` lines, with values
/// that are numbers, quoted strings, booleans, or arrays of numbers. Keys are
/// flattened to "section.key".
class ConfigDoc {
  public:
    static ConfigDoc parse(const std::string& text);
    static ConfigDoc parse_file(const std::string& path);

    bool has(const std::string& key) const;
    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    std::int64_t get_int(const std::string& key) const;
    std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<double> get_array(const std::string& key) const;
    std::vector<double> get_array(const std::string& key,
                                  std::vector<double> fallback) const;

    const std::vector<std::string>& keys() const { return order_; }

  private:
    struct Value {
        enum class Type { Number, String, Bool, Array } type;
        double number = 0.0;
        std::string text;
        bool boolean = false;
        std::vector<double> array;
    };

    const Value& require(const std::string& key) const;

    std::map<std::string, Value> values_;
    std::vector<std::string> order_;
};

struct PerturbationDesc {
    std::string kind = "none";  // none | scaled_identity | scaled_all_ones | csv
    double scale = 0.0;
    std::string path;
};

struct Tolerances {
    double abs_p = 0.015;       // per-point |p_hat - reference|
    double stderr_mult = 4.0;   // MC standard errors allowed on top of abs_p
    double slope = 1.5;         // |fitted slope - predicted|
    double slope_min_margin = 0.3;  // slope >= predicted - margin checks
    double max_ci_high = 1e-4;  // one-sided null checks
    double k0_max = 4.0;        // restricted-invertibility constant
    double cb_residual = 1e-9;  // Cauchy-Binet
    double median_gap = 2.0;    // concentration median vs sqrt(k + |u|^2)
};

/// Declarative description of one experiment run.
struct ExperimentConfig {
    std::string type;
    std::uint64_t seed = 1;
    std::uint64_t trials = 0;
    int workers = 1;
    std::string output_dir = "out";
    std::vector<double> eps_grid;
    int k = 1;
    bool shared_stream = true;
    double ci_level = 0.95;

    // ensemble
    int n = 0;
    std::string symmetry = "iid";  // iid | wigner
    std::string entry = "gaussian";
    std::string diagonal;  // empty = same law as entry
    double interpolation_t = 0.0;
    double center_z = 0.0;
    PerturbationDesc perturbation;

    // event; empty kind means "experiment default"
    std::string event_kind;
    double threshold_factor = 0.0;  // 0 means "experiment default"

    // exponent fit
    std::string fit_tag;  // empty = experiment default
    double gamma = 0.0;
    double custom_exponent = 0.0;
    std::uint64_t min_hits = 10;

    // experiment extras
    std::vector<double> t_grid;      // concentration
    double u_norm = 0.0;             // concentration: u = u_norm * e_1
    std::uint64_t planted = 0;       // implication audit
    std::int64_t bench_instances = 1000;  // toolkit bench
    std::vector<double> rv_d_grid;   // toolkit bench sample sizes
    double rv_error_eps = 0.3;       // toolkit bench error threshold

    Tolerances tol;

    /// Loads and validates; throws Error("invalid-config", ...) naming the
    /// offending field.
    static ExperimentConfig load_file(const std::string& path);
    static ExperimentConfig load_text(const std::string& text);

    void validate() const;
    EnsembleSpec build_ensemble() const;
    EventFamily build_event() const;
    PredictionTag prediction() const;

    /// Canonical text form; parsing it back yields an equivalent config.
    std::string to_text() const;
};

const std::vector<std::string>& experiment_types();

}  // namespace rmlab
