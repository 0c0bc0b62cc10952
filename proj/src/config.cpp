#include "rmlab/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "rmlab/error.hpp"
#include "rmlab/io.hpp"

namespace rmlab {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

[[noreturn]] void parse_fail(int line, const std::string& what) {
    throw Error("invalid-config", "line " + std::to_string(line) + ": " + what);
}

}  // namespace

ConfigDoc ConfigDoc::parse(const std::string& text) {
    ConfigDoc doc;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        // strip comments outside quotes
        bool quoted = false;
        std::string line;
        for (char ch : raw) {
            if (ch == '"') quoted = !quoted;
            if (ch == '#' && !quoted) break;
            line.push_back(ch);
        }
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') parse_fail(line_no, "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) parse_fail(line_no, "empty section name");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) parse_fail(line_no, "expected key = value");
        const std::string key_part = trim(line.substr(0, eq));
        const std::string value_part = trim(line.substr(eq + 1));
        if (key_part.empty()) parse_fail(line_no, "empty key");
        if (value_part.empty()) parse_fail(line_no, "empty value");
        const std::string key = section.empty() ? key_part : section + "." + key_part;

        Value value;
        if (value_part.front() == '"') {
            if (value_part.size() < 2 || value_part.back() != '"')
                parse_fail(line_no, "unterminated string");
            value.type = Value::Type::String;
            value.text = value_part.substr(1, value_part.size() - 2);
        } else if (value_part == "true" || value_part == "false") {
            value.type = Value::Type::Bool;
            value.boolean = value_part == "true";
        } else if (value_part.front() == '[') {
            if (value_part.back() != ']') parse_fail(line_no, "unterminated array");
            value.type = Value::Type::Array;
            std::string body = value_part.substr(1, value_part.size() - 2);
            std::istringstream items(body);
            std::string item;
            while (std::getline(items, item, ',')) {
                item = trim(item);
                if (item.empty()) parse_fail(line_no, "empty array element");
                try {
                    std::size_t used = 0;
                    value.array.push_back(std::stod(item, &used));
                    if (used != item.size()) throw std::invalid_argument(item);
                } catch (const std::exception&) {
                    parse_fail(line_no, "bad array element '" + item + "'");
                }
            }
        } else {
            value.type = Value::Type::Number;
            try {
                std::size_t used = 0;
                value.number = std::stod(value_part, &used);
                if (used != value_part.size()) throw std::invalid_argument(value_part);
            } catch (const std::exception&) {
                parse_fail(line_no, "bad value '" + value_part + "'");
            }
        }
        if (doc.values_.count(key)) parse_fail(line_no, "duplicate key " + key);
        doc.values_[key] = std::move(value);
        doc.order_.push_back(key);
    }
    return doc;
}

ConfigDoc ConfigDoc::parse_file(const std::string& path) {
    return parse(read_text_file(path));
}

bool ConfigDoc::has(const std::string& key) const { return values_.count(key) > 0; }

const ConfigDoc::Value& ConfigDoc::require(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end())
        throw Error("invalid-config", "missing field " + key);
    return it->second;
}

std::string ConfigDoc::get_string(const std::string& key) const {
    const Value& v = require(key);
    if (v.type != Value::Type::String)
        throw Error("invalid-config", "field " + key + " must be a string");
    return v.text;
}

std::string ConfigDoc::get_string(const std::string& key,
                                  const std::string& fallback) const {
    return has(key) ? get_string(key) : fallback;
}

double ConfigDoc::get_double(const std::string& key) const {
    const Value& v = require(key);
    if (v.type != Value::Type::Number)
        throw Error("invalid-config", "field " + key + " must be a number");
    return v.number;
}

double ConfigDoc::get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

std::int64_t ConfigDoc::get_int(const std::string& key) const {
    const double v = get_double(key);
    const auto r = static_cast<std::int64_t>(std::llround(v));
    if (std::abs(v - static_cast<double>(r)) > 1e-9)
        throw Error("invalid-config", "field " + key + " must be an integer");
    return r;
}

std::int64_t ConfigDoc::get_int(const std::string& key, std::int64_t fallback) const {
    return has(key) ? get_int(key) : fallback;
}

bool ConfigDoc::get_bool(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const Value& v = require(key);
    if (v.type != Value::Type::Bool)
        throw Error("invalid-config", "field " + key + " must be a boolean");
    return v.boolean;
}

std::vector<double> ConfigDoc::get_array(const std::string& key) const {
    const Value& v = require(key);
    if (v.type != Value::Type::Array)
        throw Error("invalid-config", "field " + key + " must be an array");
    return v.array;
}

std::vector<double> ConfigDoc::get_array(const std::string& key,
                                         std::vector<double> fallback) const {
    return has(key) ? get_array(key) : fallback;
}

const std::vector<std::string>& experiment_types() {
    static const std::vector<std::string> kTypes = {
        "edelman",        "szarek_k2",        "iid_overcrowding", "perturbed_iid",
        "wigner_gaps",    "goe_wegner",       "perturbed_wigner", "concentration",
        "implication_audit", "toolkit_bench",
    };
    return kTypes;
}

namespace {

bool needs_eps_grid(const std::string& type) {
    return type != "concentration" && type != "toolkit_bench";
}

}  // namespace

ExperimentConfig ExperimentConfig::load_text(const std::string& text) {
    const ConfigDoc doc = ConfigDoc::parse(text);
    ExperimentConfig c;
    c.type = doc.get_string("experiment.type");
    c.seed = static_cast<std::uint64_t>(doc.get_int("experiment.seed"));
    c.trials = static_cast<std::uint64_t>(doc.get_int("experiment.trials"));
    c.workers = static_cast<int>(doc.get_int("experiment.workers", 1));
    c.output_dir = doc.get_string("experiment.output_dir", "out");
    if (doc.has("experiment.eps_grid")) c.eps_grid = doc.get_array("experiment.eps_grid");
    c.k = static_cast<int>(doc.get_int("experiment.k", 1));
    c.shared_stream = doc.get_bool("experiment.shared_stream", true);
    c.ci_level = doc.get_double("experiment.ci_level", 0.95);

    c.n = static_cast<int>(doc.get_int("ensemble.n"));
    c.symmetry = doc.get_string("ensemble.symmetry", "iid");
    c.entry = doc.get_string("ensemble.entry", "gaussian");
    c.diagonal = doc.get_string("ensemble.diagonal", "");
    c.interpolation_t = doc.get_double("ensemble.interpolation_t", 0.0);
    c.center_z = doc.get_double("ensemble.center_z", 0.0);
    c.perturbation.kind = doc.get_string("perturbation.kind", "none");
    c.perturbation.scale = doc.get_double("perturbation.scale", 0.0);
    c.perturbation.path = doc.get_string("perturbation.path", "");

    c.event_kind = doc.get_string("event.kind", "");
    c.threshold_factor = doc.get_double("event.threshold_factor", 0.0);

    c.fit_tag = doc.get_string("fit.tag", "");
    c.gamma = doc.get_double("fit.gamma", 0.0);
    c.custom_exponent = doc.get_double("fit.custom_exponent", 0.0);
    c.min_hits = static_cast<std::uint64_t>(doc.get_int("fit.min_hits", 10));

    if (doc.has("params.t_grid")) c.t_grid = doc.get_array("params.t_grid");
    c.u_norm = doc.get_double("params.u_norm", 0.0);
    c.planted = static_cast<std::uint64_t>(doc.get_int("params.planted", 0));
    c.bench_instances = doc.get_int("params.bench_instances", 1000);
    if (doc.has("params.rv_d_grid")) c.rv_d_grid = doc.get_array("params.rv_d_grid");
    c.rv_error_eps = doc.get_double("params.rv_error_eps", 0.3);

    c.tol.abs_p = doc.get_double("tolerances.abs_p", c.tol.abs_p);
    c.tol.stderr_mult = doc.get_double("tolerances.stderr_mult", c.tol.stderr_mult);
    c.tol.slope = doc.get_double("tolerances.slope", c.tol.slope);
    c.tol.slope_min_margin =
        doc.get_double("tolerances.slope_min_margin", c.tol.slope_min_margin);
    c.tol.max_ci_high = doc.get_double("tolerances.max_ci_high", c.tol.max_ci_high);
    c.tol.k0_max = doc.get_double("tolerances.k0_max", c.tol.k0_max);
    c.tol.cb_residual = doc.get_double("tolerances.cb_residual", c.tol.cb_residual);
    c.tol.median_gap = doc.get_double("tolerances.median_gap", c.tol.median_gap);

    c.validate();
    return c;
}

ExperimentConfig ExperimentConfig::load_file(const std::string& path) {
    return load_text(read_text_file(path));
}

void ExperimentConfig::validate() const {
    const auto& types = experiment_types();
    if (std::find(types.begin(), types.end(), type) == types.end())
        throw Error("invalid-config", "unknown experiment type '" + type + "'");
    if (trials < 1) throw Error("invalid-config", "experiment.trials must be >= 1");
    if (workers < 1) throw Error("invalid-config", "experiment.workers must be >= 1");
    if (n < 1) throw Error("invalid-config", "ensemble.n must be >= 1");
    if (k < 1 || k > n) throw Error("invalid-config", "experiment.k out of range");
    if (!(ci_level > 0.0 && ci_level < 1.0))
        throw Error("invalid-config", "experiment.ci_level must lie in (0, 1)");
    if (needs_eps_grid(type)) {
        if (eps_grid.empty())
            throw Error("invalid-config", "missing field experiment.eps_grid");
        for (std::size_t i = 0; i < eps_grid.size(); ++i) {
            if (eps_grid[i] <= 0.0)
                throw Error("invalid-config", "experiment.eps_grid must be positive");
            if (i > 0 && eps_grid[i] <= eps_grid[i - 1])
                throw Error("invalid-config",
                            "experiment.eps_grid must be strictly increasing");
        }
    }
    if (symmetry != "iid" && symmetry != "wigner")
        throw Error("invalid-config", "ensemble.symmetry must be iid or wigner");
    if (interpolation_t != 0.0 && symmetry != "wigner")
        throw Error("invalid-config", "ensemble.interpolation_t needs wigner symmetry");
    if (interpolation_t < 0.0 || interpolation_t > 1.0)
        throw Error("invalid-config", "ensemble.interpolation_t must lie in [0, 1]");
    if (perturbation.kind != "none" && perturbation.kind != "scaled_identity" &&
        perturbation.kind != "scaled_all_ones" && perturbation.kind != "csv")
        throw Error("invalid-config", "perturbation.kind unknown");
    if (perturbation.kind == "csv" && perturbation.path.empty())
        throw Error("invalid-config", "perturbation.path required for csv kind");
    // Symmetric experiments need a symmetric ensemble.
    const bool symmetric_experiment = type == "wigner_gaps" || type == "goe_wegner" ||
                                      type == "perturbed_wigner";
    if (symmetric_experiment && symmetry != "wigner")
        throw Error("invalid-config", type + " requires ensemble.symmetry = wigner");
    const bool iid_experiment = type == "edelman" || type == "szarek_k2" ||
                                type == "iid_overcrowding" || type == "perturbed_iid" ||
                                type == "implication_audit";
    if (iid_experiment && symmetry != "iid")
        throw Error("invalid-config", type + " requires ensemble.symmetry = iid");
    if ((type == "perturbed_iid" || type == "perturbed_wigner") &&
        perturbation.kind == "none")
        throw Error("invalid-config", type + " requires a perturbation");
    if (type == "edelman" && entry != "gaussian")
        throw Error("invalid-config", "edelman requires gaussian entries");
    if (type == "szarek_k2" && entry != "gaussian")
        throw Error("invalid-config", "szarek_k2 requires gaussian entries");
    if (type == "goe_wegner" && interpolation_t != 1.0)
        throw Error("invalid-config", "goe_wegner requires interpolation_t = 1");
    // Parse-check the entry laws now rather than mid-run.
    parse_distribution(entry);
    if (!diagonal.empty()) parse_distribution(diagonal);
    if (!event_kind.empty() && event_kind != "kth_smallest_sv" &&
        event_kind != "centered_run" && event_kind != "min_k_gap")
        throw Error("invalid-config", "event.kind unknown");
    if (!fit_tag.empty() && fit_tag != "iid_k2" && fit_tag != "sym_gap" &&
        fit_tag != "smooth_optimal" && fit_tag != "perturbed" && fit_tag != "custom")
        throw Error("invalid-config", "fit.tag unknown");
    if (gamma < 0.0 || gamma >= 1.0)
        throw Error("invalid-config", "fit.gamma must lie in [0, 1)");
}

EnsembleSpec ExperimentConfig::build_ensemble() const {
    EnsembleSpec spec;
    spec.n = n;
    spec.symmetry = symmetry == "iid" ? EnsembleSpec::Symmetry::IID
                                      : EnsembleSpec::Symmetry::SymmetricWigner;
    spec.entry = parse_distribution(entry);
    spec.diagonal = diagonal.empty() ? spec.entry : parse_distribution(diagonal);
    spec.interpolation_t = interpolation_t;
    spec.center_z = center_z;
    if (perturbation.kind == "scaled_identity") {
        spec.perturbation_f = perturbation.scale * RealMatrix::Identity(n, n);
    } else if (perturbation.kind == "scaled_all_ones") {
        spec.perturbation_f = perturbation.scale * RealMatrix::Ones(n, n);
    } else if (perturbation.kind == "csv") {
        const RealMatrix f = read_matrix_csv(perturbation.path);
        if (f.rows() != n || f.cols() != n)
            throw Error("invalid-config", "perturbation matrix is not n x n");
        spec.perturbation_f = f;
    }
    spec.validate();
    return spec;
}

EventFamily ExperimentConfig::build_event() const {
    EventFamily event;
    event.k = k;
    event.center_z = center_z;

    std::string kind = event_kind;
    double factor = threshold_factor;
    if (kind.empty()) {
        if (type == "edelman" || type == "szarek_k2") {
            kind = "kth_smallest_sv";
            if (factor == 0.0) factor = 1.0;
        } else if (type == "iid_overcrowding" || type == "perturbed_iid") {
            kind = "kth_smallest_sv";
            if (factor == 0.0) factor = k;  // interval [0, k eps / sqrt(n)]
        } else if (type == "wigner_gaps" || type == "perturbed_wigner") {
            kind = "centered_run";
            if (factor == 0.0) factor = 1.0;
        } else if (type == "goe_wegner") {
            kind = "centered_run";
            if (factor == 0.0) factor = 0.5;  // interval of length eps / sqrt(n)
        } else {
            kind = "kth_smallest_sv";
            if (factor == 0.0) factor = 1.0;
        }
    } else if (factor == 0.0) {
        factor = 1.0;
    }

    if (kind == "kth_smallest_sv") event.kind = EventFamily::Kind::KthSmallestSv;
    else if (kind == "centered_run") event.kind = EventFamily::Kind::CenteredRunHalfWidth;
    else event.kind = EventFamily::Kind::MinKGap;
    event.threshold_factor = factor;
    return event;
}

PredictionTag ExperimentConfig::prediction() const {
    std::string tag = fit_tag;
    if (tag.empty()) {
        if (type == "szarek_k2" || type == "iid_overcrowding") tag = "iid_k2";
        else if (type == "wigner_gaps" || type == "perturbed_wigner") tag = "sym_gap";
        else if (type == "perturbed_iid") tag = "perturbed";
        else tag = "custom";
    }
    if (tag == "iid_k2") return PredictionTag::IID_k2;
    if (tag == "sym_gap") return PredictionTag::SymGap;
    if (tag == "smooth_optimal") return PredictionTag::SmoothOptimal;
    if (tag == "perturbed") return PredictionTag::Perturbed;
    return PredictionTag::Custom;
}

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_array(const std::vector<double>& v) {
    std::string out = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        out += fmt(v[i]);
    }
    return out + "]";
}

}  // namespace

std::string ExperimentConfig::to_text() const {
    std::ostringstream out;
    out << "[experiment]\n";
    out << "type = \"" << type << "\"\n";
    out << "seed = " << seed << "\n";
    out << "trials = " << trials << "\n";
    out << "workers = " << workers << "\n";
    out << "output_dir = \"" << output_dir << "\"\n";
    if (!eps_grid.empty()) out << "eps_grid = " << fmt_array(eps_grid) << "\n";
    out << "k = " << k << "\n";
    out << "shared_stream = " << (shared_stream ? "true" : "false") << "\n";
    out << "ci_level = " << fmt(ci_level) << "\n";
    out << "\n[ensemble]\n";
    out << "n = " << n << "\n";
    out << "symmetry = \"" << symmetry << "\"\n";
    out << "entry = \"" << entry << "\"\n";
    if (!diagonal.empty()) out << "diagonal = \"" << diagonal << "\"\n";
    out << "interpolation_t = " << fmt(interpolation_t) << "\n";
    out << "center_z = " << fmt(center_z) << "\n";
    if (perturbation.kind != "none") {
        out << "\n[perturbation]\n";
        out << "kind = \"" << perturbation.kind << "\"\n";
        out << "scale = " << fmt(perturbation.scale) << "\n";
        if (!perturbation.path.empty())
            out << "path = \"" << perturbation.path << "\"\n";
    }
    if (!event_kind.empty() || threshold_factor != 0.0) {
        out << "\n[event]\n";
        if (!event_kind.empty()) out << "kind = \"" << event_kind << "\"\n";
        if (threshold_factor != 0.0)
            out << "threshold_factor = " << fmt(threshold_factor) << "\n";
    }
    out << "\n[fit]\n";
    if (!fit_tag.empty()) out << "tag = \"" << fit_tag << "\"\n";
    out << "gamma = " << fmt(gamma) << "\n";
    out << "custom_exponent = " << fmt(custom_exponent) << "\n";
    out << "min_hits = " << min_hits << "\n";
    out << "\n[params]\n";
    if (!t_grid.empty()) out << "t_grid = " << fmt_array(t_grid) << "\n";
    out << "u_norm = " << fmt(u_norm) << "\n";
    out << "planted = " << planted << "\n";
    out << "bench_instances = " << bench_instances << "\n";
    if (!rv_d_grid.empty()) out << "rv_d_grid = " << fmt_array(rv_d_grid) << "\n";
    out << "rv_error_eps = " << fmt(rv_error_eps) << "\n";
    out << "\n[tolerances]\n";
    out << "abs_p = " << fmt(tol.abs_p) << "\n";
    out << "stderr_mult = " << fmt(tol.stderr_mult) << "\n";
    out << "slope = " << fmt(tol.slope) << "\n";
    out << "slope_min_margin = " << fmt(tol.slope_min_margin) << "\n";
    out << "max_ci_high = " << fmt(tol.max_ci_high) << "\n";
    out << "k0_max = " << fmt(tol.k0_max) << "\n";
    out << "cb_residual = " << fmt(tol.cb_residual) << "\n";
    out << "median_gap = " << fmt(tol.median_gap) << "\n";
    return out.str();
}

}  // namespace rmlab
