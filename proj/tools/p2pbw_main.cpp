// p2pbw: command-line front end. Subcommands generate | estimate | analyze |
// queue, each driven by a JSON config with strict schema checking. Every
// output embeds the resolved config so a run is reproducible from its own
// metadata. Exit codes: 0 success, 1 usage/config error, 2 data error,
// 3 numeric non-convergence.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "p2pbw/bandwidth.hpp"
#include "p2pbw/errors.hpp"
#include "p2pbw/estimation.hpp"
#include "p2pbw/ou_process.hpp"
#include "p2pbw/queueing.hpp"
#include "p2pbw/statistics.hpp"
#include "p2pbw/trace.hpp"
#include "p2pbw/trace_io.hpp"
#include "p2pbw/traffic_model.hpp"

namespace {

using nlohmann::json;
using namespace p2pbw;

struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CommandArgs {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> output;
};

// ---- config plumbing ---------------------------------------------------

json load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw config_error("cannot open config '" + path + "'");
    json config;
    try {
        config = json::parse(in);
    } catch (const json::parse_error& e) {
        throw config_error("config '" + path + "': " + e.what());
    }
    if (!config.is_object())
        throw config_error("config '" + path + "': top level must be an object");
    return config;
}

void reject_unknown(const json& obj, const std::string& context,
                    std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (std::find_if(allowed.begin(), allowed.end(),
                         [&](const char* k) { return key == k; }) == allowed.end())
            throw config_error(context + ": unknown field '" + key + "'");
    }
}

const json& require_field(const json& obj, const std::string& context, const char* key) {
    const auto it = obj.find(key);
    if (it == obj.end())
        throw config_error(context + ": missing required field '" + key + "'");
    return *it;
}

double number_field(const json& obj, const std::string& context, const char* key) {
    const json& v = require_field(obj, context, key);
    if (!v.is_number())
        throw config_error(context + ": field '" + key + "' must be a number");
    return v.get<double>();
}

double number_or(const json& obj, const std::string& context, const char* key,
                 double fallback) {
    if (!obj.contains(key))
        return fallback;
    return number_field(obj, context, key);
}

std::string string_field(const json& obj, const std::string& context, const char* key) {
    const json& v = require_field(obj, context, key);
    if (!v.is_string())
        throw config_error(context + ": field '" + key + "' must be a string");
    return v.get<std::string>();
}

bool bool_or(const json& obj, const std::string& context, const char* key, bool fallback) {
    if (!obj.contains(key))
        return fallback;
    const json& v = obj.at(key);
    if (!v.is_boolean())
        throw config_error(context + ": field '" + key + "' must be a boolean");
    return v.get<bool>();
}

std::uint64_t uint64_value(const json& v, const std::string& context, const char* key) {
    if (v.is_number_unsigned())
        return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0)
        return static_cast<std::uint64_t>(v.get<std::int64_t>());
    throw config_error(context + ": field '" + key + "' must be a non-negative integer");
}

void check_schema_version(const json& config, const std::string& context) {
    const json& v = require_field(config, context, "schema_version");
    if (!v.is_number_integer() || v.get<std::int64_t>() != 1)
        throw config_error(context + ": unsupported schema_version (expected 1)");
}

// Resolve the seed from config and flag (flag wins) and record the resolved
// value back into the config echo.
std::uint64_t resolve_seed(json& config, const std::string& context,
                           const std::optional<std::uint64_t>& flag_seed) {
    std::uint64_t seed = 0;
    bool have = false;
    if (config.contains("seed")) {
        seed = uint64_value(config.at("seed"), context, "seed");
        have = true;
    }
    if (flag_seed.has_value()) {
        seed = *flag_seed;
        have = true;
    }
    if (!have)
        throw config_error(context + ": a seed is required (config field or --seed)");
    config["seed"] = seed;
    return seed;
}

std::string resolve_output(json& config, const std::string& context,
                           const std::optional<std::string>& flag_output) {
    if (flag_output.has_value())
        config["output"] = *flag_output;
    return string_field(config, context, "output");
}

// ---- model-block parsing ----------------------------------------------

PowerLawParams parse_traffic(const json& obj, const std::string& context) {
    if (!obj.is_object())
        throw config_error(context + ": must be an object");
    reject_unknown(obj, context, {"a", "n"});
    PowerLawParams params;
    params.a = number_field(obj, context, "a");
    params.n = number_field(obj, context, "n");
    try {
        params.validate();
    } catch (const std::invalid_argument& e) {
        throw config_error(context + ": " + e.what());
    }
    return params;
}

OuParams parse_ou(const json& obj, const std::string& context) {
    if (!obj.is_object())
        throw config_error(context + ": must be an object");
    reject_unknown(obj, context, {"gamma", "mu", "sigma", "s0"});
    OuParams params;
    params.gamma = number_field(obj, context, "gamma");
    params.mu = number_or(obj, context, "mu", 0.0);
    params.sigma = number_field(obj, context, "sigma");
    params.s0 = number_or(obj, context, "s0", 0.0);
    try {
        params.validate();
    } catch (const std::invalid_argument& e) {
        throw config_error(context + ": " + e.what());
    }
    return params;
}

Grid parse_grid(const json& obj, const std::string& context) {
    if (!obj.is_object())
        throw config_error(context + ": must be an object");
    reject_unknown(obj, context, {"dt", "count"});
    Grid grid;
    grid.dt = number_field(obj, context, "dt");
    grid.count = static_cast<std::size_t>(
        uint64_value(require_field(obj, context, "count"), context, "count"));
    try {
        grid.validate();
    } catch (const std::invalid_argument& e) {
        throw config_error(context + ": " + e.what());
    }
    return grid;
}

BandwidthSpec parse_component(const json& obj, const std::string& context, const Grid& grid) {
    if (!obj.is_object())
        throw config_error(context + ": must be an object");
    reject_unknown(obj, context, {"traffic", "ou", "kprime", "epsilon"});
    BandwidthSpec spec;
    spec.traffic = parse_traffic(require_field(obj, context, "traffic"), context + ".traffic");
    spec.ou = parse_ou(require_field(obj, context, "ou"), context + ".ou");
    spec.grid = grid;
    spec.kprime = number_or(obj, context, "kprime", 0.0);
    spec.epsilon = number_or(obj, context, "epsilon", 0.0);
    try {
        spec.validate();
    } catch (const std::invalid_argument& e) {
        throw config_error(context + ": " + e.what());
    }
    return spec;
}

// ---- output helpers ----------------------------------------------------

std::string iso_timestamp() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buffer[32];
    std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buffer;
}

// "dir/bw.csv" + "audio" -> "dir/bw.audio.csv"
std::string with_suffix(const std::string& path, const std::string& suffix) {
    const std::filesystem::path p(path);
    std::filesystem::path out = p.parent_path();
    out /= p.stem().string() + "." + suffix + p.extension().string();
    return out.string();
}

json report_header(const char* command, const json& config) {
    json header;
    header["schema_version"] = 1;
    header["version"] = kVersion;
    header["command"] = command;
    header["timestamp"] = iso_timestamp();
    header["config"] = config;
    return header;
}

void write_json_report(const json& report, const std::string& path) {
    write_text_atomic(report.dump(2) + "\n", path);
}

double sample_variance(const std::vector<double>& values) {
    if (values.size() < 2)
        return 0.0;
    double mean = 0.0;
    for (double v : values)
        mean += v;
    mean /= static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) {
        const double d = v - mean;
        ss += d * d;
    }
    return ss / static_cast<double>(values.size() - 1);
}

// ---- generate ----------------------------------------------------------

int run_generate(const CommandArgs& args) {
    json config = load_config_file(args.config_path);
    const std::string context = "generate config";
    check_schema_version(config, context);

    const std::string kind = string_field(config, context, "kind");
    if (kind == "individual") {
        reject_unknown(config, context,
                       {"schema_version", "seed", "kind", "model", "grid", "output",
                        "write_factors"});
    } else if (kind == "aggregate") {
        reject_unknown(config, context,
                       {"schema_version", "seed", "kind", "components", "grid", "output",
                        "write_components"});
    } else if (kind == "multiservice") {
        reject_unknown(config, context,
                       {"schema_version", "seed", "kind", "services", "grid", "output"});
    } else {
        throw config_error(context +
                           ": kind must be 'individual', 'aggregate' or 'multiservice'");
    }

    const std::uint64_t seed = resolve_seed(config, context, args.seed);
    const std::string output = resolve_output(config, context, args.output);
    const Grid grid = parse_grid(require_field(config, context, "grid"), context + ".grid");

    std::vector<std::string> written;
    if (kind == "individual") {
        const BandwidthSpec spec =
            parse_component(require_field(config, context, "model"), context + ".model", grid);
        const bool write_factors = bool_or(config, context, "write_factors", false);
        config["write_factors"] = write_factors;

        const BandwidthFactors factors = synthesize_bandwidth_factors(spec, seed);
        write_trace_csv(factors.bandwidth, output);
        written.push_back(output);
        if (write_factors) {
            const std::string ou_path = with_suffix(output, "ou");
            const std::string traffic_path = with_suffix(output, "traffic");
            write_trace_csv(factors.ou_path, ou_path);
            write_samples_csv(factors.traffic, traffic_path);
            written.push_back(ou_path);
            written.push_back(traffic_path);
        }
    } else if (kind == "aggregate") {
        const json& comps = require_field(config, context, "components");
        if (!comps.is_array() || comps.empty())
            throw config_error(context + ": 'components' must be a non-empty array");
        AggregateSpec spec;
        for (std::size_t i = 0; i < comps.size(); ++i)
            spec.components.push_back(parse_component(
                comps[i], context + ".components[" + std::to_string(i) + "]", grid));
        const bool write_components = bool_or(config, context, "write_components", false);
        config["write_components"] = write_components;

        write_trace_csv(synthesize_aggregate(spec, seed), output);
        written.push_back(output);
        if (write_components) {
            for (std::size_t i = 0; i < spec.components.size(); ++i) {
                const std::string path =
                    with_suffix(output, "component" + std::to_string(i));
                write_trace_csv(
                    synthesize_bandwidth(spec.components[i], derive_child_seed(seed, i)), path);
                written.push_back(path);
            }
        }
    } else {
        const json& services = require_field(config, context, "services");
        if (!services.is_array() || services.empty())
            throw config_error(context + ": 'services' must be a non-empty array");
        MultiserviceSpec spec;
        for (std::size_t i = 0; i < services.size(); ++i) {
            const std::string sctx = context + ".services[" + std::to_string(i) + "]";
            if (!services[i].is_object())
                throw config_error(sctx + ": must be an object");
            reject_unknown(services[i], sctx, {"name", "model"});
            const std::string name = string_field(services[i], sctx, "name");
            if (name.empty() ||
                name.find_first_not_of("abcdefghijklmnopqrstuvwxyz"
                                       "ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_-") !=
                    std::string::npos)
                throw config_error(sctx + ": service name must use only [A-Za-z0-9_-]");
            spec.services.emplace_back(
                name, parse_component(require_field(services[i], sctx, "model"),
                                      sctx + ".model", grid));
        }
        for (const auto& [name, trace] : synthesize_multiservice(spec, seed)) {
            const std::string path = with_suffix(output, name);
            write_trace_csv(trace, path);
            written.push_back(path);
        }
    }

    json meta = report_header("generate", config);
    meta["outputs"] = written;
    write_json_report(meta, output + ".meta.json");
    return 0;
}

// ---- estimate ----------------------------------------------------------

json method_json(const EstimationResult& r) {
    json out;
    out["gamma_hat"] = r.gamma_hat;
    out["sigma_hat"] = r.sigma_hat;
    out["log_likelihood"] = r.log_likelihood;
    out["converged"] = r.converged;
    out["iterations"] = r.iterations;
    return out;
}

json deviation_json(const EstimationResult& other, const EstimationResult& exact) {
    json out;
    out["gamma_abs_diff"] = std::fabs(other.gamma_hat - exact.gamma_hat);
    out["gamma_rel_diff"] =
        std::fabs(other.gamma_hat - exact.gamma_hat) / std::max(1.0, std::fabs(exact.gamma_hat));
    out["sigma_abs_diff"] = std::fabs(other.sigma_hat - exact.sigma_hat);
    out["sigma_rel_diff"] =
        std::fabs(other.sigma_hat - exact.sigma_hat) / std::max(1.0, std::fabs(exact.sigma_hat));
    return out;
}

int run_estimate(const CommandArgs& args) {
    json config = load_config_file(args.config_path);
    const std::string context = "estimate config";
    check_schema_version(config, context);
    reject_unknown(config, context,
                   {"schema_version", "trace", "samples", "cutoff", "methods", "output"});

    const std::string output = resolve_output(config, context, args.output);
    const bool have_trace = config.contains("trace");
    const bool have_samples = config.contains("samples");
    if (!have_trace && !have_samples)
        throw config_error(context + ": provide 'trace' and/or 'samples'");
    if (have_samples && !config.contains("cutoff"))
        throw config_error(context + ": 'cutoff' is required with 'samples'");

    std::vector<std::string> methods = {"exact_mle", "paper_literal", "ar1_oracle"};
    if (config.contains("methods")) {
        const json& m = config.at("methods");
        if (!m.is_array() || m.empty())
            throw config_error(context + ": 'methods' must be a non-empty array");
        std::vector<std::string> requested;
        for (const json& v : m) {
            if (!v.is_string())
                throw config_error(context + ": 'methods' entries must be strings");
            const std::string name = v.get<std::string>();
            if (std::find(methods.begin(), methods.end(), name) == methods.end())
                throw config_error(context + ": unknown method '" + name + "'");
            if (std::find(requested.begin(), requested.end(), name) == requested.end())
                requested.push_back(name);
        }
        methods = requested;
    }
    config["methods"] = methods;
    const auto requested = [&](const char* name) {
        return std::find(methods.begin(), methods.end(), name) != methods.end();
    };

    json report = report_header("estimate", config);
    bool hard_failure = false;
    bool nonconverged = false;

    if (have_trace) {
        const Trace trace = read_trace_csv(string_field(config, context, "trace"));
        json ou = json::object();
        std::optional<EstimationResult> exact;
        std::size_t errors = 0, attempts = 0;

        const auto run_method = [&](const char* name, auto&& fn) {
            if (!requested(name))
                return std::optional<EstimationResult>{};
            ++attempts;
            try {
                EstimationResult r = fn();
                ou[name] = method_json(r);
                return std::optional<EstimationResult>{r};
            } catch (const std::exception& e) {
                ou[name] = json{{"error", e.what()}};
                ++errors;
                return std::optional<EstimationResult>{};
            }
        };

        exact = run_method("exact_mle", [&] { return estimate_gamma_sigma(trace); });
        const auto literal =
            run_method("paper_literal", [&] { return paper_literal_estimate(trace); });
        const auto oracle = run_method("ar1_oracle", [&] { return ar1_oracle(trace); });

        if (exact.has_value()) {
            json deviations = json::object();
            if (literal.has_value())
                deviations["paper_literal"] = deviation_json(*literal, *exact);
            if (oracle.has_value())
                deviations["ar1_oracle"] = deviation_json(*oracle, *exact);
            if (!deviations.empty())
                ou["deviations"] = deviations;
            if (!exact->converged)
                nonconverged = true;
        }
        if (attempts > 0 && errors == attempts)
            hard_failure = true;
        report["ou"] = ou;
    }

    if (have_samples) {
        const double cutoff = number_field(config, context, "cutoff");
        const std::vector<double> samples =
            read_samples_csv(string_field(config, context, "samples"));
        json traffic;
        traffic["count"] = samples.size();
        traffic["cutoff"] = cutoff;
        try {
            traffic["n_hat"] = estimate_powerlaw_index(samples, cutoff);
        } catch (const std::exception& e) {
            traffic["error"] = e.what();
            hard_failure = true;
        }
        report["traffic"] = traffic;
    }

    write_json_report(report, output);
    if (hard_failure)
        return 2;
    return nonconverged ? 3 : 0;
}

// ---- analyze -----------------------------------------------------------

int run_analyze(const CommandArgs& args) {
    json config = load_config_file(args.config_path);
    const std::string context = "analyze config";
    check_schema_version(config, context);
    reject_unknown(config, context,
                   {"schema_version", "seed", "trace", "max_lag", "burn_in", "model",
                    "output", "plot_prefix"});

    const std::string output = resolve_output(config, context, args.output);
    std::uint64_t bootstrap_seed = kDefaultBootstrapSeed;
    if (config.contains("seed"))
        bootstrap_seed = uint64_value(config.at("seed"), context, "seed");
    if (args.seed.has_value())
        bootstrap_seed = *args.seed;
    config["seed"] = bootstrap_seed;

    const double burn_in = number_or(config, context, "burn_in", 0.0);
    if (!(burn_in >= 0.0 && burn_in < 1.0))
        throw config_error(context + ": burn_in must lie in [0,1)");
    config["burn_in"] = burn_in;

    Trace trace = read_trace_csv(string_field(config, context, "trace"));
    const std::size_t drop =
        static_cast<std::size_t>(burn_in * static_cast<double>(trace.size()));
    if (drop > 0)
        trace.values.erase(trace.values.begin(),
                           trace.values.begin() + static_cast<std::ptrdiff_t>(drop));

    std::size_t max_lag;
    if (config.contains("max_lag")) {
        max_lag = static_cast<std::size_t>(
            uint64_value(config.at("max_lag"), context, "max_lag"));
    } else {
        max_lag = trace.size() > 4 ? (trace.size() - 1) / 4 : 0;
        max_lag = std::min<std::size_t>(max_lag, 200);
    }
    config["max_lag"] = max_lag;

    std::string plot_prefix;
    if (config.contains("plot_prefix")) {
        plot_prefix = string_field(config, context, "plot_prefix");
    } else {
        plot_prefix = std::filesystem::path(output).replace_extension("").string();
    }
    config["plot_prefix"] = plot_prefix;

    json report = report_header("analyze", config);
    std::vector<std::string> warnings;
    bool nonconverged = false;

    const MomentReport moments = sample_moments(trace, bootstrap_seed);
    report["moments"] = {{"mean", moments.mean},
                         {"variance", moments.variance},
                         {"count", moments.count},
                         {"mean_se", moments.mean_se},
                         {"variance_se", moments.variance_se}};
    if (moments.variance == 0.0)
        warnings.push_back("trace is constant: variance is zero, dependence "
                           "diagnostics are degenerate");

    const std::vector<double> acv = sample_autocovariance(trace, max_lag);

    std::vector<std::string> written;
    {
        std::string csv = "lag,acv\n";
        for (std::size_t k = 0; k < acv.size(); ++k) {
            csv += format_double(static_cast<double>(k) * trace.dt);
            csv += ',';
            csv += format_double(acv[k]);
            csv += '\n';
        }
        write_text_atomic(csv, plot_prefix + ".acv.csv");
        written.push_back(plot_prefix + ".acv.csv");
    }

    if (acv.size() >= 10) {
        const AcvModelFit fit = fit_acv_model(acv, trace.dt);
        report["acv_fit"] = {{"c1", fit.c1},
                             {"c2", fit.c2},
                             {"c3", fit.c3},
                             {"lambda_per_lag", fit.lambda},
                             {"hurst", fit.hurst},
                             {"residual", fit.residual},
                             {"converged", fit.converged},
                             {"degenerate", fit.degenerate}};
        if (!fit.converged)
            nonconverged = true;
    } else {
        warnings.push_back("max_lag too small for the autocovariance model fit "
                           "(need at least 9 lags)");
    }

    if (acv.size() >= 32) {
        const LrdDiagnostic diag = lrd_diagnostic(acv);

        // Verdict requires the regression window to stand out from the
        // estimator's own noise floor (roughly acv(0)/sqrt(N) per lag);
        // white noise fits a flat line through noise and must not count.
        const std::size_t k_lo = std::max<std::size_t>(1, (acv.size() - 1) / 2);
        double window_mean_abs = 0.0;
        for (std::size_t k = k_lo; k < acv.size(); ++k)
            window_mean_abs += std::fabs(acv[k]);
        window_mean_abs /= static_cast<double>(acv.size() - k_lo);
        const bool significant =
            window_mean_abs >
            2.0 * acv[0] / std::sqrt(static_cast<double>(trace.size()));

        report["lrd"] = {{"verdict", diag.diverges && significant},
                         {"diverges_raw", diag.diverges},
                         {"tail_significant", significant},
                         {"fitted_exponent", diag.fitted_exponent},
                         {"hurst_estimate", diag.hurst_estimate},
                         {"reliable", diag.reliable}};

        {
            std::string csv = "lag,partial_sum\n";
            for (std::size_t i = 0; i < diag.partial_sums.size(); ++i) {
                csv += format_double(static_cast<double>(i + 1) * trace.dt);
                csv += ',';
                csv += format_double(diag.partial_sums[i]);
                csv += '\n';
            }
            write_text_atomic(csv, plot_prefix + ".partial_sums.csv");
            written.push_back(plot_prefix + ".partial_sums.csv");
        }
        {
            std::string csv = "log_lag,log_abs_acv\n";
            for (std::size_t k = k_lo; k < acv.size(); ++k) {
                if (acv[k] == 0.0)
                    continue;
                csv += format_double(std::log(static_cast<double>(k)));
                csv += ',';
                csv += format_double(std::log(std::fabs(acv[k])));
                csv += '\n';
            }
            write_text_atomic(csv, plot_prefix + ".loglog.csv");
            written.push_back(plot_prefix + ".loglog.csv");
        }
    } else {
        warnings.push_back("max_lag too small for the dependence diagnostic "
                           "(need at least 31 lags)");
    }

    if (config.contains("model")) {
        const Grid grid{trace.dt, std::max<std::size_t>(trace.size(), 1)};
        const BandwidthSpec spec =
            parse_component(config.at("model"), context + ".model", grid);
        const FactorMoments traffic{spec.traffic.mean(), spec.traffic.variance()};
        const auto [ou_mean, ou_var] = ou_stationary_moments(spec.ou);
        const FactorMoments ou{ou_mean, ou_var};
        const PaperMoments paper = paper_moment_formulas(spec, traffic, ou);

        json model_section;
        model_section["traffic_mean"] = traffic.mean;
        model_section["traffic_variance"] = traffic.variance;
        model_section["ou_mean"] = ou.mean;
        model_section["ou_variance"] = ou.variance;
        model_section["formula_mean"] = paper.mean;
        model_section["formula_variance"] = paper.variance;
        try {
            model_section["hurst"] =
                hurst_from_indices({spec.traffic.n, spec.traffic.n}, spec.epsilon);
        } catch (const std::invalid_argument&) {
            model_section["hurst"] = nullptr;
            warnings.push_back("tail index outside (2,3]: no Hurst link for this model");
        }
        if (std::isfinite(paper.mean)) {
            model_section["mean_abs_diff"] = std::fabs(moments.mean - paper.mean);
            if (moments.mean_se > 0.0)
                model_section["mean_diff_in_se"] =
                    std::fabs(moments.mean - paper.mean) / moments.mean_se;
        } else {
            warnings.push_back("formula mean is infinite for this tail index");
        }
        if (std::isfinite(paper.variance)) {
            model_section["variance_abs_diff"] = std::fabs(moments.variance - paper.variance);
            if (moments.variance_se > 0.0)
                model_section["variance_diff_in_se"] =
                    std::fabs(moments.variance - paper.variance) / moments.variance_se;
        } else {
            warnings.push_back("formula variance is infinite for this tail index");
        }
        report["model"] = model_section;
    }

    report["warnings"] = warnings;
    report["plot_files"] = written;
    write_json_report(report, output);
    return nonconverged ? 3 : 0;
}

// ---- queue -------------------------------------------------------------

int run_queue(const CommandArgs& args) {
    json config = load_config_file(args.config_path);
    const std::string context = "queue config";
    check_schema_version(config, context);

    const bool model_mode = config.contains("model");
    if (model_mode) {
        reject_unknown(config, context,
                       {"schema_version", "seed", "model", "grid", "service_rate",
                        "utilization", "download_rate", "upload_rate", "burn_in",
                        "thresholds", "hurst", "var_traffic", "var_ou", "output", "plot"});
    } else {
        reject_unknown(config, context,
                       {"schema_version", "arrivals", "service_rate", "utilization",
                        "download_rate", "upload_rate", "burn_in", "thresholds", "hurst",
                        "a", "output", "plot"});
        if (!config.contains("arrivals"))
            throw config_error(context + ": provide 'model' (+'grid') or 'arrivals'");
    }
    if (config.contains("service_rate") == config.contains("utilization"))
        throw config_error(context + ": provide exactly one of 'service_rate', 'utilization'");

    const std::string output = resolve_output(config, context, args.output);
    std::string plot_path;
    if (config.contains("plot")) {
        plot_path = string_field(config, context, "plot");
    } else {
        plot_path = std::filesystem::path(output).replace_extension(".csv").string();
    }
    config["plot"] = plot_path;
    if (plot_path == output)
        throw config_error(context + ": 'plot' must differ from 'output'");

    const double burn_in = number_or(config, context, "burn_in", 0.1);
    if (!(burn_in >= 0.0 && burn_in < 1.0))
        throw config_error(context + ": burn_in must lie in [0,1)");
    config["burn_in"] = burn_in;

    const double download_rate = number_field(config, context, "download_rate");
    const double upload_rate = number_field(config, context, "upload_rate");

    // Assemble arrivals and the tail parameters (m, H, a).
    Trace arrivals;
    QueueParams params;
    std::string hurst_source, var_traffic_source, var_ou_source;
    std::vector<std::string> notes = {
        "model tail uses the decaying convention P = exp(-theta x^(2-2H)) with theta > 0",
        "the closed-form tail is a large-buffer asymptotic: compare shape, not level"};

    if (model_mode) {
        const Grid grid = parse_grid(require_field(config, context, "grid"), context + ".grid");
        const BandwidthSpec spec =
            parse_component(require_field(config, context, "model"), context + ".model", grid);
        const std::uint64_t seed = resolve_seed(config, context, args.seed);
        const BandwidthFactors factors = synthesize_bandwidth_factors(spec, seed);
        arrivals = factors.bandwidth;

        double var_traffic;
        if (config.contains("var_traffic")) {
            var_traffic = number_field(config, context, "var_traffic");
            var_traffic_source = "config";
        } else if (spec.traffic.finite_variance()) {
            var_traffic = spec.traffic.variance();
            var_traffic_source = "analytic";
        } else {
            var_traffic = sample_variance(factors.traffic);
            var_traffic_source = "empirical";
            notes.push_back("traffic variance is analytically infinite at this tail "
                            "index; using the sample variance of the generated factor");
        }
        double var_ou;
        if (config.contains("var_ou")) {
            var_ou = number_field(config, context, "var_ou");
            var_ou_source = "config";
        } else {
            var_ou = ou_stationary_moments(spec.ou).second;
            var_ou_source = "analytic";
        }

        params = queue_params_from_spec(spec, download_rate, upload_rate, var_traffic, var_ou);
        hurst_source = "model";
        if (config.contains("hurst")) {
            params.hurst = number_field(config, context, "hurst");
            hurst_source = "config";
        }
    } else {
        arrivals = read_trace_csv(string_field(config, context, "arrivals"));
        params.m = std::max(1.0 / download_rate, 1.0 / upload_rate);
        if (params.m >= 1.0)
            throw unstable_queue_error("queue: m = " + std::to_string(params.m) +
                                       " leaves no service margin (need m < 1)");
        params.hurst = number_field(config, context, "hurst");
        hurst_source = "config";
        params.a = number_field(config, context, "a");
        var_traffic_source = var_ou_source = "config";
    }
    try {
        params.validate();
    } catch (const std::invalid_argument& e) {
        throw config_error(context + ": " + e.what());
    }

    double mean_arrival = 0.0;
    for (double v : arrivals.values)
        mean_arrival += v;
    mean_arrival /= static_cast<double>(arrivals.size());
    const double mean_rate = mean_arrival / arrivals.dt;

    double service_rate;
    if (config.contains("service_rate")) {
        service_rate = number_field(config, context, "service_rate");
        if (!(service_rate > 0.0))
            throw config_error(context + ": service_rate must be > 0");
    } else {
        const double utilization = number_field(config, context, "utilization");
        if (!(utilization > 0.0 && utilization < 1.0))
            throw config_error(context + ": utilization must lie in (0,1)");
        if (!(mean_rate > 0.0))
            throw degenerate_data_error(
                "queue: arrivals are identically zero, cannot set the service rate "
                "from a utilization target");
        service_rate = mean_rate / utilization;
    }
    config["service_rate"] = service_rate;

    const Trace occupancy = simulate_queue(arrivals, service_rate);

    std::vector<double> thresholds;
    if (config.contains("thresholds")) {
        const json& t = config.at("thresholds");
        if (!t.is_array() || t.empty())
            throw config_error(context + ": 'thresholds' must be a non-empty array");
        for (const json& v : t) {
            if (!v.is_number())
                throw config_error(context + ": 'thresholds' entries must be numbers");
            thresholds.push_back(v.get<double>());
        }
    } else {
        thresholds = default_thresholds(occupancy, burn_in);
    }

    TailReport tail = empirical_tail(occupancy, thresholds, burn_in);
    tail.model_probabilities.reserve(tail.thresholds.size());
    for (double x : tail.thresholds)
        tail.model_probabilities.push_back(norros_tail(params, x));

    json regression = nullptr;
    try {
        const ShapeFit fit = tail_shape_check(tail, params.hurst);
        tail.regression_slope = fit.slope;
        tail.regression_intercept = fit.intercept;
        tail.regression_r2 = fit.r2;
        regression = {{"slope", fit.slope}, {"intercept", fit.intercept}, {"r2", fit.r2}};
    } catch (const insufficient_data_error& e) {
        notes.push_back(std::string("shape regression skipped: ") + e.what());
    }

    json report = report_header("queue", config);
    report["queue_params"] = {{"m", params.m},
                              {"hurst", params.hurst},
                              {"a", params.a},
                              {"hurst_source", hurst_source},
                              {"var_traffic_source", var_traffic_source},
                              {"var_ou_source", var_ou_source}};
    report["service_rate"] = service_rate;
    report["mean_arrival_rate"] = mean_rate;
    report["utilization"] = mean_rate / service_rate;
    report["tail"] = {{"thresholds", tail.thresholds},
                      {"empirical", tail.probabilities},
                      {"model", tail.model_probabilities}};
    report["regression"] = regression;
    report["notes"] = notes;

    std::string csv = "x,empirical,model,x_pow\n";
    for (std::size_t i = 0; i < tail.thresholds.size(); ++i) {
        csv += format_double(tail.thresholds[i]);
        csv += ',';
        csv += format_double(tail.probabilities[i]);
        csv += ',';
        csv += format_double(tail.model_probabilities[i]);
        csv += ',';
        csv += format_double(std::pow(tail.thresholds[i], 2.0 - 2.0 * params.hurst));
        csv += '\n';
    }
    write_text_atomic(csv, plot_path);
    write_json_report(report, output);
    return 0;
}

} // namespace

struct WiredCommand {
    CLI::App* cmd = nullptr;
    std::string config_path;
    std::uint64_t seed_value = 0;
    std::string output_value;
    CLI::Option* seed_opt = nullptr;
    CLI::Option* output_opt = nullptr;

    CommandArgs args() const {
        CommandArgs out;
        out.config_path = config_path;
        if (seed_opt != nullptr && seed_opt->count() > 0)
            out.seed = seed_value;
        if (output_opt->count() > 0)
            out.output = output_value;
        return out;
    }
};

int main(int argc, char** argv) {
    CLI::App app{"Peer-to-peer bandwidth modeling toolkit"};
    app.require_subcommand(1);

    const auto wire = [&app](const char* name, const char* description, bool takes_seed) {
        WiredCommand wired;
        wired.cmd = app.add_subcommand(name, description);
        wired.cmd->add_option("--config", wired.config_path, "JSON config file")->required();
        if (takes_seed)
            wired.seed_opt = wired.cmd->add_option("--seed", wired.seed_value,
                                                   "Seed override (non-negative integer)");
        wired.output_opt =
            wired.cmd->add_option("--output", wired.output_value, "Output path override");
        return wired;
    };

    WiredCommand gen = wire("generate", "Synthesize bandwidth traces", true);
    WiredCommand est = wire("estimate", "Estimate model parameters from traces", false);
    WiredCommand ana = wire("analyze", "Moment, autocovariance and dependence report", true);
    WiredCommand que = wire("queue", "Queue simulation and overflow-tail comparison", true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (*gen.cmd)
            return run_generate(gen.args());
        if (*est.cmd)
            return run_estimate(est.args());
        if (*ana.cmd)
            return run_analyze(ana.args());
        return run_queue(que.args());
    } catch (const config_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
