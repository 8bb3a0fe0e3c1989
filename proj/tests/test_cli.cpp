// End-to-end checks of the p2pbw binary: real process runs against real
// files in a throwaway directory. Usage: cli_tests <path-to-binary>.
// Prints one PASS/FAIL line per scenario; exit status is the failure count.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include "json.hpp"

#include "p2pbw/rng.hpp"
#include "p2pbw/trace.hpp"
#include "p2pbw/trace_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string g_binary;
fs::path g_dir;
int failures = 0;

void check(bool ok, const char* name, const std::string& detail = "") {
    std::printf("%s %s%s%s\n", ok ? "PASS" : "FAIL", name, detail.empty() ? "" : ": ",
                detail.c_str());
    if (!ok)
        ++failures;
}

std::string path_in(const std::string& name) { return (g_dir / name).string(); }

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

int run(const std::string& args) {
    const std::string cmd = "'" + g_binary + "' " + args + " >'" + path_in("last_stdout") +
                            "' 2>'" + path_in("last_stderr") + "'";
    const int status = std::system(cmd.c_str());
    if (status == -1)
        return -1;
    if (WIFEXITED(status))
        return WEXITSTATUS(status);
    return -2;
}

std::string last_stderr() { return read_file(path_in("last_stderr")); }

// Reports embed a wall-clock timestamp; everything else must be stable.
std::string strip_timestamp(const std::string& text) {
    std::istringstream in(text);
    std::string out, line;
    while (std::getline(in, line)) {
        if (line.find("\"timestamp\"") != std::string::npos)
            continue;
        out += line;
        out += '\n';
    }
    return out;
}

json load_json(const std::string& path) { return json::parse(read_file(path)); }

bool contains(const std::string& haystack, const std::string& needle) {
    return haystack.find(needle) != std::string::npos;
}

const char* kIndividualModel = R"({"traffic": {"a": 1.0, "n": 2.5},
                                   "ou": {"gamma": 1.0, "sigma": 0.8}})";

std::string individual_config(const std::string& output, const char* extra = "") {
    std::ostringstream cfg;
    cfg << "{\"schema_version\": 1, \"kind\": \"individual\", \"seed\": 11,"
        << "\"grid\": {\"dt\": 0.1, \"count\": 500},"
        << "\"model\": " << kIndividualModel << "," << extra << "\"output\": \"" << output
        << "\"}";
    return cfg.str();
}

// ---- scenarios ----------------------------------------------------------

void generate_is_deterministic() {
    const std::string out = path_in("bw1.csv");
    write_file(path_in("gen1.json"), individual_config(out));

    bool ok = run("generate --config '" + path_in("gen1.json") + "'") == 0;
    const std::string first_trace = read_file(out);
    const std::string first_meta = read_file(out + ".meta.json");
    ok = ok && run("generate --config '" + path_in("gen1.json") + "'") == 0;

    ok = ok && read_file(out) == first_trace;
    ok = ok && strip_timestamp(read_file(out + ".meta.json")) == strip_timestamp(first_meta);

    const json meta = load_json(out + ".meta.json");
    ok = ok && meta.at("command") == "generate" && meta.at("config").at("seed") == 11;
    ok = ok && meta.at("outputs") == json::array({out});
    check(ok, "generate: byte-identical reruns, meta stable modulo timestamp");
}

void seed_flag_overrides_config() {
    const std::string base = path_in("bw1.csv");
    const std::string out = path_in("bw_seed12.csv");
    bool ok = run("generate --config '" + path_in("gen1.json") + "' --seed 12 --output '" + out +
                  "'") == 0;
    ok = ok && read_file(out) != read_file(base);
    ok = ok && load_json(out + ".meta.json").at("config").at("seed") == 12;
    check(ok, "generate: --seed and --output override the config");
}

void zero_volatility_means_zero_bandwidth() {
    const std::string out = path_in("flat.csv");
    std::ostringstream cfg;
    cfg << "{\"schema_version\": 1, \"kind\": \"individual\", \"seed\": 3,"
        << "\"grid\": {\"dt\": 0.1, \"count\": 200},"
        << "\"model\": {\"traffic\": {\"a\": 1.0, \"n\": 2.5},"
        << "\"ou\": {\"gamma\": 1.0, \"sigma\": 0.0}},"
        << "\"output\": \"" << out << "\"}";
    write_file(path_in("flat.json"), cfg.str());
    bool ok = run("generate --config '" + path_in("flat.json") + "'") == 0;
    const p2pbw::Trace t = p2pbw::read_trace_csv(out);
    for (double v : t.values)
        ok = ok && v == 0.0;
    check(ok, "generate: zero volatility yields an identically zero trace");
}

void multiservice_writes_named_files() {
    const std::string out = path_in("ms.csv");
    std::ostringstream cfg;
    cfg << "{\"schema_version\": 1, \"kind\": \"multiservice\", \"seed\": 21,"
        << "\"grid\": {\"dt\": 0.1, \"count\": 100},"
        << "\"services\": ["
        << "{\"name\": \"audio\", \"model\": " << kIndividualModel << "},"
        << "{\"name\": \"video\", \"model\": " << kIndividualModel << "}],"
        << "\"output\": \"" << out << "\"}";
    write_file(path_in("ms.json"), cfg.str());
    bool ok = run("generate --config '" + path_in("ms.json") + "'") == 0;
    ok = ok && fs::exists(path_in("ms.audio.csv")) && fs::exists(path_in("ms.video.csv"));
    const json meta = load_json(out + ".meta.json");
    ok = ok && meta.at("outputs").size() == 2;
    ok = ok && read_file(path_in("ms.audio.csv")) != read_file(path_in("ms.video.csv"));

    // Names are path components; reject anything outside [A-Za-z0-9_-].
    std::string bad = cfg.str();
    bad.replace(bad.find("audio"), 5, "au/dio");
    write_file(path_in("ms_bad.json"), bad);
    ok = ok && run("generate --config '" + path_in("ms_bad.json") + "'") == 1;
    check(ok, "generate: multiservice writes one named file per service");
}

void aggregate_equals_component_sum() {
    const std::string out = path_in("agg.csv");
    std::ostringstream cfg;
    cfg << "{\"schema_version\": 1, \"kind\": \"aggregate\", \"seed\": 31,"
        << "\"grid\": {\"dt\": 0.1, \"count\": 300}, \"write_components\": true,"
        << "\"components\": [" << kIndividualModel << "," << kIndividualModel << ","
        << kIndividualModel << "]," << "\"output\": \"" << out << "\"}";
    write_file(path_in("agg.json"), cfg.str());
    bool ok = run("generate --config '" + path_in("agg.json") + "'") == 0;

    const p2pbw::Trace total = p2pbw::read_trace_csv(out);
    std::vector<double> sum(total.size(), 0.0);
    for (int c = 0; c < 3; ++c) {
        const p2pbw::Trace part =
            p2pbw::read_trace_csv(path_in("agg.component" + std::to_string(c) + ".csv"));
        ok = ok && part.size() == total.size();
        for (std::size_t i = 0; i < sum.size(); ++i)
            sum[i] += part.values[i];
    }
    ok = ok && sum == total.values;
    check(ok, "generate: aggregate trace equals the sum of its written components");
}

void estimate_round_trip() {
    const std::string gen_out = path_in("rt.csv");
    std::ostringstream gen;
    gen << "{\"schema_version\": 1, \"kind\": \"individual\", \"seed\": 99,"
        << "\"grid\": {\"dt\": 0.1, \"count\": 20000}, \"write_factors\": true,"
        << "\"model\": {\"traffic\": {\"a\": 1.0, \"n\": 3.0},"
        << "\"ou\": {\"gamma\": 1.0, \"sigma\": 0.5}},"
        << "\"output\": \"" << gen_out << "\"}";
    write_file(path_in("rt_gen.json"), gen.str());
    bool ok = run("generate --config '" + path_in("rt_gen.json") + "'") == 0;

    const std::string report_path = path_in("rt_report.json");
    std::ostringstream est;
    est << "{\"schema_version\": 1, \"trace\": \"" << path_in("rt.ou.csv") << "\","
        << "\"samples\": \"" << path_in("rt.traffic.csv") << "\", \"cutoff\": 1.0,"
        << "\"output\": \"" << report_path << "\"}";
    write_file(path_in("rt_est.json"), est.str());
    ok = ok && run("estimate --config '" + path_in("rt_est.json") + "'") == 0;

    const json report = load_json(report_path);
    const double gamma_hat = report.at("ou").at("exact_mle").at("gamma_hat").get<double>();
    const double sigma_hat = report.at("ou").at("exact_mle").at("sigma_hat").get<double>();
    const double n_hat = report.at("traffic").at("n_hat").get<double>();
    ok = ok && std::fabs(gamma_hat - 1.0) < 0.1;
    ok = ok && std::fabs(sigma_hat - 0.5) < 0.02;
    ok = ok && std::fabs(n_hat - 3.0) < 0.15;
    ok = ok && report.at("ou").contains("deviations");
    ok = ok && report.at("config").at("methods").size() == 3;
    std::ostringstream detail;
    detail << "gamma=" << gamma_hat << ", sigma=" << sigma_hat << ", n=" << n_hat;
    check(ok, "estimate: recovers generation parameters from written factors", detail.str());
}

void estimate_samples_only() {
    const std::string report_path = path_in("tails_only.json");
    std::ostringstream est;
    est << "{\"schema_version\": 1, \"samples\": \"" << path_in("rt.traffic.csv")
        << "\", \"cutoff\": 1.0, \"output\": \"" << report_path << "\"}";
    write_file(path_in("tails_only.json.cfg"), est.str());
    bool ok = run("estimate --config '" + path_in("tails_only.json.cfg") + "'") == 0;
    const json report = load_json(report_path);
    ok = ok && report.contains("traffic") && !report.contains("ou");
    check(ok, "estimate: samples-only run skips the path estimators");
}

void estimate_is_deterministic() {
    const std::string report_path = path_in("rt_report.json");
    const std::string first = strip_timestamp(read_file(report_path));
    bool ok = run("estimate --config '" + path_in("rt_est.json") + "'") == 0;
    ok = ok && strip_timestamp(read_file(report_path)) == first;
    check(ok, "estimate: report byte-identical across reruns modulo timestamp");
}

void corrupt_csv_exits_2_naming_line() {
    write_file(path_in("corrupt.csv"), "time,value\n0,1\n0.1,oops\n");
    std::ostringstream est;
    est << "{\"schema_version\": 1, \"trace\": \"" << path_in("corrupt.csv")
        << "\", \"output\": \"" << path_in("never.json") << "\"}";
    write_file(path_in("corrupt_est.json"), est.str());
    const int rc = run("estimate --config '" + path_in("corrupt_est.json") + "'");
    const bool ok = rc == 2 && contains(last_stderr(), "corrupt.csv:3");
    check(ok, "errors: malformed CSV exits 2 and names file:line",
          "rc=" + std::to_string(rc));
}

void unknown_config_field_exits_1() {
    write_file(path_in("extra.json"),
               individual_config(path_in("never.csv"), "\"typo_field\": 1,"));
    const int rc = run("generate --config '" + path_in("extra.json") + "'");
    const bool ok = rc == 1 && contains(last_stderr(), "unknown field 'typo_field'");
    check(ok, "errors: unknown config field exits 1", "rc=" + std::to_string(rc));
}

void missing_input_exits_2() {
    std::ostringstream est;
    est << "{\"schema_version\": 1, \"trace\": \"" << path_in("no_such_file.csv")
        << "\", \"output\": \"" << path_in("never2.json") << "\"}";
    write_file(path_in("missing_est.json"), est.str());
    const int rc = run("estimate --config '" + path_in("missing_est.json") + "'");
    check(rc == 2, "errors: missing input file exits 2", "rc=" + std::to_string(rc));
}

void missing_config_flag_exits_1() {
    const int rc = run("estimate");
    check(rc == 1, "errors: missing --config exits 1", "rc=" + std::to_string(rc));
}

void analyze_white_noise_is_not_lrd() {
    p2pbw::RngStream rng(2026);
    std::vector<double> vals;
    for (int i = 0; i < 4096; ++i)
        vals.push_back(rng.normal());
    p2pbw::write_trace_csv(p2pbw::Trace{1.0, vals}, path_in("white.csv"));

    const std::string report_path = path_in("white_report.json");
    std::ostringstream cfg;
    cfg << "{\"schema_version\": 1, \"trace\": \"" << path_in("white.csv")
        << "\", \"output\": \"" << report_path << "\"}";
    write_file(path_in("white.json"), cfg.str());
    const int rc = run("analyze --config '" + path_in("white.json") + "'");
    bool ok = rc == 0 || rc == 3;
    const json report = load_json(report_path);
    ok = ok && report.at("lrd").at("verdict") == false;
    for (const auto& plot : report.at("plot_files"))
        ok = ok && fs::exists(plot.get<std::string>());
    check(ok, "analyze: white noise is not flagged as long-range dependent",
          "rc=" + std::to_string(rc));
}

void analyze_constant_trace_warns() {
    p2pbw::write_trace_csv(p2pbw::Trace{1.0, std::vector<double>(200, 4.25)},
                           path_in("const.csv"));
    const std::string report_path = path_in("const_report.json");
    std::ostringstream cfg;
    cfg << "{\"schema_version\": 1, \"trace\": \"" << path_in("const.csv")
        << "\", \"output\": \"" << report_path << "\"}";
    write_file(path_in("const.json"), cfg.str());
    const int rc = run("analyze --config '" + path_in("const.json") + "'");
    bool ok = rc == 0 || rc == 3;
    const json report = load_json(report_path);
    ok = ok && report.at("moments").at("variance") == 0.0;
    bool warned = false;
    for (const auto& w : report.at("warnings"))
        warned = warned || contains(w.get<std::string>(), "constant");
    check(ok && warned, "analyze: constant trace reports zero variance with a warning",
          "rc=" + std::to_string(rc));
}

void queue_underloaded_file_mode() {
    p2pbw::write_trace_csv(p2pbw::Trace{1.0, std::vector<double>(200, 0.01)},
                           path_in("tiny_arrivals.csv"));
    const std::string report_path = path_in("underload.json");
    std::ostringstream cfg;
    cfg << "{\"schema_version\": 1, \"arrivals\": \"" << path_in("tiny_arrivals.csv") << "\","
        << "\"service_rate\": 100.0, \"download_rate\": 2.0, \"upload_rate\": 2.0,"
        << "\"hurst\": 0.75, \"a\": 1.0, \"thresholds\": [1, 2, 3, 4, 5],"
        << "\"burn_in\": 0.0, \"output\": \"" << report_path << "\","
        << "\"plot\": \"" << path_in("underload_plot.csv") << "\"}";
    write_file(path_in("underload.cfg.json"), cfg.str());
    const int rc = run("queue --config '" + path_in("underload.cfg.json") + "'");
    bool ok = rc == 0;
    const json report = load_json(report_path);
    for (const auto& p : report.at("tail").at("empirical"))
        ok = ok && p.get<double>() == 0.0;
    ok = ok && report.at("regression").is_null();
    bool noted = false;
    for (const auto& n : report.at("notes"))
        noted = noted || contains(n.get<std::string>(), "regression skipped");
    const std::string plot = read_file(path_in("underload_plot.csv"));
    ok = ok && noted && contains(plot, "x,empirical,model,x_pow");
    check(ok, "queue: empty tail reported honestly, regression skipped with a note",
          "rc=" + std::to_string(rc));
}

void queue_model_mode() {
    const std::string report_path = path_in("qmodel.json");
    std::ostringstream cfg;
    cfg << "{\"schema_version\": 1, \"seed\": 5,"
        << "\"model\": " << kIndividualModel << ","
        << "\"grid\": {\"dt\": 0.1, \"count\": 20000},"
        << "\"utilization\": 0.5, \"download_rate\": 2.0, \"upload_rate\": 4.0,"
        << "\"output\": \"" << report_path << "\"}";
    write_file(path_in("qmodel.cfg.json"), cfg.str());
    const int rc = run("queue --config '" + path_in("qmodel.cfg.json") + "'");
    bool ok = rc == 0;
    const json report = load_json(report_path);
    ok = ok && report.at("queue_params").at("m") == 0.5;
    ok = ok && report.at("queue_params").at("hurst") == 0.75;
    // Tail index 2.5 has no analytic variance; the factor sample steps in.
    ok = ok && report.at("queue_params").at("var_traffic_source") == "empirical";
    ok = ok && report.at("utilization") == 0.5;
    ok = ok && fs::exists(path_in("qmodel.csv")); // default plot path

    // service_rate and utilization together are ambiguous.
    std::string both = cfg.str();
    both.replace(both.find("\"utilization\": 0.5"), 18,
                 "\"utilization\": 0.5, \"service_rate\": 9");
    write_file(path_in("qboth.cfg.json"), both);
    ok = ok && run("queue --config '" + path_in("qboth.cfg.json") + "'") == 1;
    check(ok, "queue: model mode derives (m, H, a) and honors the utilization target",
          "rc=" + std::to_string(rc));
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: cli_tests <path-to-p2pbw-binary>\n");
        return 64;
    }
    g_binary = fs::absolute(argv[1]).string();

    char tmpl[] = "/tmp/p2pbw_cli_XXXXXX";
    if (::mkdtemp(tmpl) == nullptr) {
        std::fprintf(stderr, "cannot create scratch directory\n");
        return 65;
    }
    g_dir = tmpl;

    generate_is_deterministic();
    seed_flag_overrides_config();
    zero_volatility_means_zero_bandwidth();
    multiservice_writes_named_files();
    aggregate_equals_component_sum();
    estimate_round_trip();
    estimate_samples_only();
    estimate_is_deterministic();
    corrupt_csv_exits_2_naming_line();
    unknown_config_field_exits_1();
    missing_input_exits_2();
    missing_config_flag_exits_1();
    analyze_white_noise_is_not_lrd();
    analyze_constant_trace_warns();
    queue_underloaded_file_mode();
    queue_model_mode();

    std::error_code ec;
    fs::remove_all(g_dir, ec);

    if (failures == 0)
        std::printf("cli: all scenarios passed\n");
    else
        std::printf("cli: %d scenario(s) FAILED\n", failures);
    return failures;
}
