// Command-line front end: analyze | validate | bench.

#include <charconv>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include <cctvx/cctvx.hpp>

namespace {

struct CliOptions {
    cctvx::RunConfig cfg;
    std::string config_path;
    std::string distance = "euclidean";
    std::string index = "grid";
    std::string format = "array";
    unsigned bench_repetitions = 0;  // analyze only; > 0 switches to bench
};

void add_common(CLI::App* cmd, CliOptions& opt) {
    cmd->add_option("--cameras", opt.cfg.cameras_path,
                    "camera store (JSON object keyed by camera id)");
    cmd->add_option("gpx", opt.cfg.gpx_paths, "GPX files to analyze");
    cmd->add_option("--resolution", opt.cfg.resolution,
                    "sweep resolution in meters (default 0.5)");
    cmd->add_option("--radius", opt.cfg.radius_override,
                    "override every camera radius, in meters");
    cmd->add_option("--fov", opt.cfg.fov_override,
                    "override the angle of view of directed cameras, "
                    "in degrees");
    cmd->add_option("--distance", opt.distance,
                    "distance method (default euclidean)")
        ->check(CLI::IsMember({"euclidean", "haversine"}));
    cmd->add_option("--index", opt.index,
                    "camera lookup strategy (default grid)")
        ->check(CLI::IsMember({"grid", "bruteforce"}));
    cmd->add_option("--output", opt.cfg.output_path,
                    "write the report to this file instead of stdout");
    cmd->add_option("--format", opt.format,
                    "report format (default array)")
        ->check(CLI::IsMember({"array", "jsonl", "geojson"}));
    cmd->add_option("--workers", opt.cfg.workers,
                    "worker threads (default: available cores)");
    cmd->add_flag("--scrub", opt.cfg.scrub,
                  "also write a metadata-scrubbed copy of each GPX");
    cmd->add_option("--config", opt.config_path,
                    "key=value file with defaults for these options");
}

std::string trimmed(const std::string& s) {
    auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

double config_number(const std::string& key, const std::string& value) {
    double out = 0.0;
    auto [ptr, ec] =
        std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size())
        throw cctvx::ConfigError("config file: " + key +
                                 " is not a number: \"" + value + "\"");
    return out;
}

// Fill anything the command line left at its default. Flags always win.
void apply_config_file(CLI::App* cmd, CliOptions& opt) {
    std::ifstream in(opt.config_path);
    if (!in)
        throw cctvx::FileError("cannot open " + opt.config_path);
    auto unset = [&](const char* flag) { return cmd->count(flag) == 0; };
    std::string line;
    while (std::getline(in, line)) {
        line = trimmed(line);
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw cctvx::ConfigError(
                "config file: expected key=value, got \"" + line + "\"");
        std::string key = trimmed(line.substr(0, eq));
        std::string value = trimmed(line.substr(eq + 1));
        if (key == "cameras") {
            if (unset("--cameras")) opt.cfg.cameras_path = value;
        } else if (key == "resolution") {
            if (unset("--resolution"))
                opt.cfg.resolution = config_number(key, value);
        } else if (key == "radius") {
            if (unset("--radius"))
                opt.cfg.radius_override = config_number(key, value);
        } else if (key == "fov") {
            if (unset("--fov"))
                opt.cfg.fov_override = config_number(key, value);
        } else if (key == "distance") {
            if (unset("--distance")) opt.distance = value;
        } else if (key == "index") {
            if (unset("--index")) opt.index = value;
        } else if (key == "output") {
            if (unset("--output")) opt.cfg.output_path = value;
        } else if (key == "format") {
            if (unset("--format")) opt.format = value;
        } else if (key == "workers") {
            if (unset("--workers"))
                opt.cfg.workers = static_cast<unsigned>(
                    config_number(key, value));
        } else if (key == "scrub") {
            if (unset("--scrub"))
                opt.cfg.scrub = value == "true" || value == "1";
        } else {
            throw cctvx::ConfigError("config file: unknown key \"" + key +
                                     "\"");
        }
    }
}

void finish(CLI::App* cmd, CliOptions& opt) {
    if (!opt.config_path.empty()) apply_config_file(cmd, opt);
    if (opt.cfg.cameras_path.empty())
        throw cctvx::ConfigError(
            "--cameras is required (flag or config file)");
    if (opt.distance != "euclidean" && opt.distance != "haversine")
        throw cctvx::ConfigError("unknown distance method \"" +
                                 opt.distance + "\"");
    opt.cfg.method = opt.distance == "haversine"
                         ? cctvx::DistanceMethod::haversine
                         : cctvx::DistanceMethod::euclidean;
    opt.cfg.index = cctvx::parse_index_mode(opt.index);
    opt.cfg.format = cctvx::parse_report_format(opt.format);
}

int do_analyze(CliOptions& opt) {
    if (opt.bench_repetitions > 0) {
        opt.cfg.bench_repetitions = opt.bench_repetitions;
        std::cout << cctvx::run_bench(opt.cfg).rendered;
        return 0;
    }
    cctvx::RunResult result = cctvx::run_analyze(opt.cfg);
    if (opt.cfg.output_path.empty()) std::cout << result.rendered;
    for (const std::string& path : result.scrubbed_paths)
        std::cerr << "scrubbed copy written: " << path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantifies how much of a GPS track is inside the "
                 "coverage of mapped CCTV cameras"};
    app.require_subcommand(1);

    CliOptions analyze_opt, validate_opt, bench_opt;

    CLI::App* analyze =
        app.add_subcommand("analyze", "produce exposure reports");
    add_common(analyze, analyze_opt);
    analyze
        ->add_option("--bench", analyze_opt.bench_repetitions,
                     "benchmark instead: time each segment N times")
        ->check(CLI::Range(1u, 1000000u));

    CLI::App* validate = app.add_subcommand(
        "validate", "check inputs without running the analysis");
    add_common(validate, validate_opt);

    CLI::App* bench =
        app.add_subcommand("bench", "time the per-segment analysis");
    add_common(bench, bench_opt);
    bench
        ->add_option("--bench", bench_opt.cfg.bench_repetitions,
                     "repetitions per segment (default 10)")
        ->check(CLI::Range(1u, 1000000u));

    try {
        app.parse(argc, argv);
        if (analyze->parsed()) {
            finish(analyze, analyze_opt);
            return do_analyze(analyze_opt);
        }
        if (validate->parsed()) {
            finish(validate, validate_opt);
            std::cout << cctvx::run_validate(validate_opt.cfg);
            return 0;
        }
        finish(bench, bench_opt);
        std::cout << cctvx::run_bench(bench_opt.cfg).rendered;
        return 0;
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0
                         : static_cast<int>(cctvx::ExitCode::invalid_config);
    } catch (const cctvx::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(e.exit_code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(cctvx::ExitCode::failure);
    }
}
