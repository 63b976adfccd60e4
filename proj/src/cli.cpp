// SPDX-License-Identifier: Apache-2.0
//
// uwbsync: timing acquisition simulator for multi-user TH-PAM impulse radio
// ------------------------------------------------------------------------

#include "uwbsync/cli.hpp"
#include "uwbsync/report.hpp"
#include "uwbsync/scenario.hpp"
#include "uwbsync/selftest.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace uwbsync {

namespace {

std::string read_file(const std::string &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
}

void write_file(const std::filesystem::path &path, const std::string &content)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot write '" + path.string() + "'");
    out << content;
    out.close();
    if (!out)
        throw IoError("error writing '" + path.string() + "'");
}

std::vector<std::string> split_csv_arg(const std::string &s)
{
    std::vector<std::string> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ','))
        if (!item.empty())
            out.push_back(item);
    return out;
}

std::vector<std::optional<double>> parse_snr_arg(const std::string &s)
{
    std::vector<std::optional<double>> out;
    for (const auto &item : split_csv_arg(s)) {
        if (item == "noiseless" || item == "inf") {
            out.emplace_back(std::nullopt);
            continue;
        }
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception &) {
            used = 0;
        }
        if (used != item.size() || !std::isfinite(v))
            throw std::invalid_argument("--snr: '" + item + "' is not a number");
        out.emplace_back(v);
    }
    if (out.empty())
        throw std::invalid_argument("--snr: no SNR points given");
    return out;
}

} // namespace

void apply_overrides(ScenarioConfig &cfg, const RunOverrides &o)
{
    if (o.seed)
        cfg.master_seed = *o.seed;
    if (o.trials)
        cfg.trials = *o.trials;
    if (o.snr_db)
        cfg.snr_points_db = *o.snr_db;
    if (o.estimators)
        cfg.estimators = *o.estimators;
    if (o.modes)
        cfg.modes = *o.modes;
    if (o.workers)
        cfg.workers = *o.workers;
    validate_scenario(cfg);
}

ScenarioConfig load_run_input(const std::string &path)
{
    const std::string text = read_file(path);
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        const RunManifest m = parse_manifest_json(text);
        ScenarioConfig cfg = parse_scenario_text(m.config, path + " (config)");
        cfg.master_seed = m.master_seed;
        return cfg;
    }
    return parse_scenario_text(text, path);
}

int cmd_run(const std::string &input_path, const std::string &out_dir, const RunOverrides &overrides, std::ostream &out,
            std::ostream &err)
{
    ScenarioConfig cfg;
    try {
        cfg = load_run_input(input_path);
        apply_overrides(cfg, overrides);
    } catch (const IoError &e) {
        err << "error: " << e.what() << "\n";
        return exit_io;
    } catch (const std::invalid_argument &e) {
        err << "config error: " << e.what() << "\n";
        return exit_config;
    }

    RunManifest manifest;
    manifest.config = emit_config(cfg);
    manifest.master_seed = cfg.master_seed;
    manifest.version = version_string();
    manifest.started_utc = utc_timestamp();

    MetricsTable table;
    try {
        table = sweep(cfg);
    } catch (const std::exception &e) {
        err << "runtime error: " << e.what() << "\n";
        return exit_runtime;
    }
    manifest.finished_utc = utc_timestamp();

    try {
        const std::filesystem::path dir(out_dir);
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        if (ec)
            throw IoError("cannot create output directory '" + out_dir + "': " + ec.message());
        const auto csv_path = dir / "metrics.csv";
        const auto manifest_path = dir / "manifest.json";
        write_file(csv_path, metrics_csv(table));
        manifest.outputs = {csv_path.string()};
        write_file(manifest_path, manifest_json(manifest));
        out << "wrote " << csv_path.string() << " (" << table.rows.size() << " rows) and " << manifest_path.string()
            << "\n";
    } catch (const std::exception &e) {
        err << "error: " << e.what() << "\n";
        return exit_io;
    }
    return exit_ok;
}

int cmd_emit_config(const std::string &input_path, std::ostream &out, std::ostream &err)
{
    try {
        out << emit_config(input_path.empty() ? ScenarioConfig{} : load_run_input(input_path));
    } catch (const IoError &e) {
        err << "error: " << e.what() << "\n";
        return exit_io;
    } catch (const std::invalid_argument &e) {
        err << "config error: " << e.what() << "\n";
        return exit_config;
    }
    return exit_ok;
}

int run_cli(int argc, char **argv)
{
    CLI::App app{"uwbsync: two-stage timing acquisition simulator for multi-user TH-PAM UWB"};
    app.set_version_flag("--version", version_string());
    app.require_subcommand(1);

    auto *run = app.add_subcommand("run", "run a scenario sweep and write metrics.csv + manifest.json");
    std::string scenario;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    int trials = 0;
    int workers = 0;
    std::string snr;
    std::string estimator;
    std::string mode;
    run->add_option("scenario", scenario, "scenario file or a manifest.json from an earlier run")->required();
    auto *seed_opt = run->add_option("--seed", seed, "master seed");
    auto *trials_opt = run->add_option("--trials", trials, "trials per sweep point")->check(CLI::PositiveNumber);
    auto *snr_opt = run->add_option("--snr", snr, "comma-separated SNR points in dB ('noiseless' allowed)");
    auto *est_opt = run->add_option("--estimator", estimator, "estimators to report")
                        ->check(CLI::IsMember({"coarse_only", "two_stage", "both"}));
    auto *mode_opt = run->add_option("--mode", mode, "acquisition modes")->check(CLI::IsMember({"nda", "da", "both"}));
    auto *workers_opt = run->add_option("--workers", workers, "worker threads (0 = hardware concurrency)")
                            ->check(CLI::NonNegativeNumber);
    run->add_option("--out", out_dir, "output directory")->capture_default_str();

    auto *selftest = app.add_subcommand("selftest", "run the fast oracle checks");

    auto *emit = app.add_subcommand("emit-config", "print the canonical form of a scenario");
    std::string emit_input;
    emit->add_option("scenario", emit_input, "scenario file or manifest (default: built-in desk profile)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int rc = app.exit(e);
        return rc == 0 ? exit_ok : exit_config;
    }

    if (*selftest)
        return cmd_selftest(std::cout, std::cerr);
    if (*emit)
        return cmd_emit_config(emit_input, std::cout, std::cerr);

    RunOverrides o;
    try {
        if (*seed_opt)
            o.seed = seed;
        if (*trials_opt)
            o.trials = trials;
        if (*workers_opt)
            o.workers = workers;
        if (*snr_opt)
            o.snr_db = parse_snr_arg(snr);
        if (*est_opt)
            o.estimators = estimator == "both" ? std::vector<Estimator>{Estimator::coarse_only, Estimator::two_stage}
                           : estimator == "coarse_only" ? std::vector<Estimator>{Estimator::coarse_only}
                                                        : std::vector<Estimator>{Estimator::two_stage};
        if (*mode_opt)
            o.modes = mode == "both" ? std::vector<Mode>{Mode::nda, Mode::da}
                      : mode == "nda" ? std::vector<Mode>{Mode::nda}
                                      : std::vector<Mode>{Mode::da};
    } catch (const std::invalid_argument &e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config;
    }
    return cmd_run(scenario, out_dir, o, std::cout, std::cerr);
}

} // namespace uwbsync
