// SPDX-License-Identifier: Apache-2.0
//
// uwbsync: timing acquisition simulator for multi-user TH-PAM impulse radio
// ------------------------------------------------------------------------

#include "uwbsync/report.hpp"

#include "json.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <stdexcept>

namespace uwbsync {

std::string format_double(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string metrics_csv(const MetricsTable &table)
{
    std::string out = metrics_csv_header;
    out += '\n';
    for (const auto &r : table.rows) {
        out += r.snr_db ? format_double(*r.snr_db) : std::string("inf");
        out += ',' + std::to_string(r.m);
        out += ',' + std::string(to_string(r.mode));
        out += ',' + std::string(to_string(r.estimator));
        out += ',' + std::to_string(r.n_users);
        out += ',' + format_double(r.normalized_mse);
        out += ',' + format_double(r.p_acq);
        out += ',' + std::to_string(r.trials);
        out += ',' + format_double(r.ci95);
        out += '\n';
    }
    return out;
}

std::string manifest_json(const RunManifest &m)
{
    nlohmann::ordered_json j;
    j["tool"] = "uwbsync";
    j["version"] = m.version;
    j["master_seed"] = m.master_seed;
    j["started_utc"] = m.started_utc;
    j["finished_utc"] = m.finished_utc;
    j["outputs"] = m.outputs;
    j["config"] = m.config;
    return j.dump(2) + "\n";
}

RunManifest parse_manifest_json(const std::string &text)
{
    try {
        const auto j = nlohmann::json::parse(text);
        RunManifest m;
        m.config = j.at("config").get<std::string>();
        m.master_seed = j.at("master_seed").get<std::uint64_t>();
        m.version = j.value("version", "");
        m.started_utc = j.value("started_utc", "");
        m.finished_utc = j.value("finished_utc", "");
        m.outputs = j.value("outputs", std::vector<std::string>{});
        return m;
    } catch (const nlohmann::json::exception &e) {
        throw std::invalid_argument(std::string("malformed manifest: ") + e.what());
    }
}

std::string utc_timestamp()
{
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

const char *version_string() noexcept
{
    return "uwbsync 1.0.0";
}

} // namespace uwbsync
