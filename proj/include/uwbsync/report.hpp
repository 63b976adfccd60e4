// SPDX-License-Identifier: Apache-2.0
//
// uwbsync: timing acquisition simulator for multi-user TH-PAM impulse radio
// ------------------------------------------------------------------------

#ifndef UWBSYNC_REPORT_HPP
#define UWBSYNC_REPORT_HPP

#include "uwbsync/harness.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace uwbsync {

inline constexpr const char *metrics_csv_header = "snr_db,m,mode,estimator,n_users,norm_mse,p_acq,trials,ci95";

/// %.17g; noiseless SNR is written as "inf".
std::string format_double(double v);

/// Header plus one LF-terminated line per row, rows in table order.
std::string metrics_csv(const MetricsTable &table);

struct RunManifest {
    std::string config;              // emit_config text of the effective configuration
    std::uint64_t master_seed = 0;
    std::string version;
    std::string started_utc;
    std::string finished_utc;
    std::vector<std::string> outputs;
};

std::string manifest_json(const RunManifest &manifest);

/// Reads back a manifest written by manifest_json. Throws std::invalid_argument on malformed input.
RunManifest parse_manifest_json(const std::string &text);

std::string utc_timestamp();

const char *version_string() noexcept;

} // namespace uwbsync

#endif
