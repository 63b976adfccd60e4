// SPDX-License-Identifier: Apache-2.0
//
// uwbsync: timing acquisition simulator for multi-user TH-PAM impulse radio
// ------------------------------------------------------------------------

#ifndef UWBSYNC_SCENARIO_HPP
#define UWBSYNC_SCENARIO_HPP

#include "uwbsync/harness.hpp"

#include <cstddef>
#include <stdexcept>
#include <string>

namespace uwbsync {

inline constexpr int scenario_format_version = 1;

// Parse or validation failure. `key()` names the offending key ("" for structural errors),
// `line()` is 1-based (0 when the problem is not tied to a line, e.g. a missing key).
class ScenarioError : public std::invalid_argument {
  public:
    ScenarioError(std::string source, std::size_t line, std::string key, const std::string &message);
    const std::string &source() const noexcept { return source_; }
    std::size_t line() const noexcept { return line_; }
    const std::string &key() const noexcept { return key_; }
    const std::string &message() const noexcept { return message_; }

  private:
    std::string source_;
    std::size_t line_;
    std::string key_;
    std::string message_;
};

// A file could not be read or written.
class IoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Parse scenario text. `source` is used only in diagnostics.
ScenarioConfig parse_scenario_text(const std::string &text, const std::string &source = "<string>");

/// Read and parse a scenario file. Throws IoError if the file cannot be read.
ScenarioConfig parse_scenario(const std::string &path);

/// Canonical text form; parse_scenario_text(emit_config(c)) == c.
std::string emit_config(const ScenarioConfig &cfg);

/// Directory holding the bundled scenarios (paper_cm1.scenario, desk.scenario).
std::string bundled_scenario_dir();

} // namespace uwbsync

#endif
