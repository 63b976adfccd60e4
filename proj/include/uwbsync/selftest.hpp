// SPDX-License-Identifier: Apache-2.0
//
// uwbsync: timing acquisition simulator for multi-user TH-PAM impulse radio
// ------------------------------------------------------------------------

#ifndef UWBSYNC_SELFTEST_HPP
#define UWBSYNC_SELFTEST_HPP

#include "uwbsync/geometry.hpp"
#include "uwbsync/waveform.hpp"

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace uwbsync {

using PulseFactory = std::function<Pulse(const FrameGeometry &, double shape_factor)>;

struct SelftestOptions {
    // Replaceable so tests can inject a broken pulse generator.
    PulseFactory pulse_factory = [](const FrameGeometry &g, double sf) { return make_pulse(g, sf); };
};

struct SelftestCheck {
    std::string name;
    bool ok = false;
    std::string detail;
    double seconds = 0.0;
};

/// Runs pulse_energy, partition_identity, noiseless_alignment, fine_scan_range in that order,
/// stopping after the first failure.
std::vector<SelftestCheck> run_selftest(const SelftestOptions &options = {});

/// Prints one line per check; returns 0 if all pass, 2 otherwise.
int cmd_selftest(std::ostream &out, std::ostream &err, const SelftestOptions &options = {});

} // namespace uwbsync

#endif
