// SPDX-License-Identifier: Apache-2.0
//
// uwbsync: timing acquisition simulator for multi-user TH-PAM impulse radio
// ------------------------------------------------------------------------

#include "uwbsync/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace uwbsync {

bool is_whole_samples(double ns, double rate_ghz) noexcept
{
    const double n = ns * rate_ghz;
    return std::isfinite(n) && std::abs(n - std::round(n)) <= 1e-9 * std::max(1.0, std::abs(n));
}

namespace {

std::size_t checked_samples(double ns, double rate, const char *field, const char *name)
{
    if (!(ns > 0.0))
        throw GeometryError(field, std::string(name) + " must be positive");
    if (!is_whole_samples(ns, rate))
        throw GeometryError(field, std::string(name) + " is not a whole number of samples at the sample rate");
    return static_cast<std::size_t>(std::llround(ns * rate));
}

} // namespace

FrameGeometry::FrameGeometry(const GeometryParams &p) : p_(p)
{
    if (!(p.sample_rate_ghz > 0.0) || !std::isfinite(p.sample_rate_ghz))
        throw GeometryError("sample_rate_ghz", "sample rate must be positive");
    if (p.frames_per_symbol < 1)
        throw GeometryError("frames_per_symbol", "N_f must be at least 1");
    if (p.chips_per_frame < 1)
        throw GeometryError("chips_per_frame", "N_c must be at least 1");

    pulse_samples_ = checked_samples(p.pulse_ns, p.sample_rate_ghz, "pulse_ns", "T_p");
    chip_samples_ = checked_samples(p.chip_ns, p.sample_rate_ghz, "chip_ns", "T_c");
    frame_samples_ = checked_samples(p.frame_ns, p.sample_rate_ghz, "frame_ns", "T_f");

    if (pulse_samples_ > chip_samples_)
        throw GeometryError("pulse_ns", "pulse longer than chip: T_p > T_c");
    if (chip_samples_ > frame_samples_)
        throw GeometryError("chip_ns", "chip longer than frame: T_c > T_f");
    // Compare in samples so the check is exact.
    if ((p.chips_per_frame - 1) * chip_samples_ + pulse_samples_ > frame_samples_)
        throw GeometryError("frame_ns", "frame spill: (N_c-1)*T_c + T_p > T_f");
}

FrameGeometry FrameGeometry::paper()
{
    return FrameGeometry(GeometryParams{});
}

FrameGeometry FrameGeometry::desk()
{
    GeometryParams p;
    p.frames_per_symbol = 8;
    p.sample_rate_ghz = 10.0;
    return FrameGeometry(p);
}

std::size_t FrameGeometry::whole_samples(double ns, const char *what) const
{
    if (!(ns >= 0.0) || !is_whole_samples(ns, p_.sample_rate_ghz))
        throw std::invalid_argument(std::string(what) + " is not a whole number of samples at the sample rate");
    return static_cast<std::size_t>(std::llround(ns * p_.sample_rate_ghz));
}

std::int64_t FrameGeometry::nearest_sample(double ns) const noexcept
{
    return std::llround(ns * p_.sample_rate_ghz);
}

} // namespace uwbsync
