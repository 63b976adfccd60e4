// SPDX-License-Identifier: Apache-2.0
//
// uwbsync: timing acquisition simulator for multi-user TH-PAM impulse radio
// ------------------------------------------------------------------------

#ifndef UWBSYNC_GEOMETRY_HPP
#define UWBSYNC_GEOMETRY_HPP

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace uwbsync {

/// Raw timing constants as they appear in a scenario file. Durations are in ns, rates in GHz.
struct GeometryParams {
    double pulse_ns = 0.8;        // T_p
    double chip_ns = 1.0;         // T_c
    double frame_ns = 35.0;       // T_f
    int frames_per_symbol = 32;   // N_f
    int chips_per_frame = 35;     // N_c
    double sample_rate_ghz = 50.0;

    bool operator==(const GeometryParams &) const = default;
};

/// Thrown when a geometry invariant fails. `field()` is the scenario key of the offending value.
class GeometryError : public std::invalid_argument {
  public:
    GeometryError(std::string field, const std::string &what)
        : std::invalid_argument(what), field_(std::move(field)) {}
    const std::string &field() const noexcept { return field_; }

  private:
    std::string field_;
};

// Validated frame/symbol timing. Every duration is a whole number of samples at the sample rate.
class FrameGeometry {
  public:
    explicit FrameGeometry(const GeometryParams &p);

    /// Full-size profile: T_p = 0.8, T_c = 1, T_f = 35 ns, N_f = 32, N_c = 35, 50 GHz.
    static FrameGeometry paper();
    /// CI profile: same frame layout with N_f = 8 at 10 GHz.
    static FrameGeometry desk();

    const GeometryParams &params() const noexcept { return p_; }

    double pulse_ns() const noexcept { return p_.pulse_ns; }
    double chip_ns() const noexcept { return p_.chip_ns; }
    double frame_ns() const noexcept { return p_.frame_ns; }
    double symbol_ns() const noexcept { return p_.frame_ns * p_.frames_per_symbol; }
    int frames_per_symbol() const noexcept { return p_.frames_per_symbol; }
    int chips_per_frame() const noexcept { return p_.chips_per_frame; }
    double sample_rate_ghz() const noexcept { return p_.sample_rate_ghz; }
    double dt_ns() const noexcept { return 1.0 / p_.sample_rate_ghz; }

    std::size_t pulse_samples() const noexcept { return pulse_samples_; }
    std::size_t chip_samples() const noexcept { return chip_samples_; }
    std::size_t frame_samples() const noexcept { return frame_samples_; }
    std::size_t symbol_samples() const noexcept { return frame_samples_ * p_.frames_per_symbol; }

    /// Exact conversion; throws if `ns` is not a whole number of samples.
    std::size_t whole_samples(double ns, const char *what) const;
    /// Nearest-sample quantization of an arbitrary offset.
    std::int64_t nearest_sample(double ns) const noexcept;
    double to_ns(std::int64_t samples) const noexcept { return static_cast<double>(samples) / p_.sample_rate_ghz; }

    bool operator==(const FrameGeometry &o) const noexcept { return p_ == o.p_; }

  private:
    GeometryParams p_;
    std::size_t pulse_samples_ = 0;
    std::size_t chip_samples_ = 0;
    std::size_t frame_samples_ = 0;
};

/// Whole-sample test shared by all duration checks.
bool is_whole_samples(double ns, double rate_ghz) noexcept;

} // namespace uwbsync

#endif
