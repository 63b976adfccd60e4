// SPDX-License-Identifier: Apache-2.0
//
// uwbsync: timing acquisition simulator for multi-user TH-PAM impulse radio
// ------------------------------------------------------------------------

#ifndef UWBSYNC_WAVEFORM_HPP
#define UWBSYNC_WAVEFORM_HPP

#include "uwbsync/geometry.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace uwbsync {

/// Default Ricker width factor: tau_m = 0.5 * T_p keeps 99.989 % of the analytic energy inside [0, T_p].
inline constexpr double default_shape_factor = 0.5;

// Uniformly sampled real waveform. Sample i sits at t0_ns + i / fs_ghz.
struct SampledSignal {
    std::vector<double> samples;
    double fs_ghz = 1.0;
    double t0_ns = 0.0;

    SampledSignal() = default;
    SampledSignal(std::vector<double> s, double fs, double t0 = 0.0);

    std::size_t size() const noexcept { return samples.size(); }
    double dt_ns() const noexcept { return 1.0 / fs_ghz; }
    /// Sum of squares times dt.
    double energy() const noexcept;
    /// Throws std::invalid_argument on empty or non-finite content.
    void validate() const;
};

// Unit-energy Gaussian second-derivative monocycle, sampled at the pulse centre offsets (i + 1/2)/fs.
struct Pulse {
    std::vector<double> samples;
    double fs_ghz = 1.0;
    double duration_ns = 0.0;

    double energy() const noexcept;
};

struct ThCode {
    std::vector<int> chips; // one chip index per frame, each in [0, N_c - 1]

    bool operator==(const ThCode &) const = default;
};

// Differentially encoded PAM stream with the reference symbol s(-1) = +1.
struct SymbolStream {
    std::vector<int> info_bits;
    std::vector<int> symbols;

    std::size_t size() const noexcept { return symbols.size(); }
};

/// Analytic monocycle (1 - 4 pi x^2) exp(-2 pi x^2), x = (t - T_p/2) / (shape_factor * T_p), before scaling.
double monocycle_shape(double t_ns, double pulse_ns, double shape_factor) noexcept;

/// Truncated, renormalized monocycle of duration T_p. Rejects T_p * f_s < 8 samples.
Pulse make_pulse(const FrameGeometry &geometry, double shape_factor = default_shape_factor);

/// N_f i.i.d. uniform chips over {0, ..., N_c - 1}.
ThCode gen_th_code(const FrameGeometry &geometry, std::uint64_t seed);

/// Throws if a chip is out of range or the length is not N_f.
void validate_code(const ThCode &code, const FrameGeometry &geometry);

SymbolStream diff_encode(std::span<const int> info_bits);
std::vector<int> diff_decode(std::span<const int> symbols);
/// Builds the stream whose transmitted symbols are exactly `symbols`.
SymbolStream stream_from_symbols(std::span<const int> symbols);
/// `count` equiprobable information bits, differentially encoded.
SymbolStream random_symbols(std::size_t count, std::uint64_t seed);
/// Repeating (+1, +1, -1, -1) training pattern.
SymbolStream training_symbols(std::size_t count);

/// One symbol-long template: pulse i starts at sample i*T_f + c(i)*T_c.
SampledSignal build_tx_template(const Pulse &pulse, const ThCode &code, const FrameGeometry &geometry);

/// v(t) = sqrt(energy) * sum_k s(k) p_T(t - k T_s) over the first n_symbols symbols.
SampledSignal synthesize_tx(const SampledSignal &tx_template, const SymbolStream &symbols, double energy,
                            std::size_t n_symbols);

} // namespace uwbsync

#endif
