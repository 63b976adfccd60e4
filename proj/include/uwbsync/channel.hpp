// SPDX-License-Identifier: Apache-2.0
//
// uwbsync: timing acquisition simulator for multi-user TH-PAM impulse radio
// ------------------------------------------------------------------------

#ifndef UWBSYNC_CHANNEL_HPP
#define UWBSYNC_CHANNEL_HPP

#include "uwbsync/geometry.hpp"
#include "uwbsync/waveform.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace uwbsync {

struct Tap {
    double delay_ns = 0.0;
    double amplitude = 0.0;

    bool operator==(const Tap &) const = default;
};

// Tapped delay line. Delays start at 0 and are nondecreasing; sum of squared amplitudes is 1.
struct ChannelRealization {
    std::vector<Tap> taps;

    std::size_t tap_count() const noexcept { return taps.size(); }
    double max_delay_ns() const noexcept { return taps.empty() ? 0.0 : taps.back().delay_ns; }
    double energy() const noexcept;
};

// Saleh-Valenzuela parameters of the 802.15.3a CM1 (LOS, 0-4 m) profile.
struct Cm1Params {
    double cluster_rate_per_ns = 0.0233; // Lambda
    double ray_rate_per_ns = 2.5;        // lambda
    double cluster_decay_ns = 7.1;       // Gamma
    double ray_decay_ns = 4.3;           // gamma
    double cluster_fading_db = 3.3941;   // sigma_1
    double ray_fading_db = 3.3941;       // sigma_2
    bool single_tap = false;             // pass-through channel for oracle runs

    bool operator==(const Cm1Params &) const = default;
};

/// Draws one CM1 realization: Poisson cluster and ray arrivals, doubly exponential power decay,
/// lognormal cluster/ray fading and random polarity. Delays are rounded to the 1/fs grid (coincident
/// rays merge), truncated at `truncation_ns`, and the energy renormalized to 1.
ChannelRealization draw_cm1(const Cm1Params &params, std::uint64_t rng_seed, double truncation_ns, double fs_ghz);

/// Single tap (0, 1).
ChannelRealization identity_channel();

/// Throws unless the realization satisfies its invariants on the 1/fs grid.
void validate_channel(const ChannelRealization &channel, double fs_ghz);

/// Full-length tapped-delay-line response: output length = input length + last tap delay in samples.
SampledSignal apply_channel(const SampledSignal &signal, const ChannelRealization &channel);

/// p_R(t) = sum_l a_l p_T(t - tau_l), kept symbol-long. Throws if the response spills past T_s.
SampledSignal received_template(const SampledSignal &tx_template, const ChannelRealization &channel);

struct UserLink {
    double energy = 1.0; // epsilon_u, energy per unit-energy pulse
    ThCode code;
    double tau_ns = 0.0; // propagation delay, [0, T_s)
    ChannelRealization channel;
    SymbolStream symbols;
};

void validate_link(const UserLink &link, const FrameGeometry &geometry);

/// Channel response of `tx` delayed by tau_u (zero-filled head, no wrap).
/// `tx` already carries sqrt(epsilon_u); link.energy is not reapplied here.
SampledSignal apply_link(const SampledSignal &tx, const UserLink &link, const FrameGeometry &geometry);

/// Sample-wise sum in list order. Shorter inputs are treated as zero-padded.
SampledSignal superpose(std::span<const SampledSignal> signals);

struct NoiseSpec {
    std::optional<double> snr_db; // empty = noiseless
    std::uint64_t seed = 0;

    static NoiseSpec noiseless() { return NoiseSpec{}; }
    bool is_noiseless() const noexcept { return !snr_db.has_value(); }
};

/// Per-sample noise variance (N0/2) * fs for N0 = reference_energy / 10^(snr/10).
double noise_variance(double snr_db, double reference_energy, double fs_ghz);

/// Adds white Gaussian noise of variance noise_variance(...). Noiseless returns the input unchanged.
SampledSignal add_awgn(const SampledSignal &signal, const NoiseSpec &noise, double reference_energy);

} // namespace uwbsync

#endif
