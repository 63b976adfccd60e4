// SPDX-License-Identifier: Apache-2.0
//
// uwbsync: timing acquisition simulator for multi-user TH-PAM impulse radio
// ------------------------------------------------------------------------

#include "uwbsync/channel.hpp"
#include "uwbsync/rng.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>

namespace uwbsync {

double ChannelRealization::energy() const noexcept
{
    double acc = 0.0;
    for (const auto &t : taps)
        acc += t.amplitude * t.amplitude;
    return acc;
}

namespace {

constexpr int max_cm1_attempts = 16;

std::int64_t tap_index(const Tap &t, double fs_ghz)
{
    return std::llround(t.delay_ns * fs_ghz);
}

// One Saleh-Valenzuela draw, merged on the sample grid. May come back empty.
std::vector<Tap> sv_draw(const Cm1Params &p, Rng &rng, double truncation_ns, double fs_ghz)
{
    std::exponential_distribution<double> cluster_gap(p.cluster_rate_per_ns);
    std::exponential_distribution<double> ray_gap(p.ray_rate_per_ns);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::bernoulli_distribution polarity(0.5);

    const double ln10 = std::numbers::ln10;
    const double fading_var = p.cluster_fading_db * p.cluster_fading_db + p.ray_fading_db * p.ray_fading_db;
    // Lognormal bias so that E[beta^2] follows the exponential power profile.
    const double mu_bias = fading_var * ln10 / 20.0;

    std::map<std::int64_t, double> merged;
    double cluster_t = 0.0;
    while (cluster_t <= truncation_ns) {
        const double cluster_db = p.cluster_fading_db * gauss(rng);
        double ray_t = 0.0;
        while (cluster_t + ray_t <= truncation_ns) {
            const double mean_db = -10.0 / ln10 * (cluster_t / p.cluster_decay_ns + ray_t / p.ray_decay_ns);
            const double amp_db = mean_db - mu_bias + cluster_db + p.ray_fading_db * gauss(rng);
            const double sign = polarity(rng) ? 1.0 : -1.0;
            const std::int64_t idx = std::llround((cluster_t + ray_t) * fs_ghz);
            if (static_cast<double>(idx) / fs_ghz <= truncation_ns)
                merged[idx] += sign * std::pow(10.0, amp_db / 20.0);
            ray_t += ray_gap(rng);
        }
        cluster_t += cluster_gap(rng);
    }

    std::vector<Tap> taps;
    taps.reserve(merged.size());
    for (const auto &[idx, amp] : merged)
        if (amp != 0.0)
            taps.push_back(Tap{static_cast<double>(idx) / fs_ghz, amp});
    return taps;
}

} // namespace

ChannelRealization identity_channel()
{
    return ChannelRealization{{Tap{0.0, 1.0}}};
}

ChannelRealization draw_cm1(const Cm1Params &params, std::uint64_t rng_seed, double truncation_ns, double fs_ghz)
{
    if (params.single_tap)
        return identity_channel();
    if (!(params.cluster_rate_per_ns > 0.0) || !(params.ray_rate_per_ns > 0.0) || !(params.cluster_decay_ns > 0.0) ||
        !(params.ray_decay_ns > 0.0))
        throw std::invalid_argument("CM1 arrival rates and decay constants must be positive");
    if (params.cluster_fading_db < 0.0 || params.ray_fading_db < 0.0)
        throw std::invalid_argument("CM1 fading deviations must be non-negative");
    if (!(truncation_ns > 0.0))
        throw std::invalid_argument("channel truncation must be positive");
    if (!(fs_ghz > 0.0))
        throw std::invalid_argument("sample rate must be positive");

    for (int attempt = 0; attempt < max_cm1_attempts; ++attempt) {
        Rng rng = make_rng(attempt == 0 ? rng_seed : derive_seed(rng_seed, static_cast<std::uint64_t>(attempt)));
        std::vector<Tap> taps = sv_draw(params, rng, truncation_ns, fs_ghz);
        // The first ray of the first cluster arrives at 0; a draw whose merged tap there cancelled is
        // treated as degenerate too, so the first delay stays 0.
        if (taps.empty() || taps.front().delay_ns != 0.0)
            continue;
        ChannelRealization ch{std::move(taps)};
        const double scale = 1.0 / std::sqrt(ch.energy());
        for (auto &t : ch.taps)
            t.amplitude *= scale;
        return ch;
    }
    throw std::runtime_error("CM1 draw degenerate after " + std::to_string(max_cm1_attempts) + " attempts");
}

void validate_channel(const ChannelRealization &channel, double fs_ghz)
{
    if (channel.taps.empty())
        throw std::invalid_argument("channel has no taps");
    if (channel.taps.front().delay_ns != 0.0)
        throw std::invalid_argument("first channel tap must have zero delay");
    for (std::size_t i = 0; i < channel.taps.size(); ++i) {
        const Tap &t = channel.taps[i];
        if (!std::isfinite(t.amplitude) || (t.delay_ns != 0.0 && !is_whole_samples(t.delay_ns, fs_ghz)))
            throw std::invalid_argument("channel tap " + std::to_string(i) + " is off the sample grid");
        if (i > 0 && t.delay_ns < channel.taps[i - 1].delay_ns)
            throw std::invalid_argument("channel tap delays must be nondecreasing");
    }
}

SampledSignal apply_channel(const SampledSignal &signal, const ChannelRealization &channel)
{
    validate_channel(channel, signal.fs_ghz);
    const std::size_t span = static_cast<std::size_t>(tap_index(channel.taps.back(), signal.fs_ghz));
    SampledSignal out(std::vector<double>(signal.size() + span, 0.0), signal.fs_ghz, signal.t0_ns);

    // Scatter form: TH waveforms are mostly zeros, so skip them.
    for (std::size_t i = 0; i < signal.size(); ++i) {
        const double x = signal.samples[i];
        if (x == 0.0)
            continue;
        for (const Tap &t : channel.taps)
            out.samples[i + static_cast<std::size_t>(tap_index(t, signal.fs_ghz))] += t.amplitude * x;
    }
    return out;
}

SampledSignal received_template(const SampledSignal &tx_template, const ChannelRealization &channel)
{
    SampledSignal full = apply_channel(tx_template, channel);
    const std::size_t symbol_len = tx_template.size();
    for (std::size_t i = symbol_len; i < full.size(); ++i)
        if (full.samples[i] != 0.0)
            throw std::invalid_argument("nonzero support exceeds symbol time");
    full.samples.resize(symbol_len);
    return full;
}

void validate_link(const UserLink &link, const FrameGeometry &geometry)
{
    if (!(link.energy > 0.0))
        throw std::invalid_argument("user energy must be positive");
    if (!(link.tau_ns >= 0.0) || !(link.tau_ns < geometry.symbol_ns()))
        throw std::invalid_argument("user delay must lie in [0, T_s)");
    validate_code(link.code, geometry);
    validate_channel(link.channel, geometry.sample_rate_ghz());
}

SampledSignal apply_link(const SampledSignal &tx, const UserLink &link, const FrameGeometry &geometry)
{
    validate_link(link, geometry);
    if (tx.size() < geometry.symbol_samples())
        throw std::invalid_argument("apply_link needs at least one symbol of transmit signal");

    const auto delay = static_cast<std::size_t>(geometry.nearest_sample(link.tau_ns));
    SampledSignal faded = apply_channel(tx, link.channel);
    SampledSignal out(std::vector<double>(delay + faded.size(), 0.0), tx.fs_ghz, tx.t0_ns);
    std::copy(faded.samples.begin(), faded.samples.end(), out.samples.begin() + static_cast<std::ptrdiff_t>(delay));
    return out;
}

SampledSignal superpose(std::span<const SampledSignal> signals)
{
    if (signals.empty())
        throw std::invalid_argument("superpose needs at least one signal");
    std::size_t len = 0;
    for (const auto &s : signals) {
        if (s.fs_ghz != signals.front().fs_ghz)
            throw std::invalid_argument("superpose: mismatched sample rates");
        len = std::max(len, s.size());
    }
    SampledSignal out(std::vector<double>(len, 0.0), signals.front().fs_ghz, signals.front().t0_ns);
    for (const auto &s : signals)
        for (std::size_t i = 0; i < s.size(); ++i)
            out.samples[i] += s.samples[i];
    return out;
}

double noise_variance(double snr_db, double reference_energy, double fs_ghz)
{
    const double n0 = reference_energy / std::pow(10.0, snr_db / 10.0);
    return 0.5 * n0 * fs_ghz;
}

SampledSignal add_awgn(const SampledSignal &signal, const NoiseSpec &noise, double reference_energy)
{
    if (noise.is_noiseless())
        return signal;
    if (!(reference_energy > 0.0))
        throw std::invalid_argument("reference symbol energy must be positive");
    if (!std::isfinite(*noise.snr_db))
        throw std::invalid_argument("SNR must be finite");

    const double sigma = std::sqrt(noise_variance(*noise.snr_db, reference_energy, signal.fs_ghz));
    Rng rng = make_rng(noise.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    SampledSignal out = signal;
    for (double &v : out.samples)
        v += sigma * gauss(rng);
    return out;
}

} // namespace uwbsync
