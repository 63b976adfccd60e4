// SPDX-License-Identifier: Apache-2.0
//
// uwbsync: timing acquisition simulator for multi-user TH-PAM impulse radio
// ------------------------------------------------------------------------

#include "uwbsync/waveform.hpp"
#include "uwbsync/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace uwbsync {

SampledSignal::SampledSignal(std::vector<double> s, double fs, double t0)
    : samples(std::move(s)), fs_ghz(fs), t0_ns(t0)
{
}

double SampledSignal::energy() const noexcept
{
    double acc = 0.0;
    for (double v : samples)
        acc += v * v;
    return acc / fs_ghz;
}

void SampledSignal::validate() const
{
    if (samples.empty())
        throw std::invalid_argument("sampled signal is empty");
    if (!(fs_ghz > 0.0))
        throw std::invalid_argument("sampled signal has a non-positive sample rate");
    for (double v : samples)
        if (!std::isfinite(v))
            throw std::invalid_argument("sampled signal contains non-finite samples");
}

double Pulse::energy() const noexcept
{
    double acc = 0.0;
    for (double v : samples)
        acc += v * v;
    return acc / fs_ghz;
}

double monocycle_shape(double t_ns, double pulse_ns, double shape_factor) noexcept
{
    const double x = (t_ns - 0.5 * pulse_ns) / (shape_factor * pulse_ns);
    const double x2 = x * x;
    return (1.0 - 4.0 * std::numbers::pi * x2) * std::exp(-2.0 * std::numbers::pi * x2);
}

Pulse make_pulse(const FrameGeometry &geometry, double shape_factor)
{
    if (!(shape_factor > 0.0) || !std::isfinite(shape_factor))
        throw std::invalid_argument("pulse shape factor must be positive");
    const std::size_t n = geometry.pulse_samples();
    if (n < 8)
        throw std::invalid_argument("pulse unresolvable: T_p * f_s = " + std::to_string(n) + " < 8 samples");

    Pulse p;
    p.fs_ghz = geometry.sample_rate_ghz();
    p.duration_ns = geometry.pulse_ns();
    p.samples.resize(n);
    // Sample centres are symmetric about T_p/2, so the sampled pulse is even by construction.
    for (std::size_t i = 0; i < n; ++i)
        p.samples[i] = monocycle_shape((static_cast<double>(i) + 0.5) * geometry.dt_ns(), p.duration_ns, shape_factor);
    for (std::size_t i = 0; i < n / 2; ++i)
        p.samples[n - 1 - i] = p.samples[i];

    const double scale = 1.0 / std::sqrt(p.energy());
    for (double &v : p.samples)
        v *= scale;
    return p;
}

ThCode gen_th_code(const FrameGeometry &geometry, std::uint64_t seed)
{
    Rng rng = make_rng(seed);
    std::uniform_int_distribution<int> chip(0, geometry.chips_per_frame() - 1);
    ThCode code;
    code.chips.resize(static_cast<std::size_t>(geometry.frames_per_symbol()));
    for (int &c : code.chips)
        c = chip(rng);
    return code;
}

void validate_code(const ThCode &code, const FrameGeometry &geometry)
{
    if (code.chips.size() != static_cast<std::size_t>(geometry.frames_per_symbol()))
        throw std::invalid_argument("TH code length " + std::to_string(code.chips.size()) + " != N_f");
    for (int c : code.chips)
        if (c < 0 || c >= geometry.chips_per_frame())
            throw std::invalid_argument("TH chip " + std::to_string(c) + " outside [0, N_c - 1]");
}

namespace {

void require_pm1(std::span<const int> v, const char *what)
{
    for (int b : v)
        if (b != 1 && b != -1)
            throw std::invalid_argument(std::string(what) + " must be +1 or -1, got " + std::to_string(b));
}

} // namespace

SymbolStream diff_encode(std::span<const int> info_bits)
{
    require_pm1(info_bits, "information bit");
    SymbolStream s;
    s.info_bits.assign(info_bits.begin(), info_bits.end());
    s.symbols.resize(info_bits.size());
    int prev = 1;
    for (std::size_t k = 0; k < info_bits.size(); ++k) {
        prev *= info_bits[k];
        s.symbols[k] = prev;
    }
    return s;
}

std::vector<int> diff_decode(std::span<const int> symbols)
{
    require_pm1(symbols, "symbol");
    std::vector<int> bits(symbols.size());
    int prev = 1;
    for (std::size_t k = 0; k < symbols.size(); ++k) {
        bits[k] = symbols[k] * prev;
        prev = symbols[k];
    }
    return bits;
}

SymbolStream stream_from_symbols(std::span<const int> symbols)
{
    return diff_encode(diff_decode(symbols));
}

SymbolStream random_symbols(std::size_t count, std::uint64_t seed)
{
    Rng rng = make_rng(seed);
    std::bernoulli_distribution coin(0.5);
    std::vector<int> bits(count);
    for (int &b : bits)
        b = coin(rng) ? 1 : -1;
    return diff_encode(bits);
}

SymbolStream training_symbols(std::size_t count)
{
    static constexpr int pattern[4] = {1, 1, -1, -1};
    std::vector<int> s(count);
    for (std::size_t k = 0; k < count; ++k)
        s[k] = pattern[k % 4];
    return stream_from_symbols(s);
}

SampledSignal build_tx_template(const Pulse &pulse, const ThCode &code, const FrameGeometry &geometry)
{
    validate_code(code, geometry);
    if (pulse.samples.size() != geometry.pulse_samples() || pulse.fs_ghz != geometry.sample_rate_ghz())
        throw std::invalid_argument("pulse does not match the frame geometry");

    SampledSignal out(std::vector<double>(geometry.symbol_samples(), 0.0), geometry.sample_rate_ghz());
    for (std::size_t i = 0; i < code.chips.size(); ++i) {
        const std::size_t start = i * geometry.frame_samples() + static_cast<std::size_t>(code.chips[i]) * geometry.chip_samples();
        for (std::size_t j = 0; j < pulse.samples.size(); ++j)
            out.samples[start + j] += pulse.samples[j];
    }
    return out;
}

SampledSignal synthesize_tx(const SampledSignal &tx_template, const SymbolStream &symbols, double energy,
                            std::size_t n_symbols)
{
    if (n_symbols == 0)
        throw std::invalid_argument("synthesize_tx needs at least one symbol");
    if (n_symbols > symbols.size())
        throw std::invalid_argument("synthesize_tx: more symbols requested than the stream holds");
    if (!(energy > 0.0))
        throw std::invalid_argument("symbol energy must be positive");

    const std::size_t len = tx_template.size();
    const double amp = std::sqrt(energy);
    SampledSignal out(std::vector<double>(len * n_symbols, 0.0), tx_template.fs_ghz, tx_template.t0_ns);
    for (std::size_t k = 0; k < n_symbols; ++k) {
        const double a = amp * symbols.symbols[k];
        double *dst = out.samples.data() + k * len;
        for (std::size_t i = 0; i < len; ++i)
            dst[i] = a * tx_template.samples[i];
    }
    return out;
}

} // namespace uwbsync
