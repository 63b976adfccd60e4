// SPDX-License-Identifier: Apache-2.0

#include "doctest.h"
#include "uwbsync/channel.hpp"
#include "uwbsync/rng.hpp"

#include <cmath>

using namespace uwbsync;

namespace {

double rms_delay_spread(const ChannelRealization &h)
{
    double p = 0.0, m1 = 0.0, m2 = 0.0;
    for (const Tap &t : h.taps) {
        const double w = t.amplitude * t.amplitude;
        p += w;
        m1 += w * t.delay_ns;
        m2 += w * t.delay_ns * t.delay_ns;
    }
    m1 /= p;
    return std::sqrt(m2 / p - m1 * m1);
}

SampledSignal ramp(std::size_t n, double fs)
{
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i)
        v[i] = std::sin(0.37 * static_cast<double>(i)) + 0.01 * static_cast<double>(i);
    return SampledSignal(v, fs);
}

UserLink link_for(const FrameGeometry &g, double tau, ChannelRealization h, std::uint64_t seed)
{
    UserLink l;
    l.code = gen_th_code(g, seed);
    l.tau_ns = tau;
    l.channel = std::move(h);
    return l;
}

} // namespace

TEST_CASE("CM1 draws are energy-normalized and start at zero delay")
{
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const ChannelRealization h = draw_cm1(Cm1Params{}, seed, 60.0, 50.0);
        CHECK(std::abs(h.energy() - 1.0) < 1e-9);
        CHECK(h.taps.front().delay_ns == 0.0);
        CHECK(h.max_delay_ns() <= 60.0);
        CHECK_NOTHROW(validate_channel(h, 50.0));
    }
}

TEST_CASE("CM1 draw is deterministic per seed")
{
    const auto a = draw_cm1(Cm1Params{}, 42, 60.0, 50.0);
    const auto b = draw_cm1(Cm1Params{}, 42, 60.0, 50.0);
    CHECK(a.taps == b.taps);
}

TEST_CASE("single-tap override")
{
    Cm1Params p;
    p.single_tap = true;
    const auto h = draw_cm1(p, 1, 60.0, 50.0);
    REQUIRE(h.taps.size() == 1);
    CHECK(h.taps[0] == Tap{0.0, 1.0});
}

TEST_CASE("CM1 mean RMS delay spread is about 5 ns")
{
    double sum = 0.0;
    for (std::uint64_t seed = 0; seed < 1000; ++seed)
        sum += rms_delay_spread(draw_cm1(Cm1Params{}, derive_seed(2024, seed), 60.0, 50.0));
    const double mean = sum / 1000.0;
    MESSAGE("mean RMS delay spread = " << mean << " ns");
    CHECK(std::abs(mean - 5.0) <= 1.0);
}

TEST_CASE("invalid CM1 parameters are rejected")
{
    Cm1Params p;
    p.ray_rate_per_ns = 0.0;
    CHECK_THROWS(draw_cm1(p, 1, 60.0, 50.0));
    CHECK_THROWS(draw_cm1(Cm1Params{}, 1, 0.0, 50.0));
}

TEST_CASE("identity channel passes the signal through")
{
    const SampledSignal x = ramp(300, 10.0);
    CHECK(apply_channel(x, identity_channel()).samples == x.samples);
}

TEST_CASE("two-tap channel is a weighted sum of shifted copies")
{
    const SampledSignal x = ramp(200, 10.0);
    const double a = 0.8, b = -0.6;
    const ChannelRealization h{{Tap{0.0, a}, Tap{1.3, b}}};
    const SampledSignal y = apply_channel(x, h);
    REQUIRE(y.size() == 213);
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double want = (i < 200 ? a * x.samples[i] : 0.0) + (i >= 13 ? b * x.samples[i - 13] : 0.0);
        CHECK(y.samples[i] == doctest::Approx(want).epsilon(1e-14));
    }
}

TEST_CASE("channel output energy matches when the taps do not overlap in time")
{
    const FrameGeometry g = FrameGeometry::desk();
    const SampledSignal tmpl = build_tx_template(make_pulse(g), ThCode{std::vector<int>(8, 0)}, g);
    // Pulse is 8 samples; 2 ns spacing keeps the echoes disjoint.
    const ChannelRealization h{{Tap{0.0, std::sqrt(0.5)}, Tap{2.0, std::sqrt(0.3)}, Tap{4.0, std::sqrt(0.2)}}};
    const SampledSignal y = received_template(tmpl, h);
    CHECK(std::abs(y.energy() - tmpl.energy()) < 1e-6 * tmpl.energy());
}

TEST_CASE("received template energy is bounded by the tap amplitudes")
{
    // Overlapping CM1 echoes interfere, so only the triangle-inequality bound holds in general.
    const FrameGeometry g = FrameGeometry::paper();
    const Pulse p = make_pulse(g);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const ThCode code = gen_th_code(g, seed);
        const SampledSignal tmpl = build_tx_template(p, code, g);
        const double room = g.symbol_ns() - (31 * g.frame_ns() + code.chips.back() * g.chip_ns() + g.pulse_ns());
        const ChannelRealization h = draw_cm1(Cm1Params{}, seed + 100, std::max(room, 0.02), 50.0);
        const SampledSignal y = received_template(tmpl, h);
        double l1 = 0.0;
        for (const Tap &t : h.taps)
            l1 += std::abs(t.amplitude);
        CHECK(y.energy() <= l1 * l1 * tmpl.energy() + 1e-6);
        CHECK(y.energy() > 0.0);
    }
}

TEST_CASE("received_template rejects spill past the symbol")
{
    const FrameGeometry g = FrameGeometry::desk();
    const SampledSignal tmpl = build_tx_template(make_pulse(g), ThCode{std::vector<int>(8, 34)}, g);
    const ChannelRealization h{{Tap{0.0, 1.0}, Tap{1.0, 0.5}}};
    CHECK_THROWS_WITH(received_template(tmpl, h), "nonzero support exceeds symbol time");
}

TEST_CASE("validate_channel rejects malformed tap lists")
{
    CHECK_THROWS(validate_channel(ChannelRealization{}, 10.0));
    CHECK_THROWS(validate_channel(ChannelRealization{{Tap{0.5, 1.0}}}, 10.0));
    CHECK_THROWS(validate_channel(ChannelRealization{{Tap{0.0, 1.0}, Tap{0.05, 1.0}}}, 10.0));
    CHECK_THROWS(validate_channel(ChannelRealization{{Tap{0.0, 1.0}, Tap{2.0, 1.0}, Tap{1.0, 1.0}}}, 10.0));
}

TEST_CASE("apply_link: zero delay and identity channel return the transmit signal")
{
    const FrameGeometry g = FrameGeometry::desk();
    const UserLink l = link_for(g, 0.0, identity_channel(), 3);
    const SampledSignal tx = synthesize_tx(build_tx_template(make_pulse(g), l.code, g), random_symbols(3, 1), 1.0, 3);
    CHECK(apply_link(tx, l, g).samples == tx.samples);
}

TEST_CASE("apply_link: a delay is a pure shift")
{
    const FrameGeometry g = FrameGeometry::desk();
    const ChannelRealization h = draw_cm1(Cm1Params{}, 9, 60.0, 10.0);
    const UserLink l0 = link_for(g, 0.0, h, 3);
    const UserLink l100 = link_for(g, 100.0, h, 3);
    const SampledSignal tx = synthesize_tx(build_tx_template(make_pulse(g), l0.code, g), random_symbols(3, 1), 1.0, 3);
    const SampledSignal y0 = apply_link(tx, l0, g);
    const SampledSignal y1 = apply_link(tx, l100, g);
    REQUIRE(y1.size() == y0.size() + 1000);
    for (std::size_t i = 0; i < 1000; ++i)
        CHECK(y1.samples[i] == 0.0);
    for (std::size_t i = 0; i < y0.size(); ++i)
        CHECK(y1.samples[i + 1000] == y0.samples[i]);
}

TEST_CASE("apply_link is linear in its input")
{
    const FrameGeometry g = FrameGeometry::desk();
    const UserLink l = link_for(g, 37.3, draw_cm1(Cm1Params{}, 5, 60.0, 10.0), 6);
    const SampledSignal tx = synthesize_tx(build_tx_template(make_pulse(g), l.code, g), random_symbols(3, 2), 1.0, 3);
    SampledSignal scaled = tx;
    for (double &v : scaled.samples)
        v *= -2.0;
    const SampledSignal y = apply_link(tx, l, g);
    const SampledSignal ys = apply_link(scaled, l, g);
    for (std::size_t i = 0; i < y.size(); ++i)
        CHECK(ys.samples[i] == -2.0 * y.samples[i]);
}

TEST_CASE("apply_link rejects delays outside [0, T_s)")
{
    const FrameGeometry g = FrameGeometry::desk();
    const SampledSignal tx(std::vector<double>(g.symbol_samples(), 0.0), g.sample_rate_ghz());
    CHECK_THROWS(apply_link(tx, link_for(g, -1.0, identity_channel(), 1), g));
    CHECK_THROWS(apply_link(tx, link_for(g, g.symbol_ns(), identity_channel(), 1), g));
}

TEST_CASE("superposition")
{
    const SampledSignal a = ramp(100, 10.0);
    SampledSignal neg = a;
    for (double &v : neg.samples)
        v = -v;
    const SampledSignal b = ramp(60, 10.0);
    SampledSignal c = ramp(130, 10.0);
    for (double &v : c.samples)
        v *= 0.1;

    CHECK(superpose(std::vector<SampledSignal>{a}).samples == a.samples);
    for (double v : superpose(std::vector<SampledSignal>{a, neg}).samples)
        CHECK(v == 0.0);

    const SampledSignal s = superpose(std::vector<SampledSignal>{a, b, c});
    REQUIRE(s.size() == 130);
    for (std::size_t i = 0; i < s.size(); ++i) {
        double want = 0.0;
        want += i < a.size() ? a.samples[i] : 0.0;
        want += i < b.size() ? b.samples[i] : 0.0;
        want += c.samples[i];
        CHECK(s.samples[i] == want);
    }
    CHECK(superpose(std::vector<SampledSignal>{a, b, c}).samples == s.samples);
    CHECK_THROWS(superpose(std::vector<SampledSignal>{}));
    CHECK_THROWS(superpose(std::vector<SampledSignal>{a, ramp(10, 20.0)}));
}

TEST_CASE("superposing links equals summing them")
{
    const FrameGeometry g = FrameGeometry::desk();
    const Pulse p = make_pulse(g);
    const UserLink u1 = link_for(g, 12.0, draw_cm1(Cm1Params{}, 1, 60.0, 10.0), 1);
    const UserLink u2 = link_for(g, 200.0, draw_cm1(Cm1Params{}, 2, 60.0, 10.0), 2);
    const SampledSignal y1 = apply_link(synthesize_tx(build_tx_template(p, u1.code, g), random_symbols(2, 1), 1.0, 2), u1, g);
    const SampledSignal y2 = apply_link(synthesize_tx(build_tx_template(p, u2.code, g), random_symbols(2, 2), 0.3, 2), u2, g);
    const SampledSignal s = superpose(std::vector<SampledSignal>{y1, y2});
    for (std::size_t i = 0; i < s.size(); ++i)
        CHECK(s.samples[i] == (i < y1.size() ? y1.samples[i] : 0.0) + (i < y2.size() ? y2.samples[i] : 0.0));
}

TEST_CASE("noiseless sentinel returns the input")
{
    const SampledSignal x = ramp(50, 10.0);
    CHECK(add_awgn(x, NoiseSpec::noiseless(), 1.0).samples == x.samples);
}

TEST_CASE("AWGN variance and mean match the calibration")
{
    const double fs = 10.0;
    const std::size_t n = 1000000;
    const SampledSignal zero(std::vector<double>(n, 0.0), fs);
    NoiseSpec spec;
    spec.snr_db = 0.0;
    spec.seed = 31337;
    const SampledSignal y = add_awgn(zero, spec, 1.0);

    // N0 = E_s at 0 dB; two-sided density N0/2 over bandwidth fs gives variance N0 fs / 2.
    const double target = 1.0 * fs / 2.0;
    CHECK(noise_variance(0.0, 1.0, fs) == doctest::Approx(target));
    double mean = 0.0;
    for (double v : y.samples)
        mean += v;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double v : y.samples)
        var += (v - mean) * (v - mean);
    var /= static_cast<double>(n - 1);
    CHECK(std::abs(var / target - 1.0) < 0.01);
    CHECK(std::abs(mean) < 4.0 * std::sqrt(target / static_cast<double>(n)));

    CHECK(add_awgn(zero, spec, 1.0).samples == y.samples);
    spec.seed = 31338;
    CHECK(add_awgn(zero, spec, 1.0).samples != y.samples);
}

TEST_CASE("noise scales with SNR")
{
    CHECK(noise_variance(10.0, 2.0, 50.0) == doctest::Approx(0.5 * 0.2 * 50.0));
    CHECK_THROWS(add_awgn(ramp(10, 10.0), NoiseSpec{5.0, 1}, 0.0));
}
