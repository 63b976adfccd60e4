// SPDX-License-Identifier: Apache-2.0
//
// uwbsync: timing acquisition simulator for multi-user TH-PAM impulse radio
// ------------------------------------------------------------------------

#include "uwbsync/selftest.hpp"
#include "uwbsync/harness.hpp"
#include "uwbsync/rng.hpp"

#include <chrono>
#include <cmath>
#include <ostream>
#include <sstream>

namespace uwbsync {

namespace {

constexpr std::uint64_t selftest_seed = 20240229;

std::string check_pulse_energy(const SelftestOptions &opt)
{
    for (const FrameGeometry &g : {FrameGeometry::paper(), FrameGeometry::desk()}) {
        const Pulse p = opt.pulse_factory(g, default_shape_factor);
        const double e = p.energy();
        if (!(std::abs(e - 1.0) < 1e-6)) {
            std::ostringstream msg;
            msg.precision(12);
            msg << "pulse energy " << e << " at " << g.sample_rate_ghz() << " GHz";
            return msg.str();
        }
    }
    return {};
}

std::string check_partition_identity(const SelftestOptions &opt)
{
    const FrameGeometry g = FrameGeometry::paper();
    const Pulse pulse = opt.pulse_factory(g, default_shape_factor);
    Rng rng = make_rng(selftest_seed);
    for (int draw = 0; draw < 4; ++draw) {
        const ThCode code = gen_th_code(g, rng());
        const SampledSignal tx = build_tx_template(pulse, code, g);
        // Leave the channel only the room after the last pulse so the received template fits in T_s.
        const double room = g.symbol_ns() - ((g.frames_per_symbol() - 1) * g.frame_ns() +
                                             code.chips.back() * g.chip_ns() + g.pulse_ns());
        const ChannelRealization h = draw_cm1(Cm1Params{}, rng(), std::max(room, g.dt_ns()), g.sample_rate_ghz());
        const SampledSignal p_r = received_template(tx, h);
        const double eps = 1.7;
        std::uniform_real_distribution<double> pick(0.0, g.symbol_ns());
        for (int i = 0; i < 25; ++i) {
            const EnergyPartition part = energy_partition(p_r, pick(rng), eps);
            const double want = eps * p_r.energy();
            if (!(std::abs(part.eps_a + part.eps_b - want) <= 1e-9 * want))
                return "eps_a + eps_b differs from eps * E_R at tau_tilde = " + std::to_string(part.tau_tilde_ns);
        }
    }
    return {};
}

std::string check_noiseless_alignment(const SelftestOptions &)
{
    ScenarioConfig cfg;
    cfg.channel_model = ChannelModel::identity;
    cfg.epoch_law = EpochLaw::grid;
    cfg.master_seed = selftest_seed;
    cfg.workers = 1;
    for (std::uint64_t t = 0; t < 10; ++t) {
        const TrialResult r = run_trial(cfg, TrialPoint{std::nullopt, 8, Mode::da}, t);
        if (r.err_coarse != 0.0 || r.err_fine != 0.0)
            return "trial " + std::to_string(t) + ": tau1 = " + std::to_string(r.tau1) +
                   ", tau2 = " + std::to_string(r.tau2) + ", expected " + std::to_string(r.true_tau);
    }
    return {};
}

std::string check_fine_scan_range(const SelftestOptions &)
{
    SyncConfig sync;
    const int n = fine_half_width(sync);
    if (n != 20)
        return "N = " + std::to_string(n) + " for T_corr = 4 ns, delta = 0.2 ns (expected 20)";

    ScenarioConfig cfg;
    cfg.channel_model = ChannelModel::identity;
    cfg.master_seed = selftest_seed;
    sync.m = 8;
    const TrialSignal sig = synthesize_trial(cfg, TrialPoint{std::nullopt, 8, Mode::nda}, 0);
    const FrameGeometry &g = cfg.geometry;
    const double tau1 = std::fmod(sig.epoch_ns + 0.5 * g.symbol_ns(), g.symbol_ns());
    const FineEstimate fine = fine_search(sig.r, g.to_ns(g.nearest_sample(tau1)), sync, g);
    if (fine.z.size() != static_cast<std::size_t>(2 * n - 1))
        return "scan has " + std::to_string(fine.z.size()) + " offsets (expected " + std::to_string(2 * n - 1) + ")";
    if (circular_error(fine.tau2_ns, g.to_ns(g.nearest_sample(tau1)), g.symbol_ns()) > (n - 1) * sync.delta_ns + 1e-9)
        return "tau2 left the scan range";
    return {};
}

} // namespace

std::vector<SelftestCheck> run_selftest(const SelftestOptions &options)
{
    using Fn = std::string (*)(const SelftestOptions &);
    const std::pair<const char *, Fn> checks[] = {
        {"pulse_energy", check_pulse_energy},
        {"partition_identity", check_partition_identity},
        {"noiseless_alignment", check_noiseless_alignment},
        {"fine_scan_range", check_fine_scan_range},
    };

    std::vector<SelftestCheck> out;
    for (const auto &[name, fn] : checks) {
        SelftestCheck c;
        c.name = name;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            c.detail = fn(options);
            c.ok = c.detail.empty();
        } catch (const std::exception &e) {
            c.detail = std::string("exception: ") + e.what();
        }
        c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        out.push_back(c);
        if (!c.ok)
            break;
    }
    return out;
}

int cmd_selftest(std::ostream &out, std::ostream &err, const SelftestOptions &options)
{
    for (const auto &c : run_selftest(options)) {
        if (c.ok) {
            out << c.name << ": ok (" << c.seconds << " s)\n";
            continue;
        }
        out << c.name << ": FAIL\n";
        err << "selftest failed: " << c.name << ": " << c.detail << "\n";
        return 2;
    }
    return 0;
}

} // namespace uwbsync
