// SPDX-License-Identifier: Apache-2.0
//
// uwbsync: timing acquisition simulator for multi-user TH-PAM impulse radio
// ------------------------------------------------------------------------

#include "uwbsync/harness.hpp"
#include "uwbsync/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>

namespace uwbsync {

namespace {

// Symbols transmitted before the observation window opens, so every observed sample carries
// the steady-state ISI of the preceding symbols.
constexpr std::size_t lead_symbols = 2;
constexpr double acquisition_slack_ns = 1e-9;

void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)> &body)
{
    std::size_t n_threads = workers > 0 ? static_cast<std::size_t>(workers)
                                        : std::max(1u, std::thread::hardware_concurrency());
    n_threads = std::min(n_threads, count);
    if (n_threads <= 1) {
        for (std::size_t i = 0; i < count; ++i)
            body(i);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure)
                        failure = std::current_exception();
                    next = count;
                }
            }
        });
    }
    for (auto &th : pool)
        th.join();
    if (failure)
        std::rethrow_exception(failure);
}

ChannelRealization draw_channel(const ScenarioConfig &cfg, std::uint64_t seed)
{
    if (cfg.channel_model == ChannelModel::identity)
        return identity_channel();
    return draw_cm1(cfg.cm1, seed, cfg.truncation_ns, cfg.geometry.sample_rate_ghz());
}

// Received contribution of one user over the whole simulated span, observation window cut out.
SampledSignal user_observation(const SampledSignal &tx_template, const UserLink &link, const FrameGeometry &g,
                               std::size_t n_tx, std::size_t obs_len)
{
    const SampledSignal tx = synthesize_tx(tx_template, link.symbols, link.energy, n_tx);
    const SampledSignal rx = apply_link(tx, link, g);
    const std::size_t from = lead_symbols * g.symbol_samples();
    std::vector<double> window(obs_len, 0.0);
    if (rx.size() > from)
        std::copy_n(rx.samples.begin() + static_cast<std::ptrdiff_t>(from), std::min(obs_len, rx.size() - from),
                    window.begin());
    return SampledSignal(std::move(window), rx.fs_ghz);
}

std::size_t wrap_samples(std::int64_t v, std::size_t s)
{
    const auto n = static_cast<std::int64_t>(s);
    return static_cast<std::size_t>(((v % n) + n) % n);
}

} // namespace

TrialError::TrialError(std::uint64_t seed, std::uint64_t trial_index, const std::string &what)
    : std::runtime_error("trial " + std::to_string(trial_index) + " (seed " + std::to_string(seed) + "): " + what),
      seed_(seed), index_(trial_index)
{
}

void validate_scenario(const ScenarioConfig &cfg)
{
    if (cfg.trials < 1)
        throw std::invalid_argument("trials must be at least 1");
    if (cfg.n_interferers < 0)
        throw std::invalid_argument("interferer count must be non-negative");
    if (cfg.interferer_offsets_db.size() != static_cast<std::size_t>(cfg.n_interferers))
        throw std::invalid_argument("interferer SNR offsets must list one value per interferer");
    if (!(cfg.acquisition_threshold_ns > 0.0))
        throw std::invalid_argument("acquisition threshold must be positive");
    if (cfg.coarse_threshold_ns && !(*cfg.coarse_threshold_ns > 0.0))
        throw std::invalid_argument("coarse acquisition threshold must be positive");
    if (!(cfg.truncation_ns > 0.0))
        throw std::invalid_argument("channel truncation must be positive");
    if (!(cfg.pulse_shape_factor > 0.0))
        throw std::invalid_argument("pulse shape factor must be positive");
    if (cfg.m_values.empty() || cfg.modes.empty() || cfg.estimators.empty() || cfg.snr_points_db.empty())
        throw std::invalid_argument("sweep lists (m, modes, estimators, snr points) must be non-empty");
    for (const auto &snr : cfg.snr_points_db)
        if (snr && !std::isfinite(*snr))
            throw std::invalid_argument("SNR points must be finite or 'noiseless'");
    if (cfg.epoch_offset_ns < 0.0 || cfg.epoch_offset_ns >= cfg.geometry.symbol_ns())
        throw std::invalid_argument("epoch offset must lie in [0, T_s)");
    for (int m : cfg.m_values) {
        SyncConfig s = cfg.sync;
        s.m = m;
        validate_sync(s, cfg.geometry);
    }
}

TrialSignal synthesize_trial(const ScenarioConfig &cfg, const TrialPoint &point, std::uint64_t trial_index)
{
    const FrameGeometry &g = cfg.geometry;
    const std::size_t s = g.symbol_samples();
    const std::uint64_t seed = trial_seed(cfg.master_seed, trial_index);

    SyncConfig sync = cfg.sync;
    sync.m = point.m;
    sync.mode = point.mode;
    const std::size_t obs_symbols = required_symbols(sync);
    const std::size_t n_tx = lead_symbols + obs_symbols + 1;
    const std::size_t obs_len = obs_symbols * s;

    const Pulse pulse = make_pulse(g, cfg.pulse_shape_factor);

    UserLink desired;
    desired.energy = 1.0;
    desired.code = gen_th_code(g, role_seed(seed, StreamRole::desired_code));
    desired.channel = draw_channel(cfg, role_seed(seed, StreamRole::desired_channel));
    desired.symbols = point.mode == Mode::da ? training_symbols(n_tx)
                                             : random_symbols(n_tx, role_seed(seed, StreamRole::desired_symbols));

    // The dirty-template statistics only see energy, so the identifiable epoch is the first pulse arrival.
    const auto first_pulse = static_cast<std::int64_t>(static_cast<std::size_t>(desired.code.chips.front()) * g.chip_samples());
    Rng delay_rng = make_rng(role_seed(seed, StreamRole::desired_delay));
    std::int64_t epoch = 0;
    if (cfg.epoch_law == EpochLaw::uniform) {
        epoch = std::uniform_int_distribution<std::int64_t>(0, static_cast<std::int64_t>(s) - 1)(delay_rng);
    } else {
        const auto step = static_cast<std::int64_t>(std::llround(sync.coarse_step_ns * g.sample_rate_ghz()));
        const std::int64_t cells = static_cast<std::int64_t>(s) / step;
        epoch = std::uniform_int_distribution<std::int64_t>(0, cells - 1)(delay_rng) * step +
                g.nearest_sample(cfg.epoch_offset_ns);
    }
    const std::size_t epoch_s = wrap_samples(epoch, s);
    const std::size_t tau0_s = wrap_samples(epoch - first_pulse, s);
    desired.tau_ns = g.to_ns(static_cast<std::int64_t>(tau0_s));

    const SampledSignal desired_template = build_tx_template(pulse, desired.code, g);
    std::vector<SampledSignal> parts;
    parts.reserve(1 + static_cast<std::size_t>(cfg.n_interferers));
    parts.push_back(user_observation(desired_template, desired, g, n_tx, obs_len));

    for (int u = 0; u < cfg.n_interferers; ++u) {
        const std::uint64_t base = 8u * static_cast<std::uint64_t>(u);
        UserLink link;
        link.energy = std::pow(10.0, cfg.interferer_offsets_db[static_cast<std::size_t>(u)] / 10.0);
        link.code = gen_th_code(g, role_seed(seed, StreamRole::interferer_base, base + 0));
        link.channel = draw_channel(cfg, role_seed(seed, StreamRole::interferer_base, base + 1));
        link.symbols = random_symbols(n_tx, role_seed(seed, StreamRole::interferer_base, base + 2));
        Rng rng = make_rng(role_seed(seed, StreamRole::interferer_base, base + 3));
        link.tau_ns = g.to_ns(std::uniform_int_distribution<std::int64_t>(0, static_cast<std::int64_t>(s) - 1)(rng));
        parts.push_back(user_observation(build_tx_template(pulse, link.code, g), link, g, n_tx, obs_len));
    }

    TrialSignal out;
    out.r = superpose(parts);
    out.tau0_ns = desired.tau_ns;
    out.epoch_ns = g.to_ns(static_cast<std::int64_t>(epoch_s));

    // Received per-symbol energy of the desired user, spill past T_s included.
    const double symbol_energy = desired.energy * apply_channel(desired_template, desired.channel).energy();
    out.reference_energy =
        cfg.snr_reference == SnrReference::pulse ? symbol_energy / g.frames_per_symbol() : symbol_energy;

    NoiseSpec noise;
    noise.snr_db = point.snr_db;
    noise.seed = role_seed(seed, StreamRole::noise);
    out.r = add_awgn(out.r, noise, out.reference_energy);

    // Observation segment j holds transmitted symbol j + lead_symbols.
    std::vector<int> aligned(desired.symbols.symbols.begin() + static_cast<std::ptrdiff_t>(lead_symbols),
                             desired.symbols.symbols.end());
    out.training = stream_from_symbols(aligned);
    return out;
}

TrialResult run_trial(const ScenarioConfig &cfg, const TrialPoint &point, std::uint64_t trial_index)
{
    const std::uint64_t seed = trial_seed(cfg.master_seed, trial_index);
    try {
        const FrameGeometry &g = cfg.geometry;
        const TrialSignal sig = synthesize_trial(cfg, point, trial_index);

        SyncConfig sync = cfg.sync;
        sync.m = point.m;
        sync.mode = point.mode;
        const TwoStageEstimate est =
            two_stage_estimate(sig.r, sync, g, point.mode == Mode::da ? &sig.training : nullptr);

        TrialResult res;
        res.seed = seed;
        res.true_tau = sig.epoch_ns;
        res.tau0 = sig.tau0_ns;
        res.tau1 = est.coarse.tau1_ns;
        res.tau2 = est.fine.tau2_ns;
        res.err_coarse = circular_error(res.tau1, res.true_tau, g.symbol_ns());
        res.err_fine = circular_error(res.tau2, res.true_tau, g.symbol_ns());
        res.acquired_coarse = res.err_coarse <= cfg.threshold_for(Estimator::coarse_only) + acquisition_slack_ns;
        res.acquired_fine = res.err_fine <= cfg.acquisition_threshold_ns + acquisition_slack_ns;
        return res;
    } catch (const TrialError &) {
        throw;
    } catch (const std::exception &e) {
        throw TrialError(seed, trial_index, e.what());
    }
}

double circular_error(double a_ns, double b_ns, double symbol_ns)
{
    const double d = std::abs(a_ns - b_ns);
    return std::min(d, symbol_ns - d);
}

Aggregate aggregate(std::span<const double> errors_ns, double symbol_ns, double threshold_ns)
{
    if (errors_ns.empty())
        throw std::invalid_argument("aggregate: no trial results");
    const auto n = static_cast<double>(errors_ns.size());

    double sum_sq = 0.0;
    std::size_t hits = 0;
    for (double e : errors_ns) {
        const double u = e / symbol_ns;
        sum_sq += u * u;
        if (e <= threshold_ns + acquisition_slack_ns)
            ++hits;
    }
    Aggregate a;
    a.normalized_mse = sum_sq / n;
    a.p_acq = static_cast<double>(hits) / n;
    a.ci_halfwidth = 1.96 * std::sqrt(a.p_acq * (1.0 - a.p_acq) / n);
    if (errors_ns.size() > 1) {
        double var = 0.0;
        for (double e : errors_ns) {
            const double u = e / symbol_ns;
            const double d = u * u - a.normalized_mse;
            var += d * d;
        }
        var /= n - 1.0;
        a.mse_ci_halfwidth = 1.96 * std::sqrt(var / n);
    }
    return a;
}

Aggregate aggregate(std::span<const TrialResult> results, Estimator estimator, double symbol_ns, double threshold_ns)
{
    std::vector<double> errors;
    errors.reserve(results.size());
    for (const auto &r : results)
        errors.push_back(r.error(estimator));
    return aggregate(errors, symbol_ns, threshold_ns);
}

const MetricsRow *MetricsTable::find(std::optional<double> snr_db, int m, Mode mode, Estimator estimator) const
{
    for (const auto &r : rows)
        if (r.snr_db == snr_db && r.m == m && r.mode == mode && r.estimator == estimator)
            return &r;
    return nullptr;
}

std::vector<TrialResult> run_point(const ScenarioConfig &cfg, const TrialPoint &point)
{
    validate_scenario(cfg);
    std::vector<TrialResult> results(static_cast<std::size_t>(cfg.trials));
    parallel_for(results.size(), cfg.workers,
                 [&](std::size_t i) { results[i] = run_trial(cfg, point, static_cast<std::uint64_t>(i)); });
    return results;
}

MetricsTable sweep(const ScenarioConfig &cfg)
{
    validate_scenario(cfg);

    std::vector<Mode> modes = cfg.modes;
    std::sort(modes.begin(), modes.end());
    modes.erase(std::unique(modes.begin(), modes.end()), modes.end());
    std::vector<int> ms = cfg.m_values;
    std::sort(ms.begin(), ms.end());
    ms.erase(std::unique(ms.begin(), ms.end()), ms.end());
    // Noiseless sorts after every finite SNR.
    std::vector<std::optional<double>> snrs = cfg.snr_points_db;
    auto snr_less = [](const std::optional<double> &a, const std::optional<double> &b) {
        if (!a || !b)
            return a.has_value() && !b.has_value();
        return *a < *b;
    };
    std::sort(snrs.begin(), snrs.end(), snr_less);
    snrs.erase(std::unique(snrs.begin(), snrs.end()), snrs.end());
    std::vector<Estimator> estimators = cfg.estimators;
    std::sort(estimators.begin(), estimators.end());
    estimators.erase(std::unique(estimators.begin(), estimators.end()), estimators.end());

    std::vector<TrialPoint> points;
    for (Mode mode : modes)
        for (int m : ms)
            for (const auto &snr : snrs)
                points.push_back(TrialPoint{snr, m, mode});

    const auto trials = static_cast<std::size_t>(cfg.trials);
    std::vector<TrialResult> results(points.size() * trials);
    parallel_for(results.size(), cfg.workers, [&](std::size_t job) {
        results[job] = run_trial(cfg, points[job / trials], static_cast<std::uint64_t>(job % trials));
    });

    MetricsTable table;
    for (std::size_t p = 0; p < points.size(); ++p) {
        const std::span<const TrialResult> cell(results.data() + p * trials, trials);
        for (Estimator e : estimators) {
            const Aggregate a = aggregate(cell, e, cfg.geometry.symbol_ns(), cfg.threshold_for(e));
            MetricsRow row;
            row.snr_db = points[p].snr_db;
            row.m = points[p].m;
            row.mode = points[p].mode;
            row.estimator = e;
            row.n_users = 1 + cfg.n_interferers;
            row.normalized_mse = a.normalized_mse;
            row.p_acq = a.p_acq;
            row.trials = cfg.trials;
            row.ci95 = a.ci_halfwidth;
            row.mse_ci95 = a.mse_ci_halfwidth;
            table.rows.push_back(row);
        }
    }
    return table;
}

const char *to_string(Estimator e) noexcept
{
    return e == Estimator::coarse_only ? "coarse_only" : "two_stage";
}

const char *to_string(ChannelModel c) noexcept
{
    return c == ChannelModel::cm1 ? "cm1" : "identity";
}

const char *to_string(SnrReference s) noexcept
{
    return s == SnrReference::pulse ? "pulse" : "symbol";
}

const char *to_string(EpochLaw e) noexcept
{
    return e == EpochLaw::uniform ? "uniform" : "grid";
}

} // namespace uwbsync
