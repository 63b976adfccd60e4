// SPDX-License-Identifier: Apache-2.0
//
// uwbsync: timing acquisition simulator for multi-user TH-PAM impulse radio
// ------------------------------------------------------------------------

#include "uwbsync/sync.hpp"

#include <algorithm>
#include <cmath>

namespace uwbsync {

namespace {

// Sequential accumulation: identical nonzero products in the same order give bit-identical sums
// regardless of how many exact zeros surround them.
double inner(const double *a, const double *b, std::size_t n) noexcept
{
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        acc += a[i] * b[i];
    return acc;
}

std::size_t step_samples(double ns, const FrameGeometry &g, const char *field)
{
    if (!is_whole_samples(ns, g.sample_rate_ghz()))
        throw SyncConfigError(field, std::string(field) + " is not a whole number of samples");
    return static_cast<std::size_t>(std::llround(ns * g.sample_rate_ghz()));
}

std::size_t window_samples(const SyncConfig &cfg, const FrameGeometry &g)
{
    return cfg.window == FineWindow::symbol ? g.symbol_samples() : step_samples(cfg.t_corr_ns, g, "t_corr_ns");
}

std::size_t wrap_offset(std::int64_t offset, std::size_t symbol_len)
{
    const auto s = static_cast<std::int64_t>(symbol_len);
    return static_cast<std::size_t>(((offset % s) + s) % s);
}

} // namespace

void validate_sync(const SyncConfig &cfg, const FrameGeometry &g)
{
    if (cfg.m < 1)
        throw SyncConfigError("m", "M must be at least 1");
    if (cfg.k < 0)
        throw SyncConfigError("k", "K must be non-negative (0 selects K = M)");
    if (!(cfg.coarse_step_ns > 0.0))
        throw SyncConfigError("coarse_step_ns", "coarse grid step must be positive");
    const std::size_t step = step_samples(cfg.coarse_step_ns, g, "coarse_step_ns");
    if (g.symbol_samples() % step != 0)
        throw SyncConfigError("coarse_step_ns", "coarse grid step must divide T_s into an integer candidate count");
    if (cfg.t_corr_ns < 0.0)
        throw SyncConfigError("t_corr_ns", "T_corr must be non-negative");
    if (!cfg.fine_enabled())
        return;
    if (!(cfg.delta_ns > 0.0) || cfg.delta_ns > cfg.t_corr_ns)
        throw SyncConfigError("delta_ns", "fine step must satisfy 0 < delta <= T_corr");
    step_samples(cfg.delta_ns, g, "delta_ns");
    step_samples(cfg.t_corr_ns, g, "t_corr_ns");
    if (cfg.t_corr_ns < 0.5 * cfg.coarse_step_ns)
        throw SyncConfigError("t_corr_ns", "T_corr must cover half a coarse grid step");
}

int fine_half_width(const SyncConfig &cfg)
{
    if (!cfg.fine_enabled())
        return 0;
    // Guard against T_corr/delta landing a hair above an integer.
    const double ratio = cfg.t_corr_ns / cfg.delta_ns;
    const double nearest = std::round(ratio);
    return static_cast<int>(std::abs(ratio - nearest) < 1e-9 ? nearest : std::ceil(ratio));
}

std::size_t required_symbols(const SyncConfig &cfg)
{
    return static_cast<std::size_t>(std::max(cfg.m, cfg.fine_segments())) + 3;
}

double dirty_correlate_at(const SampledSignal &r, std::size_t offset, std::size_t k, std::size_t symbol_len)
{
    const double *a = r.samples.data() + offset + (k - 1) * symbol_len;
    return inner(a, a + symbol_len, symbol_len) / r.fs_ghz;
}

double dirty_correlate(const SampledSignal &r, double tau_ns, std::size_t k, const FrameGeometry &g)
{
    if (k < 1)
        throw std::invalid_argument("dirty_correlate: k must be at least 1");
    if (!(tau_ns >= 0.0) || !(tau_ns < g.symbol_ns()))
        throw std::invalid_argument("dirty_correlate: tau outside [0, T_s)");
    const auto offset = static_cast<std::size_t>(g.nearest_sample(tau_ns));
    const std::size_t s = g.symbol_samples();
    if (offset >= s || offset + (k + 1) * s > r.size())
        throw std::invalid_argument("dirty_correlate: signal too short for symbol index " + std::to_string(k));
    return dirty_correlate_at(r, offset, k, s);
}

EnergyPartition energy_partition(const SampledSignal &p_r, double tau_tilde_ns, double eps)
{
    const double symbol_ns = static_cast<double>(p_r.size()) / p_r.fs_ghz;
    if (!(tau_tilde_ns >= 0.0) || !(tau_tilde_ns < symbol_ns))
        throw std::invalid_argument("energy_partition: tau_tilde outside [0, T_s)");
    const auto split = std::min<std::size_t>(static_cast<std::size_t>(std::llround(tau_tilde_ns * p_r.fs_ghz)), p_r.size());

    double left = 0.0;
    double right = 0.0;
    for (std::size_t i = 0; i < split; ++i)
        left += p_r.samples[i] * p_r.samples[i];
    for (std::size_t i = split; i < p_r.size(); ++i)
        right += p_r.samples[i] * p_r.samples[i];
    return EnergyPartition{eps * left / p_r.fs_ghz, eps * right / p_r.fs_ghz, tau_tilde_ns};
}

double coarse_objective(const SampledSignal &r, std::size_t offset, const SyncConfig &cfg, const FrameGeometry &g,
                        const SymbolStream *training)
{
    const std::size_t s = g.symbol_samples();
    const auto m = static_cast<std::size_t>(cfg.m);
    if (cfg.mode == Mode::nda) {
        double acc = 0.0;
        for (std::size_t k = 1; k <= m; ++k) {
            const double x = dirty_correlate_at(r, offset, k, s);
            acc += x * x;
        }
        return acc / static_cast<double>(m);
    }
    // DA: weight by the known sign product s(k)s(k-1) so symbol signs add coherently, then square.
    double acc = 0.0;
    for (std::size_t k = 1; k <= m; ++k)
        acc += training->symbols[k] * training->symbols[k - 1] * dirty_correlate_at(r, offset, k, s);
    const double mean = acc / static_cast<double>(m);
    return mean * mean;
}

CoarseEstimate coarse_estimate(const SampledSignal &r, const SyncConfig &cfg, const FrameGeometry &g,
                               const SymbolStream *training)
{
    validate_sync(cfg, g);
    const std::size_t s = g.symbol_samples();
    const auto m = static_cast<std::size_t>(cfg.m);
    if (r.size() < (m + 2) * s)
        throw std::invalid_argument("coarse_estimate: M = " + std::to_string(cfg.m) + " needs " +
                                    std::to_string(m + 2) + " symbols of signal");
    if (cfg.mode == Mode::da && (training == nullptr || training->size() < m + 1))
        throw std::invalid_argument("coarse_estimate: DA mode needs M + 1 training symbols");

    const std::size_t step = step_samples(cfg.coarse_step_ns, g, "coarse_step_ns");
    const std::size_t count = s / step;
    CoarseEstimate est;
    est.objective.resize(count);
    for (std::size_t i = 0; i < count; ++i)
        est.objective[i] = coarse_objective(r, i * step, cfg, g, training);

    const double best = *std::max_element(est.objective.begin(), est.objective.end());
    std::size_t pick = 0;
    for (std::size_t i = 0; i < count; ++i) {
        if (est.objective[i] == best && est.objective[(i + 1) % count] != best) {
            pick = i;
            break;
        }
    }
    est.index = pick;
    est.tau1_ns = g.to_ns(static_cast<std::int64_t>(pick * step));
    return est;
}

FineEstimate fine_search(const SampledSignal &r, double tau1_ns, const SyncConfig &cfg, const FrameGeometry &g)
{
    validate_sync(cfg, g);
    if (!(tau1_ns >= 0.0) || !(tau1_ns < g.symbol_ns()))
        throw std::invalid_argument("fine_search: tau1 outside [0, T_s)");

    FineEstimate est;
    est.tau2_ns = tau1_ns;
    if (!cfg.fine_enabled())
        return est;

    const std::size_t s = g.symbol_samples();
    const auto k_count = static_cast<std::size_t>(cfg.fine_segments());
    const std::size_t width = window_samples(cfg, g);
    if (r.size() < s + (k_count + 1) * s + width)
        throw std::invalid_argument("fine_search: signal too short for K = " + std::to_string(k_count));

    const int half = fine_half_width(cfg);
    const auto step = static_cast<std::int64_t>(step_samples(cfg.delta_ns, g, "delta_ns"));
    const std::int64_t base = g.nearest_sample(tau1_ns);

    est.z.resize(static_cast<std::size_t>(2 * half - 1));
    for (int n = -half + 1; n <= half - 1; ++n) {
        const std::size_t start = wrap_offset(base + n * step, s);
        double z = 0.0;
        for (std::size_t k = 0; k < k_count; ++k) {
            const double *a = r.samples.data() + start + k * s;
            z += std::abs(inner(a, a + s, width));
        }
        est.z[static_cast<std::size_t>(n + half - 1)] = z / r.fs_ghz;
    }

    // Largest index among the maxima.
    std::size_t pick = 0;
    for (std::size_t i = 1; i < est.z.size(); ++i)
        if (est.z[i] >= est.z[pick])
            pick = i;
    est.n_opt = static_cast<int>(pick) - half + 1;
    est.tau2_ns = g.to_ns(static_cast<std::int64_t>(wrap_offset(base + est.n_opt * step, s)));
    return est;
}

TwoStageEstimate two_stage_estimate(const SampledSignal &r, const SyncConfig &cfg, const FrameGeometry &g,
                                    const SymbolStream *training)
{
    TwoStageEstimate out;
    out.coarse = coarse_estimate(r, cfg, g, training);
    out.fine = fine_search(r, out.coarse.tau1_ns, cfg, g);
    return out;
}

const char *to_string(Mode m) noexcept
{
    return m == Mode::nda ? "nda" : "da";
}

const char *to_string(FineWindow w) noexcept
{
    return w == FineWindow::corr ? "corr" : "symbol";
}

std::optional<Mode> parse_mode(const std::string &s)
{
    if (s == "nda")
        return Mode::nda;
    if (s == "da")
        return Mode::da;
    return std::nullopt;
}

std::optional<FineWindow> parse_fine_window(const std::string &s)
{
    if (s == "corr")
        return FineWindow::corr;
    if (s == "symbol")
        return FineWindow::symbol;
    return std::nullopt;
}

} // namespace uwbsync
