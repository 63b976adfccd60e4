// SPDX-License-Identifier: Apache-2.0
//
// uwbsync: timing acquisition simulator for multi-user TH-PAM impulse radio
// ------------------------------------------------------------------------

#ifndef UWBSYNC_SYNC_HPP
#define UWBSYNC_SYNC_HPP

#include "uwbsync/geometry.hpp"
#include "uwbsync/waveform.hpp"

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace uwbsync {

enum class Mode { nda, da };

// Integration length of the fine-scan window.
enum class FineWindow {
    corr,   // T_corr wide
    symbol, // T_s wide
};

struct SyncConfig {
    int m = 32;                  // observation symbols for the coarse stage
    Mode mode = Mode::nda;
    double coarse_step_ns = 4.0; // candidate grid over [0, T_s)
    double t_corr_ns = 4.0;      // fine range is tau1 +- T_corr; 0 disables the fine stage
    double delta_ns = 0.2;       // fine step
    int k = 0;                   // fine-stage segment pairs; 0 means "same as m"
    FineWindow window = FineWindow::symbol;

    int fine_segments() const noexcept { return k > 0 ? k : m; }
    bool fine_enabled() const noexcept { return t_corr_ns > 0.0; }
    bool operator==(const SyncConfig &) const = default;
};

class SyncConfigError : public std::invalid_argument {
  public:
    SyncConfigError(std::string field, const std::string &what)
        : std::invalid_argument(what), field_(std::move(field)) {}
    const std::string &field() const noexcept { return field_; }

  private:
    std::string field_;
};

void validate_sync(const SyncConfig &cfg, const FrameGeometry &geometry);

/// N = ceil(T_corr / delta); the scan covers n in [-N + 1, N - 1].
int fine_half_width(const SyncConfig &cfg);

/// Symbols of received signal the two-stage estimator reads: max(M, K) + 3.
std::size_t required_symbols(const SyncConfig &cfg);

struct CoarseEstimate {
    double tau1_ns = 0.0;
    std::size_t index = 0;          // position of tau1 on the candidate grid
    std::vector<double> objective;  // one entry per candidate
};

struct FineEstimate {
    double tau2_ns = 0.0;
    int n_opt = 0;
    std::vector<double> z; // z[n + N - 1] for n in [-N + 1, N - 1]
};

struct EnergyPartition {
    double eps_a = 0.0; // energy of p_R on [0, tau_tilde)
    double eps_b = 0.0; // energy of p_R on [tau_tilde, T_s)
    double tau_tilde_ns = 0.0;
};

struct TwoStageEstimate {
    CoarseEstimate coarse;
    FineEstimate fine;
};

/// x(k; tau) = integral over one symbol of r(t + tau + (k-1)T_s) r(t + tau + k T_s). Requires k >= 1.
double dirty_correlate(const SampledSignal &r, double tau_ns, std::size_t k, const FrameGeometry &geometry);

/// Same on a sample offset; no range checks beyond the span bounds.
double dirty_correlate_at(const SampledSignal &r, std::size_t offset, std::size_t k, std::size_t symbol_len);

EnergyPartition energy_partition(const SampledSignal &p_r, double tau_tilde_ns, double eps);

/// Coarse objective at one sample offset: mean of x^2 (NDA) or square of the training-weighted mean (DA).
double coarse_objective(const SampledSignal &r, std::size_t offset, const SyncConfig &cfg, const FrameGeometry &geometry,
                        const SymbolStream *training);

/// Argmax of the coarse objective over the candidate grid. Ties resolve to the last candidate of the
/// circular run of maxima, i.e. the latest offset that still captures the whole symbol.
/// `training` is required in DA mode; its symbol j belongs to observation segment j.
CoarseEstimate coarse_estimate(const SampledSignal &r, const SyncConfig &cfg, const FrameGeometry &geometry,
                               const SymbolStream *training = nullptr);

/// Z_n = sum over k < K of |window integral of r(t + k T_s) r(t + (k+1) T_s)| starting at tau1 + n delta.
/// Ties resolve to the largest n.
FineEstimate fine_search(const SampledSignal &r, double tau1_ns, const SyncConfig &cfg, const FrameGeometry &geometry);

TwoStageEstimate two_stage_estimate(const SampledSignal &r, const SyncConfig &cfg, const FrameGeometry &geometry,
                                    const SymbolStream *training = nullptr);

const char *to_string(Mode m) noexcept;
const char *to_string(FineWindow w) noexcept;
std::optional<Mode> parse_mode(const std::string &s);
std::optional<FineWindow> parse_fine_window(const std::string &s);

} // namespace uwbsync

#endif
