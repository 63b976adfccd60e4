// SPDX-License-Identifier: Apache-2.0
//
// uwbsync: timing acquisition simulator for multi-user TH-PAM impulse radio
// ------------------------------------------------------------------------

#ifndef UWBSYNC_HARNESS_HPP
#define UWBSYNC_HARNESS_HPP

#include "uwbsync/channel.hpp"
#include "uwbsync/geometry.hpp"
#include "uwbsync/sync.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace uwbsync {

enum class Estimator { coarse_only, two_stage };
enum class ChannelModel { cm1, identity };

// What the SNR axis is referenced to: received energy per pulse (epsilon_0) or per symbol.
enum class SnrReference { pulse, symbol };

// How the desired user's timing epoch is drawn per trial.
enum class EpochLaw {
    uniform, // uniform over the sample grid of [0, T_s)
    grid,    // a uniformly chosen coarse-grid point plus epoch_offset_ns
};

struct ScenarioConfig {
    FrameGeometry geometry = FrameGeometry::desk();
    double pulse_shape_factor = default_shape_factor;

    SyncConfig sync;              // m and mode are taken from the sweep lists below
    std::vector<int> m_values{32};
    std::vector<Mode> modes{Mode::nda};
    std::vector<Estimator> estimators{Estimator::coarse_only, Estimator::two_stage};

    ChannelModel channel_model = ChannelModel::cm1;
    Cm1Params cm1;
    double truncation_ns = 60.0;

    int n_interferers = 0;
    std::vector<double> interferer_offsets_db;

    std::vector<std::optional<double>> snr_points_db{12.0}; // nullopt = noiseless
    SnrReference snr_reference = SnrReference::pulse;
    int trials = 50;
    std::uint64_t master_seed = 1;
    double acquisition_threshold_ns = 0.8;
    std::optional<double> coarse_threshold_ns; // coarse_only success threshold; empty = acquisition_threshold_ns

    double threshold_for(Estimator e) const noexcept
    {
        return e == Estimator::coarse_only && coarse_threshold_ns ? *coarse_threshold_ns : acquisition_threshold_ns;
    }

    EpochLaw epoch_law = EpochLaw::uniform;
    double epoch_offset_ns = 0.0;

    int workers = 0; // 0 = one per hardware thread

    bool operator==(const ScenarioConfig &) const = default;
};

/// Throws std::invalid_argument (or SyncConfigError for the sync block) on an invalid scenario.
void validate_scenario(const ScenarioConfig &cfg);

// One (snr, M, mode) cell of a sweep.
struct TrialPoint {
    std::optional<double> snr_db;
    int m = 32;
    Mode mode = Mode::nda;
};

struct TrialResult {
    double true_tau = 0.0;  // arrival epoch of the desired user's first pulse, mod T_s
    double tau0 = 0.0;      // symbol boundary of the desired user, mod T_s
    double tau1 = 0.0;
    double tau2 = 0.0;
    double err_coarse = 0.0;
    double err_fine = 0.0;
    bool acquired_coarse = false;
    bool acquired_fine = false;
    std::uint64_t seed = 0;

    double error(Estimator e) const noexcept { return e == Estimator::coarse_only ? err_coarse : err_fine; }
    bool acquired(Estimator e) const noexcept { return e == Estimator::coarse_only ? acquired_coarse : acquired_fine; }
    bool operator==(const TrialResult &) const = default;
};

class TrialError : public std::runtime_error {
  public:
    TrialError(std::uint64_t seed, std::uint64_t trial_index, const std::string &what);
    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t trial_index() const noexcept { return index_; }

  private:
    std::uint64_t seed_;
    std::uint64_t index_;
};

/// Received observation of one trial, exposed for tests and the self-test.
struct TrialSignal {
    SampledSignal r;            // observation window, required_symbols(sync) symbols long
    SymbolStream training;      // desired symbols aligned to observation segments
    double tau0_ns = 0.0;
    double epoch_ns = 0.0;
    double reference_energy = 0.0;
};

TrialSignal synthesize_trial(const ScenarioConfig &cfg, const TrialPoint &point, std::uint64_t trial_index);

/// One seeded trial: draw links, synthesize r(t), estimate, score against the first-pulse epoch.
TrialResult run_trial(const ScenarioConfig &cfg, const TrialPoint &point, std::uint64_t trial_index);

/// min(|a - b|, T_s - |a - b|).
double circular_error(double a_ns, double b_ns, double symbol_ns);

struct Aggregate {
    double normalized_mse = 0.0;
    double p_acq = 0.0;
    double ci_halfwidth = 0.0;     // 95 % normal approximation for p_acq
    double mse_ci_halfwidth = 0.0; // 95 % normal approximation for normalized_mse
};

Aggregate aggregate(std::span<const double> errors_ns, double symbol_ns, double threshold_ns);
Aggregate aggregate(std::span<const TrialResult> results, Estimator estimator, double symbol_ns, double threshold_ns);

struct MetricsRow {
    std::optional<double> snr_db;
    int m = 0;
    Mode mode = Mode::nda;
    Estimator estimator = Estimator::two_stage;
    int n_users = 1;
    double normalized_mse = 0.0;
    double p_acq = 0.0;
    int trials = 0;
    double ci95 = 0.0;
    double mse_ci95 = 0.0;

    bool operator==(const MetricsRow &) const = default;
};

struct MetricsTable {
    std::vector<MetricsRow> rows;

    const MetricsRow *find(std::optional<double> snr_db, int m, Mode mode, Estimator estimator) const;
    bool operator==(const MetricsTable &) const = default;
};

/// All trials of one sweep cell, in trial-index order.
std::vector<TrialResult> run_point(const ScenarioConfig &cfg, const TrialPoint &point);

/// Runs every (mode, M, snr) cell and emits one row per estimator, sorted by (mode, M, snr, estimator).
MetricsTable sweep(const ScenarioConfig &cfg);

const char *to_string(Estimator e) noexcept;
const char *to_string(ChannelModel c) noexcept;
const char *to_string(SnrReference s) noexcept;
const char *to_string(EpochLaw e) noexcept;

} // namespace uwbsync

#endif
