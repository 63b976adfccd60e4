// SPDX-License-Identifier: Apache-2.0
//
// uwbsync: timing acquisition simulator for multi-user TH-PAM impulse radio
// ------------------------------------------------------------------------

#ifndef UWBSYNC_RNG_HPP
#define UWBSYNC_RNG_HPP

#include <cstdint>
#include <random>

namespace uwbsync {

using Rng = std::mt19937_64;

// Roles of the independent streams owned by one trial. New roles go at the end;
// existing streams never move.
enum class StreamRole : std::uint64_t {
    desired_delay = 1,
    desired_code = 2,
    desired_channel = 3,
    desired_symbols = 4,
    noise = 5,
    interferer_base = 16, // interferer u uses interferer_base + 8*u + {0..3}
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Counter-based derivation: seed of child `index` under `parent`.
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) noexcept;

/// Seed for one trial of a run.
inline std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t trial_index) noexcept
{
    return derive_seed(master_seed, trial_index);
}

inline std::uint64_t role_seed(std::uint64_t trial, StreamRole role, std::uint64_t sub = 0) noexcept
{
    return derive_seed(trial, static_cast<std::uint64_t>(role) + sub);
}

inline Rng make_rng(std::uint64_t seed)
{
    return Rng(mix64(seed ^ 0x5851f42d4c957f2dULL));
}

} // namespace uwbsync

#endif
