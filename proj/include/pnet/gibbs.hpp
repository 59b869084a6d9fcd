#pragma once

// Single-site Gibbs simulation of the model, including clamped chains for
// imputing missing bits of evidence records.

#include <cstdint>
#include <optional>
#include <vector>

#include "pnet/model.hpp"
#include "pnet/rng.hpp"

namespace pnet {

struct GibbsChain {
  WorldState state;
  std::vector<std::uint8_t> clamp_mask;  // 1 = bit held fixed
  RngStream rng;
};

// One sweep: every unclamped bit is resampled once, in a fresh random
// permutation, from its full conditional. If `forbidden` is given the sweep
// never enters worlds satisfying it: a proposed bit value that would land
// there is rejected and the old value kept (the restricted single-site
// conditional). All bits clamped is a no-op, not an error.
void gibbs_sweep(const MaxEntModel& m, GibbsChain& chain,
                 const Proposition* forbidden = nullptr);

// Runs burn_in sweeps, then records one state after every (thinning+1)
// sweeps until n_samples states are collected. Deterministic in all inputs;
// the chain stream is derive(seed, "gibbs-chain", chain_id).
std::vector<WorldState> run_chain(const MaxEntModel& m, const WorldState& init,
                                  const std::vector<std::uint8_t>& clamps,
                                  std::size_t n_samples, std::size_t burn_in,
                                  std::size_t thinning, std::uint64_t seed,
                                  std::uint64_t chain_id = 0);

// Clamps the observed bits, fills missing ones from warm_start (or uniformly
// at random), runs `sweeps` sweeps, and returns the final state. Observed
// bits always come back unchanged. With `forbidden`, the returned state is
// guaranteed to violate it (used for truncated-sample extension records; the
// start state is nudged out of the forbidden region if necessary).
WorldState impute_record(const MaxEntModel& m, const PartialBits& observed,
                         const std::optional<WorldState>& warm_start,
                         std::size_t sweeps, RngStream& rng,
                         const Proposition* forbidden = nullptr);

}  // namespace pnet
