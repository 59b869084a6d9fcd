#include "pnet/gibbs.hpp"

#include <numeric>

#include "pnet/core.hpp"

namespace pnet {

void gibbs_sweep(const MaxEntModel& m, GibbsChain& chain,
                 const Proposition* forbidden) {
  const std::size_t k = m.k();
  if (chain.state.size() != k) throw ModelError("chain state has wrong width");
  if (!chain.clamp_mask.empty() && chain.clamp_mask.size() != k)
    throw ModelError("clamp mask has wrong width");

  std::vector<std::size_t> order;
  order.reserve(k);
  for (std::size_t v = 0; v < k; ++v) {
    if (chain.clamp_mask.empty() || !chain.clamp_mask[v]) order.push_back(v);
  }
  chain.rng.shuffle(order);

  for (std::size_t v : order) {
    const double p1 = conditional_prob(m, chain.state, v);
    const bool proposed = chain.rng.bernoulli(p1);
    const bool old = chain.state.get(v);
    if (proposed == old) continue;
    chain.state.set(v, proposed);
    // Restricted support: a move into the forbidden region is rejected, which
    // leaves exactly the single-site conditional of the restricted model.
    if (forbidden != nullptr && forbidden->eval(chain.state)) {
      chain.state.set(v, old);
    }
  }
}

std::vector<WorldState> run_chain(const MaxEntModel& m, const WorldState& init,
                                  const std::vector<std::uint8_t>& clamps,
                                  std::size_t n_samples, std::size_t burn_in,
                                  std::size_t thinning, std::uint64_t seed,
                                  std::uint64_t chain_id) {
  if (init.size() != m.k()) throw ModelError("initial state has wrong width");
  GibbsChain chain{init, clamps, RngStream::derive(seed, "gibbs-chain", chain_id)};

  for (std::size_t s = 0; s < burn_in; ++s) gibbs_sweep(m, chain);

  std::vector<WorldState> out;
  out.reserve(n_samples);
  while (out.size() < n_samples) {
    for (std::size_t s = 0; s <= thinning; ++s) gibbs_sweep(m, chain);
    out.push_back(chain.state);
  }
  return out;
}

WorldState impute_record(const MaxEntModel& m, const PartialBits& observed,
                         const std::optional<WorldState>& warm_start,
                         std::size_t sweeps, RngStream& rng,
                         const Proposition* forbidden) {
  const std::size_t k = m.k();
  if (observed.size() != k) throw EvidenceError("record has wrong width");
  if (warm_start && warm_start->size() != k)
    throw EvidenceError("warm start has wrong width");

  WorldState state(k);
  std::vector<std::uint8_t> mask(k, 0);
  bool any_missing = false;
  for (std::size_t v = 0; v < k; ++v) {
    if (observed[v].has_value()) {
      state.set(v, *observed[v]);
      mask[v] = 1;
    } else {
      any_missing = true;
      state.set(v, warm_start ? warm_start->get(v) : rng.bernoulli(0.5));
    }
  }

  if (forbidden != nullptr && forbidden->eval(state)) {
    // Move the start state off the truncated region by flipping one free bit
    // it depends on.
    bool fixed = false;
    for (std::size_t v : forbidden->variables()) {
      if (v >= k || mask[v]) continue;
      state.set(v, !state.get(v));
      if (!forbidden->eval(state)) {
        fixed = true;
        break;
      }
      state.set(v, !state.get(v));
    }
    if (!fixed)
      throw EvidenceError("record cannot be completed outside the truncation condition");
  }

  if (!any_missing) return state;

  GibbsChain chain{state, mask, rng};
  for (std::size_t s = 0; s < sweeps; ++s) gibbs_sweep(m, chain, forbidden);
  rng = chain.rng;  // hand the advanced stream back to the caller
  return chain.state;
}

}  // namespace pnet
