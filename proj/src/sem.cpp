#include "pnet/sem.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <thread>

#include "pnet/gibbs.hpp"

namespace pnet {

namespace {

constexpr double kExpClamp = 30.0;

double softplus(double a) {
  return std::max(a, 0.0) + std::log1p(std::exp(-std::fabs(a)));
}

void parallel_for(std::size_t n, std::size_t workers,
                  const std::function<void(std::size_t)>& body) {
  if (workers <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  const std::size_t w = std::min(workers, n);
  std::vector<std::thread> pool;
  pool.reserve(w);
  for (std::size_t t = 0; t < w; ++t) {
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < n; i += w) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

void check_sample_width(const MaxEntModel& m, const PooledSample& s) {
  for (const auto& b : s.blocks)
    if (b.width != m.k())
      throw EvidenceError("block " + b.id + " was built over a different variable table");
}

std::vector<double> term_sums(const MaxEntModel& m,
                              const std::vector<WorldState>& completions) {
  std::vector<double> sums(m.terms.size(), 0.0);
  for (const auto& x : completions)
    for (std::size_t r = 0; r < m.terms.size(); ++r) sums[r] += m.terms[r].value(x);
  return sums;
}

}  // namespace

PooledSample e_step(const MaxEntModel& m, const PooledSample& s,
                    const FitConfig& cfg, std::size_t iteration) {
  check_sample_width(m, s);
  const std::size_t k = m.k();
  const std::size_t rep = std::max<std::size_t>(1, cfg.replication_factor);

  PooledSample out;
  out.blocks = s.blocks;

  const bool have_previous =
      !s.completions.empty() && s.completions.size() == s.instances.size();
  if (have_previous) {
    for (auto& b : out.blocks)
      if (b.truncation) b = estimate_truncated_extension(b, s.completions);
  }

  for (std::size_t bi = 0; bi < out.blocks.size(); ++bi) {
    const auto& block = out.blocks[bi];
    for (std::size_t rj = 0; rj < block.records.size(); ++rj) {
      const std::uint64_t copies = block.records[rj].multiplicity * rep;
      for (std::uint64_t u = 0; u < copies; ++u)
        out.instances.push_back({bi, static_cast<std::ptrdiff_t>(rj)});
    }
  }

  // Warm-start pools for extension instances: previous completions that
  // already sit outside the truncated region.
  std::vector<std::vector<const WorldState*>> outside(out.blocks.size());
  for (std::size_t bi = 0; bi < out.blocks.size(); ++bi) {
    const auto& block = out.blocks[bi];
    if (!block.truncation || block.extension_count == 0) continue;
    if (have_previous)
      for (const auto& w : s.completions)
        if (!block.truncation->eval(w)) outside[bi].push_back(&w);
    for (std::uint64_t u = 0; u < block.extension_count * rep; ++u)
      out.instances.push_back({bi, -1});
  }

  std::vector<std::optional<WorldState>> warm(out.instances.size());
  std::vector<std::uint64_t> next_ordinal(out.blocks.size(), 0);
  for (std::size_t idx = 0; idx < out.instances.size(); ++idx) {
    const auto& ref = out.instances[idx];
    if (ref.record >= 0) {
      if (have_previous && idx < s.instances.size() &&
          s.instances[idx].block == ref.block &&
          s.instances[idx].record == ref.record)
        warm[idx] = s.completions[idx];
    } else {
      const std::uint64_t e = next_ordinal[ref.block]++;
      const auto& pool = outside[ref.block];
      if (!pool.empty()) warm[idx] = *pool[e % pool.size()];
    }
  }

  const PartialBits all_missing(k, std::nullopt);
  out.completions.resize(out.instances.size(), WorldState(k));
  parallel_for(out.instances.size(), cfg.workers, [&](std::size_t idx) {
    const auto& ref = out.instances[idx];
    const bool extension = ref.record < 0;
    const auto& values = extension
                             ? all_missing
                             : out.blocks[ref.block].records[ref.record].values;
    const Proposition* forbidden =
        extension ? &*out.blocks[ref.block].truncation : nullptr;
    auto rng = RngStream::derive(cfg.seed, "e-step", iteration, idx);
    out.completions[idx] = impute_record(m, values, warm[idx],
                                         cfg.e_step_sweeps, rng, forbidden);
  });
  return out;
}

double pseudo_loglikelihood(const MaxEntModel& m,
                            const std::vector<WorldState>& completions) {
  double total = 0.0;
  for (const auto& x : completions) {
    for (std::size_t v = 0; v < m.k(); ++v) {
      const double a =
          std::clamp(conditional_exponent(m, x, v), -kExpClamp, kExpClamp);
      // log p(1|rest) = -softplus(a), log p(0|rest) = a - softplus(a)
      total += x.get(v) ? -softplus(a) : a - softplus(a);
    }
  }
  return total;
}

std::vector<double> pseudolikelihood_gradient(
    const MaxEntModel& m, const std::vector<WorldState>& completions,
    bool* exp_clamped) {
  std::vector<double> g(m.terms.size(), 0.0);
  for (const auto& x : completions) {
    for (std::size_t v = 0; v < m.k(); ++v) {
      const double a = conditional_exponent(m, x, v);
      if (exp_clamped != nullptr && std::fabs(a) > kExpClamp) *exp_clamped = true;
      const double ac = std::clamp(a, -kExpClamp, kExpClamp);
      const double p1 = 1.0 / (1.0 + std::exp(ac));
      const double coeff = p1 - (x.get(v) ? 1.0 : 0.0);
      for (std::uint32_t r : m.terms_by_var[v])
        g[r] += coeff * m.terms[r].delta(x, v);
    }
  }
  return g;
}

double completed_loglikelihood(const MaxEntModel& m,
                               const std::vector<WorldState>& completions,
                               std::size_t limit) {
  const ExactTable table = exact_distribution(m, limit);
  double total = 0.0;
  for (const auto& x : completions) total += log_score(m, x);
  return total -
         static_cast<double>(completions.size()) * table.log_partition;
}

std::vector<double> fulllikelihood_gradient(
    const MaxEntModel& m, const std::vector<WorldState>& completions,
    const std::vector<double>& expectations) {
  if (expectations.size() != m.terms.size())
    throw ModelError("one expectation per term is required");
  std::vector<double> g = term_sums(m, completions);
  const double n = static_cast<double>(completions.size());
  for (std::size_t r = 0; r < g.size(); ++r) g[r] -= n * expectations[r];
  return g;
}

std::vector<double> fulllikelihood_gradient(
    const MaxEntModel& m, const std::vector<WorldState>& completions,
    std::size_t limit) {
  const ExactTable table = exact_distribution(m, limit);
  std::vector<double> e(m.terms.size(), 0.0);
  for (std::size_t r = 0; r < m.terms.size(); ++r)
    e[r] = exact_expectation(m, table, m.terms[r]);
  return fulllikelihood_gradient(m, completions, e);
}

std::vector<double> m_step_pseudolikelihood(
    const std::vector<WorldState>& completions, const MaxEntModel& m,
    const FitConfig& cfg, std::size_t iteration, bool* exp_clamped) {
  if (completions.empty()) throw EvidenceError("M-step needs completions");
  const double eta =
      cfg.step_size / (1.0 + static_cast<double>(iteration) / cfg.step_decay);
  const double n = static_cast<double>(completions.size());
  MaxEntModel cur = m;
  std::vector<double> lambda = m.lambda;
  for (std::size_t step = 0; step < cfg.gradient_steps_per_m; ++step) {
    const auto g = pseudolikelihood_gradient(cur, completions, exp_clamped);
    for (std::size_t r = 0; r < lambda.size(); ++r) lambda[r] += eta * g[r] / n;
    cur = cur.with_lambda(lambda);
  }
  return lambda;
}

std::vector<double> m_step_fulllikelihood(
    const std::vector<WorldState>& completions, const MaxEntModel& m,
    const FitConfig& cfg, std::size_t iteration, bool* exp_clamped) {
  (void)exp_clamped;
  if (completions.empty()) throw EvidenceError("M-step needs completions");
  const double eta =
      cfg.step_size / (1.0 + static_cast<double>(iteration) / cfg.step_decay);
  const double n = static_cast<double>(completions.size());
  const std::vector<double> sums = term_sums(m, completions);

  MaxEntModel cur = m;
  std::vector<double> lambda = m.lambda;
  for (std::size_t step = 0; step < cfg.gradient_steps_per_m; ++step) {
    std::vector<double> e(cur.terms.size(), 0.0);
    if (cfg.m_step == MStep::FullLikelihoodMc) {
      const auto states = run_chain(
          cur, WorldState(cur.k()), {}, cfg.mc_expectation_samples,
          /*burn_in=*/100, /*thinning=*/0, cfg.seed,
          iteration * cfg.gradient_steps_per_m + step);
      for (const auto& x : states)
        for (std::size_t r = 0; r < cur.terms.size(); ++r)
          e[r] += cur.terms[r].value(x);
      for (auto& v : e) v /= static_cast<double>(states.size());
    } else {
      const ExactTable table = exact_distribution(cur, cfg.enumeration_limit);
      for (std::size_t r = 0; r < cur.terms.size(); ++r)
        e[r] = exact_expectation(cur, table, cur.terms[r]);
    }
    for (std::size_t r = 0; r < lambda.size(); ++r)
      lambda[r] += eta * (sums[r] - n * e[r]) / n;
    cur = cur.with_lambda(lambda);
  }
  return lambda;
}

FitReport run_sem(const MaxEntModel& model_init,
                  const std::vector<SampleBlock>& blocks,
                  const FitConfig& cfg) {
  MaxEntModel model = model_init;

  const bool all_zero = std::all_of(model.lambda.begin(), model.lambda.end(),
                                    [](double v) { return v == 0.0; });
  if (all_zero) {
    auto rng = RngStream::derive(cfg.seed, "init");
    auto lambda = model.lambda;
    for (std::size_t r = 0; r < model.terms.size(); ++r) {
      if (model.terms[r].kind != ConstraintTerm::Kind::Link) continue;
      const bool touches_hidden = model.vars.hidden(model.terms[r].i) ||
                                  model.vars.hidden(model.terms[r].j);
      double v;
      do {
        v = rng.next_double() - 0.5;
      } while (touches_hidden && std::fabs(v) < 0.01);
      lambda[r] = v;
    }
    model = model.with_lambda(lambda);
  }

  PooledSample sample = pool(blocks);
  check_sample_width(model, sample);

  FitReport rep;
  rep.seed = cfg.seed;
  rep.lambda_trajectory.push_back(model.lambda);
  rep.trajectory_iterations.push_back(0);
  const std::size_t stride = std::max<std::size_t>(1, cfg.trace_stride);
  const bool trace_ll = model.k() <= cfg.enumeration_limit;

  std::deque<double> window;
  std::size_t last_traced = 0;  // 0 = the initial lambda entry
  std::size_t t = 0;
  for (; t < cfg.max_iterations; ++t) {
    sample = e_step(model, sample, cfg, t);

    bool clamped = false;
    std::vector<double> next =
        cfg.m_step == MStep::PseudoLikelihood
            ? m_step_pseudolikelihood(sample.completions, model, cfg, t, &clamped)
            : m_step_fulllikelihood(sample.completions, model, cfg, t, &clamped);
    rep.exp_clamped = rep.exp_clamped || clamped;

    double dmax = 0.0;
    for (std::size_t r = 0; r < next.size(); ++r)
      dmax = std::max(dmax, std::fabs(next[r] - model.lambda[r]));
    model = model.with_lambda(std::move(next));

    rep.max_dlambda_trace.push_back(dmax);
    rep.completed_loglik_trace.push_back(
        trace_ll
            ? completed_loglikelihood(model, sample.completions, cfg.enumeration_limit)
            : std::numeric_limits<double>::quiet_NaN());
    if ((t + 1) % stride == 0) {
      rep.lambda_trajectory.push_back(model.lambda);
      rep.trajectory_iterations.push_back(t + 1);
      last_traced = t + 1;
    }

    window.push_back(dmax);
    if (window.size() > cfg.stationarity_window) window.pop_front();
    if (window.size() == cfg.stationarity_window && cfg.stationarity_window > 0) {
      double mean = 0.0;
      for (double d : window) mean += d;
      mean /= static_cast<double>(window.size());
      if (mean < cfg.stationarity_tol) {
        rep.converged = true;
        ++t;
        break;
      }
    }
  }
  rep.iterations_used = t;
  if (last_traced != rep.iterations_used) {
    rep.lambda_trajectory.push_back(model.lambda);
    rep.trajectory_iterations.push_back(rep.iterations_used);
  }
  rep.final_model = std::move(model);
  rep.final_sample = std::move(sample);
  return rep;
}

}  // namespace pnet
