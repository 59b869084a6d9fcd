#pragma once

// Stochastic EM: clamped-Gibbs imputation of missing bits (E-step) and
// partial maximum-likelihood parameter updates (M-step), with a windowed
// stationarity stop.

#include <cstdint>
#include <vector>

#include "pnet/evidence.hpp"
#include "pnet/model.hpp"

namespace pnet {

enum class MStep { PseudoLikelihood, FullLikelihoodExact, FullLikelihoodMc };

struct FitConfig {
  std::uint64_t seed = 0;
  MStep m_step = MStep::PseudoLikelihood;
  double step_size = 0.05;          // eta_0
  double step_decay = 200.0;        // tau in eta_t = eta_0 / (1 + t/tau)
  std::size_t e_step_sweeps = 10;
  std::size_t gradient_steps_per_m = 10;
  std::size_t replication_factor = 1;
  std::size_t max_iterations = 10000;
  std::size_t stationarity_window = 20;
  double stationarity_tol = 1e-3;
  std::size_t mc_expectation_samples = 2000;
  std::size_t enumeration_limit = kDefaultEnumerationLimit;
  std::size_t workers = 1;
  std::size_t trace_stride = 1;
};

struct FitReport {
  // lambda before iteration 0, then after every trace_stride-th iteration,
  // always including the last; trajectory_iterations holds the matching
  // iteration numbers (0 = initial).
  std::vector<std::vector<double>> lambda_trajectory;
  std::vector<std::size_t> trajectory_iterations;
  // Complete-data log-likelihood of the current completions after each
  // iteration's M-step; NaN when k exceeds the enumeration limit.
  std::vector<double> completed_loglik_trace;
  std::vector<double> max_dlambda_trace;  // max_r |delta lambda_r| per iteration
  bool converged = false;
  std::size_t iterations_used = 0;
  MaxEntModel final_model;
  std::uint64_t seed = 0;
  bool exp_clamped = false;  // an M-step hit the +-30 exponent clamp
  PooledSample final_sample;
};

// One imputation pass: re-estimates truncated extensions from the current
// completions (skipped while there are none yet), then redraws every
// instance's missing bits by clamped Gibbs, warm-started from the previous
// completions. Instances = records expanded by multiplicity and
// cfg.replication_factor, extension instances last. Deterministic in
// (inputs, cfg.seed, iteration), independent of cfg.workers.
PooledSample e_step(const MaxEntModel& m, const PooledSample& s,
                    const FitConfig& cfg, std::size_t iteration);

// Sum over completions and variables of log p(x_v = observed | rest), the
// product-of-full-conditionals objective. Exponents clamped to +-30.
double pseudo_loglikelihood(const MaxEntModel& m,
                            const std::vector<WorldState>& completions);

// Analytic gradient of pseudo_loglikelihood: raw sum over completions and
// variables of (p(x_v=1|rest) - observed bit) * delta_r. Sets *exp_clamped
// when some exponent hit the clamp.
std::vector<double> pseudolikelihood_gradient(
    const MaxEntModel& m, const std::vector<WorldState>& completions,
    bool* exp_clamped = nullptr);

// Complete-data log-likelihood sum_j log p(x_j) with the exact log partition
// function; needs k within the enumeration limit.
double completed_loglikelihood(const MaxEntModel& m,
                               const std::vector<WorldState>& completions,
                               std::size_t limit = kDefaultEnumerationLimit);

// Gradient of completed_loglikelihood: sum_j b_r(x_j) - n * E(b_r), with the
// expectations supplied by the caller (exact or Monte Carlo).
std::vector<double> fulllikelihood_gradient(
    const MaxEntModel& m, const std::vector<WorldState>& completions,
    const std::vector<double>& expectations);
// Convenience overload with exact expectations.
std::vector<double> fulllikelihood_gradient(
    const MaxEntModel& m, const std::vector<WorldState>& completions,
    std::size_t limit = kDefaultEnumerationLimit);

// Partial M-steps: cfg.gradient_steps_per_m ascent steps on the mean (per
// completion) gradient with eta_t = step_size / (1 + t/step_decay), t the
// outer iteration. The mean keeps the step scale independent of sample size.
std::vector<double> m_step_pseudolikelihood(
    const std::vector<WorldState>& completions, const MaxEntModel& m,
    const FitConfig& cfg, std::size_t iteration, bool* exp_clamped = nullptr);
std::vector<double> m_step_fulllikelihood(
    const std::vector<WorldState>& completions, const MaxEntModel& m,
    const FitConfig& cfg, std::size_t iteration, bool* exp_clamped = nullptr);

// Full stochastic EM loop. When the initial lambda is all zero, link terms
// are seeded from Uniform(-0.5, 0.5) (kept away from 0 when they touch a
// hidden variable, so hidden units start coupled); rule terms start at 0.
// Stops when the mean over the last stationarity_window iterations of
// max_r |delta lambda_r| drops below stationarity_tol.
FitReport run_sem(const MaxEntModel& model_init,
                  const std::vector<SampleBlock>& blocks, const FitConfig& cfg);

}  // namespace pnet
