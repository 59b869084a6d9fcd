#pragma once

// The log-linear model p(x) = Z^-1 exp(sum_r lambda_r b_r(x)) and its exact
// brute-force machinery: enumeration, conditionals, expectations, queries,
// and exact ("hardwired") constraint fitting.

#include <cstdint>
#include <optional>
#include <vector>

#include "pnet/core.hpp"

namespace pnet {

// Exact enumeration touches 2^k worlds; refuse beyond this many bits unless
// the caller raises the limit explicitly.
inline constexpr std::size_t kDefaultEnumerationLimit = 24;

struct MaxEntModel {
  MaxEntModel() = default;
  // Validates the term list against the table, assigns dense term ids, and
  // precomputes per-variable term lists. lambda defaults to all zeros.
  MaxEntModel(VariableTable variables, std::vector<ConstraintTerm> term_list,
              std::vector<double> lambda_values = {});

  VariableTable vars;
  std::vector<ConstraintTerm> terms;
  std::vector<double> lambda;
  // terms_by_var[v] lists indices of terms whose involved set contains v.
  std::vector<std::vector<std::uint32_t>> terms_by_var;

  std::size_t k() const { return vars.size(); }
  MaxEntModel with_lambda(std::vector<double> lambda_values) const;
};

// All 2^k probabilities, indexed by WorldState::code().
struct ExactTable {
  std::size_t k = 0;
  std::vector<double> probabilities;
  double log_partition = 0.0;
  double entropy = 0.0;  // nats

  double prob(const WorldState& x) const { return probabilities[x.code()]; }
};

// sum_r lambda_r b_r(x); log p(x) = log_score(x) - log_partition.
double log_score(const MaxEntModel& m, const WorldState& x);

ExactTable exact_distribution(const MaxEntModel& m,
                              std::size_t limit = kDefaultEnumerationLimit);

// sum over terms involving v of lambda_r * [b_r(x[v:=0]) - b_r(x[v:=1])].
// Never reads bit v itself; depends only on v's Markov blanket.
double conditional_exponent(const MaxEntModel& m, const WorldState& x,
                            std::size_t v);

// p(x_v = 1 | all other bits) = 1 / (1 + exp(conditional_exponent)).
// The exponent is clamped to +-30 so the result is always in (0, 1).
double conditional_prob(const MaxEntModel& m, const WorldState& x,
                        std::size_t v);

double exact_expectation(const MaxEntModel& m, const ExactTable& table,
                         const ConstraintTerm& t);
double exact_expectation(const MaxEntModel& m, const ConstraintTerm& t,
                         std::size_t limit = kDefaultEnumerationLimit);

// Exact P(c) or P(c | given) by summation over the enumerated table.
double query_probability(const MaxEntModel& m, const Proposition& c,
                         const std::optional<Proposition>& given = std::nullopt,
                         std::size_t limit = kDefaultEnumerationLimit);

struct ExactFitConfig {
  double step = 0.5;
  double tolerance = 1e-8;       // max per-term residual
  std::size_t max_iterations = 50000;
  std::size_t enumeration_limit = kDefaultEnumerationLimit;
};

struct ExactFitReport {
  std::vector<double> residuals;  // |E_lambda(b_r) - c_r| per term
  double max_residual = 0.0;
  std::size_t iterations = 0;
  bool converged = false;  // false flags an inconsistent constraint set
};

// Fits lambda so every term's expectation meets its target (the "hardwired"
// model): plain gradient steps lambda_r += step * (c_r - E_lambda(b_r)).
// Every term must carry a target, so links are not allowed here.
// Non-convergence is reported, not thrown; the best lambda found is returned.
std::pair<MaxEntModel, ExactFitReport> fit_maxent_exact(
    VariableTable variables, std::vector<ConstraintTerm> terms,
    const ExactFitConfig& cfg = {});

}  // namespace pnet
