#include "pnet/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pnet {

MaxEntModel::MaxEntModel(VariableTable variables,
                         std::vector<ConstraintTerm> term_list,
                         std::vector<double> lambda_values)
    : vars(std::move(variables)),
      terms(std::move(term_list)),
      lambda(std::move(lambda_values)) {
  if (lambda.empty()) lambda.assign(terms.size(), 0.0);
  if (lambda.size() != terms.size())
    throw ModelError("lambda length " + std::to_string(lambda.size()) +
                     " does not match term count " +
                     std::to_string(terms.size()));
  terms_by_var.assign(vars.size(), {});
  for (std::size_t r = 0; r < terms.size(); ++r) {
    ConstraintTerm& t = terms[r];
    t.id = r;
    if (!t.involved.empty() && t.max_index() >= vars.size())
      throw ModelError("term " + std::to_string(r) +
                       " references variable index " +
                       std::to_string(t.max_index()) + " but k = " +
                       std::to_string(vars.size()));
    if (t.kind != ConstraintTerm::Kind::Link) {
      for (std::size_t v : t.involved)
        if (vars.hidden(v))
          throw ModelError("rule term " + std::to_string(r) +
                           " references hidden variable '" + vars[v].name +
                           "'; hidden units may appear in links only");
    }
    for (std::size_t v : t.involved)
      terms_by_var[v].push_back(static_cast<std::uint32_t>(r));
  }
}

MaxEntModel MaxEntModel::with_lambda(std::vector<double> lambda_values) const {
  MaxEntModel m = *this;
  if (lambda_values.size() != terms.size())
    throw ModelError("lambda length does not match term count");
  m.lambda = std::move(lambda_values);
  return m;
}

double log_score(const MaxEntModel& m, const WorldState& x) {
  double s = 0.0;
  for (std::size_t r = 0; r < m.terms.size(); ++r)
    s += m.lambda[r] * m.terms[r].value(x);
  return s;
}

static void check_capacity(std::size_t k, std::size_t limit) {
  if (k > limit)
    throw CapacityError("exact enumeration over " + std::to_string(k) +
                        " variables exceeds the limit of " +
                        std::to_string(limit) + " bits");
}

ExactTable exact_distribution(const MaxEntModel& m, std::size_t limit) {
  check_capacity(m.k(), limit);
  const std::size_t n = std::size_t{1} << m.k();
  ExactTable t;
  t.k = m.k();
  std::vector<double> scores(n);
  double max_score = -1e300;
  for (std::size_t code = 0; code < n; ++code) {
    scores[code] = log_score(m, WorldState::from_code(m.k(), code));
    max_score = std::max(max_score, scores[code]);
  }
  double total = 0.0;
  t.probabilities.resize(n);
  for (std::size_t code = 0; code < n; ++code) {
    t.probabilities[code] = std::exp(scores[code] - max_score);
    total += t.probabilities[code];
  }
  double mean_score = 0.0;
  for (std::size_t code = 0; code < n; ++code) {
    t.probabilities[code] /= total;
    mean_score += t.probabilities[code] * scores[code];
  }
  t.log_partition = max_score + std::log(total);
  // H = log Z - E[score]; avoids summing p*log p near zero probabilities.
  t.entropy = t.log_partition - mean_score;
  return t;
}

double conditional_exponent(const MaxEntModel& m, const WorldState& x,
                            std::size_t v) {
  WorldState x0 = x;
  x0.set(v, false);
  WorldState x1 = x;
  x1.set(v, true);
  double s = 0.0;
  for (std::uint32_t r : m.terms_by_var[v]) {
    const ConstraintTerm& t = m.terms[r];
    s += m.lambda[r] * (t.value(x0) - t.value(x1));
  }
  return s;
}

double conditional_prob(const MaxEntModel& m, const WorldState& x,
                        std::size_t v) {
  double s = conditional_exponent(m, x, v);
  s = std::clamp(s, -30.0, 30.0);
  return 1.0 / (1.0 + std::exp(s));
}

double exact_expectation(const MaxEntModel& m, const ExactTable& table,
                         const ConstraintTerm& t) {
  const std::size_t n = std::size_t{1} << m.k();
  double e = 0.0;
  for (std::size_t code = 0; code < n; ++code)
    e += table.probabilities[code] * t.value(WorldState::from_code(m.k(), code));
  return e;
}

double exact_expectation(const MaxEntModel& m, const ConstraintTerm& t,
                         std::size_t limit) {
  return exact_expectation(m, exact_distribution(m, limit), t);
}

double query_probability(const MaxEntModel& m, const Proposition& c,
                         const std::optional<Proposition>& given,
                         std::size_t limit) {
  ExactTable table = exact_distribution(m, limit);
  const std::size_t n = std::size_t{1} << m.k();
  double p_joint = 0.0, p_given = 0.0;
  for (std::size_t code = 0; code < n; ++code) {
    WorldState x = WorldState::from_code(m.k(), code);
    bool g = !given || given->eval(x);
    if (!g) continue;
    p_given += table.probabilities[code];
    if (c.eval(x)) p_joint += table.probabilities[code];
  }
  if (!given) return p_joint;
  if (p_given <= 1e-300)
    throw DegenerateConditionError(
        "conditioning event has probability <= 1e-300");
  return p_joint / p_given;
}

std::pair<MaxEntModel, ExactFitReport> fit_maxent_exact(
    VariableTable variables, std::vector<ConstraintTerm> terms,
    const ExactFitConfig& cfg) {
  check_capacity(variables.size(), cfg.enumeration_limit);
  std::vector<double> targets(terms.size());
  for (std::size_t r = 0; r < terms.size(); ++r) {
    auto c = terms[r].target();
    if (!c)
      throw ModelError("term " + std::to_string(r) +
                       " has no target; only marginal and conditional "
                       "constraints can be hardwired");
    targets[r] = *c;
  }
  MaxEntModel m(std::move(variables), std::move(terms));

  ExactFitReport report;
  report.residuals.assign(m.terms.size(), 0.0);
  std::vector<double> best_lambda = m.lambda;
  double best_residual = 1e300;
  std::size_t iter = 0;
  for (; iter < cfg.max_iterations; ++iter) {
    ExactTable table = exact_distribution(m, cfg.enumeration_limit);
    double max_resid = 0.0;
    std::vector<double> grad(m.terms.size());
    for (std::size_t r = 0; r < m.terms.size(); ++r) {
      double e = exact_expectation(m, table, m.terms[r]);
      grad[r] = targets[r] - e;
      max_resid = std::max(max_resid, std::abs(grad[r]));
    }
    if (max_resid < best_residual) {
      best_residual = max_resid;
      best_lambda = m.lambda;
      for (std::size_t r = 0; r < m.terms.size(); ++r)
        report.residuals[r] = std::abs(grad[r]);
    }
    if (max_resid < cfg.tolerance) {
      report.converged = true;
      break;
    }
    for (std::size_t r = 0; r < m.terms.size(); ++r)
      m.lambda[r] += cfg.step * grad[r];
  }
  report.iterations = iter;
  report.max_residual = best_residual;
  m.lambda = best_lambda;
  return {std::move(m), std::move(report)};
}

}  // namespace pnet
