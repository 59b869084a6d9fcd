// Acceptance checks: one pass/fail line per criterion, exit 0 only if all
// pass. Tolerances are pinned here, next to each check.

#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "pnet/gibbs.hpp"
#include "pnet/io.hpp"
#include "pnet/netspec.hpp"
#include "pnet/sem.hpp"
#include "test_support.hpp"

using namespace pnet;

namespace {

constexpr double kPseudoGradTol = 1e-5;
constexpr double kFullGradTol = 1e-6;
constexpr double kFdStep = 1e-4;
constexpr double kSamplerPassRate = 0.95;
constexpr double kHardwiredResidualTol = 1e-6;
constexpr double kOracleTvTol = 1e-3;
constexpr double kLogitLambdaTol = 1e-4;
constexpr double kRecoveryTvTol = 0.05;
constexpr std::size_t kMaxSemIterations = 5000;
constexpr double kLoglikRelTol = 0.02;
constexpr double kCompareHardTol = 1e-4;

struct Outcome {
  bool pass = false;
  std::string detail;
  std::string artifact;  // serialized output, for the determinism criterion
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

// ---------------------------------------------------------------- criterion 1

Outcome check_gradients(std::uint64_t seed) {
  double worst_pseudo = 0.0, worst_full = 0.0;
  for (std::size_t inst = 0; inst < 50; ++inst) {
    auto rng = RngStream::derive(seed, "acc1", inst);
    const auto m = testsup::random_model(rng, {2, 8, 12, 2.0, true});
    const auto comps = testsup::random_states(rng, m.k(), 5 + rng.below(46));

    const auto pseudo_fd = testsup::central_fd(
        [&](const std::vector<double>& l) {
          return pseudo_loglikelihood(m.with_lambda(l), comps);
        },
        m.lambda, kFdStep);
    worst_pseudo = std::max(
        worst_pseudo,
        testsup::max_rel_err(pseudolikelihood_gradient(m, comps), pseudo_fd));

    const auto full_fd = testsup::central_fd(
        [&](const std::vector<double>& l) {
          return completed_loglikelihood(m.with_lambda(l), comps);
        },
        m.lambda, kFdStep);
    worst_full = std::max(
        worst_full,
        testsup::max_rel_err(fulllikelihood_gradient(m, comps), full_fd));
  }
  Outcome out;
  out.pass = worst_pseudo < kPseudoGradTol && worst_full < kFullGradTol;
  out.detail = "pseudo " + fmt(worst_pseudo) + " (tol " + fmt(kPseudoGradTol) +
               "), full " + fmt(worst_full) + " (tol " + fmt(kFullGradTol) + ")";
  return out;
}

// ---------------------------------------------------------------- criterion 2

Outcome check_sampler(std::uint64_t seed) {
  std::size_t pairs = 0, inside = 0;
  std::ostringstream artifact;
  for (std::size_t i = 0; i < 20; ++i) {
    auto rng = RngStream::derive(seed, "acc2", i);
    const auto m = testsup::random_model(rng, {2, 8, 10, 1.0, true});
    const auto table = exact_distribution(m);
    const auto states =
        run_chain(m, WorldState(m.k()), {}, 50000, 500, 2, seed, i);
    artifact << samples_to_csv(m.vars, states);
    for (const auto& t : m.terms) {
      double mean = 0.0;
      for (const auto& x : states) mean += t.value(x);
      mean /= static_cast<double>(states.size());
      const double expect = exact_expectation(m, table, t);
      const double var = testsup::exact_variance(table, m.k(), t);
      ++pairs;
      if (testsup::within_3sigma(mean, expect, var, states.size())) ++inside;
    }
  }
  Outcome out;
  const double rate = static_cast<double>(inside) / static_cast<double>(pairs);
  out.pass = rate >= kSamplerPassRate;
  out.detail = std::to_string(inside) + "/" + std::to_string(pairs) +
               " term means in band (need " + fmt(kSamplerPassRate * 100) +
               "%)";
  out.artifact = artifact.str();
  return out;
}

// ---------------------------------------------------------------- criterion 3

VariableTable plain_vars(std::size_t k) {
  std::vector<AtomicVariable> v;
  for (std::size_t i = 0; i < k; ++i)
    v.push_back({i, "x" + std::to_string(i + 1), false});
  return VariableTable(std::move(v));
}

Outcome check_hardwired(std::uint64_t seed) {
  double worst_residual = 0.0, worst_tv = 0.0;
  std::string fail;

  auto run_case = [&](const VariableTable& vars,
                      const std::vector<ConstraintTerm>& terms,
                      const std::string& name) {
    const auto [m, rep] = fit_maxent_exact(vars, terms, {});
    if (!rep.converged) {
      fail = name + " did not converge";
      return m;
    }
    worst_residual = std::max(worst_residual, rep.max_residual);
    const auto fitted = exact_distribution(m);
    const auto oracle = testsup::simplex_maxent_oracle(vars, terms);
    worst_tv =
        std::max(worst_tv, testsup::tv_distance(fitted.probabilities, oracle));
    return m;
  };

  // the closed-form single-marginal case pins lambda itself
  {
    const auto vars = plain_vars(1);
    const auto m = run_case(
        vars, {ConstraintTerm::marginal(Proposition::var(0), 0.8)}, "logit");
    if (std::fabs(m.lambda[0] - std::log(4.0)) > kLogitLambdaTol)
      fail = "logit lambda " + fmt(m.lambda[0]) + " != ln 4";
  }
  // marginal plus conditional on two variables
  {
    const auto vars = plain_vars(2);
    run_case(vars,
             {ConstraintTerm::marginal(Proposition::var(0), 0.5),
              ConstraintTerm::conditional(Proposition::var(1),
                                          Proposition::var(0), 0.3)},
             "pair");
  }
  // random consistent sets: targets are read off a random model, so a
  // feasible distribution exists by construction
  for (std::size_t inst = 0; inst < 6 && fail.empty(); ++inst) {
    auto rng = RngStream::derive(seed, "acc3", inst);
    const auto base = testsup::random_model(rng, {4, 6, 3, 1.0, false});
    std::vector<ConstraintTerm> terms;
    for (const auto& t : base.terms) {
      if (t.kind == ConstraintTerm::Kind::Marginal)
        terms.push_back(ConstraintTerm::marginal(
            t.c, query_probability(base, t.c)));
      else
        terms.push_back(ConstraintTerm::conditional(
            t.c, t.b, query_probability(base, t.c, t.b)));
    }
    run_case(base.vars, terms, "random-" + std::to_string(inst));
  }

  Outcome out;
  out.pass = fail.empty() && worst_residual < kHardwiredResidualTol &&
             worst_tv < kOracleTvTol;
  out.detail = fail.empty()
                   ? "max residual " + fmt(worst_residual) + ", max TV " +
                         fmt(worst_tv) + " vs simplex oracle"
                   : fail;
  return out;
}

// ---------------------------------------------------------------- criterion 4

Outcome check_recovery(std::uint64_t seed) {
  auto rng = RngStream::derive(seed, "acc4");
  const auto vars = plain_vars(5);

  std::set<std::pair<std::size_t, std::size_t>> pairs;
  while (pairs.size() < 3) {
    std::size_t i = rng.below(5), j = rng.below(5);
    if (i == j) continue;
    pairs.insert({std::min(i, j), std::max(i, j)});
  }
  std::vector<ConstraintTerm> terms;
  std::vector<double> lambda;
  for (const auto& [i, j] : pairs) {
    terms.push_back(ConstraintTerm::link(i, j));
    lambda.push_back(-1.5 + 3.0 * rng.next_double());
  }
  const auto gen = MaxEntModel(VariableTable(vars), terms, lambda);

  const auto states = run_chain(gen, WorldState(5), {}, 2000, 500, 4, seed, 0);
  std::map<std::vector<std::uint8_t>, std::uint64_t> counter;
  for (const auto& x : states) {
    std::vector<std::uint8_t> t(5);
    for (std::size_t i = 0; i < 5; ++i) t[i] = x.get(i) ? 1 : 0;
    ++counter[t];
  }
  std::vector<std::pair<std::vector<std::uint8_t>, std::uint64_t>> counts(
      counter.begin(), counter.end());
  const auto block = materialize_data_sample(vars, {0, 1, 2, 3, 4}, counts, "S1");

  FitConfig cfg;
  cfg.seed = seed;
  cfg.m_step = MStep::FullLikelihoodExact;
  cfg.max_iterations = 600;
  const auto rep = run_sem(gen.with_lambda(std::vector<double>(3, 0.0)),
                           {block}, cfg);

  const double tv =
      testsup::tv_distance(exact_distribution(rep.final_model).probabilities,
                           exact_distribution(gen).probabilities);
  Outcome out;
  out.pass = tv < kRecoveryTvTol;
  out.detail = "TV to generator " + fmt(tv) + " (tol " + fmt(kRecoveryTvTol) +
               "), " + std::to_string(rep.iterations_used) + " iterations";
  out.artifact = fit_report_to_json(rep).dump(2);
  return out;
}

// ---------------------------------------------------------------- criterion 5

struct HiddenFixture {
  MaxEntModel model;
  std::vector<SampleBlock> blocks;
};

HiddenFixture load_fixture() {
  const auto text = read_text_file(testsup::fixture_path("paass_s3.pnet"));
  const auto parsed = parse_spec(text);
  if (!parsed.ok()) throw Error("fixture failed to parse");
  auto compiled = compile_spec(*parsed.spec);
  if (!compiled.ok()) throw Error("fixture failed to compile");
  return {std::move(*compiled.model), std::move(compiled.blocks)};
}

FitConfig hidden_fit_config(std::uint64_t seed) {
  FitConfig cfg;
  cfg.seed = seed;
  cfg.m_step = MStep::FullLikelihoodExact;
  cfg.step_size = 0.05;
  cfg.step_decay = 100.0;
  cfg.e_step_sweeps = 10;
  cfg.gradient_steps_per_m = 10;
  cfg.replication_factor = 4;
  cfg.max_iterations = kMaxSemIterations;
  cfg.stationarity_window = 20;
  cfg.stationarity_tol = 1e-3;
  return cfg;
}

// Deterministic EM reference: expected sufficient statistics by enumeration
// over each record's missing bits, a continuous extension size, and the same
// partial gradient M-step. Works entirely on 2^k cached feature rows.
struct ExactEmOracle {
  std::size_t per_instance_iterations = 0;
  double loglik_per_instance = 0.0;
};

ExactEmOracle exact_em_reference(const HiddenFixture& fx, const FitConfig& cfg) {
  const std::size_t k = fx.model.k();
  const std::size_t n_worlds = std::size_t{1} << k;
  const std::size_t d = fx.model.terms.size();

  std::vector<std::vector<double>> feat(n_worlds, std::vector<double>(d));
  for (std::uint64_t code = 0; code < n_worlds; ++code)
    for (std::size_t r = 0; r < d; ++r)
      feat[code][r] = fx.model.terms[r].value(WorldState::from_code(k, code));

  struct Group {
    std::vector<std::uint64_t> codes;  // completions consistent with the record
    double weight = 0.0;               // multiplicity times replication
    bool extension = false;
    std::size_t block = 0;
  };
  std::vector<Group> groups;
  const double repf = static_cast<double>(cfg.replication_factor);
  for (std::size_t bi = 0; bi < fx.blocks.size(); ++bi) {
    for (const auto& rec : fx.blocks[bi].records) {
      Group g;
      g.block = bi;
      g.weight = static_cast<double>(rec.multiplicity) * repf;
      for (std::uint64_t code = 0; code < n_worlds; ++code) {
        bool ok = true;
        for (std::size_t i = 0; i < k && ok; ++i)
          if (rec.values[i].has_value() &&
              (((code >> i) & 1ULL) != 0) != *rec.values[i])
            ok = false;
        if (ok) g.codes.push_back(code);
      }
      groups.push_back(std::move(g));
    }
  }
  // one extension group per truncated block, weight filled in per iteration
  std::vector<std::size_t> ext_group_of_block(fx.blocks.size(), SIZE_MAX);
  for (std::size_t bi = 0; bi < fx.blocks.size(); ++bi) {
    if (!fx.blocks[bi].truncation) continue;
    Group g;
    g.block = bi;
    g.extension = true;
    for (std::uint64_t code = 0; code < n_worlds; ++code)
      if (!fx.blocks[bi].truncation->eval(WorldState::from_code(k, code)))
        g.codes.push_back(code);
    ext_group_of_block[bi] = groups.size();
    groups.push_back(std::move(g));
  }

  auto lambda = fx.model.lambda;  // all zero: rule terms stay cold, links too
  // mirror the stochastic initialization's intent without its randomness:
  // hidden links need a nonzero seed to break the symmetry
  for (std::size_t r = 0; r < d; ++r) {
    const auto& t = fx.model.terms[r];
    if (t.kind != ConstraintTerm::Kind::Link) continue;
    bool hidden = false;
    for (const auto v : t.involved) hidden = hidden || fx.model.vars[v].hidden;
    if (hidden) lambda[r] = 0.05 + 0.01 * static_cast<double>(r);
  }

  std::vector<double> prev_sat_b(fx.blocks.size(), 0.0);  // E #sat, lagged
  double prev_total = 0.0;
  std::vector<double> ext_weight(fx.blocks.size(), 0.0);

  ExactEmOracle out;
  std::vector<double> prev_lambda = lambda;
  std::size_t stable = 0;
  const std::size_t max_iters = 4000;
  for (std::size_t t = 0; t < max_iters; ++t) {
    // log scores for the current parameters
    std::vector<double> ls(n_worlds, 0.0);
    for (std::uint64_t code = 0; code < n_worlds; ++code)
      for (std::size_t r = 0; r < d; ++r)
        ls[code] += lambda[r] * feat[code][r];

    // extension sizes from the previous iteration's expected satisfaction
    if (t > 0) {
      for (std::size_t bi = 0; bi < fx.blocks.size(); ++bi) {
        if (ext_group_of_block[bi] == SIZE_MAX) continue;
        const double p_hat = (1.0 + prev_sat_b[bi]) / (2.0 + prev_total);
        const double n_obs = static_cast<double>(fx.blocks[bi].n);
        ext_weight[bi] = repf * n_obs * (1.0 - p_hat) / p_hat;
        groups[ext_group_of_block[bi]].weight = ext_weight[bi];
      }
    }

    // E-step: per-group posteriors and expected features
    std::vector<double> exp_feat(d, 0.0);
    double total_weight = 0.0;
    std::vector<double> sat_b(fx.blocks.size(), 0.0);
    for (const auto& g : groups) {
      if (g.weight <= 0.0) continue;
      double zmax = -1e300;
      for (const auto code : g.codes) zmax = std::max(zmax, ls[code]);
      double z = 0.0;
      for (const auto code : g.codes) z += std::exp(ls[code] - zmax);
      for (const auto code : g.codes) {
        const double w = std::exp(ls[code] - zmax) / z;
        for (std::size_t r = 0; r < d; ++r)
          exp_feat[r] += g.weight * w * feat[code][r];
        for (std::size_t bi = 0; bi < fx.blocks.size(); ++bi) {
          if (ext_group_of_block[bi] == SIZE_MAX) continue;
          if (fx.blocks[bi].truncation->eval(WorldState::from_code(k, code)))
            sat_b[bi] += g.weight * w;
        }
      }
      total_weight += g.weight;
    }
    prev_sat_b = sat_b;
    prev_total = total_weight;

    // M-step: same schedule, same number of partial steps, mean gradient
    const double eta =
        cfg.step_size / (1.0 + static_cast<double>(t) / cfg.step_decay);
    for (std::size_t step = 0; step < cfg.gradient_steps_per_m; ++step) {
      std::vector<double> cur_ls(n_worlds, 0.0);
      for (std::uint64_t code = 0; code < n_worlds; ++code)
        for (std::size_t r = 0; r < d; ++r)
          cur_ls[code] += lambda[r] * feat[code][r];
      double zmax = -1e300;
      for (const auto v : cur_ls) zmax = std::max(zmax, v);
      double z = 0.0;
      for (const auto v : cur_ls) z += std::exp(v - zmax);
      std::vector<double> expectation(d, 0.0);
      for (std::uint64_t code = 0; code < n_worlds; ++code) {
        const double p = std::exp(cur_ls[code] - zmax) / z;
        for (std::size_t r = 0; r < d; ++r)
          expectation[r] += p * feat[code][r];
      }
      for (std::size_t r = 0; r < d; ++r)
        lambda[r] += eta * (exp_feat[r] / total_weight - expectation[r]);
    }

    double dmax = 0.0;
    for (std::size_t r = 0; r < d; ++r)
      dmax = std::max(dmax, std::fabs(lambda[r] - prev_lambda[r]));
    prev_lambda = lambda;
    out.per_instance_iterations = t + 1;
    stable = dmax < 1e-7 ? stable + 1 : 0;
    if (stable >= 10) break;
  }

  // expected complete-data log-likelihood per instance at the fixed point
  std::vector<double> ls(n_worlds, 0.0);
  for (std::uint64_t code = 0; code < n_worlds; ++code)
    for (std::size_t r = 0; r < d; ++r)
      ls[code] += lambda[r] * feat[code][r];
  double zmax = -1e300;
  for (const auto v : ls) zmax = std::max(zmax, v);
  double z = 0.0;
  for (const auto v : ls) z += std::exp(v - zmax);
  const double log_z = zmax + std::log(z);

  double total_ll = 0.0, total_weight = 0.0;
  for (const auto& g : groups) {
    if (g.weight <= 0.0) continue;
    double gmax = -1e300;
    for (const auto code : g.codes) gmax = std::max(gmax, ls[code]);
    double gz = 0.0;
    for (const auto code : g.codes) gz += std::exp(ls[code] - gmax);
    double mean_ls = 0.0;
    for (const auto code : g.codes)
      mean_ls += std::exp(ls[code] - gmax) / gz * ls[code];
    total_ll += g.weight * (mean_ls - log_z);
    total_weight += g.weight;
  }
  out.loglik_per_instance = total_ll / total_weight;
  return out;
}

Outcome check_hidden_unit_run(std::uint64_t seed) {
  const auto fx = load_fixture();
  const auto cfg = hidden_fit_config(seed);
  const auto rep = run_sem(fx.model, fx.blocks, cfg);

  Outcome out;
  out.artifact = fit_report_to_json(rep).dump(2);

  if (!rep.converged || rep.iterations_used > kMaxSemIterations) {
    out.detail = "no stationarity within " + std::to_string(kMaxSemIterations) +
                 " iterations";
    return out;
  }

  // observed bits intact in the final completions
  for (std::size_t idx = 0; idx < rep.final_sample.instances.size(); ++idx) {
    const auto& inst = rep.final_sample.instances[idx];
    if (inst.record < 0) continue;
    const auto& rec = rep.final_sample.blocks[inst.block]
                          .records[static_cast<std::size_t>(inst.record)];
    for (std::size_t i = 0; i < rec.values.size(); ++i)
      if (rec.values[i].has_value() &&
          rep.final_sample.completions[idx].get(i) != *rec.values[i]) {
        out.detail = "an observed bit was altered";
        return out;
      }
  }

  // truncated block: finite extension, completions outside the condition
  const auto& trunc_block = rep.final_sample.blocks[1];
  if (!trunc_block.truncation || trunc_block.extension_count == 0 ||
      trunc_block.extension_count > 1000) {
    out.detail = "extension count " +
                 std::to_string(trunc_block.extension_count) +
                 " outside (0, 1000]";
    return out;
  }
  for (std::size_t idx = 0; idx < rep.final_sample.instances.size(); ++idx) {
    const auto& inst = rep.final_sample.instances[idx];
    if (inst.record >= 0 || inst.block != 1) continue;
    if (trunc_block.truncation->eval(rep.final_sample.completions[idx])) {
      out.detail = "an extension completion satisfies the truncation";
      return out;
    }
  }

  // stationary completed-data log-likelihood, averaged over fresh seeded
  // imputations at the final parameters to damp single-draw noise
  double ll = 0.0;
  std::size_t ll_draws = 20;
  auto sample = rep.final_sample;
  for (std::size_t draw = 0; draw < ll_draws; ++draw) {
    sample = e_step(rep.final_model, sample, cfg,
                    rep.iterations_used + 1 + draw);
    ll += completed_loglikelihood(rep.final_model, sample.completions) /
          static_cast<double>(sample.completions.size());
  }
  ll /= static_cast<double>(ll_draws);

  const auto oracle = exact_em_reference(fx, cfg);
  const double rel =
      std::fabs(ll - oracle.loglik_per_instance) /
      std::fabs(oracle.loglik_per_instance);

  out.pass = rel <= kLoglikRelTol;
  out.detail = "stationary in " + std::to_string(rep.iterations_used) +
               " iterations, loglik/instance " + fmt(ll) + " vs reference " +
               fmt(oracle.loglik_per_instance) + " (rel " + fmt(rel) + ", tol " +
               fmt(kLoglikRelTol) + "), extension " +
               std::to_string(trunc_block.extension_count);
  return out;
}

// ---------------------------------------------------------------- criterion 6

Outcome check_determinism(std::uint64_t seed_a, std::uint64_t seed_b,
                          const Outcome& run2a, const Outcome& run4a,
                          const Outcome& run5a) {
  Outcome out;
  const auto again2 = check_sampler(seed_a);
  const auto again4 = check_recovery(seed_a);
  const auto again5 = check_hidden_unit_run(seed_a);
  if (again2.artifact != run2a.artifact ||
      again4.artifact != run4a.artifact ||
      again5.artifact != run5a.artifact) {
    out.detail = "same seed did not reproduce byte-identical artifacts";
    return out;
  }

  const auto other2 = check_sampler(seed_b);
  const auto other3 = check_hardwired(seed_b);
  const auto other4 = check_recovery(seed_b);
  const auto other5 = check_hidden_unit_run(seed_b);
  if (other2.artifact == run2a.artifact) {
    out.detail = "different seed left the samples unchanged";
    return out;
  }
  if (!other2.pass || !other3.pass || !other4.pass || !other5.pass) {
    out.detail = std::string("a reseeded run failed: ") +
                 (!other2.pass ? "sampler " : "") +
                 (!other3.pass ? "hardwired " : "") +
                 (!other4.pass ? "recovery " : "") +
                 (!other5.pass ? "hidden-unit" : "");
    return out;
  }
  out.pass = true;
  out.detail = "same seed byte-identical, reseeded runs still pass";
  return out;
}

// ---------------------------------------------------------------- criterion 7

Outcome check_compare(std::uint64_t seed) {
  Outcome out;
  const std::string dir = "acc7_compare";
  const auto res = testsup::run_cli(
      PNET_CLI_PATH,
      "--seed " + std::to_string(seed) + " compare " +
          testsup::fixture_path("paass_s3.pnet") + " --out " + dir,
      "acc7");
  if (res.status != 0) {
    out.detail = "compare exited with " + std::to_string(res.status);
    return out;
  }
  const auto summary = nlohmann::json::parse(testsup::slurp(dir + "/compare.json"));
  if (summary["rules"].size() != 2) {
    out.detail = "expected two rule rows";
    return out;
  }
  double worst_soft = 0.0, worst_hard = 0.0;
  for (const auto& row : summary["rules"]) {
    const double soft = row["soft_abs_err"].get<double>();
    const double hard = row["hard_abs_err"].get<double>();
    if (!std::isfinite(soft) || !std::isfinite(hard)) {
      out.detail = "non-finite discrepancy";
      return out;
    }
    worst_soft = std::max(worst_soft, soft);
    worst_hard = std::max(worst_hard, hard);
  }
  const auto soft_dist = testsup::slurp(dir + "/soft_distribution.csv");
  const auto hard_dist = testsup::slurp(dir + "/hardwired_distribution.csv");
  const auto count_rows = [](const std::string& csv) {
    std::size_t rows = 0;
    for (const char c : csv) rows += c == '\n' ? 1 : 0;
    return rows;
  };
  if (count_rows(soft_dist) != 33 || count_rows(hard_dist) != 33) {
    out.detail = "distribution files incomplete";
    return out;
  }
  out.pass = worst_hard < kCompareHardTol;
  out.detail = "soft discrepancy " + fmt(worst_soft) + ", hardwired " +
               fmt(worst_hard) + " (tol " + fmt(kCompareHardTol) + ")";
  return out;
}

}  // namespace

int main() {
  const std::uint64_t seed_a = 20240817;
  const std::uint64_t seed_b = 424243;

  struct Row {
    int id;
    std::string name;
    Outcome outcome;
    double seconds;
  };
  std::vector<Row> rows;

  Outcome run2a, run4a, run5a;
  const auto timed = [&](int id, const std::string& name, auto&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    rows.push_back({id, name, o, seconds_since(t0)});
    return o;
  };

  timed(1, "gradient-check", [&] { return check_gradients(seed_a); });
  run2a = timed(2, "sampler-vs-enumeration", [&] { return check_sampler(seed_a); });
  timed(3, "hardwired-fit", [&] { return check_hardwired(seed_a); });
  run4a = timed(4, "em-recovery", [&] { return check_recovery(seed_a); });
  run5a = timed(5, "hidden-unit-end-to-end",
                [&] { return check_hidden_unit_run(seed_a); });
  timed(6, "determinism", [&] {
    return check_determinism(seed_a, seed_b, run2a, run4a, run5a);
  });
  timed(7, "soft-vs-hardwired", [&] { return check_compare(seed_a); });

  bool all = true;
  for (const auto& row : rows) {
    all = all && row.outcome.pass;
    std::printf("criterion %d %-24s %s  %s  [%.1fs]\n", row.id,
                row.name.c_str(), row.outcome.pass ? "PASS" : "FAIL",
                row.outcome.detail.c_str(), row.seconds);
  }
  std::printf("acceptance: %s\n", all ? "PASS" : "FAIL");
  return all ? 0 : 1;
}
