// Command-line front end: validate/fit/fit-exact/sample/query/compare and a
// gradient self-check. Exit codes: 0 success, 1 input diagnostics, 2
// numerical failure.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pnet/gibbs.hpp"
#include "pnet/io.hpp"
#include "pnet/netspec.hpp"
#include "pnet/sem.hpp"
#include "pnet/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::size_t default_enum_limit() {
  if (const char* env = std::getenv("PNET_ENUM_LIMIT")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return v;
  }
  return pnet::kDefaultEnumerationLimit;
}

std::uint64_t random_seed() {
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

int print_diagnostics(const std::string& path,
                      const std::vector<pnet::Diagnostic>& diags) {
  bool errors = false;
  for (const auto& d : diags) {
    std::cerr << path << ':' << d.line << ':' << d.col << ": "
              << (d.warning ? "warning" : "error") << " [" << d.code << "] "
              << d.message << '\n';
    errors = errors || !d.warning;
  }
  return errors ? 1 : 0;
}

struct LoadedSpec {
  pnet::NetworkSpec spec;
  pnet::CompiledNetwork compiled;
};

// Parses and compiles, printing diagnostics; nullopt means exit 1.
std::optional<LoadedSpec> load_spec(const std::string& path, bool soft) {
  const auto parsed = pnet::parse_spec(pnet::read_text_file(path));
  if (!parsed.ok()) {
    print_diagnostics(path, parsed.diagnostics);
    return std::nullopt;
  }
  print_diagnostics(path, parsed.diagnostics);
  auto compiled = pnet::compile_spec(*parsed.spec, soft);
  const int rc = print_diagnostics(path, compiled.diagnostics);
  if (rc != 0 || !compiled.ok()) return std::nullopt;
  return LoadedSpec{*parsed.spec, std::move(compiled)};
}

pnet::MaxEntModel load_model(const std::string& path) {
  return pnet::model_from_json(json::parse(pnet::read_text_file(path)));
}

void write_manifest(const fs::path& dir, pnet::RunManifest m) {
  m.version = PNET_VERSION;
  pnet::write_text_file((dir / "manifest.json").string(),
                        pnet::manifest_to_json(m).dump(2) + "\n");
}

std::vector<std::string> collect_argv(int argc, char** argv) {
  std::vector<std::string> out;
  out.reserve(static_cast<std::size_t>(argc));
  for (int i = 0; i < argc; ++i) out.emplace_back(argv[i]);
  return out;
}

// "x1=1,x2=0" -> clamp mask + values folded into the init state.
void parse_clamps(const std::string& text, const pnet::VariableTable& vars,
                  pnet::WorldState& init, std::vector<std::uint8_t>& mask) {
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    const std::string item = text.substr(pos, comma - pos);
    pos = comma + 1;
    if (item.empty()) continue;
    const std::size_t eq = item.find('=');
    if (eq == std::string::npos)
      throw pnet::Error("clamp '" + item + "' is not NAME=BIT");
    const std::string name = item.substr(0, eq);
    const std::string bit = item.substr(eq + 1);
    const auto idx = vars.find(name);
    if (!idx) throw pnet::Error("unknown clamp variable '" + name + "'");
    if (bit != "0" && bit != "1")
      throw pnet::Error("clamp value for '" + name + "' must be 0 or 1");
    init.set(*idx, bit == "1");
    mask[*idx] = 1;
  }
}

struct FitFlags {
  std::string m_step = "pseudo";
  pnet::FitConfig cfg;

  void attach(CLI::App* cmd) {
    cmd->add_option("--m-step", m_step, "M-step variant: pseudo, full-exact, full-mc")
        ->check(CLI::IsMember({"pseudo", "full-exact", "full-mc"}));
    cmd->add_option("--eta", cfg.step_size, "initial step size");
    cmd->add_option("--tau", cfg.step_decay, "step decay scale");
    cmd->add_option("--sweeps", cfg.e_step_sweeps, "Gibbs sweeps per E-step record");
    cmd->add_option("--grad-steps", cfg.gradient_steps_per_m, "gradient steps per M-step");
    cmd->add_option("--replication", cfg.replication_factor, "record replication factor");
    cmd->add_option("--max-iter", cfg.max_iterations, "iteration cap");
    cmd->add_option("--window", cfg.stationarity_window, "stationarity window");
    cmd->add_option("--tol", cfg.stationarity_tol, "stationarity tolerance");
    cmd->add_option("--mc-samples", cfg.mc_expectation_samples,
                    "samples per expectation for --m-step full-mc");
    cmd->add_option("--trace-stride", cfg.trace_stride, "lambda trace stride");
  }

  pnet::FitConfig resolve(std::uint64_t seed, std::size_t enum_limit,
                          std::size_t workers) const {
    pnet::FitConfig out = cfg;
    out.seed = seed;
    out.enumeration_limit = enum_limit;
    out.workers = workers;
    if (m_step == "full-exact") out.m_step = pnet::MStep::FullLikelihoodExact;
    else if (m_step == "full-mc") out.m_step = pnet::MStep::FullLikelihoodMc;
    else out.m_step = pnet::MStep::PseudoLikelihood;
    return out;
  }
};

double tv_over_visible(const pnet::MaxEntModel& a, const pnet::MaxEntModel& b,
                       std::size_t limit) {
  const auto ta = pnet::exact_distribution(a, limit);
  const auto tb = pnet::exact_distribution(b, limit);
  std::uint64_t visible_mask = 0;
  for (const auto& v : a.vars.all())
    if (!v.hidden) visible_mask |= 1ULL << v.index;
  std::map<std::uint64_t, double> pa, pb;
  for (std::uint64_t code = 0; code < ta.probabilities.size(); ++code) {
    pa[code & visible_mask] += ta.probabilities[code];
    pb[code & visible_mask] += tb.probabilities[code];
  }
  double tv = 0.0;
  for (const auto& [code, p] : pa) tv += std::fabs(p - pb[code]);
  return tv / 2.0;
}

int cmd_validate(const std::string& path) {
  const auto loaded = load_spec(path, false);
  if (!loaded) return 1;
  const auto& spec = loaded->spec;
  std::size_t hidden = 0;
  for (const auto& v : spec.variables.all()) hidden += v.hidden ? 1 : 0;
  std::cout << "variables: " << spec.variables.size() << " (" << hidden
            << " hidden)\nrules: " << spec.rules.size()
            << "\nlinks: " << spec.links.size()
            << "\ndata blocks: " << spec.data.size()
            << "\nevidence blocks: " << loaded->compiled.blocks.size() << '\n';
  return 0;
}

int cmd_fit(const std::string& path, const std::string& out_dir, bool soft,
            const FitFlags& flags, std::uint64_t seed, std::size_t enum_limit,
            std::size_t workers, const std::vector<std::string>& argv) {
  const auto loaded = load_spec(path, soft);
  if (!loaded) return 1;
  const auto cfg = flags.resolve(seed, enum_limit, workers);

  const auto report = pnet::run_sem(*loaded->compiled.model,
                                    loaded->compiled.blocks, cfg);

  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  pnet::write_text_file((dir / "report.json").string(),
                        pnet::fit_report_to_json(report).dump(2) + "\n");
  pnet::write_text_file((dir / "model.json").string(),
                        pnet::model_to_json(report.final_model).dump(2) + "\n");
  pnet::write_text_file((dir / "traces.csv").string(), pnet::traces_to_csv(report));
  pnet::write_text_file((dir / "lambda_trajectory.csv").string(),
                        pnet::lambda_trajectory_to_csv(report));
  pnet::write_text_file(
      (dir / "evidence.csv").string(),
      pnet::blocks_to_csv(report.final_model.vars, report.final_sample.blocks));

  pnet::RunManifest manifest;
  manifest.command = "fit";
  manifest.argv = argv;
  manifest.inputs = {path};
  manifest.outputs = {"report.json", "model.json", "traces.csv",
                      "lambda_trajectory.csv", "evidence.csv"};
  manifest.seed = seed;
  manifest.fit = cfg;
  write_manifest(dir, manifest);

  std::cout << "converged: " << (report.converged ? "yes" : "no")
            << "\niterations: " << report.iterations_used << '\n';
  if (!report.converged) {
    std::cerr << "fit stopped at the iteration cap before reaching stationarity\n";
    return 2;
  }
  return 0;
}

int cmd_fit_exact(const std::string& path, const std::string& out_dir,
                  std::uint64_t seed, std::size_t enum_limit,
                  const std::vector<std::string>& argv) {
  const auto loaded = load_spec(path, false);
  if (!loaded) return 1;
  const auto& model = *loaded->compiled.model;

  std::vector<pnet::ConstraintTerm> targeted;
  std::size_t dropped = 0;
  for (const auto& t : model.terms) {
    if (t.target().has_value()) targeted.push_back(t);
    else ++dropped;
  }
  if (dropped > 0)
    std::cerr << "dropping " << dropped
              << " link term(s): links carry no expectation target\n";

  pnet::ExactFitConfig cfg;
  cfg.enumeration_limit = enum_limit;
  const auto [fitted, report] = pnet::fit_maxent_exact(model.vars, targeted, cfg);

  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  pnet::write_text_file((dir / "model.json").string(),
                        pnet::model_to_json(fitted).dump(2) + "\n");
  json rep{{"format", "pnet-exact-fit-report"},
           {"converged", report.converged},
           {"iterations", report.iterations},
           {"max_residual", report.max_residual},
           {"residuals", report.residuals},
           {"dropped_link_terms", dropped}};
  pnet::write_text_file((dir / "report.json").string(), rep.dump(2) + "\n");

  pnet::RunManifest manifest;
  manifest.command = "fit-exact";
  manifest.argv = argv;
  manifest.inputs = {path};
  manifest.outputs = {"model.json", "report.json"};
  manifest.seed = seed;
  write_manifest(dir, manifest);

  std::cout << "max residual: " << g17(report.max_residual) << '\n';
  if (!report.converged) {
    std::cerr << "constraints could not be met exactly; best effort written\n";
    return 2;
  }
  return 0;
}

int cmd_sample(const std::string& model_path, const std::string& out_dir,
               std::size_t n, std::size_t burn_in, std::size_t thinning,
               const std::string& clamp, std::uint64_t seed,
               const std::vector<std::string>& argv) {
  const auto model = load_model(model_path);
  pnet::WorldState init(model.k());
  std::vector<std::uint8_t> mask(model.k(), 0);
  if (!clamp.empty()) parse_clamps(clamp, model.vars, init, mask);

  const auto states =
      pnet::run_chain(model, init, mask, n, burn_in, thinning, seed);

  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  pnet::write_text_file((dir / "samples.csv").string(),
                        pnet::samples_to_csv(model.vars, states));

  pnet::RunManifest manifest;
  manifest.command = "sample";
  manifest.argv = argv;
  manifest.inputs = {model_path};
  manifest.outputs = {"samples.csv"};
  manifest.seed = seed;
  write_manifest(dir, manifest);
  std::cout << "samples: " << states.size() << '\n';
  return 0;
}

int cmd_query(const std::string& model_path, const std::string& expr,
              const std::string& given_expr, bool mc, std::size_t mc_samples,
              std::uint64_t seed, std::size_t enum_limit) {
  const auto model = load_model(model_path);
  std::string err;
  const auto c = pnet::parse_literal_conjunction(expr, model.vars, &err);
  if (!c) {
    std::cerr << "query: " << err << '\n';
    return 1;
  }
  std::optional<pnet::Proposition> given;
  if (!given_expr.empty()) {
    given = pnet::parse_literal_conjunction(given_expr, model.vars, &err);
    if (!given->valid()) {
      std::cerr << "query: " << err << '\n';
      return 1;
    }
  }

  double p = 0.0;
  if (mc) {
    const auto states = pnet::run_chain(model, pnet::WorldState(model.k()), {},
                                        mc_samples, /*burn_in=*/1000,
                                        /*thinning=*/0, seed);
    std::size_t hit = 0, cond = 0;
    for (const auto& x : states) {
      const bool g = !given || given->eval(x);
      if (!g) continue;
      ++cond;
      if (c->eval(x)) ++hit;
    }
    if (cond == 0) {
      std::cerr << "conditioning event never sampled\n";
      return 2;
    }
    p = static_cast<double>(hit) / static_cast<double>(cond);
  } else {
    p = pnet::query_probability(model, *c, given, enum_limit);
  }
  std::cout << g17(p) << '\n';
  return 0;
}

int cmd_compare(const std::string& path, const std::string& out_dir,
                const FitFlags& flags, std::uint64_t seed,
                std::size_t enum_limit, std::size_t workers,
                const std::vector<std::string>& argv) {
  const auto parsed = pnet::parse_spec(pnet::read_text_file(path));
  if (!parsed.ok()) return print_diagnostics(path, parsed.diagnostics), 1;
  const auto& spec = *parsed.spec;
  if (spec.rules.empty()) {
    std::cerr << "compare needs at least one rule\n";
    return 1;
  }

  // soft: rules act as evidence only, absorbed by the link structure
  auto soft = pnet::compile_spec(spec, true);
  if (print_diagnostics(path, soft.diagnostics) != 0 || !soft.ok()) return 1;
  const auto cfg = flags.resolve(seed, enum_limit, workers);
  const auto soft_report = pnet::run_sem(*soft.model, soft.blocks, cfg);
  const auto& soft_model = soft_report.final_model;

  // hardwired: the rule constraints fitted exactly, nothing learned
  std::vector<pnet::ConstraintTerm> rule_terms;
  for (const auto& r : spec.rules) {
    rule_terms.push_back(
        r.conditional
            ? pnet::ConstraintTerm::conditional(pnet::Proposition::literal(r.c),
                                                pnet::Proposition::conjunction(r.b),
                                                r.q)
            : pnet::ConstraintTerm::marginal(pnet::Proposition::literal(r.c), r.q));
  }
  pnet::ExactFitConfig exact_cfg;
  exact_cfg.enumeration_limit = enum_limit;
  const auto [hard_model, hard_report] =
      pnet::fit_maxent_exact(spec.variables, rule_terms, exact_cfg);

  std::ostringstream table;
  table << "rule,q_observed,p_soft,p_hard,soft_abs_err,hard_abs_err\n";
  json rule_rows = json::array();
  for (std::size_t i = 0; i < spec.rules.size(); ++i) {
    const auto& r = spec.rules[i];
    const auto c = pnet::Proposition::literal(r.c);
    std::optional<pnet::Proposition> given;
    if (r.conditional) given = pnet::Proposition::conjunction(r.b);
    const double p_soft = pnet::query_probability(soft_model, c, given, enum_limit);
    const double p_hard = pnet::query_probability(hard_model, c, given, enum_limit);
    table << (i + 1) << ',' << g17(r.q) << ',' << g17(p_soft) << ','
          << g17(p_hard) << ',' << g17(std::fabs(p_soft - r.q)) << ','
          << g17(std::fabs(p_hard - r.q)) << '\n';
    rule_rows.push_back({{"rule", i + 1},
                         {"q_observed", r.q},
                         {"p_soft", p_soft},
                         {"p_hard", p_hard},
                         {"soft_abs_err", std::fabs(p_soft - r.q)},
                         {"hard_abs_err", std::fabs(p_hard - r.q)}});
  }
  const double tv = tv_over_visible(soft_model, hard_model, enum_limit);

  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  pnet::write_text_file((dir / "compare.csv").string(), table.str());
  json summary{{"format", "pnet-compare"},
               {"rules", rule_rows},
               {"tv_visible", tv},
               {"soft_converged", soft_report.converged},
               {"soft_iterations", soft_report.iterations_used},
               {"hard_max_residual", hard_report.max_residual},
               {"hard_converged", hard_report.converged}};
  pnet::write_text_file((dir / "compare.json").string(), summary.dump(2) + "\n");
  pnet::write_text_file((dir / "soft_model.json").string(),
                        pnet::model_to_json(soft_model).dump(2) + "\n");
  pnet::write_text_file((dir / "hardwired_model.json").string(),
                        pnet::model_to_json(hard_model).dump(2) + "\n");
  pnet::write_text_file(
      (dir / "soft_distribution.csv").string(),
      pnet::exact_table_to_csv(soft_model.vars,
                               pnet::exact_distribution(soft_model, enum_limit)));
  pnet::write_text_file(
      (dir / "hardwired_distribution.csv").string(),
      pnet::exact_table_to_csv(hard_model.vars,
                               pnet::exact_distribution(hard_model, enum_limit)));

  pnet::RunManifest manifest;
  manifest.command = "compare";
  manifest.argv = argv;
  manifest.inputs = {path};
  manifest.outputs = {"compare.csv", "compare.json", "soft_model.json",
                      "hardwired_model.json", "soft_distribution.csv",
                      "hardwired_distribution.csv"};
  manifest.seed = seed;
  manifest.fit = cfg;
  write_manifest(dir, manifest);

  std::cout << table.str() << "tv_visible," << g17(tv) << '\n';
  return 0;
}

// Random small instances for the gradient self-check.
struct GradInstance {
  pnet::MaxEntModel model;
  std::vector<pnet::WorldState> completions;
};

GradInstance random_instance(pnet::RngStream& rng) {
  const std::size_t k = 2 + rng.below(5);
  std::vector<pnet::AtomicVariable> vars;
  for (std::size_t i = 0; i < k; ++i)
    vars.push_back({i, "v" + std::to_string(i), false});
  pnet::VariableTable table(std::move(vars));

  const std::size_t d = 1 + rng.below(8);
  std::vector<pnet::ConstraintTerm> terms;
  for (std::size_t r = 0; r < d; ++r) {
    const auto roll = rng.below(3);
    if (roll == 0) {
      const pnet::Literal lit{rng.below(k), rng.bernoulli(0.5)};
      terms.push_back(pnet::ConstraintTerm::marginal(
          pnet::Proposition::literal(lit), 0.1 + 0.8 * rng.next_double()));
    } else if (roll == 1) {
      const pnet::Literal c{rng.below(k), rng.bernoulli(0.5)};
      std::vector<pnet::Literal> b{{rng.below(k), rng.bernoulli(0.5)}};
      if (rng.bernoulli(0.5)) b.push_back({rng.below(k), rng.bernoulli(0.5)});
      terms.push_back(pnet::ConstraintTerm::conditional(
          pnet::Proposition::literal(c), pnet::Proposition::conjunction(b),
          0.1 + 0.8 * rng.next_double()));
    } else {
      const std::size_t i = rng.below(k);
      std::size_t j = rng.below(k);
      while (j == i) j = rng.below(k);
      terms.push_back(pnet::ConstraintTerm::link(i, j));
    }
  }
  std::vector<double> lambda(d);
  for (auto& v : lambda) v = 2.0 * rng.next_double() - 1.0;

  GradInstance out{pnet::MaxEntModel(std::move(table), std::move(terms),
                                     std::move(lambda)),
                   {}};
  const std::size_t n = 5 + rng.below(26);
  for (std::size_t s = 0; s < n; ++s) {
    pnet::WorldState w(k);
    for (std::size_t i = 0; i < k; ++i) w.set(i, rng.bernoulli(0.5));
    out.completions.push_back(std::move(w));
  }
  return out;
}

double max_rel_err(const std::vector<double>& analytic,
                   const std::vector<double>& fd) {
  double worst = 0.0;
  for (std::size_t r = 0; r < analytic.size(); ++r) {
    const double scale =
        std::max({1.0, std::fabs(analytic[r]), std::fabs(fd[r])});
    worst = std::max(worst, std::fabs(analytic[r] - fd[r]) / scale);
  }
  return worst;
}

int cmd_gradcheck(std::size_t instances, std::uint64_t seed) {
  constexpr double kH = 1e-4;
  double worst_pseudo = 0.0, worst_full = 0.0;
  for (std::size_t inst = 0; inst < instances; ++inst) {
    auto rng = pnet::RngStream::derive(seed, "gradcheck", inst);
    const auto gi = random_instance(rng);

    const auto center = gi.model.lambda;
    std::vector<double> fd_pseudo(center.size()), fd_full(center.size());
    for (std::size_t r = 0; r < center.size(); ++r) {
      auto hi = center, lo = center;
      hi[r] += kH;
      lo[r] -= kH;
      const auto mh = gi.model.with_lambda(hi);
      const auto ml = gi.model.with_lambda(lo);
      fd_pseudo[r] = (pnet::pseudo_loglikelihood(mh, gi.completions) -
                      pnet::pseudo_loglikelihood(ml, gi.completions)) /
                     (2 * kH);
      fd_full[r] = (pnet::completed_loglikelihood(mh, gi.completions) -
                    pnet::completed_loglikelihood(ml, gi.completions)) /
                   (2 * kH);
    }
    worst_pseudo = std::max(
        worst_pseudo,
        max_rel_err(pnet::pseudolikelihood_gradient(gi.model, gi.completions),
                    fd_pseudo));
    worst_full = std::max(
        worst_full,
        max_rel_err(pnet::fulllikelihood_gradient(gi.model, gi.completions),
                    fd_full));
  }
  std::cout << "pseudo_max_rel_err," << g17(worst_pseudo) << '\n'
            << "full_max_rel_err," << g17(worst_full) << '\n';
  if (worst_pseudo > 1e-5 || worst_full > 1e-6) {
    std::cerr << "gradient check failed\n";
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"maximum-entropy rule network toolkit"};
  app.require_subcommand(1);
  const auto full_argv = collect_argv(argc, argv);

  std::uint64_t seed = 0;
  bool seed_given = false;
  std::size_t enum_limit = default_enum_limit();
  std::size_t workers = 1;
  app.add_option("--seed", seed, "RNG seed (random when omitted, recorded in manifests)")
      ->each([&](const std::string&) { seed_given = true; });
  app.add_option("--enum-limit", enum_limit,
                 "max variables for exact enumeration (env PNET_ENUM_LIMIT)");
  app.add_option("--workers", workers, "parallel workers for the E-step");

  std::string spec_path, out_dir, model_path, expr, given_expr, clamp;
  bool soft = false, mc = false;
  std::size_t n_samples = 1000, burn_in = 1000, thinning = 0;
  std::size_t mc_samples = 50000, instances = 20;
  FitFlags fit_flags, compare_flags;

  auto* validate = app.add_subcommand("validate", "parse a network file and report diagnostics");
  validate->add_option("spec", spec_path, "network file")->required();

  auto* fit = app.add_subcommand("fit", "learn parameters by stochastic EM");
  fit->add_option("spec", spec_path, "network file")->required();
  fit->add_option("--out", out_dir, "artifact directory")->required();
  fit->add_flag("--soft", soft, "drop rule terms, keep rules as evidence");
  fit_flags.attach(fit);

  auto* fit_exact = app.add_subcommand(
      "fit-exact", "fit rule constraints exactly by enumeration");
  fit_exact->add_option("spec", spec_path, "network file")->required();
  fit_exact->add_option("--out", out_dir, "artifact directory")->required();

  auto* sample = app.add_subcommand("sample", "draw Gibbs samples from a fitted model");
  sample->add_option("model", model_path, "model JSON")->required();
  sample->add_option("--out", out_dir, "artifact directory")->required();
  sample->add_option("--n", n_samples, "number of samples");
  sample->add_option("--burn-in", burn_in, "burn-in sweeps");
  sample->add_option("--thinning", thinning, "sweeps skipped between samples");
  sample->add_option("--clamp", clamp, "held-fixed bits, e.g. x1=1,x2=0");

  auto* query = app.add_subcommand("query", "probability of a literal conjunction");
  query->add_option("model", model_path, "model JSON")->required();
  query->add_option("expr", expr, "literal conjunction, e.g. \"x1 and !x2\"")->required();
  query->add_option("--given", given_expr, "conditioning conjunction");
  query->add_flag("--mc", mc, "Monte-Carlo estimate instead of enumeration");
  query->add_option("--mc-samples", mc_samples, "samples for --mc");

  auto* compare = app.add_subcommand(
      "compare", "soft (learned) versus hardwired (exactly fitted) rules");
  compare->add_option("spec", spec_path, "network file")->required();
  compare->add_option("--out", out_dir, "artifact directory")->required();
  compare_flags.attach(compare);

  auto* gradcheck = app.add_subcommand(
      "gradcheck", "check analytic gradients against finite differences");
  gradcheck->add_option("--instances", instances, "random instances to try");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  if (!seed_given) {
    seed = random_seed();
    std::cerr << "seed not given; using " << seed << '\n';
  }

  try {
    if (validate->parsed()) return cmd_validate(spec_path);
    if (fit->parsed())
      return cmd_fit(spec_path, out_dir, soft, fit_flags, seed, enum_limit,
                     workers, full_argv);
    if (fit_exact->parsed())
      return cmd_fit_exact(spec_path, out_dir, seed, enum_limit, full_argv);
    if (sample->parsed())
      return cmd_sample(model_path, out_dir, n_samples, burn_in, thinning,
                        clamp, seed, full_argv);
    if (query->parsed())
      return cmd_query(model_path, expr, given_expr, mc, mc_samples, seed,
                       enum_limit);
    if (compare->parsed())
      return cmd_compare(spec_path, out_dir, compare_flags, seed, enum_limit,
                         workers, full_argv);
    if (gradcheck->parsed()) return cmd_gradcheck(instances, seed);
  } catch (const pnet::DegenerateConditionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const pnet::CapacityError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const pnet::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
