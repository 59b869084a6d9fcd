#include "pnet/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace pnet {

namespace {

using nlohmann::json;

std::string g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

const char* mstep_name(MStep m) {
  switch (m) {
    case MStep::PseudoLikelihood: return "pseudo";
    case MStep::FullLikelihoodExact: return "full-exact";
    case MStep::FullLikelihoodMc: return "full-mc";
  }
  return "pseudo";
}

MStep mstep_from_name(const std::string& s) {
  if (s == "pseudo") return MStep::PseudoLikelihood;
  if (s == "full-exact") return MStep::FullLikelihoodExact;
  if (s == "full-mc") return MStep::FullLikelihoodMc;
  throw Error("unknown m-step variant '" + s + "'");
}

std::size_t var_index(const VariableTable& vars, const std::string& name) {
  auto idx = vars.find(name);
  if (!idx) throw ModelError("unknown variable '" + name + "' in document");
  return *idx;
}

}  // namespace

json proposition_to_json(const Proposition& p, const VariableTable& vars) {
  switch (p.kind()) {
    case Proposition::Kind::Var:
      return json{{"var", vars[p.var_index()].name}};
    case Proposition::Kind::Not:
      return json{{"op", "not"}, {"arg", proposition_to_json(p.child(), vars)}};
    case Proposition::Kind::And:
    case Proposition::Kind::Or: {
      const bool is_and = p.kind() == Proposition::Kind::And;
      json args = json::array();
      // flatten chains of the same connective
      const auto collect = [&](auto&& self, const Proposition& q) -> void {
        if (q.kind() == p.kind()) {
          self(self, q.left());
          self(self, q.right());
        } else {
          args.push_back(proposition_to_json(q, vars));
        }
      };
      collect(collect, p);
      return json{{"op", is_and ? "and" : "or"}, {"args", args}};
    }
  }
  throw ModelError("invalid proposition");
}

Proposition proposition_from_json(const json& j, const VariableTable& vars) {
  if (j.contains("var"))
    return Proposition::var(var_index(vars, j.at("var").get<std::string>()));
  const auto op = j.at("op").get<std::string>();
  if (op == "not") return !proposition_from_json(j.at("arg"), vars);
  const auto& args = j.at("args");
  if (!args.is_array() || args.empty())
    throw ModelError("'" + op + "' needs a non-empty argument array");
  Proposition acc = proposition_from_json(args[0], vars);
  for (std::size_t i = 1; i < args.size(); ++i) {
    const Proposition next = proposition_from_json(args[i], vars);
    acc = op == "and" ? (acc && next)
        : op == "or"  ? (acc || next)
                      : throw ModelError("unknown connective '" + op + "'");
  }
  return acc;
}

json model_to_json(const MaxEntModel& m) {
  json variables = json::array();
  for (const auto& v : m.vars.all())
    variables.push_back({{"name", v.name}, {"hidden", v.hidden}});

  json terms = json::array();
  for (const auto& t : m.terms) {
    switch (t.kind) {
      case ConstraintTerm::Kind::Marginal:
        terms.push_back({{"kind", "marginal"},
                         {"c", proposition_to_json(t.c, m.vars)},
                         {"q", t.q}});
        break;
      case ConstraintTerm::Kind::Conditional:
        terms.push_back({{"kind", "conditional"},
                         {"c", proposition_to_json(t.c, m.vars)},
                         {"b", proposition_to_json(t.b, m.vars)},
                         {"q", t.q}});
        break;
      case ConstraintTerm::Kind::Link:
        terms.push_back({{"kind", "link"},
                         {"i", m.vars[t.i].name},
                         {"j", m.vars[t.j].name}});
        break;
    }
  }
  return json{{"format", "pnet-model"},
              {"variables", variables},
              {"terms", terms},
              {"lambda", m.lambda}};
}

MaxEntModel model_from_json(const json& j) {
  std::vector<AtomicVariable> vars;
  for (const auto& v : j.at("variables")) {
    vars.push_back({vars.size(), v.at("name").get<std::string>(),
                    v.value("hidden", false)});
  }
  VariableTable table(std::move(vars));

  std::vector<ConstraintTerm> terms;
  for (const auto& t : j.at("terms")) {
    const auto kind = t.at("kind").get<std::string>();
    if (kind == "marginal") {
      terms.push_back(ConstraintTerm::marginal(
          proposition_from_json(t.at("c"), table), t.at("q").get<double>()));
    } else if (kind == "conditional") {
      terms.push_back(ConstraintTerm::conditional(
          proposition_from_json(t.at("c"), table),
          proposition_from_json(t.at("b"), table), t.at("q").get<double>()));
    } else if (kind == "link") {
      terms.push_back(ConstraintTerm::link(
          var_index(table, t.at("i").get<std::string>()),
          var_index(table, t.at("j").get<std::string>())));
    } else {
      throw ModelError("unknown term kind '" + kind + "'");
    }
  }
  std::vector<double> lambda;
  if (j.contains("lambda")) lambda = j.at("lambda").get<std::vector<double>>();
  return MaxEntModel(std::move(table), std::move(terms), std::move(lambda));
}

json fit_config_to_json(const FitConfig& cfg) {
  return json{{"seed", cfg.seed},
              {"m_step", mstep_name(cfg.m_step)},
              {"step_size", cfg.step_size},
              {"step_decay", cfg.step_decay},
              {"e_step_sweeps", cfg.e_step_sweeps},
              {"gradient_steps_per_m", cfg.gradient_steps_per_m},
              {"replication_factor", cfg.replication_factor},
              {"max_iterations", cfg.max_iterations},
              {"stationarity_window", cfg.stationarity_window},
              {"stationarity_tol", cfg.stationarity_tol},
              {"mc_expectation_samples", cfg.mc_expectation_samples},
              {"enumeration_limit", cfg.enumeration_limit},
              {"workers", cfg.workers},
              {"trace_stride", cfg.trace_stride}};
}

FitConfig fit_config_from_json(const json& j) {
  FitConfig cfg;
  cfg.seed = j.value("seed", cfg.seed);
  cfg.m_step = mstep_from_name(j.value("m_step", std::string("pseudo")));
  cfg.step_size = j.value("step_size", cfg.step_size);
  cfg.step_decay = j.value("step_decay", cfg.step_decay);
  cfg.e_step_sweeps = j.value("e_step_sweeps", cfg.e_step_sweeps);
  cfg.gradient_steps_per_m = j.value("gradient_steps_per_m", cfg.gradient_steps_per_m);
  cfg.replication_factor = j.value("replication_factor", cfg.replication_factor);
  cfg.max_iterations = j.value("max_iterations", cfg.max_iterations);
  cfg.stationarity_window = j.value("stationarity_window", cfg.stationarity_window);
  cfg.stationarity_tol = j.value("stationarity_tol", cfg.stationarity_tol);
  cfg.mc_expectation_samples = j.value("mc_expectation_samples", cfg.mc_expectation_samples);
  cfg.enumeration_limit = j.value("enumeration_limit", cfg.enumeration_limit);
  cfg.workers = j.value("workers", cfg.workers);
  cfg.trace_stride = j.value("trace_stride", cfg.trace_stride);
  return cfg;
}

json fit_report_to_json(const FitReport& rep) {
  return json{{"format", "pnet-fit-report"},
              {"seed", rep.seed},
              {"converged", rep.converged},
              {"iterations_used", rep.iterations_used},
              {"exp_clamped", rep.exp_clamped},
              {"final_lambda", rep.final_model.lambda},
              {"model", model_to_json(rep.final_model)},
              {"trajectory_iterations", rep.trajectory_iterations},
              {"lambda_trajectory", rep.lambda_trajectory},
              {"completed_loglik_trace", rep.completed_loglik_trace},
              {"max_dlambda_trace", rep.max_dlambda_trace}};
}

json manifest_to_json(const RunManifest& m) {
  json j{{"format", "pnet-run-manifest"},
         {"command", m.command},
         {"argv", m.argv},
         {"inputs", m.inputs},
         {"outputs", m.outputs},
         {"seed", m.seed},
         {"version", m.version}};
  if (m.fit) j["fit_config"] = fit_config_to_json(*m.fit);
  return j;
}

std::string samples_to_csv(const VariableTable& vars,
                           const std::vector<WorldState>& states) {
  std::ostringstream out;
  for (std::size_t i = 0; i < vars.size(); ++i)
    out << (i > 0 ? "," : "") << vars[i].name;
  out << '\n';
  for (const auto& s : states) {
    for (std::size_t i = 0; i < vars.size(); ++i)
      out << (i > 0 ? "," : "") << (s.get(i) ? '1' : '0');
    out << '\n';
  }
  return out.str();
}

std::string exact_table_to_csv(const VariableTable& vars, const ExactTable& table) {
  std::ostringstream out;
  for (std::size_t i = 0; i < vars.size(); ++i)
    out << (i > 0 ? "," : "") << vars[i].name;
  out << ",probability\n";
  for (std::uint64_t code = 0; code < table.probabilities.size(); ++code) {
    const WorldState w = WorldState::from_code(table.k, code);
    for (std::size_t i = 0; i < vars.size(); ++i)
      out << (i > 0 ? "," : "") << (w.get(i) ? '1' : '0');
    out << ',' << g17(table.probabilities[code]) << '\n';
  }
  return out.str();
}

std::string blocks_to_csv(const VariableTable& vars,
                          const std::vector<SampleBlock>& blocks) {
  std::ostringstream out;
  out << "block,multiplicity";
  for (const auto& v : vars.all()) out << ',' << v.name;
  out << '\n';
  for (const auto& b : blocks) {
    for (const auto& rec : b.records) {
      out << b.id << ',' << rec.multiplicity;
      for (std::size_t i = 0; i < vars.size(); ++i) {
        out << ',';
        if (rec.values[i].has_value())
          out << (*rec.values[i] ? '1' : '0');
        else
          out << '?';
      }
      out << '\n';
    }
    if (b.extension_count > 0) {
      out << b.id << ',' << b.extension_count;
      for (std::size_t i = 0; i < vars.size(); ++i) out << ",?";
      out << '\n';
    }
  }
  return out.str();
}

std::string traces_to_csv(const FitReport& rep) {
  std::ostringstream out;
  out << "iteration,max_dlambda,completed_loglik\n";
  for (std::size_t t = 0; t < rep.max_dlambda_trace.size(); ++t) {
    out << (t + 1) << ',' << g17(rep.max_dlambda_trace[t]) << ','
        << g17(rep.completed_loglik_trace[t]) << '\n';
  }
  return out.str();
}

std::string lambda_trajectory_to_csv(const FitReport& rep) {
  std::ostringstream out;
  out << "iteration";
  const std::size_t d =
      rep.lambda_trajectory.empty() ? 0 : rep.lambda_trajectory.front().size();
  for (std::size_t r = 0; r < d; ++r) out << ",lambda" << r;
  out << '\n';
  for (std::size_t row = 0; row < rep.lambda_trajectory.size(); ++row) {
    out << rep.trajectory_iterations[row];
    for (double v : rep.lambda_trajectory[row]) out << ',' << g17(v);
    out << '\n';
  }
  return out.str();
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << content;
  out.flush();
  if (!out) throw Error("failed writing '" + path + "'");
}

}  // namespace pnet
