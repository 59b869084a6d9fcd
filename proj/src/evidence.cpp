#include "pnet/evidence.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace pnet {

namespace {

std::uint64_t round_half_up(double x) {
  return static_cast<std::uint64_t>(std::floor(x + 0.5));
}

void set_literal(PartialBits& values, const Literal& lit, bool satisfied) {
  const bool bit = lit.positive == satisfied;
  auto& slot = values[lit.var];
  if (slot.has_value() && *slot != bit)
    throw EvidenceError("rule literals pin a variable to contradictory values");
  slot = bit;
}

std::vector<Literal> literals_of(const Proposition& p, const char* what) {
  auto lits = p.as_literal_conjunction();
  if (!lits)
    throw EvidenceError(std::string(what) +
                        " must be a conjunction of literals to determine record bits");
  return *lits;
}

void check_visible(const VariableTable& vars, std::size_t index) {
  if (index >= vars.size()) throw EvidenceError("variable index out of range");
  if (vars[index].hidden)
    throw EvidenceError("hidden variable '" + vars[index].name +
                        "' cannot carry observed bits");
}

}  // namespace

std::uint64_t PooledSample::total_size() const {
  std::uint64_t total = 0;
  for (const auto& b : blocks) total += b.n + b.extension_count;
  return total;
}

SampleBlock materialize_rule_sample(const VariableTable& vars,
                                    const ConstraintTerm& rule,
                                    double q_observed, std::uint64_t n,
                                    std::string id) {
  if (rule.kind != ConstraintTerm::Kind::Marginal &&
      rule.kind != ConstraintTerm::Kind::Conditional)
    throw EvidenceError("only marginal and conditional rules expand to samples");
  if (n < 1) throw EvidenceError("rule sample size must be at least 1");
  if (!(q_observed >= 0.0 && q_observed <= 1.0))
    throw EvidenceError("observed probability must lie in [0,1]");

  const std::uint64_t positives = round_half_up(q_observed * static_cast<double>(n));
  const double achieved = static_cast<double>(positives) / static_cast<double>(n);
  if (std::fabs(q_observed - achieved) * 2.0 * static_cast<double>(n) > 1.0 + 1e-9)
    throw EvidenceError("observed probability " + std::to_string(q_observed) +
                        " is not representable with n=" + std::to_string(n) +
                        " records; increase n");

  const auto c_lits = literals_of(rule.c, "rule consequent");
  for (const auto& l : c_lits) check_visible(vars, l.var);
  std::vector<Literal> b_lits;
  if (rule.kind == ConstraintTerm::Kind::Conditional) {
    b_lits = literals_of(rule.b, "rule condition");
    for (const auto& l : b_lits) check_visible(vars, l.var);
  }

  const std::uint64_t negatives = n - positives;
  if (negatives > 0 && c_lits.size() != 1)
    throw EvidenceError("negated records need a single-literal consequent");

  SampleBlock block;
  block.id = std::move(id);
  block.kind = rule.kind == ConstraintTerm::Kind::Marginal
                   ? BlockKind::MarginalRule
                   : BlockKind::ConditionalRule;
  block.width = vars.size();
  block.n = n;
  block.q_observed = q_observed;
  if (rule.kind == ConstraintTerm::Kind::Conditional) block.truncation = rule.b;

  auto make_record = [&](bool c_satisfied, std::uint64_t multiplicity) {
    EvidenceRecord rec;
    rec.values.assign(vars.size(), std::nullopt);
    rec.multiplicity = multiplicity;
    for (const auto& l : b_lits) set_literal(rec.values, l, true);
    for (const auto& l : c_lits) set_literal(rec.values, l, c_satisfied);
    block.records.push_back(std::move(rec));
  };
  if (positives > 0) make_record(true, positives);
  if (negatives > 0) make_record(false, negatives);
  return block;
}

SampleBlock materialize_data_sample(
    const VariableTable& vars, const std::vector<std::size_t>& visible_vars,
    const std::vector<std::pair<std::vector<std::uint8_t>, std::uint64_t>>& counts,
    std::string id, std::size_t* merged_duplicates) {
  for (std::size_t v : visible_vars) check_visible(vars, v);
  {
    auto sorted = visible_vars;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw EvidenceError("duplicate variable in data column list");
  }
  if (counts.empty()) throw EvidenceError("data block has no tuples");

  SampleBlock block;
  block.id = std::move(id);
  block.kind = BlockKind::Associative;
  block.width = vars.size();

  std::size_t merged = 0;
  std::map<std::vector<std::uint8_t>, std::size_t> seen;  // tuple -> record slot
  for (const auto& [tuple, count] : counts) {
    if (tuple.size() != visible_vars.size())
      throw EvidenceError("tuple width does not match the data column list");
    if (count < 1) throw EvidenceError("tuple counts must be at least 1");
    for (auto bit : tuple)
      if (bit > 1) throw EvidenceError("tuple bits must be 0 or 1");

    if (auto it = seen.find(tuple); it != seen.end()) {
      block.records[it->second].multiplicity += count;
      ++merged;
      continue;
    }
    EvidenceRecord rec;
    rec.values.assign(vars.size(), std::nullopt);
    rec.multiplicity = count;
    for (std::size_t i = 0; i < tuple.size(); ++i)
      rec.values[visible_vars[i]] = tuple[i] != 0;
    seen.emplace(tuple, block.records.size());
    block.records.push_back(std::move(rec));
  }
  for (const auto& rec : block.records) block.n += rec.multiplicity;
  if (merged_duplicates != nullptr) *merged_duplicates = merged;
  return block;
}

PooledSample pool(const std::vector<SampleBlock>& blocks) {
  if (blocks.empty()) throw EvidenceError("cannot pool an empty block list");
  const std::size_t width = blocks.front().width;
  for (const auto& b : blocks) {
    if (b.width != width)
      throw EvidenceError("blocks were built over different variable tables");
    std::uint64_t total = 0;
    for (const auto& rec : b.records) {
      if (rec.values.size() != width)
        throw EvidenceError("record width mismatch in block " + b.id);
      if (rec.multiplicity < 1)
        throw EvidenceError("record multiplicity must be at least 1");
      total += rec.multiplicity;
    }
    if (total != b.n)
      throw EvidenceError("record multiplicities of block " + b.id +
                          " do not add up to its size");
  }
  PooledSample sample;
  sample.blocks = blocks;
  return sample;
}

SampleBlock estimate_truncated_extension(const SampleBlock& block,
                                         const std::vector<WorldState>& completions) {
  if (!block.truncation)
    throw EvidenceError("block " + block.id + " has no truncation condition");
  if (completions.empty())
    throw EvidenceError("extension estimate needs at least one completion");

  std::uint64_t satisfying = 0;
  for (const auto& w : completions)
    if (block.truncation->eval(w)) ++satisfying;

  const double p_b = (1.0 + static_cast<double>(satisfying)) /
                     (2.0 + static_cast<double>(completions.size()));
  SampleBlock out = block;
  out.extension_count =
      round_half_up(static_cast<double>(block.n) * (1.0 - p_b) / p_b);
  return out;
}

}  // namespace pnet
