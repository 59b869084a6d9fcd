#pragma once

// Rules and associative data expressed as samples with missing values, plus
// the pooling of all blocks into one comprehensive sample.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pnet/core.hpp"

namespace pnet {

struct EvidenceRecord {
  PartialBits values;               // length k, nullopt = missing
  std::uint64_t multiplicity = 1;
};

enum class BlockKind { MarginalRule, ConditionalRule, Associative };

// One evidence block. For conditional-rule blocks, `truncation` holds the
// rule condition B: the stored records were collected where B holds, and the
// unobserved remainder (size extension_count, re-estimated every E-step) is
// imputed under the constraint that B is false. Extension records are
// implicit: all bits missing, so they are represented only by their count.
struct SampleBlock {
  std::string id;
  BlockKind kind = BlockKind::Associative;
  std::size_t width = 0;
  std::uint64_t n = 0;                           // sum of record multiplicities
  std::optional<double> q_observed;
  std::optional<Proposition> truncation;
  std::vector<EvidenceRecord> records;
  std::uint64_t extension_count = 0;
};

// Identifies one individual of the pooled sample. Core instances point at a
// block record; extension instances carry record = -1.
struct InstanceRef {
  std::size_t block = 0;
  std::ptrdiff_t record = -1;
};

// The comprehensive sample. `instances` and `completions` are parallel and
// filled by the E-step (one entry per individual, multiplicities and
// replication expanded); both are empty before the first E-step.
struct PooledSample {
  std::vector<SampleBlock> blocks;
  std::vector<InstanceRef> instances;
  std::vector<WorldState> completions;

  std::uint64_t total_size() const;  // sum of n + extension_count over blocks
};

// Expands a Marginal or Conditional constraint with observed fraction
// q_observed and nominal size n into records: round(q*n) records satisfying C
// (and B), the rest with C negated (and B). Everything else is missing.
// Negation requires single-literal C. Conditional blocks carry truncation = B.
SampleBlock materialize_rule_sample(const VariableTable& vars,
                                    const ConstraintTerm& rule,
                                    double q_observed, std::uint64_t n,
                                    std::string id);

// Counted tuples over a visible subvector; all other variables missing.
// Duplicate tuples are merged (summed multiplicity, first occurrence kept in
// place); the number of merges is reported through merged_duplicates.
SampleBlock materialize_data_sample(
    const VariableTable& vars, const std::vector<std::size_t>& visible_vars,
    const std::vector<std::pair<std::vector<std::uint8_t>, std::uint64_t>>& counts,
    std::string id, std::size_t* merged_duplicates = nullptr);

PooledSample pool(const std::vector<SampleBlock>& blocks);

// Re-estimates the unobserved portion of a truncated block from the current
// completions: p(B) is estimated with add-one smoothing as
// (1 + #satisfying) / (2 + #completions) and the extension sized as
// round(n * (1-p)/p). Returns the block with extension_count updated.
SampleBlock estimate_truncated_extension(const SampleBlock& block,
                                         const std::vector<WorldState>& completions);

}  // namespace pnet
