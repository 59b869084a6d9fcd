#pragma once

// World states over k binary variables, Boolean propositions, and the
// constraint-term features b_r the log-linear model is built from.

#include <cstdint>
#include <initializer_list>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pnet {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// Structural problems: bad indices, duplicate names, malformed terms.
struct ModelError : Error {
  using Error::Error;
};
// Exact enumeration requested beyond the configured bit limit.
struct CapacityError : Error {
  using Error::Error;
};
// Evidence materialization problems (unsupported shapes, contradictions).
struct EvidenceError : Error {
  using Error::Error;
};
// Conditioning event has (numerically) zero probability.
struct DegenerateConditionError : Error {
  using Error::Error;
};

struct AtomicVariable {
  std::size_t index = 0;
  std::string name;
  bool hidden = false;
};

// Dense, name-unique variable table. Index of a variable equals its position.
class VariableTable {
 public:
  VariableTable() = default;
  explicit VariableTable(std::vector<AtomicVariable> vars);

  std::size_t size() const { return vars_.size(); }
  const AtomicVariable& operator[](std::size_t i) const { return vars_.at(i); }
  const std::vector<AtomicVariable>& all() const { return vars_; }
  bool hidden(std::size_t i) const { return vars_.at(i).hidden; }
  bool any_hidden() const;
  std::optional<std::size_t> find(std::string_view name) const;

 private:
  std::vector<AtomicVariable> vars_;
};

// One possible world: an assignment of 0/1 to all k variables.
struct WorldState {
  std::vector<std::uint8_t> bits;

  WorldState() = default;
  explicit WorldState(std::size_t k) : bits(k, 0) {}
  WorldState(std::initializer_list<int> vals) {
    bits.reserve(vals.size());
    for (int v : vals) bits.push_back(v ? 1 : 0);
  }

  static WorldState from_code(std::size_t k, std::uint64_t code);

  std::size_t size() const { return bits.size(); }
  bool get(std::size_t i) const { return bits.at(i) != 0; }
  void set(std::size_t i, bool v) { bits.at(i) = v ? 1 : 0; }
  // Integer encoding with bit i at weight 2^i; requires k <= 64.
  std::uint64_t code() const;

  friend bool operator==(const WorldState&, const WorldState&) = default;
};

// A fully-or-partially observed record; disengaged entries are missing ('?').
using PartialBits = std::vector<std::optional<bool>>;

struct Literal {
  std::size_t var = 0;
  bool positive = true;
  friend bool operator==(const Literal&, const Literal&) = default;
};

// Immutable formula tree over variable indices with NOT/AND/OR.
class Proposition {
 public:
  enum class Kind { Var, Not, And, Or };

  Proposition() = default;  // invalid placeholder; valid() == false

  static Proposition var(std::size_t index);
  static Proposition literal(const Literal& l);
  // AND of one or more literals; throws ModelError on an empty list.
  static Proposition conjunction(const std::vector<Literal>& lits);

  friend Proposition operator!(const Proposition& p);
  friend Proposition operator&&(const Proposition& a, const Proposition& b);
  friend Proposition operator||(const Proposition& a, const Proposition& b);

  bool valid() const { return node_ != nullptr; }
  bool eval(const WorldState& x) const;
  std::size_t max_index() const;
  // Sorted, deduplicated indices of all variables appearing in the formula.
  std::vector<std::size_t> variables() const;
  std::optional<Literal> as_literal() const;
  // Flattens nested ANDs of literals; nullopt if any other connective occurs.
  std::optional<std::vector<Literal>> as_literal_conjunction() const;
  bool equals(const Proposition& o) const;

  Kind kind() const;
  std::size_t var_index() const;       // Kind::Var only
  const Proposition& child() const;    // Kind::Not only
  const Proposition& left() const;     // And/Or
  const Proposition& right() const;    // And/Or

 private:
  struct Node;
  explicit Proposition(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

// One feature b_r(x) of the log-linear model:
//   Marginal     b(x) = [C](x),                    target c = q
//   Conditional  b(x) = (1-q)[C&B](x) - q[!C&B](x), target c = 0
//   Link         b(x) = [x_i=1 & x_j=1],            no target
struct ConstraintTerm {
  enum class Kind { Marginal, Conditional, Link };

  static ConstraintTerm marginal(Proposition c, double q);
  static ConstraintTerm conditional(Proposition c, Proposition b, double q);
  static ConstraintTerm link(std::size_t i, std::size_t j);

  Kind kind = Kind::Marginal;
  Proposition c;          // Marginal, Conditional
  Proposition b;          // Conditional
  double q = 0.0;         // Marginal, Conditional
  std::size_t i = 0;      // Link
  std::size_t j = 0;      // Link
  std::size_t id = 0;     // assigned densely when a model is built

  // Sorted variable indices this term depends on.
  std::vector<std::size_t> involved;

  double value(const WorldState& x) const;
  std::optional<double> target() const;
  // b(x with bit v := 0) - b(x with bit v := 1); 0 if v is not involved.
  // Links and single-literal marginals take a symbolic shortcut; everything
  // else is evaluated at both settings. The two routes agree bit-exactly.
  double delta(const WorldState& x, std::size_t v) const;
  bool involves(std::size_t v) const;
  std::size_t max_index() const;

 private:
  void compute_involved();
};

}  // namespace pnet
