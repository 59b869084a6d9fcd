#include "pnet/core.hpp"

#include <algorithm>
#include <set>

namespace pnet {

VariableTable::VariableTable(std::vector<AtomicVariable> vars)
    : vars_(std::move(vars)) {
  std::set<std::string> names;
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    if (vars_[i].index != i)
      throw ModelError("variable '" + vars_[i].name + "' has index " +
                       std::to_string(vars_[i].index) + ", expected " +
                       std::to_string(i));
    if (!names.insert(vars_[i].name).second)
      throw ModelError("duplicate variable name '" + vars_[i].name + "'");
  }
}

bool VariableTable::any_hidden() const {
  for (const auto& v : vars_)
    if (v.hidden) return true;
  return false;
}

std::optional<std::size_t> VariableTable::find(std::string_view name) const {
  for (const auto& v : vars_)
    if (v.name == name) return v.index;
  return std::nullopt;
}

WorldState WorldState::from_code(std::size_t k, std::uint64_t code) {
  WorldState x(k);
  for (std::size_t i = 0; i < k; ++i)
    x.bits[i] = static_cast<std::uint8_t>((code >> i) & 1u);
  return x;
}

std::uint64_t WorldState::code() const {
  if (bits.size() > 64) throw CapacityError("world code limited to 64 bits");
  std::uint64_t c = 0;
  for (std::size_t i = 0; i < bits.size(); ++i)
    if (bits[i]) c |= (1ULL << i);
  return c;
}

struct Proposition::Node {
  Kind kind;
  std::size_t var = 0;
  Proposition a;  // Not: child; And/Or: left
  Proposition b;  // And/Or: right
};

Proposition Proposition::var(std::size_t index) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Var;
  n->var = index;
  return Proposition(std::move(n));
}

Proposition Proposition::literal(const Literal& l) {
  Proposition v = var(l.var);
  return l.positive ? v : !v;
}

Proposition Proposition::conjunction(const std::vector<Literal>& lits) {
  if (lits.empty()) throw ModelError("empty literal conjunction");
  Proposition p = literal(lits[0]);
  for (std::size_t i = 1; i < lits.size(); ++i) p = p && literal(lits[i]);
  return p;
}

Proposition operator!(const Proposition& p) {
  if (!p.valid()) throw ModelError("operation on empty proposition");
  auto n = std::make_shared<Proposition::Node>();
  n->kind = Proposition::Kind::Not;
  n->a = p;
  return Proposition(std::move(n));
}

Proposition operator&&(const Proposition& a, const Proposition& b) {
  if (!a.valid() || !b.valid())
    throw ModelError("operation on empty proposition");
  auto n = std::make_shared<Proposition::Node>();
  n->kind = Proposition::Kind::And;
  n->a = a;
  n->b = b;
  return Proposition(std::move(n));
}

Proposition operator||(const Proposition& a, const Proposition& b) {
  if (!a.valid() || !b.valid())
    throw ModelError("operation on empty proposition");
  auto n = std::make_shared<Proposition::Node>();
  n->kind = Proposition::Kind::Or;
  n->a = a;
  n->b = b;
  return Proposition(std::move(n));
}

bool Proposition::eval(const WorldState& x) const {
  if (!node_) throw ModelError("eval on empty proposition");
  switch (node_->kind) {
    case Kind::Var:
      return x.get(node_->var);
    case Kind::Not:
      return !node_->a.eval(x);
    case Kind::And:
      return node_->a.eval(x) && node_->b.eval(x);
    case Kind::Or:
      return node_->a.eval(x) || node_->b.eval(x);
  }
  return false;
}

std::size_t Proposition::max_index() const {
  if (!node_) throw ModelError("max_index on empty proposition");
  switch (node_->kind) {
    case Kind::Var:
      return node_->var;
    case Kind::Not:
      return node_->a.max_index();
    case Kind::And:
    case Kind::Or:
      return std::max(node_->a.max_index(), node_->b.max_index());
  }
  return 0;
}

static void collect(const Proposition& p, std::set<std::size_t>& out) {
  switch (p.kind()) {
    case Proposition::Kind::Var:
      out.insert(p.var_index());
      break;
    case Proposition::Kind::Not:
      collect(p.child(), out);
      break;
    case Proposition::Kind::And:
    case Proposition::Kind::Or:
      collect(p.left(), out);
      collect(p.right(), out);
      break;
  }
}

std::vector<std::size_t> Proposition::variables() const {
  std::set<std::size_t> s;
  collect(*this, s);
  return {s.begin(), s.end()};
}

std::optional<Literal> Proposition::as_literal() const {
  if (!node_) return std::nullopt;
  if (node_->kind == Kind::Var) return Literal{node_->var, true};
  if (node_->kind == Kind::Not && node_->a.kind() == Kind::Var)
    return Literal{node_->a.var_index(), false};
  return std::nullopt;
}

std::optional<std::vector<Literal>> Proposition::as_literal_conjunction()
    const {
  if (!node_) return std::nullopt;
  if (auto l = as_literal()) return std::vector<Literal>{*l};
  if (node_->kind != Kind::And) return std::nullopt;
  auto lhs = node_->a.as_literal_conjunction();
  auto rhs = node_->b.as_literal_conjunction();
  if (!lhs || !rhs) return std::nullopt;
  lhs->insert(lhs->end(), rhs->begin(), rhs->end());
  return lhs;
}

bool Proposition::equals(const Proposition& o) const {
  if (!node_ || !o.node_) return node_ == o.node_;
  if (node_->kind != o.node_->kind) return false;
  switch (node_->kind) {
    case Kind::Var:
      return node_->var == o.node_->var;
    case Kind::Not:
      return node_->a.equals(o.node_->a);
    case Kind::And:
    case Kind::Or:
      return node_->a.equals(o.node_->a) && node_->b.equals(o.node_->b);
  }
  return false;
}

Proposition::Kind Proposition::kind() const {
  if (!node_) throw ModelError("kind of empty proposition");
  return node_->kind;
}

std::size_t Proposition::var_index() const {
  if (!node_ || node_->kind != Kind::Var)
    throw ModelError("var_index on non-variable proposition");
  return node_->var;
}

const Proposition& Proposition::child() const {
  if (!node_ || node_->kind != Kind::Not)
    throw ModelError("child on non-negation proposition");
  return node_->a;
}

const Proposition& Proposition::left() const {
  if (!node_ || (node_->kind != Kind::And && node_->kind != Kind::Or))
    throw ModelError("left on non-binary proposition");
  return node_->a;
}

const Proposition& Proposition::right() const {
  if (!node_ || (node_->kind != Kind::And && node_->kind != Kind::Or))
    throw ModelError("right on non-binary proposition");
  return node_->b;
}

ConstraintTerm ConstraintTerm::marginal(Proposition c, double q) {
  if (!c.valid()) throw ModelError("marginal term needs a proposition");
  if (!(q >= 0.0 && q <= 1.0))
    throw ModelError("marginal probability out of [0,1]");
  ConstraintTerm t;
  t.kind = Kind::Marginal;
  t.c = std::move(c);
  t.q = q;
  t.compute_involved();
  return t;
}

ConstraintTerm ConstraintTerm::conditional(Proposition c, Proposition b,
                                           double q) {
  if (!c.valid() || !b.valid())
    throw ModelError("conditional term needs both propositions");
  if (!(q >= 0.0 && q <= 1.0))
    throw ModelError("conditional probability out of [0,1]");
  ConstraintTerm t;
  t.kind = Kind::Conditional;
  t.c = std::move(c);
  t.b = std::move(b);
  t.q = q;
  t.compute_involved();
  return t;
}

ConstraintTerm ConstraintTerm::link(std::size_t i, std::size_t j) {
  if (i == j) throw ModelError("link endpoints must differ");
  ConstraintTerm t;
  t.kind = Kind::Link;
  t.i = i;
  t.j = j;
  t.compute_involved();
  return t;
}

void ConstraintTerm::compute_involved() {
  std::set<std::size_t> s;
  switch (kind) {
    case Kind::Marginal:
      collect(c, s);
      break;
    case Kind::Conditional:
      collect(c, s);
      collect(b, s);
      break;
    case Kind::Link:
      s.insert(i);
      s.insert(j);
      break;
  }
  involved.assign(s.begin(), s.end());
}

double ConstraintTerm::value(const WorldState& x) const {
  switch (kind) {
    case Kind::Marginal:
      return c.eval(x) ? 1.0 : 0.0;
    case Kind::Conditional: {
      if (!b.eval(x)) return 0.0;
      return c.eval(x) ? 1.0 - q : -q;
    }
    case Kind::Link:
      return (x.get(i) && x.get(j)) ? 1.0 : 0.0;
  }
  return 0.0;
}

std::optional<double> ConstraintTerm::target() const {
  switch (kind) {
    case Kind::Marginal:
      return q;
    case Kind::Conditional:
      return 0.0;
    case Kind::Link:
      return std::nullopt;
  }
  return std::nullopt;
}

bool ConstraintTerm::involves(std::size_t v) const {
  return std::binary_search(involved.begin(), involved.end(), v);
}

std::size_t ConstraintTerm::max_index() const {
  return involved.empty() ? 0 : involved.back();
}

double ConstraintTerm::delta(const WorldState& x, std::size_t v) const {
  if (!involves(v)) return 0.0;
  if (kind == Kind::Link) {
    bool other = (v == i) ? x.get(j) : x.get(i);
    return other ? -1.0 : 0.0;
  }
  if (kind == Kind::Marginal) {
    if (auto l = c.as_literal(); l && l->var == v)
      return l->positive ? -1.0 : 1.0;
  }
  WorldState y = x;
  y.set(v, false);
  double v0 = value(y);
  y.set(v, true);
  double v1 = value(y);
  return v0 - v1;
}

}  // namespace pnet
