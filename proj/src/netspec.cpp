#include "pnet/netspec.hpp"

#include <cctype>
#include <charconv>
#include <cstring>
#include <map>
#include <sstream>

namespace pnet {

namespace {

struct Token {
  std::string text;
  std::size_t line = 0, col = 0;
  bool punct = false;
};

bool is_punct_char(char c) { return std::strchr("(){};:=|~!", c) != nullptr; }

std::vector<Token> tokenize(const std::string& text) {
  std::vector<Token> out;
  std::size_t line = 1, col = 1, i = 0;
  auto advance = [&](char c) {
    if (c == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  };
  while (i < text.size()) {
    const char c = text[i];
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') advance(text[i++]);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(c);
      ++i;
      continue;
    }
    if (is_punct_char(c)) {
      out.push_back({std::string(1, c), line, col, true});
      advance(c);
      ++i;
      continue;
    }
    Token t{"", line, col, false};
    while (i < text.size()) {
      const char w = text[i];
      if (std::isspace(static_cast<unsigned char>(w)) || is_punct_char(w) || w == '#')
        break;
      t.text.push_back(w);
      advance(w);
      ++i;
    }
    out.push_back(std::move(t));
  }
  return out;
}

bool valid_name(const std::string& s) {
  if (s.empty()) return false;
  if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' ||
          c == '+' || c == '-'))
      return false;
  }
  return s != "var" && s != "hidden" && s != "rule" && s != "link" &&
         s != "data" && s != "and";
}

std::optional<double> parse_double(const std::string& s) {
  double v = 0.0;
  const auto* b = s.data();
  const auto* e = s.data() + s.size();
  auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || p != e) return std::nullopt;
  return v;
}

std::optional<std::uint64_t> parse_count(const std::string& s) {
  std::uint64_t v = 0;
  const auto* b = s.data();
  const auto* e = s.data() + s.size();
  auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || p != e) return std::nullopt;
  return v;
}

std::string format_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, p);
}

class Parser {
 public:
  Parser(std::vector<Token> toks, std::vector<Diagnostic>& diags)
      : toks_(std::move(toks)), diags_(diags) {}

  std::optional<NetworkSpec> run() {
    while (!at_end()) {
      const Token& t = toks_[pos_];
      if (t.punct) {
        error("syntax", "unexpected '" + t.text + "'", t);
        recover();
        continue;
      }
      ++pos_;
      if (t.text == "var" || t.text == "hidden")
        parse_vars(t.text == "hidden");
      else if (t.text == "rule")
        parse_rule(t);
      else if (t.text == "link")
        parse_link(t);
      else if (t.text == "data")
        parse_data(t);
      else {
        error("unknown-directive", "unknown directive '" + t.text + "'", t);
        recover();
      }
    }
    if (errors_ > 0) return std::nullopt;
    spec_.variables = VariableTable(vars_);
    return std::move(spec_);
  }

 private:
  bool at_end() const { return pos_ >= toks_.size(); }

  const Token& last() const { return toks_[std::min(pos_, toks_.size() - 1)]; }

  void error(const std::string& code, const std::string& message, const Token& at) {
    diags_.push_back({code, message, at.line, at.col, false});
    ++errors_;
  }

  // Skips ahead so later statements still get diagnosed.
  void recover() {
    while (!at_end()) {
      const Token& t = toks_[pos_++];
      if (t.punct && (t.text == ";" || t.text == "}")) return;
    }
  }

  std::optional<Token> take_word(const char* what) {
    if (at_end() || toks_[pos_].punct) {
      error("syntax", std::string("expected ") + what, last());
      return std::nullopt;
    }
    return toks_[pos_++];
  }

  bool take_punct(const char* p) {
    if (at_end() || !toks_[pos_].punct || toks_[pos_].text != p) {
      error("syntax", std::string("expected '") + p + "'", last());
      return false;
    }
    ++pos_;
    return true;
  }

  bool peek_punct(const char* p) const {
    return !at_end() && toks_[pos_].punct && toks_[pos_].text == p;
  }

  std::optional<std::size_t> resolve(const Token& name) {
    auto it = names_.find(name.text);
    if (it == names_.end()) {
      error("unknown-variable", "unknown variable '" + name.text + "'", name);
      return std::nullopt;
    }
    return it->second;
  }

  void parse_vars(bool hidden) {
    bool any = false;
    while (!at_end() && !toks_[pos_].punct) {
      const Token t = toks_[pos_++];
      any = true;
      if (!valid_name(t.text)) {
        error("bad-name", "'" + t.text + "' is not a valid variable name", t);
        continue;
      }
      if (names_.count(t.text) != 0) {
        error("duplicate-declaration", "variable '" + t.text + "' already declared", t);
        continue;
      }
      names_.emplace(t.text, vars_.size());
      vars_.push_back({vars_.size(), t.text, hidden});
    }
    if (!any) error("syntax", "expected at least one variable name", last());
    take_punct(";");
  }

  std::optional<Literal> parse_literal(bool in_rule) {
    bool positive = true;
    if (peek_punct("!")) {
      ++pos_;
      positive = false;
    }
    auto name = take_word("a variable name");
    if (!name) return std::nullopt;
    auto idx = resolve(*name);
    if (!idx) return std::nullopt;
    if (in_rule && vars_[*idx].hidden) {
      error("hidden-in-rule",
            "hidden variable '" + name->text + "' cannot appear in a rule", *name);
      return std::nullopt;
    }
    return Literal{*idx, positive};
  }

  void parse_rule(const Token& at) {
    RuleDecl r;
    r.line = at.line;
    r.col = at.col;
    auto p = take_word("'P'");
    if (!p || p->text != "P") {
      if (p) error("syntax", "expected 'P'", *p);
      recover();
      return;
    }
    if (!take_punct("(")) return recover();
    auto c = parse_literal(true);
    if (!c) return recover();
    r.c = *c;
    if (peek_punct("|")) {
      ++pos_;
      r.conditional = true;
      while (true) {
        auto lit = parse_literal(true);
        if (!lit) return recover();
        r.b.push_back(*lit);
        if (!at_end() && !toks_[pos_].punct && toks_[pos_].text == "and") {
          ++pos_;
          continue;
        }
        break;
      }
    }
    if (!take_punct(")")) return recover();
    if (!take_punct("=")) return recover();
    auto qtok = take_word("a probability");
    if (!qtok) return recover();
    auto q = parse_double(qtok->text);
    if (!q) {
      error("malformed-probability", "'" + qtok->text + "' is not a number", *qtok);
      return recover();
    }
    if (!(*q >= 0.0 && *q <= 1.0)) {
      error("probability-range",
            "probability " + qtok->text + " is outside [0,1]", *qtok);
      return recover();
    }
    r.q = *q;
    auto ntok = take_word("'n'");
    if (!ntok || ntok->text != "n") {
      if (ntok) error("syntax", "expected 'n'", *ntok);
      return recover();
    }
    if (!take_punct("=")) return recover();
    auto ctok = take_word("a count");
    if (!ctok) return recover();
    auto n = parse_count(ctok->text);
    if (!n || *n < 1) {
      error("malformed-count", "'" + ctok->text + "' is not a positive count", *ctok);
      return recover();
    }
    r.n = *n;
    if (!take_punct(";")) return recover();
    spec_.decl_order.emplace_back(DeclKind::Rule, spec_.rules.size());
    spec_.rules.push_back(std::move(r));
  }

  void parse_link(const Token& at) {
    LinkDecl l;
    l.line = at.line;
    l.col = at.col;
    auto a = take_word("a variable name");
    if (!a) return recover();
    auto ia = resolve(*a);
    if (!ia) return recover();
    if (!take_punct("~")) return recover();
    auto b = take_word("a variable name");
    if (!b) return recover();
    auto ib = resolve(*b);
    if (!ib) return recover();
    if (*ia == *ib) {
      error("self-link", "link connects '" + a->text + "' to itself", *a);
      return recover();
    }
    l.i = *ia;
    l.j = *ib;
    if (!take_punct(";")) return recover();
    spec_.decl_order.emplace_back(DeclKind::Link, spec_.links.size());
    spec_.links.push_back(l);
  }

  void parse_data(const Token& at) {
    DataDecl d;
    d.line = at.line;
    d.col = at.col;
    if (!take_punct("(")) return recover();
    while (!at_end() && !toks_[pos_].punct) {
      const Token t = toks_[pos_++];
      auto idx = resolve(t);
      if (!idx) return recover();
      if (vars_[*idx].hidden) {
        error("hidden-in-data",
              "hidden variable '" + t.text + "' cannot be observed in data", t);
        return recover();
      }
      for (std::size_t seen : d.columns) {
        if (seen == *idx) {
          error("duplicate-column", "variable '" + t.text + "' listed twice", t);
          return recover();
        }
      }
      d.columns.push_back(*idx);
    }
    if (d.columns.empty()) {
      error("syntax", "expected at least one column name", last());
      return recover();
    }
    if (!take_punct(")")) return recover();
    if (!take_punct("{")) return recover();
    while (!peek_punct("}")) {
      auto bits = take_word("a bit tuple");
      if (!bits) return recover();
      std::vector<std::uint8_t> row;
      bool bad = false;
      for (char ch : bits->text) {
        if (ch != '0' && ch != '1') {
          bad = true;
          break;
        }
        row.push_back(ch == '1' ? 1 : 0);
      }
      if (bad || row.size() != d.columns.size()) {
        error("tuple-width",
              "tuple '" + bits->text + "' does not match the " +
                  std::to_string(d.columns.size()) + " listed columns",
              *bits);
        return recover();
      }
      if (!take_punct(":")) return recover();
      auto ctok = take_word("a count");
      if (!ctok) return recover();
      auto n = parse_count(ctok->text);
      if (!n || *n < 1) {
        error("malformed-count", "'" + ctok->text + "' is not a positive count",
              *ctok);
        return recover();
      }
      d.rows.emplace_back(std::move(row), *n);
      if (!take_punct(";")) return recover();
    }
    ++pos_;  // consume '}'
    spec_.decl_order.emplace_back(DeclKind::Data, spec_.data.size());
    spec_.data.push_back(std::move(d));
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::vector<Diagnostic>& diags_;
  NetworkSpec spec_;
  std::vector<AtomicVariable> vars_;
  std::map<std::string, std::size_t> names_;
  std::size_t errors_ = 0;
};

std::string literal_text(const NetworkSpec& spec, const Literal& l) {
  return (l.positive ? "" : "!") + spec.variables[l.var].name;
}

}  // namespace

ParseResult parse_spec(const std::string& text) {
  ParseResult result;
  Parser parser(tokenize(text), result.diagnostics);
  result.spec = parser.run();
  return result;
}

std::string pretty_print(const NetworkSpec& spec) {
  std::ostringstream out;
  // Variable lines reproduce index order, so parsing the output assigns the
  // same indices.
  const auto& vars = spec.variables.all();
  for (std::size_t i = 0; i < vars.size();) {
    const bool hidden = vars[i].hidden;
    out << (hidden ? "hidden" : "var");
    for (; i < vars.size() && vars[i].hidden == hidden; ++i)
      out << ' ' << vars[i].name;
    out << " ;\n";
  }
  for (const auto& [kind, idx] : spec.decl_order) {
    if (kind == DeclKind::Rule) {
      const RuleDecl& r = spec.rules[idx];
      out << "rule P(" << literal_text(spec, r.c);
      if (r.conditional) {
        out << " | ";
        for (std::size_t i = 0; i < r.b.size(); ++i) {
          if (i > 0) out << " and ";
          out << literal_text(spec, r.b[i]);
        }
      }
      out << ") = " << format_double(r.q) << " n=" << r.n << " ;\n";
    } else if (kind == DeclKind::Link) {
      const LinkDecl& l = spec.links[idx];
      out << "link " << vars[l.i].name << " ~ " << vars[l.j].name << " ;\n";
    } else {
      const DataDecl& d = spec.data[idx];
      out << "data (";
      for (std::size_t i = 0; i < d.columns.size(); ++i) {
        if (i > 0) out << ' ';
        out << vars[d.columns[i]].name;
      }
      out << ") {\n";
      for (const auto& [row, count] : d.rows) {
        out << "  ";
        for (auto bit : row) out << (bit ? '1' : '0');
        out << " : " << count << " ;\n";
      }
      out << "}\n";
    }
  }
  return out.str();
}

CompiledNetwork compile_spec(const NetworkSpec& spec, bool soft) {
  CompiledNetwork out;
  std::vector<ConstraintTerm> terms;
  std::vector<SampleBlock> blocks;
  std::size_t next_block = 1;
  bool failed = false;

  for (const auto& [kind, idx] : spec.decl_order) {
    try {
      if (kind == DeclKind::Rule) {
        const RuleDecl& r = spec.rules[idx];
        const ConstraintTerm term =
            r.conditional
                ? ConstraintTerm::conditional(Proposition::literal(r.c),
                                              Proposition::conjunction(r.b), r.q)
                : ConstraintTerm::marginal(Proposition::literal(r.c), r.q);
        if (!soft) terms.push_back(term);
        blocks.push_back(materialize_rule_sample(
            spec.variables, term, r.q, r.n, "S" + std::to_string(next_block++)));
      } else if (kind == DeclKind::Link) {
        terms.push_back(ConstraintTerm::link(spec.links[idx].i, spec.links[idx].j));
      } else {
        const DataDecl& d = spec.data[idx];
        std::size_t merged = 0;
        const std::string id = "S" + std::to_string(next_block++);
        blocks.push_back(
            materialize_data_sample(spec.variables, d.columns, d.rows, id, &merged));
        if (merged > 0)
          out.diagnostics.push_back({"duplicate-tuple",
                                     std::to_string(merged) +
                                         " duplicate tuple(s) merged in block " + id,
                                     d.line, d.col, true});
      }
    } catch (const Error& e) {
      std::size_t line = 0, col = 0;
      if (kind == DeclKind::Rule) {
        line = spec.rules[idx].line;
        col = spec.rules[idx].col;
      } else if (kind == DeclKind::Link) {
        line = spec.links[idx].line;
        col = spec.links[idx].col;
      } else {
        line = spec.data[idx].line;
        col = spec.data[idx].col;
      }
      out.diagnostics.push_back({"materialization", e.what(), line, col, false});
      failed = true;
    }
  }
  out.blocks = std::move(blocks);
  if (failed) {
    out.blocks.clear();
    return out;
  }
  try {
    out.model = MaxEntModel(spec.variables, std::move(terms));
  } catch (const Error& e) {
    out.diagnostics.push_back({"model", e.what(), 0, 0, false});
    out.blocks.clear();
  }
  return out;
}

std::optional<Proposition> parse_literal_conjunction(const std::string& text,
                                                     const VariableTable& vars,
                                                     std::string* error) {
  auto fail = [&](const std::string& msg) -> std::optional<Proposition> {
    if (error != nullptr) *error = msg;
    return std::nullopt;
  };
  const auto toks = tokenize(text);
  std::vector<Literal> lits;
  std::size_t pos = 0;
  while (pos < toks.size()) {
    bool positive = true;
    if (toks[pos].punct && toks[pos].text == "!") {
      positive = false;
      ++pos;
    }
    if (pos >= toks.size() || toks[pos].punct)
      return fail("expected a variable name");
    auto idx = vars.find(toks[pos].text);
    if (!idx) return fail("unknown variable '" + toks[pos].text + "'");
    lits.push_back({*idx, positive});
    ++pos;
    if (pos == toks.size()) break;
    if (toks[pos].punct || toks[pos].text != "and")
      return fail("expected 'and' between literals");
    ++pos;
    if (pos == toks.size()) return fail("dangling 'and'");
  }
  if (lits.empty()) return fail("empty expression");
  return Proposition::conjunction(lits);
}

}  // namespace pnet
