#pragma once

// Text format for network descriptions: variable and hidden-unit
// declarations, probabilistic rules with reliability counts, bivariate
// links, and counted data blocks. Line oriented, `#` starts a comment.
//
//   var Taxes+ Deficit+ ;
//   hidden H_1 ;
//   rule P(Deficit+ | Taxes+) = 0.8 n=20 ;
//   link Taxes+ ~ H_1 ;
//   data (Taxes+ Deficit+) { 01 : 3 ; 11 : 7 ; }

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pnet/core.hpp"
#include "pnet/evidence.hpp"
#include "pnet/model.hpp"

namespace pnet {

struct Diagnostic {
  std::string code;     // stable machine-readable tag, e.g. "unknown-variable"
  std::string message;
  std::size_t line = 0;  // 1-based; 0 = no position
  std::size_t col = 0;
  bool warning = false;  // warnings do not invalidate the result
};

struct RuleDecl {
  bool conditional = false;
  Literal c;
  std::vector<Literal> b;  // condition literals, empty for marginal rules
  double q = 0.0;
  std::uint64_t n = 0;
  std::size_t line = 0, col = 0;
};

struct LinkDecl {
  std::size_t i = 0, j = 0;
  std::size_t line = 0, col = 0;
};

struct DataDecl {
  std::vector<std::size_t> columns;
  std::vector<std::pair<std::vector<std::uint8_t>, std::uint64_t>> rows;
  std::size_t line = 0, col = 0;
};

enum class DeclKind { Rule, Link, Data };

struct NetworkSpec {
  VariableTable variables;
  std::vector<RuleDecl> rules;
  std::vector<LinkDecl> links;
  std::vector<DataDecl> data;
  // Rule/link/data declarations in source order; evidence block ids S1, S2,
  // ... number the rule and data entries in this order.
  std::vector<std::pair<DeclKind, std::size_t>> decl_order;
};

struct ParseResult {
  std::optional<NetworkSpec> spec;  // present iff no error was diagnosed
  std::vector<Diagnostic> diagnostics;
  bool ok() const { return spec.has_value(); }
};

ParseResult parse_spec(const std::string& text);

// Canonical text form; parsing it back reproduces the spec (same variable
// indices, same declaration order).
std::string pretty_print(const NetworkSpec& spec);

struct CompiledNetwork {
  std::optional<MaxEntModel> model;  // lambda all zero; absent on error
  std::vector<SampleBlock> blocks;
  std::vector<Diagnostic> diagnostics;  // warnings, plus errors if model absent
  bool ok() const { return model.has_value(); }
};

// Turns a parsed spec into a model skeleton (one term per rule and per link,
// declaration order) and evidence blocks (one per rule and per data block).
// In soft mode rule terms are left out of the model and rules act as
// evidence only.
CompiledNetwork compile_spec(const NetworkSpec& spec, bool soft = false);

// Parses "LIT (and LIT)*" against the table, for query expressions.
std::optional<Proposition> parse_literal_conjunction(const std::string& text,
                                                     const VariableTable& vars,
                                                     std::string* error = nullptr);

}  // namespace pnet
