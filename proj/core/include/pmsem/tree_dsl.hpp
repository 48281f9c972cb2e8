#pragma once

// Textual notation for process trees and DFG edge lists.
//
//   tree  := leaf | silent | op '(' tree (',' tree)* ')'
//   leaf  := quoted label              (backslash escapes quote and backslash)
//   silent:= 'tau' | 'τ'
//   op    := '->' | 'X' | '+' | '*'    (Unicode aliases → × ∧ ↺)
//
// Whitespace outside quotes is ignored. Leaf labels are normalized on read.

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pmsem/core.hpp"

namespace pmsem {

class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t position, std::string reason);

  std::size_t position() const noexcept { return position_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::size_t position_;
  std::string reason_;
};

/// Nesting deeper than this is rejected with a SyntaxError.
inline constexpr std::size_t kMaxTreeDepth = 256;

/// Throws SyntaxError or ArityError.
ProcessTree parse_tree(std::string_view text);

/// Canonical form, e.g. `->('a', X('b', tau))`.
std::string render_tree(const ProcessTree& tree);

/// Quotes a label for use in tree text or edge lines.
std::string quote_label(std::string_view label);

std::string_view operator_token(Operator op);

struct SkippedLine {
  std::size_t line_number;  // 1-based
  std::string text;
  std::string reason;
};

struct EdgeParseResult {
  std::vector<std::pair<std::string, std::string>> edges;  // normalized labels, sorted, unique
  std::vector<SkippedLine> skipped;
};

/// Parses one `'a' -> 'b'` pair per line. Blank lines are ignored. In strict
/// mode the first malformed line throws SyntaxError (position is the byte
/// offset of that line); otherwise malformed lines are reported and skipped.
EdgeParseResult parse_dfg_edges(std::string_view text, bool strict = false);

/// One `'a' -> 'b'` line per edge, in edge order, newline-joined.
std::string render_dfg_edges(const Dfg& dfg);

}  // namespace pmsem
