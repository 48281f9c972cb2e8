#include "pmsem/tree_dsl.hpp"

#include <algorithm>
#include <optional>
#include <set>

namespace pmsem {

SyntaxError::SyntaxError(std::size_t position, std::string reason)
    : Error("syntax error at " + std::to_string(position) + ": " + reason),
      position_(position),
      reason_(std::move(reason)) {}

namespace {

constexpr std::string_view kArrowUtf8 = "\xE2\x86\x92";   // →
constexpr std::string_view kTimesUtf8 = "\xC3\x97";       // ×
constexpr std::string_view kWedgeUtf8 = "\xE2\x88\xA7";   // ∧
constexpr std::string_view kLoopUtf8 = "\xE2\x86\xBA";    // ↺
constexpr std::string_view kTauUtf8 = "\xCF\x84";         // τ

bool is_blank(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

bool is_word_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

class Cursor {
 public:
  explicit Cursor(std::string_view text) : text_(text) {}

  void skip_blank() {
    while (pos_ < text_.size() && is_blank(text_[pos_])) ++pos_;
  }
  bool at_end() const { return pos_ >= text_.size(); }
  std::size_t pos() const { return pos_; }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }

  bool consume(std::string_view token) {
    if (text_.substr(pos_).starts_with(token)) {
      pos_ += token.size();
      return true;
    }
    return false;
  }

  /// Consumes a keyword only if it is not followed by an identifier character.
  bool consume_word(std::string_view word) {
    if (!text_.substr(pos_).starts_with(word)) return false;
    const std::size_t after = pos_ + word.size();
    if (after < text_.size() && is_word_char(text_[after])) return false;
    pos_ = after;
    return true;
  }

  std::string quoted() {
    const std::size_t start = pos_;
    if (!consume("'")) throw SyntaxError(pos_, "expected quoted label");
    std::string out;
    while (true) {
      if (at_end()) throw SyntaxError(start, "unterminated quote");
      const char c = text_[pos_++];
      if (c == '\'') break;
      if (c == '\\') {
        if (at_end()) throw SyntaxError(start, "unterminated quote");
        const char e = text_[pos_++];
        if (e != '\'' && e != '\\') throw SyntaxError(pos_ - 2, "invalid escape sequence");
        out.push_back(e);
        continue;
      }
      out.push_back(c);
    }
    return out;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

Activity label_from(std::string_view raw, std::size_t pos) {
  try {
    return normalize_label(raw);
  } catch (const EmptyLabel&) {
    throw SyntaxError(pos, "empty activity label");
  }
}

std::optional<Operator> read_operator(Cursor& in) {
  if (in.consume("->") || in.consume(kArrowUtf8)) return Operator::Seq;
  if (in.consume_word("X") || in.consume(kTimesUtf8)) return Operator::Xor;
  if (in.consume("+") || in.consume(kWedgeUtf8)) return Operator::And;
  if (in.consume("*") || in.consume(kLoopUtf8)) return Operator::Loop;
  return std::nullopt;
}

ProcessTree parse_node(Cursor& in, std::size_t depth) {
  if (depth > kMaxTreeDepth) throw SyntaxError(in.pos(), "tree nesting too deep");
  in.skip_blank();
  const std::size_t start = in.pos();
  if (in.at_end()) throw SyntaxError(start, "unexpected end of input");
  if (in.peek() == '\'') {
    const std::string raw = in.quoted();
    return ProcessTree::leaf(label_from(raw, start));
  }
  if (in.consume_word("tau") || in.consume(kTauUtf8)) return ProcessTree::tau();

  const auto op = read_operator(in);
  if (!op) throw SyntaxError(start, "unknown token");
  in.skip_blank();
  if (!in.consume("(")) throw SyntaxError(in.pos(), "expected '(' after operator");

  std::vector<ProcessTree> children;
  in.skip_blank();
  if (!in.consume(")")) {
    while (true) {
      children.push_back(parse_node(in, depth + 1));
      in.skip_blank();
      if (in.consume(",")) continue;
      if (in.consume(")")) break;
      if (in.at_end()) throw SyntaxError(in.pos(), "unbalanced parentheses");
      throw SyntaxError(in.pos(), "expected ',' or ')'");
    }
  }
  if (children.empty()) throw ArityError("operator at " + std::to_string(start) + " has no children");
  if (*op == Operator::Loop && children.size() < 2) {
    throw ArityError("loop at " + std::to_string(start) + " requires at least two children");
  }
  return ProcessTree::node(*op, std::move(children));
}

void render_into(const ProcessTree& tree, std::string& out) {
  switch (tree.kind()) {
    case ProcessTree::Kind::Leaf: out += quote_label(tree.activity().label()); return;
    case ProcessTree::Kind::Silent: out += "tau"; return;
    case ProcessTree::Kind::Node: break;
  }
  out += operator_token(tree.op());
  out.push_back('(');
  bool first = true;
  for (const auto& child : tree.children()) {
    if (!first) out += ", ";
    first = false;
    render_into(child, out);
  }
  out.push_back(')');
}

}  // namespace

ProcessTree parse_tree(std::string_view text) {
  Cursor in(text);
  in.skip_blank();
  if (in.at_end()) throw SyntaxError(0, "empty input");
  ProcessTree tree = parse_node(in, 0);
  in.skip_blank();
  if (!in.at_end()) {
    throw SyntaxError(in.pos(), in.peek() == ')' ? "unbalanced parentheses" : "trailing input");
  }
  return tree;
}

std::string_view operator_token(Operator op) {
  switch (op) {
    case Operator::Seq: return "->";
    case Operator::Xor: return "X";
    case Operator::And: return "+";
    case Operator::Loop: return "*";
  }
  return "?";
}

std::string quote_label(std::string_view label) {
  std::string out = "'";
  for (char c : label) {
    if (c == '\'' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('\'');
  return out;
}

std::string render_tree(const ProcessTree& tree) {
  std::string out;
  render_into(tree, out);
  return out;
}

EdgeParseResult parse_dfg_edges(std::string_view text, bool strict) {
  EdgeParseResult result;
  std::set<std::pair<std::string, std::string>> edges;
  std::size_t line_start = 0;
  std::size_t line_number = 0;
  while (line_start <= text.size()) {
    std::size_t line_end = text.find('\n', line_start);
    if (line_end == std::string_view::npos) line_end = text.size();
    const std::string_view line = text.substr(line_start, line_end - line_start);
    ++line_number;

    const bool blank = std::all_of(line.begin(), line.end(), is_blank);
    if (!blank) {
      try {
        Cursor in(line);
        in.skip_blank();
        const std::size_t p1 = in.pos();
        const std::string from = in.quoted();
        in.skip_blank();
        if (!in.consume("->") && !in.consume(kArrowUtf8)) throw SyntaxError(in.pos(), "expected '->'");
        in.skip_blank();
        const std::size_t p2 = in.pos();
        const std::string to = in.quoted();
        in.skip_blank();
        if (!in.at_end()) throw SyntaxError(in.pos(), "trailing input after edge");
        edges.emplace(label_from(from, p1).label(), label_from(to, p2).label());
      } catch (const SyntaxError& e) {
        if (strict) throw SyntaxError(line_start + e.position(), e.reason());
        result.skipped.push_back({line_number, std::string(line), e.reason()});
      }
    }
    if (line_end == text.size()) break;
    line_start = line_end + 1;
  }
  result.edges.assign(edges.begin(), edges.end());
  return result;
}

std::string render_dfg_edges(const Dfg& dfg) {
  std::string out;
  for (const auto& [from, to] : dfg.edges()) {
    if (!out.empty()) out.push_back('\n');
    out += quote_label(from.label());
    out += " -> ";
    out += quote_label(to.label());
  }
  return out;
}

}  // namespace pmsem
