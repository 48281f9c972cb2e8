#include "pmsem/core.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <unordered_set>

#include "pmsem/random.hpp"

namespace pmsem {

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

}  // namespace

Activity::Activity(std::string label) : label_(std::move(label)) {
  if (label_.empty()) throw EmptyLabel();
  if (is_space(label_.front()) || is_space(label_.back())) {
    throw InvalidLabel("activity label has surrounding whitespace: '" + label_ + "'");
  }
  if (label_.find_first_of("\n\r") != std::string::npos) {
    throw InvalidLabel("activity label contains a line break");
  }
}

Activity normalize_label(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  for (char c : raw) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  if (out.empty()) throw EmptyLabel();
  return Activity(std::move(out));
}

std::string fold_key(std::string_view label) {
  std::string out(label);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string match_key(std::string_view raw, MatchingMode mode) {
  std::string normalized;
  try {
    normalized = normalize_label(raw).label();
  } catch (const EmptyLabel&) {
    return {};
  }
  return mode == MatchingMode::CaseInsensitive ? fold_key(normalized) : normalized;
}

std::string_view to_string(MatchingMode mode) {
  return mode == MatchingMode::CaseSensitive ? "case_sensitive" : "case_insensitive";
}

MatchingMode parse_matching_mode(std::string_view text) {
  if (text == "case_sensitive" || text == "sensitive") return MatchingMode::CaseSensitive;
  if (text == "case_insensitive" || text == "insensitive") return MatchingMode::CaseInsensitive;
  throw Error("unknown matching mode: " + std::string(text));
}

std::string trace_key(const Trace& trace) {
  std::string key;
  for (const auto& a : trace) {
    key += a.label();
    key.push_back('\x1f');
  }
  return key;
}

ActivitySet EventLog::activities() const {
  ActivitySet out;
  for (const auto& t : traces) out.insert(t.begin(), t.end());
  return out;
}

ProcessModel::ProcessModel(std::string model_id, std::set<Trace> sequences,
                           std::optional<std::string> name)
    : model_id_(std::move(model_id)), name_(std::move(name)), sequences_(std::move(sequences)) {
  for (const auto& seq : sequences_) activities_.insert(seq.begin(), seq.end());
}

std::vector<Trace> ProcessModel::visible_sequences() const {
  std::vector<Trace> out;
  out.reserve(sequences_.size());
  for (const auto& seq : sequences_) {
    if (!seq.empty()) out.push_back(seq);
  }
  return out;
}

// --- ProcessTree -----------------------------------------------------------

ProcessTree ProcessTree::leaf(Activity activity) {
  ProcessTree t;
  t.kind_ = Kind::Leaf;
  t.activity_ = std::move(activity);
  return t;
}

ProcessTree ProcessTree::tau() { return ProcessTree{}; }

ProcessTree ProcessTree::node(Operator op, std::vector<ProcessTree> children) {
  if (children.empty()) throw ArityError("operator requires at least one child");
  if (op == Operator::Loop && children.size() < 2) {
    throw ArityError("loop operator requires at least two children");
  }
  ProcessTree t;
  t.kind_ = Kind::Node;
  t.op_ = op;
  t.children_ = std::move(children);
  return t;
}

const Activity& ProcessTree::activity() const {
  if (!activity_) throw Error("process tree node is not a leaf");
  return *activity_;
}

Operator ProcessTree::op() const {
  if (kind_ != Kind::Node) throw Error("process tree node is not an operator");
  return op_;
}

std::vector<Activity> ProcessTree::leaf_labels() const {
  std::vector<Activity> out;
  auto visit = [&out](const ProcessTree& t, const auto& self) -> void {
    if (t.is_leaf()) out.push_back(t.activity());
    for (const auto& c : t.children()) self(c, self);
  };
  visit(*this, visit);
  return out;
}

std::size_t ProcessTree::leaf_count() const {
  if (!is_node()) return 1;
  return std::accumulate(children_.begin(), children_.end(), std::size_t{0},
                         [](std::size_t n, const ProcessTree& c) { return n + c.leaf_count(); });
}

std::size_t ProcessTree::depth() const {
  std::size_t deepest = 0;
  for (const auto& c : children_) deepest = std::max(deepest, c.depth());
  return 1 + deepest;
}

// --- Dfg / Footprint ------------------------------------------------------

Dfg::Dfg(ActivitySet activities, std::set<ActivityPair> edges)
    : activities_(std::move(activities)), edges_(std::move(edges)) {
  for (const auto& [from, to] : edges_) {
    if (!activities_.contains(from) || !activities_.contains(to)) {
      throw InvalidLabel("DFG edge endpoint outside activity set: '" + from.label() + "' -> '" +
                         to.label() + "'");
    }
  }
}

Relation mirror(Relation r) {
  switch (r) {
    case Relation::Forward: return Relation::Backward;
    case Relation::Backward: return Relation::Forward;
    default: return r;
  }
}

std::string_view symbol(Relation r) {
  switch (r) {
    case Relation::Forward: return "->";
    case Relation::Backward: return "<-";
    case Relation::Parallel: return "||";
    case Relation::None: return "#";
  }
  return "?";
}

Footprint::Footprint(std::vector<Activity> sorted_activities, std::vector<Relation> matrix)
    : activities_(std::move(sorted_activities)), matrix_(std::move(matrix)) {
  const std::size_t n = activities_.size();
  if (matrix_.size() != n * n) throw Error("footprint matrix has wrong size");
  if (!std::is_sorted(activities_.begin(), activities_.end()) ||
      std::adjacent_find(activities_.begin(), activities_.end()) != activities_.end()) {
    throw Error("footprint activities must be sorted and unique");
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Relation diag = at(i, i);
    if (diag != Relation::Parallel && diag != Relation::None) {
      throw Error("footprint diagonal must be || or #");
    }
    for (std::size_t j = i + 1; j < n; ++j) {
      if (at(j, i) != mirror(at(i, j))) throw Error("footprint violates mirror consistency");
    }
  }
}

std::optional<std::size_t> Footprint::index_of(const Activity& a) const {
  auto it = std::lower_bound(activities_.begin(), activities_.end(), a);
  if (it == activities_.end() || *it != a) return std::nullopt;
  return static_cast<std::size_t>(it - activities_.begin());
}

Relation Footprint::relation(const Activity& x, const Activity& y) const {
  const auto i = index_of(x);
  const auto j = index_of(y);
  if (!i || !j) return Relation::None;
  return at(*i, *j);
}

// --- Rng ------------------------------------------------------------------

std::uint64_t derive_seed(std::uint64_t global_seed, std::string_view key) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : key) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::uint64_t z = h ^ (global_seed + 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::size_t Rng::below(std::size_t n) {
  // Rejection sampling on the top of the range keeps draws unbiased.
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x;
  do {
    x = next();
  } while (x >= limit);
  return static_cast<std::size_t>(x % bound);
}

std::vector<std::size_t> Rng::sample_indices(std::size_t n, std::size_t k) {
  k = std::min(k, n);
  std::vector<std::size_t> out;
  out.reserve(k);
  if (k * 4 <= n) {
    // Sparse draw: rejection against the few indices already taken.
    std::unordered_set<std::size_t> taken;
    while (out.size() < k) {
      const std::size_t i = below(n);
      if (taken.insert(i).second) out.push_back(i);
    }
    return out;
  }
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) {
    std::swap(pool[i], pool[i + below(n - i)]);
  }
  pool.resize(k);
  return pool;
}

}  // namespace pmsem
