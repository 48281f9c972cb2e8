#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace pmsem {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmptyLabel : public Error {
 public:
  EmptyLabel() : Error("activity label is empty after normalization") {}
};

class InvalidLabel : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Activity
// ---------------------------------------------------------------------------

/// A normalized activity label. Construction enforces the label invariants:
/// non-empty, no surrounding whitespace, no newline characters.
class Activity {
 public:
  explicit Activity(std::string label);

  const std::string& label() const noexcept { return label_; }

  friend auto operator<=>(const Activity&, const Activity&) = default;
  friend bool operator==(const Activity&, const Activity&) = default;

 private:
  std::string label_;
};

/// Trims, collapses internal whitespace runs to one space, keeps case.
Activity normalize_label(std::string_view raw);

/// Case-insensitive comparison key for an already-normalized label.
std::string fold_key(std::string_view label);

enum class MatchingMode { CaseSensitive, CaseInsensitive };

/// Key used when comparing model output against gold labels.
std::string match_key(std::string_view raw, MatchingMode mode);

std::string_view to_string(MatchingMode mode);
MatchingMode parse_matching_mode(std::string_view text);

using ActivitySet = std::set<Activity>;
using ActivityPair = std::pair<Activity, Activity>;

// ---------------------------------------------------------------------------
// Traces, logs, models
// ---------------------------------------------------------------------------

using Trace = std::vector<Activity>;

/// Stable textual key of a trace (labels joined by the unit separator).
std::string trace_key(const Trace& trace);

struct EventLog {
  std::vector<Trace> traces;

  ActivitySet activities() const;
};

/// A process model as a finite set of execution sequences.
///
/// The empty sequence may be present (a tree that can complete silently); it
/// is kept so membership stays exact, and flagged via has_empty_sequence().
class ProcessModel {
 public:
  ProcessModel(std::string model_id, std::set<Trace> sequences,
               std::optional<std::string> name = std::nullopt);

  const std::string& id() const noexcept { return model_id_; }
  const std::optional<std::string>& name() const noexcept { return name_; }
  const std::set<Trace>& sequences() const noexcept { return sequences_; }
  const ActivitySet& activities() const noexcept { return activities_; }

  bool contains(const Trace& trace) const { return sequences_.contains(trace); }
  bool has_empty_sequence() const { return sequences_.contains(Trace{}); }
  bool empty_only() const { return sequences_.size() == 1 && has_empty_sequence(); }

  /// Non-empty sequences in canonical order.
  std::vector<Trace> visible_sequences() const;

 private:
  std::string model_id_;
  std::optional<std::string> name_;
  std::set<Trace> sequences_;
  ActivitySet activities_;
};

// ---------------------------------------------------------------------------
// Process trees
// ---------------------------------------------------------------------------

enum class Operator { Seq, Xor, And, Loop };

class ArityError : public Error {
 public:
  using Error::Error;
};

class ProcessTree {
 public:
  enum class Kind { Leaf, Silent, Node };

  static ProcessTree leaf(Activity activity);
  static ProcessTree leaf(std::string_view label) { return leaf(normalize_label(label)); }
  static ProcessTree tau();
  /// Throws ArityError when SEQ/XOR/AND has no children or LOOP has fewer than two.
  static ProcessTree node(Operator op, std::vector<ProcessTree> children);

  Kind kind() const noexcept { return kind_; }
  bool is_leaf() const noexcept { return kind_ == Kind::Leaf; }
  bool is_silent() const noexcept { return kind_ == Kind::Silent; }
  bool is_node() const noexcept { return kind_ == Kind::Node; }

  const Activity& activity() const;
  Operator op() const;
  const std::vector<ProcessTree>& children() const noexcept { return children_; }

  /// Visible leaf labels in left-to-right order (duplicates kept).
  std::vector<Activity> leaf_labels() const;
  /// Leaves including silent ones.
  std::size_t leaf_count() const;
  std::size_t depth() const;

  friend bool operator==(const ProcessTree&, const ProcessTree&) = default;

 private:
  ProcessTree() = default;

  Kind kind_ = Kind::Silent;
  std::optional<Activity> activity_;
  Operator op_ = Operator::Seq;
  std::vector<ProcessTree> children_;
};

// ---------------------------------------------------------------------------
// Behavioural relations
// ---------------------------------------------------------------------------

/// Directly-follows graph (A, F).
class Dfg {
 public:
  Dfg() = default;
  /// Throws InvalidLabel if an edge endpoint is outside `activities`.
  Dfg(ActivitySet activities, std::set<ActivityPair> edges);

  const ActivitySet& activities() const noexcept { return activities_; }
  const std::set<ActivityPair>& edges() const noexcept { return edges_; }
  bool has_edge(const Activity& from, const Activity& to) const {
    return edges_.contains({from, to});
  }

  friend bool operator==(const Dfg&, const Dfg&) = default;

 private:
  ActivitySet activities_;
  std::set<ActivityPair> edges_;
};

enum class Relation : std::uint8_t { Forward, Backward, Parallel, None };

Relation mirror(Relation r);
std::string_view symbol(Relation r);

/// Total map A x A -> {->, <-, ||, #}, stored as a dense matrix over the
/// lexicographically sorted activity list.
class Footprint {
 public:
  /// Validates size and the mirror/diagonal invariants; throws Error otherwise.
  Footprint(std::vector<Activity> sorted_activities, std::vector<Relation> matrix);

  const std::vector<Activity>& activities() const noexcept { return activities_; }
  std::size_t size() const noexcept { return activities_.size(); }

  Relation at(std::size_t row, std::size_t col) const { return matrix_[row * size() + col]; }
  /// Relation for an activity pair; pairs outside the activity set are NONE.
  Relation relation(const Activity& x, const Activity& y) const;
  std::optional<std::size_t> index_of(const Activity& a) const;

  friend bool operator==(const Footprint&, const Footprint&) = default;

 private:
  std::vector<Activity> activities_;
  std::vector<Relation> matrix_;
};

struct EventuallyFollowsSet {
  std::set<ActivityPair> pairs;

  bool contains(const Activity& x, const Activity& y) const { return pairs.contains({x, y}); }
  friend bool operator==(const EventuallyFollowsSet&, const EventuallyFollowsSet&) = default;
};

}  // namespace pmsem
