#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>

#include "pmsem/core.hpp"

namespace pmsem {

/// Sequence cap for play-out; comfortably above the largest corpus language
/// (10,080 sequences).
inline constexpr std::size_t kDefaultMaxSequences = 32768;

class LanguageTooLarge : public Error {
 public:
  explicit LanguageTooLarge(std::size_t limit);
  std::size_t limit() const noexcept { return limit_; }

 private:
  std::size_t limit_;
};

/// Language of a tree with every loop taking at most one redo iteration.
///
///   leaf a       {<a>}
///   tau          {<>}
///   ->(T1..Tn)   concatenation in child order
///   X(T1..Tn)    union
///   +(T1..Tn)    all interleavings of one sequence per child
///   *(T1..Tn)    L(T1) ∪ { u·v·w | u,w ∈ L(T1), v ∈ L(Ti), i ≥ 2 }
///
/// Throws LanguageTooLarge as soon as any intermediate language exceeds
/// max_sequences; every operator's language is at least as large as each of
/// its children's, so an intermediate overflow implies a final one.
std::set<Trace> play_language(const ProcessTree& tree,
                              std::size_t max_sequences = kDefaultMaxSequences);

ProcessModel playout(const ProcessTree& tree, std::size_t max_sequences = kDefaultMaxSequences,
                     std::string model_id = {}, std::optional<std::string> name = std::nullopt);

Dfg dfg_of_model(const ProcessModel& model);
Dfg dfg_of_log(const EventLog& log);

/// Edges are taken from `traces`; the activity set is the one given.
Dfg dfg_of_traces(const std::set<Trace>& traces, const ActivitySet& activities);

Footprint footprint(const Dfg& dfg);

EventuallyFollowsSet eventually_follows(const ProcessModel& model);

}  // namespace pmsem
