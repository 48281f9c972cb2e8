#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "pmsem/core.hpp"
#include "pmsem/semantics.hpp"

namespace pmsem {

enum class Task { TSAD, ASAD, SNAP, SDFD, SPTD };

inline constexpr std::array<Task, 5> kAllTasks = {Task::TSAD, Task::ASAD, Task::SNAP, Task::SDFD,
                                                  Task::SPTD};

std::string_view to_string(Task task);
Task parse_task(std::string_view text);
bool is_binary(Task task);
bool is_generation(Task task);

enum class Label { Valid, Anomalous };

std::string_view to_string(Label label);
std::optional<Label> parse_label(std::string_view text);

/// Gold process tree, stored in canonical text form.
struct TreeText {
  std::string text;
  friend bool operator==(const TreeText&, const TreeText&) = default;
};

struct TaskRecord {
  using Payload = std::variant<std::monostate, Trace, ActivityPair>;
  using Gold = std::variant<Label, Activity, Dfg, TreeText>;

  std::string record_id;
  std::string model_id;
  Task task = Task::TSAD;
  ActivitySet activities;
  Payload payload;  // trace (T-SAD), prefix (S-NAP), pair (A-SAD), none otherwise
  Gold gold;

  const Trace& trace() const { return std::get<Trace>(payload); }
  const ActivityPair& pair() const { return std::get<ActivityPair>(payload); }
  Label label() const { return std::get<Label>(gold); }
  const Activity& next_activity() const { return std::get<Activity>(gold); }
  const Dfg& dfg() const { return std::get<Dfg>(gold); }
  const TreeText& tree() const { return std::get<TreeText>(gold); }
};

// ---------------------------------------------------------------------------
// Corpus validation
// ---------------------------------------------------------------------------

struct CorpusEntry {
  std::string model_id;
  std::optional<std::string> name;
  ProcessTree tree;
};

struct AdmittedModel {
  ProcessModel model;
  ProcessTree tree;
};

enum class RejectReason {
  DuplicateModelId,
  DuplicateLabel,
  TooFewActivities,
  DuplicateActivitySet,
  LanguageTooLarge,
  EmptyLanguage,
};

std::string_view to_string(RejectReason reason);

struct Rejection {
  std::string model_id;
  RejectReason reason;
  std::string detail;
};

struct CorpusValidation {
  std::vector<AdmittedModel> admitted;
  std::vector<Rejection> rejected;
};

/// Plays out every entry and admits those with unique leaf labels, at least
/// two activities, a bounded non-empty language and an activity set not seen
/// earlier in the batch. Never throws on a bad entry.
CorpusValidation validate_corpus(const std::vector<CorpusEntry>& entries,
                                 std::size_t max_sequences = kDefaultMaxSequences);

// ---------------------------------------------------------------------------
// Dataset generators
// ---------------------------------------------------------------------------

struct TsadOptions {
  std::size_t min_log_size = 100;
  double noise_prob = 0.5;
  std::size_t max_retries = 10;
};

/// Trace-level anomaly records. Builds a log with one trace per sequence,
/// pads it by uniform duplication to min_log_size, then per trace instance
/// decides on noise with noise_prob. A noised trace gets two distinct
/// positions swapped; positions are re-drawn until the result leaves the
/// language, for at most max_retries draws. Failed or skipped noise keeps
/// the original trace as Valid.
std::vector<TaskRecord> gen_tsad(const ProcessModel& model, std::uint64_t seed,
                                 const TsadOptions& options = {});

struct AsadBatch {
  std::vector<TaskRecord> records;
  std::size_t positives = 0;
  std::size_t negatives = 0;
  /// Negatives missing for a 50/50 split (complement smaller than EF).
  std::size_t shortfall = 0;
};

AsadBatch gen_asad(const ProcessModel& model, std::uint64_t seed);

/// Next-activity records, one per proper prefix of every sequence.
std::vector<TaskRecord> gen_snap(const ProcessModel& model, bool deduplicate = true);

TaskRecord gen_sdfd(const ProcessModel& model);
TaskRecord gen_sptd(const ProcessModel& model, const ProcessTree& tree);

// ---------------------------------------------------------------------------
// Splitting
// ---------------------------------------------------------------------------

enum class Split { Train, Validation, Test };

std::string_view to_string(Split split);
Split parse_split(std::string_view text);

using SplitAssignment = std::map<std::string, Split>;

struct SplitRatios {
  double train = 0.70;
  double validation = 0.20;
  double test = 0.10;
};

/// Stratum index of an activity count: 2-3, 4-5, 6-8, 9-12, 13+.
std::size_t activity_stratum(std::size_t n_activities);
inline constexpr std::size_t kStrataCount = 5;

/// Groups of model indices sharing at least one execution sequence
/// (transitively). Groups are ordered by their smallest index.
std::vector<std::vector<std::size_t>> leakage_components(const std::vector<ProcessModel>& models);

/// Leakage-free stratified split; see README for the assignment rule.
SplitAssignment split_corpus(const std::vector<ProcessModel>& models, const SplitRatios& ratios,
                             std::uint64_t seed);

}  // namespace pmsem
