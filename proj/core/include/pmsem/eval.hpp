#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pmsem/core.hpp"
#include "pmsem/semantics.hpp"
#include "pmsem/taskgen.hpp"

namespace pmsem {

class LengthMismatch : public Error {
 public:
  using Error::Error;
};

enum class Metric { MacroF1, MeanFootprintFitness };

std::string_view to_string(Metric metric);

struct ClassScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;  // gold count
};

struct ScoreReport {
  Task task = Task::TSAD;
  std::size_t n_records = 0;
  Metric metric = Metric::MacroF1;
  double value = 0.0;
  std::map<std::string, ClassScore> per_class;         // classification
  std::map<std::string, double> per_record_fitness;    // generation, keyed by record id
  std::size_t n_parse_failures = 0;
  std::size_t n_missing = 0;         // gold records without a prediction
  std::size_t n_hallucinated = 0;    // predicted activities outside the gold set
  MatchingMode matching_mode = MatchingMode::CaseInsensitive;
};

/// Macro-averaged F1 over `class_universe`. Predictions outside the universe
/// (including empty strings for unparseable output) count as wrong for the
/// gold class and are not themselves scored. Per-class F1 is 0 when
/// precision + recall = 0.
ScoreReport macro_f1(const std::vector<std::string>& golds, const std::vector<std::string>& preds,
                     const std::vector<std::string>& class_universe);

struct FitnessOptions {
  bool include_diagonal = true;
};

/// Fraction of gold-activity pairs on which both footprints agree. Pairs
/// involving activities missing from `predicted` count as NONE there;
/// predicted activities outside the gold set are ignored.
double footprint_fitness(const Footprint& gold, const Footprint& predicted,
                         const FitnessOptions& options = {});

struct RecordScore {
  double fitness = 0.0;
  bool parse_failure = false;
  std::size_t hallucinated = 0;
  std::size_t skipped_lines = 0;
};

/// Maps label pairs onto the gold activity set under the matching mode.
/// Edges with an endpoint outside the set are dropped and each distinct
/// unknown label is counted in `hallucinated`.
Dfg project_edges(const std::vector<std::pair<std::string, std::string>>& edges,
                  const ActivitySet& gold_activities, MatchingMode mode,
                  std::size_t* hallucinated = nullptr);

RecordScore score_sdfd(const TaskRecord& gold, std::string_view prediction,
                       MatchingMode mode = MatchingMode::CaseInsensitive,
                       const FitnessOptions& options = {});

RecordScore score_sptd(const TaskRecord& gold, std::string_view prediction,
                       std::size_t max_sequences = kDefaultMaxSequences,
                       MatchingMode mode = MatchingMode::CaseInsensitive,
                       const FitnessOptions& options = {});

/// Classification prediction text normalized to a class name: `Valid` /
/// `Anomalous` for binary tasks (true/false accepted), the normalized label
/// for S-NAP. Empty when the text cannot be interpreted.
std::string classify_prediction(Task task, std::string_view prediction, MatchingMode mode);
/// Gold class name of a classification record under the matching mode.
std::string gold_class(const TaskRecord& record, MatchingMode mode);

struct Prediction {
  std::string record_id;
  std::string text;
  /// S-PTD predictions may carry an edge list instead of a tree.
  bool is_edge_list = false;
};

/// Scores a set of predictions against gold records of one task. Gold
/// records without a prediction are scored as parse failures.
/// Throws Error for prediction ids not present in `golds`.
ScoreReport score_task(Task task, const std::vector<TaskRecord>& golds,
                       const std::vector<Prediction>& predictions,
                       MatchingMode mode = MatchingMode::CaseInsensitive,
                       std::size_t max_sequences = kDefaultMaxSequences,
                       const FitnessOptions& options = {});

// ---------------------------------------------------------------------------
// Baselines
// ---------------------------------------------------------------------------

/// Uniform class per record: {Valid, Anomalous} for binary tasks, the
/// record's activity set for S-NAP. Returns prediction texts aligned with
/// `records`.
std::vector<std::string> random_classification_baseline(const std::vector<TaskRecord>& records,
                                                         std::uint64_t seed);

/// Uniform relation per unordered pair (mirrored), uniform || / # on the
/// diagonal.
Footprint random_footprint_baseline(const ActivitySet& activities, std::uint64_t seed);

/// DFG whose footprint equals `fp`.
Dfg dfg_from_footprint(const Footprint& fp);

/// Expected fitness of the random footprint baseline against any gold
/// footprint over n activities: (1/4) off-diagonal share + (1/2) diagonal share.
double random_footprint_expected_fitness(std::size_t n, const FitnessOptions& options = {});

}  // namespace pmsem
