#include "pmsem/eval.hpp"

#include <set>
#include <unordered_map>

#include "pmsem/random.hpp"
#include "pmsem/tree_dsl.hpp"

namespace pmsem {

std::string_view to_string(Metric metric) {
  return metric == Metric::MacroF1 ? "macro_f1" : "mean_footprint_fitness";
}

ScoreReport macro_f1(const std::vector<std::string>& golds, const std::vector<std::string>& preds,
                     const std::vector<std::string>& class_universe) {
  if (golds.size() != preds.size()) {
    throw LengthMismatch("gold and prediction lists differ in length (" +
                         std::to_string(golds.size()) + " vs " + std::to_string(preds.size()) +
                         ")");
  }
  struct Counts {
    std::size_t tp = 0, fp = 0, fn = 0;
  };
  std::map<std::string, Counts> counts;
  for (const auto& c : class_universe) counts[c];

  for (std::size_t i = 0; i < golds.size(); ++i) {
    const auto& g = golds[i];
    const auto& p = preds[i];
    if (g == p) {
      if (auto it = counts.find(g); it != counts.end()) ++it->second.tp;
      continue;
    }
    if (auto it = counts.find(g); it != counts.end()) ++it->second.fn;
    if (auto it = counts.find(p); it != counts.end()) ++it->second.fp;
  }

  ScoreReport report;
  report.metric = Metric::MacroF1;
  report.n_records = golds.size();
  double sum = 0.0;
  for (const auto& [cls, c] : counts) {
    ClassScore s;
    s.support = c.tp + c.fn;
    s.precision = c.tp + c.fp == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
    s.recall = c.tp + c.fn == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    s.f1 = s.precision + s.recall == 0.0 ? 0.0
                                         : 2.0 * s.precision * s.recall / (s.precision + s.recall);
    sum += s.f1;
    report.per_class[cls] = s;
  }
  report.value = counts.empty() ? 0.0 : sum / static_cast<double>(counts.size());
  return report;
}

double footprint_fitness(const Footprint& gold, const Footprint& predicted,
                         const FitnessOptions& options) {
  const std::size_t n = gold.size();
  std::vector<std::optional<std::size_t>> map(n);
  for (std::size_t i = 0; i < n; ++i) map[i] = predicted.index_of(gold.activities()[i]);

  std::size_t equal = 0;
  std::size_t total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j && !options.include_diagonal) continue;
      ++total;
      const Relation p = map[i] && map[j] ? predicted.at(*map[i], *map[j]) : Relation::None;
      if (gold.at(i, j) == p) ++equal;
    }
  }
  return total == 0 ? 1.0 : static_cast<double>(equal) / static_cast<double>(total);
}

Dfg project_edges(const std::vector<std::pair<std::string, std::string>>& edges,
                  const ActivitySet& gold_activities, MatchingMode mode,
                  std::size_t* hallucinated) {
  std::unordered_map<std::string, const Activity*> by_key;
  for (const auto& a : gold_activities) by_key.emplace(match_key(a.label(), mode), &a);

  std::set<std::string> unknown;
  std::set<ActivityPair> projected;
  for (const auto& [from, to] : edges) {
    const auto kf = match_key(from, mode);
    const auto kt = match_key(to, mode);
    auto f = by_key.find(kf);
    auto t = by_key.find(kt);
    if (f == by_key.end()) unknown.insert(kf);
    if (t == by_key.end()) unknown.insert(kt);
    if (f != by_key.end() && t != by_key.end()) projected.emplace(*f->second, *t->second);
  }
  if (hallucinated) *hallucinated = unknown.size();
  return Dfg(gold_activities, std::move(projected));
}

namespace {

RecordScore score_edges(const Dfg& gold_dfg,
                        const std::vector<std::pair<std::string, std::string>>& edges,
                        MatchingMode mode, const FitnessOptions& options) {
  RecordScore score;
  const Dfg pred = project_edges(edges, gold_dfg.activities(), mode, &score.hallucinated);
  score.fitness = footprint_fitness(footprint(gold_dfg), footprint(pred), options);
  return score;
}

Dfg gold_tree_dfg(const TaskRecord& gold, std::size_t max_sequences) {
  const ProcessModel model = playout(parse_tree(gold.tree().text), max_sequences);
  return dfg_of_traces(model.sequences(), gold.activities);
}

RecordScore score_edge_text(const Dfg& gold_dfg, std::string_view prediction, MatchingMode mode,
                            const FitnessOptions& options) {
  const EdgeParseResult parsed = parse_dfg_edges(prediction, false);
  if (parsed.edges.empty() && !parsed.skipped.empty()) {
    RecordScore failed;
    failed.parse_failure = true;
    failed.skipped_lines = parsed.skipped.size();
    return failed;
  }
  RecordScore score = score_edges(gold_dfg, parsed.edges, mode, options);
  score.skipped_lines = parsed.skipped.size();
  return score;
}

}  // namespace

RecordScore score_sdfd(const TaskRecord& gold, std::string_view prediction, MatchingMode mode,
                       const FitnessOptions& options) {
  return score_edge_text(gold.dfg(), prediction, mode, options);
}

RecordScore score_sptd(const TaskRecord& gold, std::string_view prediction,
                       std::size_t max_sequences, MatchingMode mode,
                       const FitnessOptions& options) {
  const Dfg gold_dfg = gold_tree_dfg(gold, max_sequences);
  std::set<Trace> language;
  try {
    language = play_language(parse_tree(prediction), max_sequences);
  } catch (const Error&) {
    // SyntaxError, ArityError and LanguageTooLarge all score zero.
    RecordScore failed;
    failed.parse_failure = true;
    return failed;
  }
  std::set<std::pair<std::string, std::string>> edges;
  for (const auto& t : language) {
    for (std::size_t i = 0; i + 1 < t.size(); ++i) edges.emplace(t[i].label(), t[i + 1].label());
  }
  std::set<std::string> labels;
  for (const auto& t : language) {
    for (const auto& a : t) labels.insert(a.label());
  }
  RecordScore score = score_edges(gold_dfg, {edges.begin(), edges.end()}, mode, options);
  // Isolated predicted activities can be hallucinated too.
  std::set<std::string> unknown;
  std::set<std::string> gold_keys;
  for (const auto& a : gold.activities) gold_keys.insert(match_key(a.label(), mode));
  for (const auto& l : labels) {
    if (!gold_keys.contains(match_key(l, mode))) unknown.insert(match_key(l, mode));
  }
  score.hallucinated = unknown.size();
  return score;
}

std::string classify_prediction(Task task, std::string_view prediction, MatchingMode mode) {
  if (is_binary(task)) {
    const auto label = parse_label(prediction);
    return label ? std::string(to_string(*label)) : std::string{};
  }
  return match_key(prediction, mode);
}

std::string gold_class(const TaskRecord& record, MatchingMode mode) {
  if (is_binary(record.task)) return std::string(to_string(record.label()));
  return match_key(record.next_activity().label(), mode);
}

ScoreReport score_task(Task task, const std::vector<TaskRecord>& golds,
                       const std::vector<Prediction>& predictions, MatchingMode mode,
                       std::size_t max_sequences, const FitnessOptions& options) {
  std::unordered_map<std::string, std::size_t> gold_index;
  for (std::size_t i = 0; i < golds.size(); ++i) {
    if (golds[i].task != task) throw Error("gold record " + golds[i].record_id + " has wrong task");
    if (!gold_index.emplace(golds[i].record_id, i).second) {
      throw Error("duplicate gold record id " + golds[i].record_id);
    }
  }
  std::vector<const Prediction*> aligned(golds.size(), nullptr);
  for (const auto& p : predictions) {
    auto it = gold_index.find(p.record_id);
    if (it == gold_index.end()) throw Error("prediction for unknown record id " + p.record_id);
    if (aligned[it->second]) throw Error("duplicate prediction for record id " + p.record_id);
    aligned[it->second] = &p;
  }

  ScoreReport report;
  if (!is_generation(task)) {
    std::vector<std::string> gold_classes;
    std::vector<std::string> pred_classes;
    std::size_t failures = 0;
    std::size_t missing = 0;
    std::size_t hallucinated = 0;
    std::set<std::string> universe;
    for (std::size_t i = 0; i < golds.size(); ++i) {
      gold_classes.push_back(gold_class(golds[i], mode));
      std::string pred;
      if (!aligned[i]) {
        ++missing;
      } else {
        pred = classify_prediction(task, aligned[i]->text, mode);
        if (pred.empty()) ++failures;
      }
      if (task == Task::SNAP && !pred.empty()) {
        bool known = false;
        for (const auto& a : golds[i].activities) known = known || match_key(a.label(), mode) == pred;
        if (!known) ++hallucinated;
        universe.insert(pred);
      }
      pred_classes.push_back(std::move(pred));
    }
    if (is_binary(task)) {
      universe = {"Valid", "Anomalous"};
    } else {
      universe.insert(gold_classes.begin(), gold_classes.end());
    }
    report = macro_f1(gold_classes, pred_classes, {universe.begin(), universe.end()});
    report.n_parse_failures = failures + missing;
    report.n_missing = missing;
    report.n_hallucinated = hallucinated;
  } else {
    report.metric = Metric::MeanFootprintFitness;
    report.n_records = golds.size();
    double sum = 0.0;
    for (std::size_t i = 0; i < golds.size(); ++i) {
      RecordScore s;
      if (!aligned[i]) {
        s.parse_failure = true;
        ++report.n_missing;
      } else if (task == Task::SDFD) {
        s = score_sdfd(golds[i], aligned[i]->text, mode, options);
      } else if (aligned[i]->is_edge_list) {
        s = score_edge_text(gold_tree_dfg(golds[i], max_sequences), aligned[i]->text, mode,
                            options);
      } else {
        s = score_sptd(golds[i], aligned[i]->text, max_sequences, mode, options);
      }
      if (s.parse_failure) ++report.n_parse_failures;
      report.n_hallucinated += s.hallucinated;
      report.per_record_fitness[golds[i].record_id] = s.fitness;
      sum += s.fitness;
    }
    report.value = golds.empty() ? 0.0 : sum / static_cast<double>(golds.size());
  }
  report.task = task;
  report.matching_mode = mode;
  return report;
}

// --- baselines ------------------------------------------------------------

std::vector<std::string> random_classification_baseline(const std::vector<TaskRecord>& records,
                                                         std::uint64_t seed) {
  std::vector<std::string> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    Rng rng(derive_seed(seed, r.record_id));
    if (is_binary(r.task)) {
      out.emplace_back(to_string(rng.below(2) == 0 ? Label::Valid : Label::Anomalous));
    } else if (r.task == Task::SNAP) {
      auto it = r.activities.begin();
      std::advance(it, static_cast<std::ptrdiff_t>(rng.below(r.activities.size())));
      out.push_back(it->label());
    } else {
      throw Error("random classification baseline applies to classification tasks only");
    }
  }
  return out;
}

Footprint random_footprint_baseline(const ActivitySet& activities, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Activity> acts(activities.begin(), activities.end());
  const std::size_t n = acts.size();
  constexpr Relation kOffDiagonal[] = {Relation::Forward, Relation::Backward, Relation::Parallel,
                                       Relation::None};
  std::vector<Relation> matrix(n * n, Relation::None);
  for (std::size_t i = 0; i < n; ++i) {
    matrix[i * n + i] = rng.below(2) == 0 ? Relation::Parallel : Relation::None;
    for (std::size_t j = i + 1; j < n; ++j) {
      const Relation r = kOffDiagonal[rng.below(4)];
      matrix[i * n + j] = r;
      matrix[j * n + i] = mirror(r);
    }
  }
  return Footprint(std::move(acts), std::move(matrix));
}

Dfg dfg_from_footprint(const Footprint& fp) {
  std::set<ActivityPair> edges;
  const auto& acts = fp.activities();
  for (std::size_t i = 0; i < fp.size(); ++i) {
    for (std::size_t j = 0; j < fp.size(); ++j) {
      const Relation r = fp.at(i, j);
      if (r == Relation::Forward || r == Relation::Parallel) edges.emplace(acts[i], acts[j]);
    }
  }
  return Dfg(ActivitySet(acts.begin(), acts.end()), std::move(edges));
}

double random_footprint_expected_fitness(std::size_t n, const FitnessOptions& options) {
  if (n == 0) return 1.0;
  if (!options.include_diagonal) return n == 1 ? 1.0 : 0.25;
  const double total = static_cast<double>(n * n);
  const double diag = static_cast<double>(n);
  return 0.25 * (total - diag) / total + 0.5 * diag / total;
}

}  // namespace pmsem
