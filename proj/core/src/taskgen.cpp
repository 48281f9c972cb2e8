#include "pmsem/taskgen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <unordered_map>

#include "pmsem/random.hpp"
#include "pmsem/tree_dsl.hpp"

namespace pmsem {

std::string_view to_string(Task task) {
  switch (task) {
    case Task::TSAD: return "tsad";
    case Task::ASAD: return "asad";
    case Task::SNAP: return "snap";
    case Task::SDFD: return "sdfd";
    case Task::SPTD: return "sptd";
  }
  return "?";
}

Task parse_task(std::string_view text) {
  std::string key = fold_key(text);
  std::erase(key, '-');
  for (Task t : kAllTasks) {
    if (key == to_string(t)) return t;
  }
  throw Error("unknown task: " + std::string(text));
}

bool is_binary(Task task) { return task == Task::TSAD || task == Task::ASAD; }
bool is_generation(Task task) { return task == Task::SDFD || task == Task::SPTD; }

std::string_view to_string(Label label) { return label == Label::Valid ? "Valid" : "Anomalous"; }

std::optional<Label> parse_label(std::string_view text) {
  const std::string key = match_key(text, MatchingMode::CaseInsensitive);
  if (key == "valid" || key == "false") return Label::Valid;
  if (key == "anomalous" || key == "true") return Label::Anomalous;
  return std::nullopt;
}

std::string_view to_string(RejectReason reason) {
  switch (reason) {
    case RejectReason::DuplicateModelId: return "DuplicateModelId";
    case RejectReason::DuplicateLabel: return "DuplicateLabel";
    case RejectReason::TooFewActivities: return "TooFewActivities";
    case RejectReason::DuplicateActivitySet: return "DuplicateActivitySet";
    case RejectReason::LanguageTooLarge: return "LanguageTooLarge";
    case RejectReason::EmptyLanguage: return "EmptyLanguage";
  }
  return "?";
}

std::string_view to_string(Split split) {
  switch (split) {
    case Split::Train: return "train";
    case Split::Validation: return "validation";
    case Split::Test: return "test";
  }
  return "?";
}

Split parse_split(std::string_view text) {
  const std::string key = fold_key(text);
  if (key == "train") return Split::Train;
  if (key == "validation" || key == "val") return Split::Validation;
  if (key == "test") return Split::Test;
  throw Error("unknown split: " + std::string(text));
}

// --- corpus validation ----------------------------------------------------

CorpusValidation validate_corpus(const std::vector<CorpusEntry>& entries,
                                 std::size_t max_sequences) {
  CorpusValidation out;
  std::set<std::string> seen_ids;
  std::set<ActivitySet> seen_sets;

  for (const auto& entry : entries) {
    auto reject = [&](RejectReason reason, std::string detail) {
      out.rejected.push_back({entry.model_id, reason, std::move(detail)});
    };
    if (!seen_ids.insert(entry.model_id).second) {
      reject(RejectReason::DuplicateModelId, "model id already used");
      continue;
    }
    const auto labels = entry.tree.leaf_labels();
    const ActivitySet distinct(labels.begin(), labels.end());
    if (distinct.size() != labels.size()) {
      reject(RejectReason::DuplicateLabel, "a leaf label occurs more than once");
      continue;
    }
    if (distinct.size() < 2) {
      reject(RejectReason::TooFewActivities, std::to_string(distinct.size()) + " activities");
      continue;
    }
    std::optional<ProcessModel> model;
    try {
      model = playout(entry.tree, max_sequences, entry.model_id, entry.name);
    } catch (const LanguageTooLarge& e) {
      reject(RejectReason::LanguageTooLarge, e.what());
      continue;
    }
    if (model->empty_only()) {
      reject(RejectReason::EmptyLanguage, "only the empty sequence is allowed");
      continue;
    }
    if (!seen_sets.insert(model->activities()).second) {
      reject(RejectReason::DuplicateActivitySet, "activity set equals an earlier model's");
      continue;
    }
    out.admitted.push_back({std::move(*model), entry.tree});
  }
  return out;
}

// --- generators -----------------------------------------------------------

namespace {

std::string record_id(const std::string& model_id, Task task, std::size_t index) {
  return model_id + "/" + std::string(to_string(task)) + "/" + std::to_string(index);
}

TaskRecord make_record(const ProcessModel& model, Task task, std::size_t index) {
  TaskRecord r;
  r.record_id = record_id(model.id(), task, index);
  r.model_id = model.id();
  r.task = task;
  r.activities = model.activities();
  return r;
}

}  // namespace

std::vector<TaskRecord> gen_tsad(const ProcessModel& model, std::uint64_t seed,
                                 const TsadOptions& options) {
  Rng rng(derive_seed(seed, model.id() + "/tsad"));
  const std::vector<Trace> base = model.visible_sequences();
  if (base.empty()) return {};

  std::vector<const Trace*> log;
  log.reserve(std::max(base.size(), options.min_log_size));
  for (const auto& t : base) log.push_back(&t);
  while (log.size() < options.min_log_size) log.push_back(&base[rng.below(base.size())]);

  std::vector<TaskRecord> out;
  out.reserve(log.size());
  for (std::size_t i = 0; i < log.size(); ++i) {
    const Trace& original = *log[i];
    TaskRecord r = make_record(model, Task::TSAD, i);
    r.payload = original;
    r.gold = Label::Valid;

    if (rng.bernoulli(options.noise_prob) && original.size() >= 2) {
      const std::size_t n = original.size();
      for (std::size_t attempt = 0; attempt < options.max_retries; ++attempt) {
        // Uniform over unordered pairs of distinct positions.
        std::size_t a = rng.below(n);
        std::size_t b = rng.below(n - 1);
        if (b >= a) ++b;
        Trace swapped = original;
        std::swap(swapped[a], swapped[b]);
        if (!model.contains(swapped)) {
          r.payload = std::move(swapped);
          r.gold = Label::Anomalous;
          break;
        }
      }
    }
    out.push_back(std::move(r));
  }
  return out;
}

AsadBatch gen_asad(const ProcessModel& model, std::uint64_t seed) {
  Rng rng(derive_seed(seed, model.id() + "/asad"));
  const EventuallyFollowsSet ef = eventually_follows(model);

  std::vector<ActivityPair> complement;
  for (const auto& x : model.activities()) {
    for (const auto& y : model.activities()) {
      if (!ef.contains(x, y)) complement.emplace_back(x, y);
    }
  }

  AsadBatch batch;
  std::size_t index = 0;
  for (const auto& pair : ef.pairs) {
    TaskRecord r = make_record(model, Task::ASAD, index++);
    r.payload = pair;
    r.gold = Label::Valid;
    batch.records.push_back(std::move(r));
  }
  batch.positives = ef.pairs.size();

  const auto picks = rng.sample_indices(complement.size(), ef.pairs.size());
  for (std::size_t k : picks) {
    TaskRecord r = make_record(model, Task::ASAD, index++);
    r.payload = complement[k];
    r.gold = Label::Anomalous;
    batch.records.push_back(std::move(r));
  }
  batch.negatives = picks.size();
  batch.shortfall = batch.positives - batch.negatives;
  return batch;
}

std::vector<TaskRecord> gen_snap(const ProcessModel& model, bool deduplicate) {
  std::vector<TaskRecord> out;
  std::set<std::pair<Trace, Activity>> seen;
  std::size_t index = 0;
  for (const auto& seq : model.sequences()) {
    for (std::size_t k = 1; k < seq.size(); ++k) {
      Trace prefix(seq.begin(), seq.begin() + static_cast<std::ptrdiff_t>(k));
      if (deduplicate && !seen.emplace(prefix, seq[k]).second) continue;
      TaskRecord r = make_record(model, Task::SNAP, index++);
      r.payload = std::move(prefix);
      r.gold = seq[k];
      out.push_back(std::move(r));
    }
  }
  return out;
}

TaskRecord gen_sdfd(const ProcessModel& model) {
  TaskRecord r = make_record(model, Task::SDFD, 0);
  r.gold = dfg_of_model(model);
  return r;
}

TaskRecord gen_sptd(const ProcessModel& model, const ProcessTree& tree) {
  TaskRecord r = make_record(model, Task::SPTD, 0);
  r.gold = TreeText{render_tree(tree)};
  return r;
}

// --- splitting ------------------------------------------------------------

std::size_t activity_stratum(std::size_t n) {
  if (n <= 3) return 0;
  if (n <= 5) return 1;
  if (n <= 8) return 2;
  if (n <= 12) return 3;
  return 4;
}

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

std::vector<std::vector<std::size_t>> leakage_components(const std::vector<ProcessModel>& models) {
  DisjointSets sets(models.size());
  std::unordered_map<std::string, std::size_t> owner;
  for (std::size_t i = 0; i < models.size(); ++i) {
    for (const auto& seq : models[i].sequences()) {
      auto [it, inserted] = owner.emplace(trace_key(seq), i);
      if (!inserted) sets.unite(it->second, i);
    }
  }
  std::map<std::size_t, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < models.size(); ++i) groups[sets.find(i)].push_back(i);

  std::vector<std::vector<std::size_t>> out;
  out.reserve(groups.size());
  for (auto& [root, members] : groups) out.push_back(std::move(members));
  return out;
}

SplitAssignment split_corpus(const std::vector<ProcessModel>& models, const SplitRatios& ratios,
                             std::uint64_t seed) {
  const std::array<double, 3> target = {ratios.train, ratios.validation, ratios.test};
  for (double r : target) {
    if (r < 0.0) throw Error("split ratios must be non-negative");
  }
  if (std::abs(target[0] + target[1] + target[2] - 1.0) > 1e-9) {
    throw Error("split ratios must sum to 1");
  }

  const auto components = leakage_components(models);
  std::array<std::vector<std::size_t>, kStrataCount> strata;
  for (std::size_t c = 0; c < components.size(); ++c) {
    std::size_t largest = 0;
    for (std::size_t m : components[c]) largest = std::max(largest, models[m].activities().size());
    strata[activity_stratum(largest)].push_back(c);
  }

  constexpr std::array<Split, 3> kSplits = {Split::Train, Split::Validation, Split::Test};
  SplitAssignment assignment;
  Rng rng(derive_seed(seed, "split"));
  for (auto& stratum : strata) {
    rng.shuffle(stratum);
    std::array<std::size_t, 3> counts = {0, 0, 0};
    std::size_t assigned = 0;
    for (std::size_t c : stratum) {
      const std::size_t size = components[c].size();
      // Assign to the split furthest below its target after this component
      // lands; ties favour the earlier split.
      std::size_t best = 0;
      double best_deficit = -1e300;
      for (std::size_t s = 0; s < 3; ++s) {
        const double deficit = target[s] * static_cast<double>(assigned + size) -
                               static_cast<double>(counts[s]);
        if (target[s] > 0.0 && deficit > best_deficit + 1e-9) {
          best = s;
          best_deficit = deficit;
        }
      }
      counts[best] += size;
      assigned += size;
      for (std::size_t m : components[c]) assignment[models[m].id()] = kSplits[best];
    }
  }
  return assignment;
}

}  // namespace pmsem
