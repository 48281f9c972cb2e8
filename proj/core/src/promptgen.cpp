#include "pmsem/promptgen.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <tuple>

#include "pmsem/random.hpp"
#include "pmsem/tree_dsl.hpp"

namespace pmsem {

namespace {

constexpr std::string_view kDefaultBlock = "Activities: {activities}\n{instance}{answer_key}";

constexpr std::string_view kTreeNotation =
    "Process tree notation: ->( ... ) runs its children in order, X( ... ) runs exactly one of "
    "its children, +( ... ) runs all children in any interleaving, *( ... ) runs its first "
    "child, then optionally one of the other children followed by the first child again. "
    "'tau' is a silent step. Activity labels are written in single quotes and children are "
    "separated by commas.";

std::string replace_all(std::string text, std::string_view key, std::string_view value) {
  std::size_t pos = 0;
  while ((pos = text.find(key, pos)) != std::string::npos) {
    text.replace(pos, key.size(), value);
    pos += value.size();
  }
  return text;
}

std::string join_labels(const Trace& trace) {
  std::string out;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    if (i) out += ", ";
    out += trace[i].label();
  }
  return out;
}

std::string answered_block(const PromptTemplate& tmpl, const TaskRecord& record) {
  const std::string answer = format_answer(record);
  const char sep = record.task == Task::SDFD ? '\n' : ' ';
  return render_block(tmpl, record) + sep + answer;
}

}  // namespace

TemplateSet TemplateSet::defaults() {
  TemplateSet set;
  const std::string block(kDefaultBlock);
  set.set(Task::TSAD,
          {"You are given the activities of a business process and a sequence of executed "
           "activities. Decide whether the sequence is anomalous, meaning that the order or "
           "combination of its activities does not make sense for the process. Answer true if "
           "the sequence is anomalous and false if it is valid.",
           block});
  set.set(Task::ASAD,
          {"You are given the activities of a business process and an ordered pair of two of "
           "them. Decide whether it is anomalous for the first activity to occur before the "
           "second one in an execution of the process. Answer true if this order is anomalous "
           "and false if it is valid.",
           block});
  set.set(Task::SNAP,
          {"You are given the activities of a business process and the beginning of an "
           "execution of the process. Predict the activity that is executed next. Answer with "
           "exactly one activity from the list.",
           block});
  set.set(Task::SDFD,
          {"You are given the activities of a business process. List every pair of activities "
           "where the second activity can directly follow the first one. Write one pair per "
           "line in the form 'first activity' -> 'second activity'.",
           block});
  set.set(Task::SPTD,
          {"You are given the activities of a business process. Determine the process tree of "
           "the process. A process tree is a hierarchical process model.\n" +
               std::string(kTreeNotation) +
               "\nMake sure that you use each activity exactly once in the tree and that all "
               "parentheses are set correctly.",
           block});
  return set;
}

PromptTemplate parse_template(std::string_view text) {
  std::string description;
  std::string block;
  std::istringstream in{std::string(text)};
  std::string line;
  bool in_block = false;
  while (std::getline(in, line)) {
    if (!in_block && line == "---") {
      in_block = true;
      continue;
    }
    std::string& target = in_block ? block : description;
    if (!target.empty()) target.push_back('\n');
    target += line;
  }
  if (!in_block) throw Error("template file lacks a '---' separator line");
  for (std::string_view key : {"{activities}", "{answer_key}"}) {
    if (block.find(key) == std::string::npos) {
      throw Error("template block lacks placeholder " + std::string(key));
    }
  }
  return {description, block};
}

void TemplateSet::load_overrides(const std::filesystem::path& dir) {
  for (Task task : kAllTasks) {
    const auto file = dir / (std::string(to_string(task)) + ".txt");
    if (!std::filesystem::exists(file)) continue;
    std::ifstream in(file);
    if (!in) throw Error("cannot read template file " + file.string());
    std::stringstream buf;
    buf << in.rdbuf();
    set(task, parse_template(buf.str()));
  }
}

std::string format_activity_set(const ActivitySet& activities) {
  std::string out = "{";
  bool first = true;
  for (const auto& a : activities) {
    if (!first) out += ", ";
    first = false;
    out += a.label();
  }
  out += "}";
  return out;
}

std::string format_trace(const Trace& trace) { return "[" + join_labels(trace) + "]"; }

std::string format_instance(const TaskRecord& record) {
  switch (record.task) {
    case Task::TSAD: return "Activity sequence: " + format_trace(record.trace()) + "\n";
    case Task::ASAD:
      return "1. Activity: " + record.pair().first.label() + "\n2. Activity: " +
             record.pair().second.label() + "\n";
    case Task::SNAP: return "Prefix: " + format_trace(record.trace()) + "\n";
    case Task::SDFD:
    case Task::SPTD: return {};
  }
  return {};
}

std::string_view answer_key(Task task) {
  switch (task) {
    case Task::TSAD:
    case Task::ASAD: return "Anomalous:";
    case Task::SNAP: return "Next activity:";
    case Task::SDFD: return "Directly-follows pairs:";
    case Task::SPTD: return "Process Tree:";
  }
  return "";
}

std::string format_answer(const TaskRecord& record) {
  switch (record.task) {
    case Task::TSAD:
    case Task::ASAD: return record.label() == Label::Anomalous ? "true" : "false";
    case Task::SNAP: return record.next_activity().label();
    case Task::SDFD: return render_dfg_edges(record.dfg());
    case Task::SPTD: return record.tree().text;
  }
  return {};
}

std::string render_block(const PromptTemplate& tmpl, const TaskRecord& record) {
  std::string out = replace_all(tmpl.block, "{activities}", format_activity_set(record.activities));
  out = replace_all(std::move(out), "{instance}", format_instance(record));
  return replace_all(std::move(out), "{answer_key}", answer_key(record.task));
}

// --- shot pool ------------------------------------------------------------

ShotPool::ShotPool(Task task, std::vector<TaskRecord> train_records) : task_(task) {
  for (auto& r : train_records) {
    if (r.task == task) records_.push_back(std::move(r));
  }
  std::sort(records_.begin(), records_.end(), [](const TaskRecord& x, const TaskRecord& y) {
    return std::tie(x.model_id, x.record_id) < std::tie(y.model_id, y.record_id);
  });
  model_slot_.resize(records_.size());
  label_slot_.resize(records_.size());
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const auto& r = records_[i];
    if (!index_.emplace(r.record_id, i).second) {
      throw Error("duplicate record id in shot pool: " + r.record_id);
    }
    if (std::holds_alternative<Label>(r.gold)) {
      auto& list = r.label() == Label::Valid ? valid_ : anomalous_;
      label_slot_[i] = list.size();
      list.push_back(i);
    }
    if (i == 0 || records_[i - 1].model_id != r.model_id) by_model_.emplace_back();
    model_slot_[i] = by_model_.size() - 1;
    by_model_.back().push_back(i);
  }
}

const std::vector<std::size_t>& ShotPool::by_label(Label label) const {
  return label == Label::Valid ? valid_ : anomalous_;
}

std::optional<std::size_t> ShotPool::find(const std::string& record_id) const {
  auto it = index_.find(record_id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t default_shots(Task task) { return is_generation(task) ? 5 : 6; }

namespace {

/// k distinct positions from [0, n) skipping `excluded` when set.
std::vector<std::size_t> sample_skipping(Rng& rng, std::size_t n, std::size_t k,
                                         std::optional<std::size_t> excluded) {
  const std::size_t usable = excluded ? n - 1 : n;
  auto picks = rng.sample_indices(usable, k);
  if (excluded) {
    for (auto& p : picks) {
      if (p >= *excluded) ++p;
    }
  }
  return picks;
}

}  // namespace

PromptBundle render_icl(Task task, const TaskRecord& query, const ShotPool& pool,
                        std::size_t shots, std::uint64_t seed, const TemplateSet& templates) {
  if (shots == 0) throw Error("shots must be at least 1");
  if (query.task != task || pool.task() != task) {
    throw Error("query, pool and task disagree");
  }
  Rng rng(derive_seed(seed, query.record_id));
  const auto& records = pool.records();
  const std::optional<std::size_t> self = pool.find(query.record_id);

  std::vector<std::size_t> chosen;
  if (is_binary(task)) {
    const std::size_t n_valid = (shots + 1) / 2;
    const std::size_t n_anom = shots / 2;
    auto draw = [&](Label label, std::size_t k) {
      const auto& list = pool.by_label(label);
      std::optional<std::size_t> skip;
      if (self && records[*self].label() == label) skip = pool.label_slot(*self);
      const std::size_t usable = list.size() - (skip ? 1 : 0);
      if (usable < k) {
        throw PoolExhausted("need " + std::to_string(k) + " " + std::string(to_string(label)) +
                            " training records, have " + std::to_string(usable));
      }
      std::vector<std::size_t> out;
      for (std::size_t p : sample_skipping(rng, list.size(), k, skip)) out.push_back(list[p]);
      return out;
    };
    const auto valid = draw(Label::Valid, n_valid);
    const auto anom = draw(Label::Anomalous, n_anom);
    for (std::size_t i = 0; i < n_valid; ++i) {
      chosen.push_back(valid[i]);
      if (i < n_anom) chosen.push_back(anom[i]);
    }
  } else {
    const auto& models = pool.by_model();
    std::optional<std::size_t> self_model;
    if (self) self_model = pool.model_slot(*self);
    std::optional<std::size_t> skip_model;
    if (self_model && models[*self_model].size() == 1) skip_model = self_model;
    const std::size_t usable = models.size() - (skip_model ? 1 : 0);
    if (usable < shots) {
      throw PoolExhausted("need records from " + std::to_string(shots) +
                          " distinct training models, have " + std::to_string(usable));
    }
    for (std::size_t m : sample_skipping(rng, models.size(), shots, skip_model)) {
      const auto& idx = models[m];
      std::optional<std::size_t> skip;
      if (self_model && *self_model == m) {
        skip = static_cast<std::size_t>(std::find(idx.begin(), idx.end(), *self) - idx.begin());
      }
      chosen.push_back(idx[sample_skipping(rng, idx.size(), 1, skip).front()]);
    }
  }

  const PromptTemplate& tmpl = templates.get(task);
  PromptBundle bundle;
  bundle.record_id = query.record_id;
  bundle.task = task;
  std::string text = tmpl.description;
  for (std::size_t i : chosen) {
    text += "\n\n";
    text += answered_block(tmpl, records[i]);
    bundle.shot_record_ids.push_back(records[i].record_id);
  }
  text += "\n\n";
  text += render_block(tmpl, query);
  bundle.body = IclPrompt{std::move(text)};
  return bundle;
}

PromptBundle render_ft(Task task, const TaskRecord& record, const TemplateSet& templates) {
  if (record.task != task) throw Error("record belongs to a different task");
  const PromptTemplate& tmpl = templates.get(task);
  PromptBundle bundle;
  bundle.record_id = record.record_id;
  bundle.task = task;
  std::string input = render_block(tmpl, record);
  if (is_generation(task)) input = tmpl.description + "\n\n" + input;
  bundle.body = FtInstance{std::move(input), format_answer(record)};
  return bundle;
}

}  // namespace pmsem
