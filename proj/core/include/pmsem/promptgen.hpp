#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "pmsem/taskgen.hpp"

namespace pmsem {

class PoolExhausted : public Error {
 public:
  using Error::Error;
};

/// Wording for one task. `block` is the per-instance template with the
/// placeholders {activities}, {instance} and {answer_key}.
struct PromptTemplate {
  std::string description;
  std::string block;
};

class TemplateSet {
 public:
  /// Built-in wording for all five tasks.
  static TemplateSet defaults();

  /// Overrides tasks with `<task>.txt` files found in `dir`. Each file holds
  /// the description, a line consisting of `---`, then the block template.
  void load_overrides(const std::filesystem::path& dir);

  const PromptTemplate& get(Task task) const { return templates_.at(task); }
  void set(Task task, PromptTemplate tmpl) { templates_[task] = std::move(tmpl); }

 private:
  std::map<Task, PromptTemplate> templates_;
};

/// Parses the `description\n---\nblock` file format.
PromptTemplate parse_template(std::string_view text);

/// `{a, b, c}` with labels sorted lexicographically.
std::string format_activity_set(const ActivitySet& activities);
/// `[a, b, c]` in trace order.
std::string format_trace(const Trace& trace);

/// Instance lines for a record (empty for the generation tasks).
std::string format_instance(const TaskRecord& record);
std::string_view answer_key(Task task);
/// Gold answer as the model is expected to write it.
std::string format_answer(const TaskRecord& record);

/// Block with the answer key but no answer.
std::string render_block(const PromptTemplate& tmpl, const TaskRecord& record);

struct IclPrompt {
  std::string text;
};

struct FtInstance {
  std::string input;
  std::string target;
};

struct PromptBundle {
  std::string record_id;
  Task task = Task::TSAD;
  std::variant<IclPrompt, FtInstance> body;
  std::vector<std::string> shot_record_ids;
};

/// Index over one task's TRAIN records used for shot sampling.
class ShotPool {
 public:
  /// Records of other tasks are ignored.
  ShotPool(Task task, std::vector<TaskRecord> train_records);

  Task task() const noexcept { return task_; }
  const std::vector<TaskRecord>& records() const noexcept { return records_; }
  const std::vector<std::size_t>& by_label(Label label) const;
  /// Record indices grouped per model, models in sorted id order.
  const std::vector<std::vector<std::size_t>>& by_model() const noexcept { return by_model_; }
  std::optional<std::size_t> find(const std::string& record_id) const;
  /// Position of the record's model within by_model().
  std::size_t model_slot(std::size_t record_index) const { return model_slot_[record_index]; }
  /// Position of the record within its by_label() list.
  std::size_t label_slot(std::size_t record_index) const { return label_slot_[record_index]; }

 private:
  Task task_;
  std::vector<TaskRecord> records_;
  std::vector<std::size_t> valid_;
  std::vector<std::size_t> anomalous_;
  std::vector<std::vector<std::size_t>> by_model_;
  std::vector<std::size_t> model_slot_;
  std::vector<std::size_t> label_slot_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Default shot counts: 6 for the classification tasks, 5 for generation.
std::size_t default_shots(Task task);

/// Few-shot prompt: description, `shots` answered examples, then the query
/// block with an empty answer slot. Binary tasks take ceil(shots/2) Valid and
/// floor(shots/2) Anomalous shots, interleaved starting with Valid; other
/// tasks take one record from each of `shots` distinct models. The query
/// record is never a shot. Throws PoolExhausted when the pool is too small.
PromptBundle render_icl(Task task, const TaskRecord& query, const ShotPool& pool,
                        std::size_t shots, std::uint64_t seed,
                        const TemplateSet& templates = TemplateSet::defaults());

/// Fine-tuning pair. Classification inputs are the bare block; generation
/// inputs are prefixed with the task description.
PromptBundle render_ft(Task task, const TaskRecord& record,
                       const TemplateSet& templates = TemplateSet::defaults());

}  // namespace pmsem
