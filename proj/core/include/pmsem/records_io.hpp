#pragma once

// JSON-Lines encodings for corpus entries, dataset records, split
// assignments, predictions, prompt bundles and score reports.

#include <cstddef>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "pmsem/eval.hpp"
#include "pmsem/promptgen.hpp"
#include "pmsem/taskgen.hpp"

namespace pmsem {

class FormatError : public Error {
 public:
  FormatError(std::size_t line, const std::string& message);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Calls `fn(line_number, text)` for every non-blank line.
void for_each_line(const std::filesystem::path& path,
                   const std::function<void(std::size_t, std::string_view)>& fn);

// {model_id, name?, tree}
CorpusEntry corpus_entry_from_json(std::string_view line);
std::string corpus_entry_to_json(const CorpusEntry& entry);
std::vector<CorpusEntry> read_corpus(const std::filesystem::path& path);

// {record_id, model_id, task, activities, trace|pair|prefix?, gold}
TaskRecord record_from_json(std::string_view line);
std::string record_to_json(const TaskRecord& record);
std::vector<TaskRecord> read_records(const std::filesystem::path& path);

// {model_id, split}
SplitAssignment read_split(const std::filesystem::path& path);
std::string split_line(const std::string& model_id, Split split);

// {record_id, prediction, format?}
Prediction prediction_from_json(std::string_view line);
std::string prediction_to_json(const Prediction& prediction);
std::vector<Prediction> read_predictions(const std::filesystem::path& path);

std::string prompt_to_json(const PromptBundle& bundle);

// {model_id, name?, n_activities, n_sequences, has_empty_sequence, sequences}
std::string model_to_json(const ProcessModel& model);

std::string report_to_json(const ScoreReport& report, bool include_details = false);
std::string report_to_table(const ScoreReport& report);

/// Writes `lines` newline-terminated; throws Error on I/O failure.
void write_lines(const std::filesystem::path& path, const std::vector<std::string>& lines);

}  // namespace pmsem
