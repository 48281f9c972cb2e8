#pragma once

// Pipeline commands behind the `pmsem` executable. Each command reads and
// writes JSON-Lines files and returns a machine-readable summary.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pmsem/core.hpp"
#include "pmsem/semantics.hpp"
#include "pmsem/synth.hpp"
#include "pmsem/taskgen.hpp"

namespace pmsem::cli {

namespace fs = std::filesystem;

inline constexpr int kExitOk = 0;
inline constexpr int kExitFatal = 1;
inline constexpr int kExitPartial = 2;

struct RunConfig {
  std::uint64_t seed = 42;
  std::size_t min_log_size = 100;
  double noise_prob = 0.5;
  std::size_t max_retries = 10;
  SplitRatios ratios;
  std::optional<std::size_t> shots;  // default: 6 classification, 5 generation
  std::size_t max_sequences = kDefaultMaxSequences;
  MatchingMode matching = MatchingMode::CaseInsensitive;
  bool include_diagonal = true;
  std::size_t threads = 1;

  /// Throws Error when ratios do not sum to 1 or probabilities are out of range.
  void validate() const;
};

/// "0.7,0.2,0.1" -> ratios.
SplitRatios parse_ratios(const std::string& text);

struct CommandResult {
  int exit_code = kExitOk;
  std::string summary;  // one JSON object
};

CommandResult cmd_synth(const SynthOptions& options, std::uint64_t seed, const fs::path& out);

CommandResult cmd_validate(const fs::path& corpus, const fs::path& out_admitted,
                           const fs::path& out_report, const RunConfig& config);

CommandResult cmd_playout(const fs::path& corpus, const fs::path& out, const RunConfig& config);

/// `tasks` empty means all five; with several tasks `out` is a directory
/// receiving `<task>.jsonl`, with one task it is the file itself.
CommandResult cmd_gen(const fs::path& corpus, const std::vector<Task>& tasks,
                      const RunConfig& config, const fs::path& out);

CommandResult cmd_split(const fs::path& corpus, const RunConfig& config, const fs::path& out);

enum class PromptMode { Icl, FineTune };

struct PromptOptions {
  PromptMode mode = PromptMode::Icl;
  /// Splits whose records are rendered: the query split for ICL (default
  /// test), the emitted splits for fine-tuning (default train).
  std::vector<Split> splits;
  std::optional<fs::path> templates_dir;
};

CommandResult cmd_prompts(const fs::path& dataset, const fs::path& split_file,
                          const PromptOptions& options, const RunConfig& config,
                          const fs::path& out);

/// Gold echoes every record's gold answer (a sanity check for scoring).
enum class BaselineKind { RandomClass, RandomFootprint, Gold };

CommandResult cmd_baseline(const fs::path& dataset, BaselineKind kind, std::uint64_t seed,
                           const fs::path& out);

struct ScoreOptions {
  std::optional<fs::path> split_file;
  std::optional<Split> split;
  std::optional<fs::path> report_out;  // detailed JSON report
  bool table = true;                   // human-readable table on stderr
};

CommandResult cmd_score(const fs::path& dataset, const fs::path& predictions,
                        const ScoreOptions& options, const RunConfig& config);

}  // namespace pmsem::cli
