#include "pmsem/cli/commands.hpp"

#include <atomic>
#include <cmath>
#include <iostream>
#include <algorithm>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "pmsem/eval.hpp"
#include "pmsem/promptgen.hpp"
#include "pmsem/random.hpp"
#include "pmsem/records_io.hpp"
#include "pmsem/tree_dsl.hpp"

namespace pmsem::cli {

using nlohmann::json;

void RunConfig::validate() const {
  const double sum = ratios.train + ratios.validation + ratios.test;
  if (ratios.train < 0 || ratios.validation < 0 || ratios.test < 0 || std::abs(sum - 1.0) > 1e-9) {
    throw Error("split ratios must be non-negative and sum to 1");
  }
  if (noise_prob < 0.0 || noise_prob > 1.0) throw Error("noise probability must be in [0, 1]");
  if (max_sequences == 0) throw Error("max-sequences must be positive");
  if (shots && *shots == 0) throw Error("shots must be positive");
}

SplitRatios parse_ratios(const std::string& text) {
  std::vector<double> parts;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      parts.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw Error("");
    } catch (const std::exception&) {
      throw Error("invalid ratio '" + item + "'");
    }
  }
  if (parts.size() != 3) throw Error("ratios need three comma-separated values");
  return {parts[0], parts[1], parts[2]};
}

namespace {

/// Runs fn(i) for i in [0, n) on up to `threads` workers; results keep index
/// order so the output never depends on scheduling.
template <typename R, typename Fn>
std::vector<R> parallel_map(std::size_t n, std::size_t threads, Fn&& fn) {
  std::vector<R> out(n);
  threads = std::max<std::size_t>(1, std::min(threads, n));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            out[i] = fn(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

json rejection_json(const Rejection& r) {
  return {{"model_id", r.model_id}, {"reason", to_string(r.reason)}, {"detail", r.detail}};
}

struct LoadedCorpus {
  CorpusValidation validation;
  std::vector<ProcessModel> models;
};

LoadedCorpus load_corpus(const fs::path& path, const RunConfig& config) {
  LoadedCorpus out;
  out.validation = validate_corpus(read_corpus(path), config.max_sequences);
  for (const auto& a : out.validation.admitted) out.models.push_back(a.model);
  return out;
}

std::map<Task, std::vector<TaskRecord>> group_by_task(std::vector<TaskRecord> records) {
  std::map<Task, std::vector<TaskRecord>> out;
  for (auto& r : records) out[r.task].push_back(std::move(r));
  return out;
}

Split split_of(const SplitAssignment& split, const std::string& model_id) {
  auto it = split.find(model_id);
  if (it == split.end()) throw Error("model '" + model_id + "' missing from split file");
  return it->second;
}

}  // namespace

// --- synth / validate / playout -------------------------------------------

CommandResult cmd_synth(const SynthOptions& options, std::uint64_t seed, const fs::path& out) {
  const auto entries = synth_corpus(options, seed);
  std::vector<std::string> lines;
  lines.reserve(entries.size());
  for (const auto& e : entries) lines.push_back(corpus_entry_to_json(e));
  write_lines(out, lines);
  return {kExitOk, json{{"command", "synth"}, {"models", entries.size()}, {"seed", seed}}.dump()};
}

CommandResult cmd_validate(const fs::path& corpus, const fs::path& out_admitted,
                           const fs::path& out_report, const RunConfig& config) {
  config.validate();
  const auto entries = read_corpus(corpus);
  const auto result = validate_corpus(entries, config.max_sequences);

  std::vector<std::string> admitted;
  for (const auto& a : result.admitted) {
    admitted.push_back(corpus_entry_to_json({a.model.id(), a.model.name(), a.tree}));
  }
  write_lines(out_admitted, admitted);

  std::vector<std::string> report;
  std::map<std::string, std::size_t> by_reason;
  for (const auto& r : result.rejected) {
    report.push_back(rejection_json(r).dump());
    ++by_reason[std::string(to_string(r.reason))];
  }
  write_lines(out_report, report);

  json summary = {{"command", "validate"},
                  {"entries", entries.size()},
                  {"admitted", result.admitted.size()},
                  {"rejected", result.rejected.size()},
                  {"rejections_by_reason", by_reason}};
  return {result.rejected.empty() ? kExitOk : kExitPartial, summary.dump()};
}

CommandResult cmd_playout(const fs::path& corpus, const fs::path& out, const RunConfig& config) {
  config.validate();
  const auto loaded = load_corpus(corpus, config);
  const auto& models = loaded.models;

  std::vector<std::string> lines;
  ActivitySet distinct;
  std::vector<std::size_t> n_acts;
  std::vector<std::size_t> n_seqs;
  for (const auto& m : models) {
    lines.push_back(model_to_json(m));
    distinct.insert(m.activities().begin(), m.activities().end());
    n_acts.push_back(m.activities().size());
    n_seqs.push_back(m.sequences().size());
  }
  write_lines(out, lines);

  auto stats = [](std::vector<std::size_t> v) {
    if (v.empty()) return json::object();
    std::sort(v.begin(), v.end());
    double sum = 0;
    for (auto x : v) sum += static_cast<double>(x);
    const std::size_t n = v.size();
    const double median = n % 2 ? static_cast<double>(v[n / 2])
                                : (static_cast<double>(v[n / 2 - 1]) + static_cast<double>(v[n / 2])) / 2.0;
    return json{{"avg", std::round(sum / static_cast<double>(n) * 100.0) / 100.0},
                {"median", median},
                {"min", v.front()},
                {"max", v.back()},
                {"sum", static_cast<std::size_t>(sum)}};
  };
  json summary = {{"command", "playout"},
                  {"models", models.size()},
                  {"rejected", loaded.validation.rejected.size()},
                  {"unique_activities_total", distinct.size()},
                  {"activities_per_model", stats(n_acts)},
                  {"sequences_per_model", stats(n_seqs)}};
  return {loaded.validation.rejected.empty() ? kExitOk : kExitPartial, summary.dump()};
}

// --- gen / split ----------------------------------------------------------

CommandResult cmd_gen(const fs::path& corpus, const std::vector<Task>& tasks_in,
                      const RunConfig& config, const fs::path& out) {
  config.validate();
  const std::vector<Task> tasks =
      tasks_in.empty() ? std::vector<Task>(kAllTasks.begin(), kAllTasks.end()) : tasks_in;
  const auto loaded = load_corpus(corpus, config);
  const auto& admitted = loaded.validation.admitted;
  const TsadOptions tsad{config.min_log_size, config.noise_prob, config.max_retries};

  json per_task = json::object();
  for (Task task : tasks) {
    struct Batch {
      std::vector<TaskRecord> records;
      std::size_t shortfall = 0;
    };
    const auto batches = parallel_map<Batch>(admitted.size(), config.threads, [&](std::size_t i) {
      const auto& m = admitted[i].model;
      Batch b;
      switch (task) {
        case Task::TSAD: b.records = gen_tsad(m, config.seed, tsad); break;
        case Task::ASAD: {
          auto a = gen_asad(m, config.seed);
          b.records = std::move(a.records);
          b.shortfall = a.shortfall;
          break;
        }
        case Task::SNAP: b.records = gen_snap(m); break;
        case Task::SDFD: b.records.push_back(gen_sdfd(m)); break;
        case Task::SPTD: b.records.push_back(gen_sptd(m, admitted[i].tree)); break;
      }
      return b;
    });

    std::vector<std::string> lines;
    std::size_t valid = 0, anomalous = 0, shortfall = 0;
    for (const auto& b : batches) {
      shortfall += b.shortfall;
      for (const auto& r : b.records) {
        if (is_binary(task)) (r.label() == Label::Valid ? valid : anomalous)++;
        lines.push_back(record_to_json(r));
      }
    }
    const fs::path file =
        tasks.size() == 1 ? out : out / (std::string(to_string(task)) + ".jsonl");
    write_lines(file, lines);

    json info = {{"records", lines.size()}, {"file", file.string()}};
    if (is_binary(task)) {
      info["valid"] = valid;
      info["anomalous"] = anomalous;
    }
    if (task == Task::ASAD) info["negative_shortfall"] = shortfall;
    per_task[std::string(to_string(task))] = std::move(info);
  }

  json summary = {{"command", "gen"},
                  {"models", admitted.size()},
                  {"rejected", loaded.validation.rejected.size()},
                  {"seed", config.seed},
                  {"tasks", per_task}};
  return {loaded.validation.rejected.empty() ? kExitOk : kExitPartial, summary.dump()};
}

CommandResult cmd_split(const fs::path& corpus, const RunConfig& config, const fs::path& out) {
  config.validate();
  const auto loaded = load_corpus(corpus, config);
  const SplitAssignment split = split_corpus(loaded.models, config.ratios, config.seed);

  std::vector<std::string> lines;
  std::map<std::string, std::size_t> counts;
  for (const auto& [model_id, s] : split) {
    lines.push_back(split_line(model_id, s));
    ++counts[std::string(to_string(s))];
  }
  write_lines(out, lines);
  json summary = {{"command", "split"},
                  {"models", split.size()},
                  {"components", leakage_components(loaded.models).size()},
                  {"counts", counts},
                  {"rejected", loaded.validation.rejected.size()}};
  return {loaded.validation.rejected.empty() ? kExitOk : kExitPartial, summary.dump()};
}

// --- prompts --------------------------------------------------------------

CommandResult cmd_prompts(const fs::path& dataset, const fs::path& split_file,
                          const PromptOptions& options, const RunConfig& config,
                          const fs::path& out) {
  config.validate();
  const SplitAssignment split = read_split(split_file);
  TemplateSet templates = TemplateSet::defaults();
  if (options.templates_dir) templates.load_overrides(*options.templates_dir);

  std::vector<Split> wanted = options.splits;
  if (wanted.empty()) {
    wanted.push_back(options.mode == PromptMode::Icl ? Split::Test : Split::Train);
  }
  auto selected = [&](const TaskRecord& r) {
    const Split s = split_of(split, r.model_id);
    return std::find(wanted.begin(), wanted.end(), s) != wanted.end();
  };

  std::vector<std::string> lines;
  json per_task = json::object();
  for (auto& [task, records] : group_by_task(read_records(dataset))) {
    std::size_t emitted = 0;
    if (options.mode == PromptMode::Icl) {
      std::vector<TaskRecord> train;
      for (const auto& r : records) {
        if (split_of(split, r.model_id) == Split::Train) train.push_back(r);
      }
      const ShotPool pool(task, std::move(train));
      const std::size_t shots = config.shots.value_or(default_shots(task));
      std::vector<const TaskRecord*> queries;
      for (const auto& r : records) {
        if (selected(r)) queries.push_back(&r);
      }
      auto rendered = parallel_map<std::string>(queries.size(), config.threads, [&](std::size_t i) {
        return prompt_to_json(render_icl(task, *queries[i], pool, shots, config.seed, templates));
      });
      emitted = rendered.size();
      for (auto& l : rendered) lines.push_back(std::move(l));
    } else {
      for (const auto& r : records) {
        if (!selected(r)) continue;
        lines.push_back(prompt_to_json(render_ft(task, r, templates)));
        ++emitted;
      }
    }
    per_task[std::string(to_string(task))] = emitted;
  }
  write_lines(out, lines);
  json summary = {{"command", "prompts"},
                  {"mode", options.mode == PromptMode::Icl ? "icl" : "ft"},
                  {"records", lines.size()},
                  {"tasks", per_task}};
  return {kExitOk, summary.dump()};
}

// --- baselines / scoring --------------------------------------------------

CommandResult cmd_baseline(const fs::path& dataset, BaselineKind kind, std::uint64_t seed,
                           const fs::path& out) {
  const auto records = read_records(dataset);
  std::vector<std::string> lines;
  lines.reserve(records.size());
  if (kind == BaselineKind::RandomClass) {
    const auto preds = random_classification_baseline(records, seed);
    for (std::size_t i = 0; i < records.size(); ++i) {
      lines.push_back(prediction_to_json({records[i].record_id, preds[i], false}));
    }
  } else if (kind == BaselineKind::Gold) {
    for (const auto& r : records) {
      lines.push_back(prediction_to_json({r.record_id, format_answer(r), false}));
    }
  } else {
    for (const auto& r : records) {
      if (!is_generation(r.task)) {
        throw Error("random footprint baseline applies to S-DFD/S-PTD records only");
      }
      const Footprint fp = random_footprint_baseline(r.activities, derive_seed(seed, r.record_id));
      lines.push_back(
          prediction_to_json({r.record_id, render_dfg_edges(dfg_from_footprint(fp)), true}));
    }
  }
  write_lines(out, lines);
  json summary = {{"command", "baseline"},
                  {"kind", kind == BaselineKind::RandomClass     ? "random_class"
                           : kind == BaselineKind::RandomFootprint ? "random_footprint"
                                                                   : "gold"},
                  {"predictions", lines.size()},
                  {"seed", seed}};
  return {kExitOk, summary.dump()};
}

CommandResult cmd_score(const fs::path& dataset, const fs::path& predictions_path,
                        const ScoreOptions& options, const RunConfig& config) {
  config.validate();
  auto records = read_records(dataset);
  auto predictions = read_predictions(predictions_path);

  if (options.split_file || options.split) {
    if (!options.split_file || !options.split) {
      throw Error("--split-file and --split must be given together");
    }
    const SplitAssignment split = read_split(*options.split_file);
    std::erase_if(records, [&](const TaskRecord& r) { return split_of(split, r.model_id) != *options.split; });
    std::set<std::string> keep;
    for (const auto& r : records) keep.insert(r.record_id);
    std::erase_if(predictions, [&](const Prediction& p) { return !keep.contains(p.record_id); });
  }

  const FitnessOptions fitness{config.include_diagonal};
  std::map<std::string, Task> task_of;
  for (const auto& r : records) task_of.emplace(r.record_id, r.task);
  std::map<Task, std::vector<Prediction>> preds_by_task;
  for (auto& p : predictions) {
    auto it = task_of.find(p.record_id);
    if (it == task_of.end()) throw Error("prediction for unknown record id " + p.record_id);
    preds_by_task[it->second].push_back(std::move(p));
  }

  json reports = json::array();
  json details = json::array();
  bool any_failure = false;
  for (auto& [task, golds] : group_by_task(std::move(records))) {
    const ScoreReport report = score_task(task, golds, preds_by_task[task], config.matching,
                                          config.max_sequences, fitness);
    any_failure = any_failure || report.n_missing > 0;
    reports.push_back(json::parse(report_to_json(report)));
    if (options.report_out) details.push_back(json::parse(report_to_json(report, true)));
    if (options.table) std::cerr << report_to_table(report) << '\n';
  }
  if (options.report_out) write_lines(*options.report_out, {details.dump(2)});

  json summary = {{"command", "score"}, {"reports", reports}};
  return {any_failure ? kExitPartial : kExitOk, summary.dump()};
}

}  // namespace pmsem::cli
