// pmsem: process-semantics toolkit and benchmark factory.

#include <algorithm>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pmsem/cli/commands.hpp"

namespace {

using namespace pmsem;
using namespace pmsem::cli;

void add_run_flags(CLI::App& cmd, RunConfig& cfg, std::string& ratios, std::string& matching,
                   std::size_t& shots) {
  cmd.add_option("--seed", cfg.seed, "Global random seed")->capture_default_str();
  cmd.add_option("--min-log-size", cfg.min_log_size, "T-SAD log padding size")->capture_default_str();
  cmd.add_option("--noise-prob", cfg.noise_prob, "T-SAD noise probability")->capture_default_str();
  cmd.add_option("--max-retries", cfg.max_retries, "T-SAD swap attempts per trace")->capture_default_str();
  cmd.add_option("--ratios", ratios, "Train,validation,test ratios")->capture_default_str();
  cmd.add_option("--shots", shots, "ICL shots (0 = task default)");
  cmd.add_option("--max-sequences", cfg.max_sequences, "Play-out sequence cap")->capture_default_str();
  cmd.add_option("--matching-mode", matching, "case_sensitive | case_insensitive")->capture_default_str();
  cmd.add_flag("!--no-diagonal", cfg.include_diagonal, "Exclude (a,a) pairs from fitness");
  cmd.add_option("--threads", cfg.threads, "Worker threads for per-model work")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pmsem - process-semantics toolkit and benchmark factory"};
  app.set_config("--config", "", "TOML/INI file with flag values");
  app.require_subcommand(1);

  RunConfig cfg;
  std::string ratios = "0.7,0.2,0.1";
  std::string matching = "case_insensitive";
  std::size_t shots = 0;

  std::string corpus, out, dataset, split_file, predictions, report_out, templates;

  // synth
  SynthOptions synth;
  auto* c_synth = app.add_subcommand("synth", "Generate a random process-tree corpus");
  c_synth->add_option("--models", synth.n_models, "Number of models")->capture_default_str();
  c_synth->add_option("--min-activities", synth.min_activities)->capture_default_str();
  c_synth->add_option("--max-activities", synth.max_activities)->capture_default_str();
  c_synth->add_option("--min-trace-length", synth.min_trace_length)->capture_default_str();
  c_synth->add_option("--max-language", synth.max_language, "Re-draw trees with larger languages")
      ->capture_default_str();
  c_synth->add_option("--seed", cfg.seed)->capture_default_str();
  c_synth->add_option("-o,--out", out)->required();

  // validate
  std::string rejections;
  auto* c_validate = app.add_subcommand("validate", "Admit corpus entries and report rejections");
  c_validate->add_option("corpus", corpus)->required()->check(CLI::ExistingFile);
  c_validate->add_option("-o,--out", out, "Admitted corpus file")->required();
  c_validate->add_option("--report", rejections, "Rejection report file")->required();
  c_validate->add_option("--max-sequences", cfg.max_sequences)->capture_default_str();

  // playout
  auto* c_playout = app.add_subcommand("playout", "Write per-model sequence sets and corpus stats");
  c_playout->add_option("corpus", corpus)->required()->check(CLI::ExistingFile);
  c_playout->add_option("-o,--out", out)->required();
  c_playout->add_option("--max-sequences", cfg.max_sequences)->capture_default_str();

  // gen
  std::vector<std::string> task_names;
  auto* c_gen = app.add_subcommand("gen", "Generate task datasets");
  c_gen->add_option("corpus", corpus)->required()->check(CLI::ExistingFile);
  c_gen->add_option("--task", task_names, "tsad|asad|snap|sdfd|sptd|all (repeatable)")
      ->required();
  c_gen->add_option("-o,--out", out, "File (one task) or directory")->required();
  add_run_flags(*c_gen, cfg, ratios, matching, shots);

  // split
  auto* c_split = app.add_subcommand("split", "Leakage-free stratified split by model");
  c_split->add_option("corpus", corpus)->required()->check(CLI::ExistingFile);
  c_split->add_option("-o,--out", out)->required();
  add_run_flags(*c_split, cfg, ratios, matching, shots);

  // prompts
  std::string mode = "icl";
  std::vector<std::string> split_names;
  auto* c_prompts = app.add_subcommand("prompts", "Render ICL prompts or fine-tuning pairs");
  c_prompts->add_option("dataset", dataset)->required()->check(CLI::ExistingFile);
  c_prompts->add_option("--split-file", split_file)->required()->check(CLI::ExistingFile);
  c_prompts->add_option("--mode", mode, "icl | ft")->capture_default_str();
  c_prompts->add_option("--split", split_names, "Splits to render (repeatable)");
  c_prompts->add_option("--templates", templates, "Directory with <task>.txt templates")
      ->check(CLI::ExistingDirectory);
  c_prompts->add_option("-o,--out", out)->required();
  add_run_flags(*c_prompts, cfg, ratios, matching, shots);

  // baseline
  std::string kind;
  auto* c_baseline = app.add_subcommand("baseline", "Write random-baseline predictions");
  c_baseline->add_option("dataset", dataset)->required()->check(CLI::ExistingFile);
  c_baseline->add_option("--kind", kind, "random_class | random_footprint | gold")->required();
  c_baseline->add_option("--seed", cfg.seed)->capture_default_str();
  c_baseline->add_option("-o,--out", out)->required();

  // score
  std::string split_name;
  bool quiet = false;
  auto* c_score = app.add_subcommand("score", "Score predictions against a dataset");
  c_score->add_option("dataset", dataset)->required()->check(CLI::ExistingFile);
  c_score->add_option("predictions", predictions)->required()->check(CLI::ExistingFile);
  c_score->add_option("--split-file", split_file)->check(CLI::ExistingFile);
  c_score->add_option("--split", split_name);
  c_score->add_option("--report", report_out, "Detailed JSON report file");
  c_score->add_flag("-q,--quiet", quiet, "Suppress the table on stderr");
  add_run_flags(*c_score, cfg, ratios, matching, shots);

  CLI11_PARSE(app, argc, argv);

  try {
    cfg.ratios = parse_ratios(ratios);
    cfg.matching = parse_matching_mode(matching);
    if (shots > 0) cfg.shots = shots;

    CommandResult result;
    if (*c_synth) {
      result = cmd_synth(synth, cfg.seed, out);
    } else if (*c_validate) {
      result = cmd_validate(corpus, out, rejections, cfg);
    } else if (*c_playout) {
      result = cmd_playout(corpus, out, cfg);
    } else if (*c_gen) {
      std::vector<Task> tasks;
      for (const auto& name : task_names) {
        if (name == "all") {
          tasks.assign(kAllTasks.begin(), kAllTasks.end());
          break;
        }
        const Task t = parse_task(name);
        if (std::find(tasks.begin(), tasks.end(), t) == tasks.end()) tasks.push_back(t);
      }
      if (tasks.size() == kAllTasks.size()) tasks.clear();
      result = cmd_gen(corpus, tasks, cfg, out);
    } else if (*c_split) {
      result = cmd_split(corpus, cfg, out);
    } else if (*c_prompts) {
      PromptOptions opts;
      if (mode == "icl") {
        opts.mode = PromptMode::Icl;
      } else if (mode == "ft") {
        opts.mode = PromptMode::FineTune;
      } else {
        throw Error("unknown prompt mode '" + mode + "'");
      }
      for (const auto& s : split_names) opts.splits.push_back(parse_split(s));
      if (!templates.empty()) opts.templates_dir = templates;
      result = cmd_prompts(dataset, split_file, opts, cfg, out);
    } else if (*c_baseline) {
      BaselineKind k;
      if (kind == "random_class") {
        k = BaselineKind::RandomClass;
      } else if (kind == "random_footprint") {
        k = BaselineKind::RandomFootprint;
      } else if (kind == "gold") {
        k = BaselineKind::Gold;
      } else {
        throw Error("unknown baseline kind '" + kind + "'");
      }
      result = cmd_baseline(dataset, k, cfg.seed, out);
    } else if (*c_score) {
      ScoreOptions opts;
      if (!split_file.empty()) opts.split_file = split_file;
      if (!split_name.empty()) opts.split = parse_split(split_name);
      if (!report_out.empty()) opts.report_out = report_out;
      opts.table = !quiet;
      result = cmd_score(dataset, predictions, opts, cfg);
    }
    std::cout << result.summary << '\n';
    return result.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFatal;
  }
}
