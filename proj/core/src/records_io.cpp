#include "pmsem/records_io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "pmsem/tree_dsl.hpp"

namespace pmsem {

using nlohmann::json;

FormatError::FormatError(std::size_t line, const std::string& message)
    : Error("line " + std::to_string(line) + ": " + message), line_(line) {}

namespace {

json parse_object(std::string_view line) {
  json j = json::parse(line.begin(), line.end());
  if (!j.is_object()) throw Error("expected a JSON object");
  return j;
}

const json& require(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw Error(std::string("missing field '") + key + "'");
  return *it;
}

std::string require_string(const json& j, const char* key) {
  const json& v = require(j, key);
  if (!v.is_string()) throw Error(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

Trace trace_from(const json& arr) {
  if (!arr.is_array()) throw Error("trace must be an array of labels");
  Trace t;
  t.reserve(arr.size());
  for (const auto& v : arr) t.push_back(normalize_label(v.get<std::string>()));
  return t;
}

json trace_to(const Trace& t) {
  json arr = json::array();
  for (const auto& a : t) arr.push_back(a.label());
  return arr;
}

json activities_to(const ActivitySet& set) {
  json arr = json::array();
  for (const auto& a : set) arr.push_back(a.label());
  return arr;
}

template <typename Fn>
auto with_line(std::size_t line, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const FormatError&) {
    throw;
  } catch (const std::exception& e) {
    throw FormatError(line, e.what());
  }
}

std::string fmt_double(double v) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(4) << v;
  return out.str();
}

}  // namespace

void for_each_line(const std::filesystem::path& path,
                   const std::function<void(std::size_t, std::string_view)>& fn) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    fn(number, line);
  }
}

void write_lines(const std::filesystem::path& path, const std::vector<std::string>& lines) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  for (const auto& l : lines) out << l << '\n';
  if (!out) throw Error("write failed for " + path.string());
}

// --- corpus ---------------------------------------------------------------

CorpusEntry corpus_entry_from_json(std::string_view line) {
  const json j = parse_object(line);
  CorpusEntry e{require_string(j, "model_id"), std::nullopt, parse_tree(require_string(j, "tree"))};
  if (e.model_id.empty()) throw Error("model_id must be non-empty");
  if (auto it = j.find("name"); it != j.end() && it->is_string()) e.name = it->get<std::string>();
  return e;
}

std::string corpus_entry_to_json(const CorpusEntry& entry) {
  json j;
  j["model_id"] = entry.model_id;
  if (entry.name) j["name"] = *entry.name;
  j["tree"] = render_tree(entry.tree);
  return j.dump();
}

std::vector<CorpusEntry> read_corpus(const std::filesystem::path& path) {
  std::vector<CorpusEntry> out;
  for_each_line(path, [&](std::size_t n, std::string_view line) {
    out.push_back(with_line(n, [&] { return corpus_entry_from_json(line); }));
  });
  return out;
}

// --- dataset records ------------------------------------------------------

std::string record_to_json(const TaskRecord& r) {
  json j;
  j["record_id"] = r.record_id;
  j["model_id"] = r.model_id;
  j["task"] = to_string(r.task);
  j["activities"] = activities_to(r.activities);
  switch (r.task) {
    case Task::TSAD:
      j["trace"] = trace_to(r.trace());
      j["gold"] = to_string(r.label());
      break;
    case Task::ASAD:
      j["pair"] = json::array({r.pair().first.label(), r.pair().second.label()});
      j["gold"] = to_string(r.label());
      break;
    case Task::SNAP:
      j["prefix"] = trace_to(r.trace());
      j["gold"] = r.next_activity().label();
      break;
    case Task::SDFD: {
      json edges = json::array();
      for (const auto& [a, b] : r.dfg().edges()) edges.push_back(json::array({a.label(), b.label()}));
      j["gold"] = std::move(edges);
      break;
    }
    case Task::SPTD: j["gold"] = r.tree().text; break;
  }
  return j.dump();
}

TaskRecord record_from_json(std::string_view line) {
  const json j = parse_object(line);
  TaskRecord r;
  r.record_id = require_string(j, "record_id");
  r.model_id = require_string(j, "model_id");
  r.task = parse_task(require_string(j, "task"));
  for (const auto& v : require(j, "activities")) r.activities.insert(normalize_label(v.get<std::string>()));

  auto in_set = [&](const Activity& a) {
    if (!r.activities.contains(a)) throw Error("label '" + a.label() + "' not in activities");
    return a;
  };
  auto gold_label = [&] {
    const auto label = parse_label(require_string(j, "gold"));
    if (!label) throw Error("gold must be Valid or Anomalous");
    return *label;
  };

  switch (r.task) {
    case Task::TSAD: {
      Trace t = trace_from(require(j, "trace"));
      for (const auto& a : t) in_set(a);
      r.payload = std::move(t);
      r.gold = gold_label();
      break;
    }
    case Task::ASAD: {
      const json& p = require(j, "pair");
      if (!p.is_array() || p.size() != 2) throw Error("pair must have two labels");
      r.payload = ActivityPair{in_set(normalize_label(p[0].get<std::string>())),
                               in_set(normalize_label(p[1].get<std::string>()))};
      r.gold = gold_label();
      break;
    }
    case Task::SNAP: {
      Trace t = trace_from(require(j, "prefix"));
      for (const auto& a : t) in_set(a);
      r.payload = std::move(t);
      r.gold = in_set(normalize_label(require_string(j, "gold")));
      break;
    }
    case Task::SDFD: {
      std::set<ActivityPair> edges;
      for (const auto& e : require(j, "gold")) {
        if (!e.is_array() || e.size() != 2) throw Error("DFG edges must be [from, to] pairs");
        edges.emplace(normalize_label(e[0].get<std::string>()),
                      normalize_label(e[1].get<std::string>()));
      }
      r.gold = Dfg(r.activities, std::move(edges));
      break;
    }
    case Task::SPTD: {
      const std::string text = require_string(j, "gold");
      r.gold = TreeText{render_tree(parse_tree(text))};
      break;
    }
  }
  return r;
}

std::vector<TaskRecord> read_records(const std::filesystem::path& path) {
  std::vector<TaskRecord> out;
  for_each_line(path, [&](std::size_t n, std::string_view line) {
    out.push_back(with_line(n, [&] { return record_from_json(line); }));
  });
  return out;
}

// --- splits / predictions -------------------------------------------------

SplitAssignment read_split(const std::filesystem::path& path) {
  SplitAssignment out;
  for_each_line(path, [&](std::size_t n, std::string_view line) {
    with_line(n, [&] {
      const json j = parse_object(line);
      out[require_string(j, "model_id")] = parse_split(require_string(j, "split"));
    });
  });
  return out;
}

std::string split_line(const std::string& model_id, Split split) {
  json j;
  j["model_id"] = model_id;
  j["split"] = to_string(split);
  return j.dump();
}

Prediction prediction_from_json(std::string_view line) {
  const json j = parse_object(line);
  Prediction p{require_string(j, "record_id"), require_string(j, "prediction"), false};
  if (auto it = j.find("format"); it != j.end()) {
    const auto fmt = it->get<std::string>();
    if (fmt == "dfg") {
      p.is_edge_list = true;
    } else if (fmt != "tree" && fmt != "text") {
      throw Error("unknown prediction format '" + fmt + "'");
    }
  }
  return p;
}

std::string prediction_to_json(const Prediction& p) {
  json j;
  j["record_id"] = p.record_id;
  j["prediction"] = p.text;
  if (p.is_edge_list) j["format"] = "dfg";
  return j.dump();
}

std::vector<Prediction> read_predictions(const std::filesystem::path& path) {
  std::vector<Prediction> out;
  for_each_line(path, [&](std::size_t n, std::string_view line) {
    out.push_back(with_line(n, [&] { return prediction_from_json(line); }));
  });
  return out;
}

// --- prompts / models / reports -------------------------------------------

std::string prompt_to_json(const PromptBundle& b) {
  json j;
  j["record_id"] = b.record_id;
  j["task"] = to_string(b.task);
  if (const auto* icl = std::get_if<IclPrompt>(&b.body)) {
    j["prompt"] = icl->text;
    j["shot_record_ids"] = b.shot_record_ids;
  } else {
    const auto& ft = std::get<FtInstance>(b.body);
    j["input"] = ft.input;
    j["target"] = ft.target;
  }
  return j.dump();
}

std::string model_to_json(const ProcessModel& model) {
  json j;
  j["model_id"] = model.id();
  if (model.name()) j["name"] = *model.name();
  j["n_activities"] = model.activities().size();
  j["n_sequences"] = model.sequences().size();
  j["has_empty_sequence"] = model.has_empty_sequence();
  json seqs = json::array();
  for (const auto& s : model.sequences()) seqs.push_back(trace_to(s));
  j["sequences"] = std::move(seqs);
  return j.dump();
}

std::string report_to_json(const ScoreReport& r, bool include_details) {
  json j;
  j["task"] = to_string(r.task);
  j["n_records"] = r.n_records;
  j["metric"] = to_string(r.metric);
  j["value"] = r.value;
  j["n_parse_failures"] = r.n_parse_failures;
  j["n_missing"] = r.n_missing;
  j["n_hallucinated"] = r.n_hallucinated;
  j["matching_mode"] = to_string(r.matching_mode);
  if (r.metric == Metric::MacroF1 && (include_details || r.per_class.size() <= 2)) {
    json classes = json::object();
    for (const auto& [cls, s] : r.per_class) {
      classes[cls] = {{"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1},
                      {"support", s.support}};
    }
    j["per_class"] = std::move(classes);
  } else if (r.metric == Metric::MacroF1) {
    j["n_classes"] = r.per_class.size();
  }
  if (include_details && r.metric == Metric::MeanFootprintFitness) {
    j["per_record_fitness"] = r.per_record_fitness;
  }
  return j.dump();
}

std::string report_to_table(const ScoreReport& r) {
  std::ostringstream out;
  auto row = [&out](std::string_view key) -> std::ostream& {
    return out << std::left << std::setw(24) << key;
  };
  row("task") << to_string(r.task) << '\n';
  row("records") << r.n_records << '\n';
  row(to_string(r.metric)) << fmt_double(r.value) << '\n';
  row("parse failures") << r.n_parse_failures << " (missing " << r.n_missing << ")\n";
  row("hallucinated") << r.n_hallucinated << '\n';
  row("matching") << to_string(r.matching_mode) << '\n';
  if (r.metric == Metric::MacroF1 && r.per_class.size() <= 8) {
    out << "\nclass                 P       R       F1      support\n";
    for (const auto& [cls, s] : r.per_class) {
      out << std::left << std::setw(20) << cls.substr(0, 19) << "  " << fmt_double(s.precision)
          << "  " << fmt_double(s.recall) << "  " << fmt_double(s.f1) << "  " << s.support << '\n';
    }
  }
  return out.str();
}

}  // namespace pmsem
