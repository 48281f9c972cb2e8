// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pmsem/cli/commands.hpp"
#include "pmsem/eval.hpp"
#include "pmsem/random.hpp"
#include "pmsem/records_io.hpp"
#include "pmsem/semantics.hpp"
#include "pmsem/synth.hpp"
#include "pmsem/taskgen.hpp"
#include "pmsem/tree_dsl.hpp"
#include "support/oracle.hpp"

using namespace pmsem;
using oracle::act;
using oracle::trace;
namespace fs = std::filesystem;

namespace {

const char* kM1 = "->('receive order', X(->('accept order','deliver package'), 'reject order'))";

struct Outcome {
  bool ok = true;
  std::string detail;
};

// Collects failed checks with a short reason.
class Checker {
 public:
  void expect(bool cond, const std::string& what) {
    if (!cond && failures_.size() < 5) failures_.push_back(what);
    if (!cond) ++n_failed_;
  }
  bool ok() const { return n_failed_ == 0; }
  std::string failures() const {
    std::string out;
    for (const auto& f : failures_) out += (out.empty() ? "" : "; ") + f;
    if (n_failed_ > failures_.size()) out += "; ...";
    return out;
  }

 private:
  std::vector<std::string> failures_;
  std::size_t n_failed_ = 0;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::vector<AdmittedModel> synth_admitted(const SynthOptions& o, std::uint64_t seed) {
  return validate_corpus(synth_corpus(o, seed)).admitted;
}

// --- 1 ---------------------------------------------------------------------

Outcome c1_worked_example() {
  Checker c;
  const ProcessModel m = playout(parse_tree(kM1), kDefaultMaxSequences, "m1");
  c.expect(m.sequences() == std::set<Trace>{trace({"receive order", "accept order",
                                                   "deliver package"}),
                                            trace({"receive order", "reject order"})},
           "play-out");
  const Dfg d = dfg_of_model(m);
  c.expect(d.edges() == std::set<ActivityPair>{{act("receive order"), act("accept order")},
                                               {act("accept order"), act("deliver package")},
                                               {act("receive order"), act("reject order")}},
           "dfg");
  const Footprint fp = footprint(d);
  std::set<std::pair<std::string, std::string>> directed;
  bool others_none = true;
  for (std::size_t i = 0; i < fp.size(); ++i) {
    for (std::size_t j = 0; j < fp.size(); ++j) {
      const Relation r = fp.at(i, j);
      if (r == Relation::Forward || r == Relation::Backward) {
        directed.insert({fp.activities()[i].label(), fp.activities()[j].label()});
      } else if (r != Relation::None) {
        others_none = false;
      }
    }
  }
  c.expect(directed.size() == 6 && others_none, "footprint entry count");
  c.expect(fp.relation(act("receive order"), act("accept order")) == Relation::Forward &&
               fp.relation(act("accept order"), act("receive order")) == Relation::Backward &&
               fp.relation(act("accept order"), act("deliver package")) == Relation::Forward &&
               fp.relation(act("receive order"), act("reject order")) == Relation::Forward,
           "footprint relations");
  c.expect(eventually_follows(m).pairs ==
               std::set<ActivityPair>{{act("receive order"), act("accept order")},
                                      {act("receive order"), act("reject order")},
                                      {act("receive order"), act("deliver package")},
                                      {act("accept order"), act("deliver package")}},
           "eventually-follows");
  return {c.ok(), c.ok() ? "M1 play-out, DFG, footprint and EF exact" : c.failures()};
}

// --- 2 ---------------------------------------------------------------------

// Equal numbers of Valid and Anomalous records, taking the first of each.
std::vector<TaskRecord> balance(const std::vector<TaskRecord>& records) {
  std::vector<const TaskRecord*> v;
  std::vector<const TaskRecord*> a;
  for (const auto& r : records) (r.label() == Label::Valid ? v : a).push_back(&r);
  const std::size_t n = std::min(v.size(), a.size());
  std::vector<TaskRecord> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(*v[i]);
    out.push_back(*a[i]);
  }
  return out;
}

double baseline_f1(const std::vector<TaskRecord>& records, Task task, std::uint64_t seed) {
  const auto preds = random_classification_baseline(records, seed);
  std::vector<Prediction> p;
  for (std::size_t i = 0; i < records.size(); ++i) p.push_back({records[i].record_id, preds[i]});
  return score_task(task, records, p).value;
}

Outcome c2_random_classification() {
  const auto models = synth_admitted({.n_models = 600, .min_trace_length = 3}, 202);
  std::vector<TaskRecord> tsad;
  std::vector<TaskRecord> asad;
  for (const auto& m : models) {
    for (auto& r : gen_tsad(m.model, derive_seed(202, m.model.id() + "/tsad"))) tsad.push_back(r);
    for (auto& r : gen_asad(m.model, derive_seed(202, m.model.id() + "/asad")).records) {
      asad.push_back(r);
    }
  }
  tsad = balance(tsad);
  asad = balance(asad);
  const double f_tsad = baseline_f1(tsad, Task::TSAD, 7);
  const double f_asad = baseline_f1(asad, Task::ASAD, 7);
  const bool ok = tsad.size() >= 10000 && asad.size() >= 10000 &&
                  std::abs(f_tsad - 0.5) <= 0.02 && std::abs(f_asad - 0.5) <= 0.02;
  std::ostringstream d;
  d << "T-SAD n=" << tsad.size() << " F1=" << fmt("%.4f", f_tsad) << ", A-SAD n=" << asad.size()
    << " F1=" << fmt("%.4f", f_asad) << " (target 0.50 +/- 0.02)";
  return {ok, d.str()};
}

// --- 3 ---------------------------------------------------------------------

Outcome c3_random_footprint() {
  // Monte Carlo against a fixed gold footprint with a mix of relations.
  const ActivitySet acts = {act("a"), act("b"), act("c"), act("d"), act("e")};
  const Footprint gold = footprint(Dfg(acts, {{act("a"), act("b")},
                                              {act("b"), act("c")},
                                              {act("c"), act("b")},
                                              {act("d"), act("d")},
                                              {act("e"), act("a")}}));
  const std::size_t draws = 100000;
  double sum = 0.0;
  double sq = 0.0;
  Rng seeds(303);
  for (std::size_t i = 0; i < draws; ++i) {
    const double f = footprint_fitness(gold, random_footprint_baseline(acts, seeds.next()));
    sum += f;
    sq += f * f;
  }
  const double mean = sum / draws;
  const double var = sq / draws - mean * mean;
  const double se = std::sqrt(var / draws);
  const double expected = random_footprint_expected_fitness(acts.size());
  const double off = acts.size() * (acts.size() - 1.0);
  const double diag = acts.size();
  const double analytic = (0.25 * off + 0.5 * diag) / (off + diag);
  const bool mc_ok = std::abs(mean - expected) <= 3.0 * se && std::abs(expected - analytic) < 1e-12;

  // Corpus-level mean over a synthetic corpus.
  const auto models = synth_admitted({.n_models = 1000}, 304);
  std::vector<std::size_t> sizes;
  std::vector<TaskRecord> golds;
  std::vector<Prediction> preds;
  for (const auto& m : models) {
    sizes.push_back(m.model.activities().size());
    TaskRecord r = gen_sdfd(m.model);
    const Footprint fp = random_footprint_baseline(r.activities, derive_seed(304, r.record_id));
    preds.push_back({r.record_id, render_dfg_edges(dfg_from_footprint(fp))});
    golds.push_back(std::move(r));
  }
  std::nth_element(sizes.begin(), sizes.begin() + sizes.size() / 2, sizes.end());
  const std::size_t median = sizes[sizes.size() / 2];
  const double corpus_mean = score_task(Task::SDFD, golds, preds).value;
  const bool corpus_ok = median >= 4 && median <= 5 && corpus_mean >= 0.28 && corpus_mean <= 0.36;

  std::ostringstream d;
  d << "MC mean " << fmt("%.5f", mean) << " vs " << fmt("%.5f", expected) << " (3 SE = "
    << fmt("%.5f", 3 * se) << "); corpus median |A|=" << median << " mean fitness "
    << fmt("%.4f", corpus_mean) << " in [0.28, 0.36]";
  return {mc_ok && corpus_ok, d.str()};
}

// --- 4 ---------------------------------------------------------------------

Outcome c4_tsad_soundness() {
  const auto models = synth_admitted({.n_models = 250, .min_trace_length = 3}, 404);
  Checker c;
  std::size_t anomalous = 0;
  std::size_t total = 0;
  for (const auto& m : models) {
    for (const auto& r : gen_tsad(m.model, derive_seed(404, m.model.id() + "/tsad"))) {
      ++total;
      const bool member = oracle::accepts(m.tree, r.trace());
      c.expect(member == m.model.contains(r.trace()), "oracle disagrees with play-out");
      if (r.label() == Label::Anomalous) {
        ++anomalous;
        c.expect(!member, r.record_id + " anomalous but in language");
      } else {
        c.expect(member, r.record_id + " valid but not in language");
      }
    }
  }
  const double frac = static_cast<double>(anomalous) / static_cast<double>(total);
  c.expect(frac >= 0.40 && frac <= 0.50, "anomalous fraction " + fmt("%.4f", frac));
  std::ostringstream d;
  d << models.size() << " models, " << total << " records, anomalous fraction "
    << fmt("%.4f", frac);
  if (!c.ok()) d << ": " << c.failures();
  return {c.ok() && models.size() >= 200, d.str()};
}

// --- 5 ---------------------------------------------------------------------

Outcome c5_asad() {
  std::vector<ProcessModel> models;
  for (const auto& m : synth_admitted({.n_models = 400, .max_activities = 6}, 505)) {
    models.push_back(m.model);
  }
  oracle::TreeGen gen(505, {.max_leaves = 6, .max_depth = 4});
  while (models.size() < 800) {
    const ProcessModel m = playout(gen.next(), kDefaultMaxSequences,
                                   "r" + std::to_string(models.size()));
    if (m.activities().size() >= 2) models.push_back(m);
  }
  Checker c;
  std::size_t balanced_cases = 0;
  for (const auto& m : models) {
    const auto batch = gen_asad(m, derive_seed(505, m.id()));
    const auto ef = oracle::ef_pairs(m.sequences());
    std::set<ActivityPair> pos;
    std::set<ActivityPair> neg;
    for (const auto& r : batch.records) {
      (r.label() == Label::Valid ? pos : neg).insert(r.pair());
      c.expect(m.activities().contains(r.pair().first) && m.activities().contains(r.pair().second),
               m.id() + " pair outside A");
    }
    c.expect(pos == ef, m.id() + " positives != EF");
    c.expect(neg.size() == batch.negatives, m.id() + " duplicate negatives");
    for (const auto& p : neg) c.expect(!ef.contains(p), m.id() + " overlap");
    const std::size_t complement = m.activities().size() * m.activities().size() - ef.size();
    if (complement >= ef.size()) {
      ++balanced_cases;
      c.expect(neg.size() == pos.size(), m.id() + " not balanced");
    } else {
      c.expect(neg.size() == complement, m.id() + " complement not exhausted");
      c.expect(batch.shortfall == ef.size() - complement, m.id() + " shortfall");
    }
  }
  std::ostringstream d;
  d << models.size() << " models with |A| <= 6 (" << balanced_cases
    << " with a large enough complement)";
  if (!c.ok()) d << ": " << c.failures();
  return {c.ok(), d.str()};
}

// --- 6 ---------------------------------------------------------------------

Outcome c6_snap() {
  std::vector<AdmittedModel> models = synth_admitted({.n_models = 300, .max_activities = 7}, 606);
  Checker c;
  std::size_t records = 0;
  for (const auto& m : models) {
    std::size_t expected = 0;
    for (const auto& s : m.model.sequences()) expected += s.empty() ? 0 : s.size() - 1;
    const auto raw = gen_snap(m.model, false);
    c.expect(raw.size() == expected, m.model.id() + " pre-dedup count");
    records += raw.size();
    for (const auto& r : raw) {
      Trace continued = r.trace();
      continued.push_back(r.next_activity());
      // Some sequence of the language starts with prefix + next.
      bool witnessed = false;
      for (const auto& s : m.model.sequences()) {
        if (s.size() >= continued.size() &&
            std::equal(continued.begin(), continued.end(), s.begin()) &&
            oracle::accepts(m.tree, s)) {
          witnessed = true;
          break;
        }
      }
      c.expect(witnessed, r.record_id + " not continuable");
    }
  }
  std::ostringstream d;
  d << models.size() << " models, " << records << " pre-dedup records verified";
  if (!c.ok()) d << ": " << c.failures();
  return {c.ok(), d.str()};
}

// --- 7 ---------------------------------------------------------------------

Outcome c7_split() {
  Checker c;
  const SplitRatios ratios;
  const std::array<double, 3> r = {ratios.train, ratios.validation, ratios.test};
  std::size_t worst_gap = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::vector<ProcessModel> models;
    for (const auto& m : synth_admitted({.n_models = 300, .max_language = 200}, 700 + seed)) {
      models.push_back(m.model);
    }
    const auto split = split_corpus(models, ratios, seed);

    std::set<Trace> train_seqs;
    std::set<Trace> held_seqs;
    for (const auto& m : models) {
      auto& dst = split.at(m.id()) == Split::Train ? train_seqs : held_seqs;
      dst.insert(m.sequences().begin(), m.sequences().end());
    }
    std::vector<Trace> both;
    std::set_intersection(train_seqs.begin(), train_seqs.end(), held_seqs.begin(), held_seqs.end(),
                          std::back_inserter(both));
    c.expect(both.empty(), "seed " + std::to_string(seed) + " leaks");

    // Per-stratum counts against targets, tolerance one (largest) component.
    const auto comps = leakage_components(models);
    std::array<std::size_t, kStrataCount> largest{};
    std::array<std::size_t, kStrataCount> total{};
    std::array<std::array<std::size_t, 3>, kStrataCount> count{};
    for (const auto& comp : comps) {
      std::size_t k = 0;
      for (std::size_t i : comp) k = std::max(k, models[i].activities().size());
      const std::size_t s = activity_stratum(k);
      largest[s] = std::max(largest[s], comp.size());
      total[s] += comp.size();
      for (std::size_t i : comp) ++count[s][static_cast<std::size_t>(split.at(models[i].id()))];
    }
    for (std::size_t s = 0; s < kStrataCount; ++s) {
      for (std::size_t k = 0; k < 3; ++k) {
        const double gap = std::abs(static_cast<double>(count[s][k]) - r[k] * total[s]);
        worst_gap = std::max(worst_gap, static_cast<std::size_t>(std::ceil(gap)));
        c.expect(gap <= static_cast<double>(largest[s]),
                 "seed " + std::to_string(seed) + " stratum " + std::to_string(s) + " off by " +
                     fmt("%.2f", gap));
      }
    }
  }
  std::ostringstream d;
  d << "20 seeds, no shared sequence across TRAIN and VALIDATION/TEST; worst per-stratum gap "
    << worst_gap << " model(s)";
  if (!c.ok()) d << ": " << c.failures();
  return {c.ok(), d.str()};
}

// --- 8 ---------------------------------------------------------------------

Outcome c8_fitness() {
  Checker c;
  const auto models = synth_admitted({.n_models = 1000}, 808);
  for (const auto& m : models) {
    const TaskRecord d = gen_sdfd(m.model);
    const TaskRecord t = gen_sptd(m.model, m.tree);
    c.expect(score_sdfd(d, render_dfg_edges(d.dfg())).fitness == 1.0, m.model.id() + " dfg");
    c.expect(score_sptd(t, t.tree().text).fitness == 1.0, m.model.id() + " tree");
  }

  const ActivitySet abc = {act("a"), act("b"), act("c")};
  const double f79 = footprint_fitness(
      footprint(Dfg(abc, {{act("a"), act("b")}, {act("b"), act("c")}})),
      footprint(Dfg(abc, {{act("a"), act("b")}})));
  c.expect(std::abs(f79 - 7.0 / 9.0) < 1e-12, "7/9 case gave " + fmt("%.6f", f79));
  const auto gold_tree = parse_tree("->('a','b','c')");
  const TaskRecord sptd = gen_sptd(playout(gold_tree, kDefaultMaxSequences, "g"), gold_tree);
  const double f59 = score_sptd(sptd, "->( +('a','b'), 'c')").fitness;
  c.expect(std::abs(f59 - 5.0 / 9.0) < 1e-12, "5/9 case gave " + fmt("%.6f", f59));

  oracle::TreeGen gen(808, {.max_leaves = 8, .max_depth = 5});
  std::size_t oversized = 0;
  for (int i = 0; i < 500; ++i) {
    ProcessTree g = gen.next();
    std::optional<ProcessModel> gm;
    while (!gm) {
      try {
        gm = playout(g, kDefaultMaxSequences, "g");
      } catch (const LanguageTooLarge&) {
        g = gen.next();
      }
    }
    const ProcessTree p = gen.next();
    const auto via_tree = score_sptd(gen_sptd(*gm, g), render_tree(p));
    try {
      const double via_dfg =
          score_sdfd(gen_sdfd(*gm), render_dfg_edges(dfg_of_model(playout(p)))).fitness;
      c.expect(via_tree.fitness == via_dfg, "pair " + std::to_string(i));
    } catch (const LanguageTooLarge&) {
      ++oversized;
      c.expect(via_tree.fitness == 0.0 && via_tree.parse_failure, "oversized pair " + std::to_string(i));
    }
  }
  std::ostringstream d;
  d << "self-fitness 1.0 on " << models.size() << " DFGs and trees, 7/9 and 5/9 exact, "
    << "500 tree pairs consistent (" << oversized << " predictions over the sequence cap)";
  if (!c.ok()) d << ": " << c.failures();
  return {c.ok(), d.str()};
}

// --- 9 ---------------------------------------------------------------------

Outcome c9_parser() {
  Checker c;
  oracle::TreeGen gen(909, {.max_leaves = 21, .max_depth = 7, .tau_prob = 0.1});
  std::size_t max_leaves = 0;
  std::vector<std::string> rendered;
  for (int i = 0; i < 1000; ++i) {
    ProcessTree t = gen.next();
    while (t.leaf_count() > 21) t = gen.next();
    max_leaves = std::max(max_leaves, t.leaf_count());
    rendered.push_back(render_tree(t));
    c.expect(parse_tree(render_tree(t)) == t, "round-trip " + std::to_string(i));
  }
  Rng rng(910);
  const std::string tokens = "->X+*()',\\ tauab";
  std::size_t parsed = 0;
  std::size_t rejected = 0;
  for (int i = 0; i < 100000; ++i) {
    std::string s;
    if (i % 2 == 0) {
      const std::size_t len = rng.below(48);
      for (std::size_t k = 0; k < len; ++k) {
        s.push_back(rng.bernoulli(0.6) ? tokens[rng.below(tokens.size())]
                                       : static_cast<char>(rng.below(256)));
      }
    } else {
      // Mutate a valid rendering: overwrite, delete or duplicate a few bytes.
      s = rendered[rng.below(rendered.size())];
      for (std::size_t m = 1 + rng.below(3); m > 0 && !s.empty(); --m) {
        const std::size_t at = rng.below(s.size());
        switch (rng.below(4)) {
          case 0: s[at] = static_cast<char>(rng.below(256)); break;
          case 1: s.erase(at, 1); break;
          case 2: s.insert(at, 1, s[at]); break;
          default: break;  // keep as is
        }
      }
    }
    try {
      const ProcessTree t = parse_tree(s);
      ++parsed;
      c.expect(parse_tree(render_tree(t)) == t, "fuzz round-trip");
    } catch (const Error&) {
      ++rejected;
    } catch (const std::exception& e) {
      c.expect(false, std::string("unexpected exception: ") + e.what());
    }
  }
  std::ostringstream d;
  d << "1000 trees round-trip (up to " << max_leaves << " leaves); 100000 fuzz inputs: " << parsed
    << " parsed, " << rejected << " rejected, no crash";
  if (!c.ok()) d << ": " << c.failures();
  return {c.ok(), d.str()};
}

// --- 10 --------------------------------------------------------------------

Outcome c10_runtime() {
  using namespace pmsem::cli;
  const fs::path dir = fs::temp_directory_path() / "pmsem_acceptance_pipeline";
  fs::remove_all(dir);
  fs::create_directories(dir);
  Checker c;
  RunConfig cfg;
  cfg.seed = 1010;
  c.expect(cmd_synth({.n_models = 1000}, cfg.seed, dir / "corpus.jsonl").exit_code == kExitOk, "synth");
  c.expect(cmd_validate(dir / "corpus.jsonl", dir / "admitted.jsonl", dir / "rejected.jsonl", cfg)
                   .exit_code == kExitOk,
           "validate");
  c.expect(cmd_split(dir / "admitted.jsonl", cfg, dir / "split.jsonl").exit_code == kExitOk, "split");
  c.expect(cmd_gen(dir / "admitted.jsonl", {}, cfg, dir / "data").exit_code == kExitOk, "gen");
  std::size_t records = 0;
  for (Task task : kAllTasks) {
    const std::string t(to_string(task));
    const fs::path data = dir / "data" / (t + ".jsonl");
    const fs::path preds = dir / (t + ".pred.jsonl");
    const auto kind = is_generation(task) ? BaselineKind::RandomFootprint : BaselineKind::RandomClass;
    c.expect(cmd_baseline(data, kind, cfg.seed, preds).exit_code == kExitOk, t + " baseline");
    const auto res = cmd_score(data, preds, {.table = false}, cfg);
    c.expect(res.exit_code == kExitOk, t + " score");
    records += nlohmann::json::parse(res.summary)["reports"][0]["n_records"].get<std::size_t>();
  }
  fs::remove_all(dir);
  return {c.ok(), std::to_string(records) + " records generated and scored" +
                      (c.ok() ? "" : ": " + c.failures())};
}

struct Criterion {
  int number;
  const char* title;
  double limit_s;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "worked example M1", 1.0, c1_worked_example},
      {2, "random classification baseline", 10.0, c2_random_classification},
      {3, "random footprint baseline", 30.0, c3_random_footprint},
      {4, "T-SAD soundness", 60.0, c4_tsad_soundness},
      {5, "A-SAD positives, balance, overlap", 60.0, c5_asad},
      {6, "S-NAP counts and continuability", 60.0, c6_snap},
      {7, "leakage-free stratified split", 60.0, c7_split},
      {8, "fitness identities", 60.0, c8_fitness},
      {9, "parser round-trip and fuzz", 60.0, c9_parser},
      {10, "full pipeline runtime", 300.0, c10_runtime},
  };
  int failed = 0;
  for (const auto& cr : criteria) {
    Outcome out;
    const auto start = std::chrono::steady_clock::now();
    try {
      out = cr.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool pass = out.ok && secs < cr.limit_s;
    if (!pass) ++failed;
    std::printf("[%s] %2d. %s: %s (%.2fs, limit %.0fs)\n", pass ? "PASS" : "FAIL", cr.number,
                cr.title, out.detail.c_str(), secs, cr.limit_s);
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
