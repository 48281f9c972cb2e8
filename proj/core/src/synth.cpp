#include "pmsem/synth.hpp"

#include <algorithm>
#include <array>
#include <set>
#include <string>

#include "pmsem/random.hpp"

namespace pmsem {

namespace {

constexpr std::array kVerbs = {
    "create",   "approve",  "reject",   "check",    "review",  "send",     "receive",
    "register", "archive",  "update",   "cancel",   "confirm", "prepare",  "sign",
    "pay",      "ship",     "invoice",  "assess",   "verify",  "schedule", "notify",
    "close",    "open",     "validate", "forward",  "request", "record",   "inspect",
    "deliver",  "calculate", "submit",  "evaluate", "assign",  "file",     "collect",
    "escalate", "publish",  "print",    "complete", "plan"};

constexpr std::array kObjects = {
    "order",     "invoice",  "application", "contract",  "claim",    "payment",  "request",
    "report",    "ticket",   "shipment",    "customer",  "offer",    "quote",    "receipt",
    "account",   "document", "appointment", "candidate", "budget",   "complaint", "delivery",
    "expense",   "form",     "goods",       "license",   "meeting",  "parcel",   "patient",
    "policy",    "proposal", "purchase",    "refund",    "reminder", "reservation", "sample",
    "supplier",  "survey",   "timesheet",   "visa",      "warranty"};

// Activity-count weights for 2, 3, ..., 21 (median 4, mean close to 4.7).
constexpr std::array<double, 20> kCountWeights = {0.14,  0.20,  0.20,  0.14,  0.10,
                                                  0.07,  0.05,  0.03,  0.02,  0.015,
                                                  0.01,  0.004, 0.004, 0.004, 0.004,
                                                  0.004, 0.004, 0.004, 0.004, 0.004};

std::size_t draw_activity_count(Rng& rng, const SynthOptions& o) {
  double total = 0.0;
  for (std::size_t i = 0; i < kCountWeights.size(); ++i) {
    const std::size_t n = i + 2;
    if (n >= o.min_activities && n <= o.max_activities) total += kCountWeights[i];
  }
  double u = rng.unit() * total;
  std::size_t n = std::max<std::size_t>(o.min_activities, 2);
  for (std::size_t i = 0; i < kCountWeights.size(); ++i) {
    const std::size_t c = i + 2;
    if (c < o.min_activities || c > o.max_activities) continue;
    n = c;
    u -= kCountWeights[i];
    if (u < 0.0) break;
  }
  return std::max(n, o.min_trace_length);
}

class TreeDrawer {
 public:
  TreeDrawer(Rng& rng, const SynthOptions& o) : rng_(rng), o_(o) {}

  ProcessTree draw(std::vector<Activity> labels) {
    if (labels.size() == 1) {
      ProcessTree leaf = ProcessTree::leaf(labels.front());
      if (rng_.bernoulli(o_.optional_prob)) {
        return ProcessTree::node(Operator::Xor, {std::move(leaf), ProcessTree::tau()});
      }
      return leaf;
    }
    const Operator op = draw_operator(labels.size());
    std::size_t arity = 2;
    if (op != Operator::Loop) arity = 2 + rng_.below(std::min<std::size_t>(labels.size(), 4) - 1);

    // Random contiguous split into `arity` non-empty groups.
    const auto cuts_idx = rng_.sample_indices(labels.size() - 1, arity - 1);
    std::vector<std::size_t> cuts;
    for (std::size_t c : cuts_idx) cuts.push_back(c + 1);
    std::sort(cuts.begin(), cuts.end());
    cuts.push_back(labels.size());

    std::vector<ProcessTree> children;
    std::size_t start = 0;
    for (std::size_t end : cuts) {
      children.push_back(draw({labels.begin() + static_cast<std::ptrdiff_t>(start),
                               labels.begin() + static_cast<std::ptrdiff_t>(end)}));
      start = end;
    }
    return ProcessTree::node(op, std::move(children));
  }

 private:
  Operator draw_operator(std::size_t k) {
    const double w_seq = 0.50;
    const double w_xor = 0.25;
    const double w_and = k <= 5 ? 0.15 : 0.05;
    const double w_loop = o_.loops ? 0.10 : 0.0;
    double u = rng_.unit() * (w_seq + w_xor + w_and + w_loop);
    if ((u -= w_seq) < 0.0) return Operator::Seq;
    if ((u -= w_xor) < 0.0) return Operator::Xor;
    if ((u -= w_and) < 0.0) return Operator::And;
    return Operator::Loop;
  }

  Rng& rng_;
  const SynthOptions& o_;
};

std::vector<Activity> draw_labels(Rng& rng, std::size_t n) {
  const std::size_t vocab = kVerbs.size() * kObjects.size();
  std::vector<Activity> out;
  for (std::size_t idx : rng.sample_indices(vocab, n)) {
    out.emplace_back(std::string(kVerbs[idx / kObjects.size()]) + " " +
                     kObjects[idx % kObjects.size()]);
  }
  return out;
}

bool acceptable(const ProcessTree& tree, const SynthOptions& o) {
  try {
    const auto language = play_language(tree, o.max_language);
    for (const auto& t : language) {
      if (t.empty() || t.size() < o.min_trace_length) return false;
    }
    return true;
  } catch (const LanguageTooLarge&) {
    return false;
  }
}

}  // namespace

std::vector<CorpusEntry> synth_corpus(const SynthOptions& options, std::uint64_t seed) {
  if (options.min_activities < 2 || options.max_activities < options.min_activities) {
    throw Error("synth: invalid activity-count range");
  }
  if (options.min_trace_length > options.max_activities) {
    throw Error("synth: min_trace_length exceeds max_activities");
  }
  Rng rng(derive_seed(seed, "synth"));
  std::vector<CorpusEntry> out;
  std::set<ActivitySet> seen;
  std::size_t attempts = 0;
  const std::size_t width = std::to_string(options.n_models).size();
  while (out.size() < options.n_models) {
    if (++attempts > options.n_models * 1000 + 1000) {
      throw Error("synth: could not generate enough acceptable models");
    }
    const std::size_t n = draw_activity_count(rng, options);
    std::vector<Activity> labels = draw_labels(rng, n);
    ActivitySet set(labels.begin(), labels.end());
    if (seen.contains(set)) continue;

    TreeDrawer drawer(rng, options);
    ProcessTree tree = drawer.draw(labels);
    if (!acceptable(tree, options)) continue;
    seen.insert(std::move(set));

    std::string id = std::to_string(out.size());
    id = "m" + std::string(width - std::min(width, id.size()), '0') + id;
    out.push_back({std::move(id), std::nullopt, std::move(tree)});
  }
  return out;
}

}  // namespace pmsem
