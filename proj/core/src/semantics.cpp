#include "pmsem/semantics.hpp"

#include <vector>

namespace pmsem {

LanguageTooLarge::LanguageTooLarge(std::size_t limit)
    : Error("play-out exceeds " + std::to_string(limit) + " sequences"), limit_(limit) {}

namespace {

using Language = std::set<Trace>;

class LanguageBuilder {
 public:
  explicit LanguageBuilder(std::size_t limit) : limit_(limit) {}

  void add(Language& lang, Trace trace) const {
    lang.insert(std::move(trace));
    if (lang.size() > limit_) throw LanguageTooLarge(limit_);
  }

  Language concat(const Language& left, const Language& right) const {
    Language out;
    for (const auto& u : left) {
      for (const auto& v : right) {
        Trace t;
        t.reserve(u.size() + v.size());
        t.insert(t.end(), u.begin(), u.end());
        t.insert(t.end(), v.begin(), v.end());
        add(out, std::move(t));
      }
    }
    return out;
  }

  Language shuffle(const Language& left, const Language& right) const {
    Language out;
    Trace buffer;
    for (const auto& u : left) {
      for (const auto& v : right) {
        buffer.clear();
        interleave(u, 0, v, 0, buffer, out);
      }
    }
    return out;
  }

  Language eval(const ProcessTree& tree) const {
    switch (tree.kind()) {
      case ProcessTree::Kind::Leaf: return Language{Trace{tree.activity()}};
      case ProcessTree::Kind::Silent: return Language{Trace{}};
      case ProcessTree::Kind::Node: break;
    }
    const auto& children = tree.children();
    switch (tree.op()) {
      case Operator::Seq: {
        Language acc = eval(children.front());
        for (std::size_t i = 1; i < children.size(); ++i) acc = concat(acc, eval(children[i]));
        return acc;
      }
      case Operator::Xor: {
        Language acc;
        for (const auto& child : children) {
          for (auto& t : eval(child)) add(acc, t);
        }
        return acc;
      }
      case Operator::And: {
        Language acc = eval(children.front());
        for (std::size_t i = 1; i < children.size(); ++i) acc = shuffle(acc, eval(children[i]));
        return acc;
      }
      case Operator::Loop: {
        const Language body = eval(children.front());
        Language acc = body;
        if (acc.size() > limit_) throw LanguageTooLarge(limit_);
        for (std::size_t i = 1; i < children.size(); ++i) {
          const Language redo = eval(children[i]);
          for (const auto& u : body) {
            for (const auto& v : redo) {
              for (const auto& w : body) {
                Trace t;
                t.reserve(u.size() + v.size() + w.size());
                t.insert(t.end(), u.begin(), u.end());
                t.insert(t.end(), v.begin(), v.end());
                t.insert(t.end(), w.begin(), w.end());
                add(acc, std::move(t));
              }
            }
          }
        }
        return acc;
      }
    }
    return {};
  }

 private:
  void interleave(const Trace& u, std::size_t i, const Trace& v, std::size_t j, Trace& buffer,
                  Language& out) const {
    if (i == u.size() && j == v.size()) {
      add(out, buffer);
      return;
    }
    if (i < u.size()) {
      buffer.push_back(u[i]);
      interleave(u, i + 1, v, j, buffer, out);
      buffer.pop_back();
    }
    if (j < v.size()) {
      buffer.push_back(v[j]);
      interleave(u, i, v, j + 1, buffer, out);
      buffer.pop_back();
    }
  }

  std::size_t limit_;
};

}  // namespace

std::set<Trace> play_language(const ProcessTree& tree, std::size_t max_sequences) {
  if (max_sequences == 0) throw Error("max_sequences must be positive");
  return LanguageBuilder(max_sequences).eval(tree);
}

ProcessModel playout(const ProcessTree& tree, std::size_t max_sequences, std::string model_id,
                     std::optional<std::string> name) {
  return ProcessModel(std::move(model_id), play_language(tree, max_sequences), std::move(name));
}

Dfg dfg_of_traces(const std::set<Trace>& traces, const ActivitySet& activities) {
  std::set<ActivityPair> edges;
  for (const auto& t : traces) {
    for (std::size_t i = 0; i + 1 < t.size(); ++i) edges.emplace(t[i], t[i + 1]);
  }
  return Dfg(activities, std::move(edges));
}

Dfg dfg_of_model(const ProcessModel& model) {
  return dfg_of_traces(model.sequences(), model.activities());
}

Dfg dfg_of_log(const EventLog& log) {
  const std::set<Trace> unique(log.traces.begin(), log.traces.end());
  return dfg_of_traces(unique, log.activities());
}

Footprint footprint(const Dfg& dfg) {
  std::vector<Activity> acts(dfg.activities().begin(), dfg.activities().end());
  const std::size_t n = acts.size();
  std::vector<Relation> matrix(n * n, Relation::None);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const bool xy = dfg.has_edge(acts[i], acts[j]);
      const bool yx = dfg.has_edge(acts[j], acts[i]);
      Relation r = Relation::None;
      if (xy && yx) {
        r = Relation::Parallel;
      } else if (xy) {
        r = Relation::Forward;
      } else if (yx) {
        r = Relation::Backward;
      }
      matrix[i * n + j] = r;
    }
  }
  return Footprint(std::move(acts), std::move(matrix));
}

EventuallyFollowsSet eventually_follows(const ProcessModel& model) {
  EventuallyFollowsSet ef;
  for (const auto& t : model.sequences()) {
    for (std::size_t i = 0; i < t.size(); ++i) {
      for (std::size_t j = i + 1; j < t.size(); ++j) ef.pairs.emplace(t[i], t[j]);
    }
  }
  return ef;
}

}  // namespace pmsem
