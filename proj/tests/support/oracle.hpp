#pragma once

// Reference implementations used to cross-check the library. They follow the
// definitions directly and are slow on purpose; nothing here shares code with
// core/src.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "pmsem/core.hpp"
#include "pmsem/random.hpp"

namespace oracle {

using pmsem::Activity;
using pmsem::ActivityPair;
using pmsem::Operator;
using pmsem::ProcessTree;
using pmsem::Relation;
using pmsem::Trace;

inline Activity act(const std::string& s) { return Activity(s); }

inline Trace trace(std::initializer_list<const char*> labels) {
  Trace t;
  for (const char* l : labels) t.emplace_back(l);
  return t;
}

inline std::set<Activity> alphabet(const ProcessTree& t) {
  auto labels = t.leaf_labels();
  return {labels.begin(), labels.end()};
}

// Membership straight from the operator definitions. Assumes unique leaf
// labels, which makes AND decidable by projecting onto each child's alphabet.
inline bool accepts(const ProcessTree& t, const Trace& s);

inline bool accepts_seq(const std::vector<ProcessTree>& kids, std::size_t k, const Trace& s,
                        std::size_t from) {
  if (k == kids.size()) return from == s.size();
  for (std::size_t to = from; to <= s.size(); ++to) {
    Trace part(s.begin() + static_cast<std::ptrdiff_t>(from),
               s.begin() + static_cast<std::ptrdiff_t>(to));
    if (accepts(kids[k], part) && accepts_seq(kids, k + 1, s, to)) return true;
  }
  return false;
}

inline bool accepts(const ProcessTree& t, const Trace& s) {
  if (t.is_silent()) return s.empty();
  if (t.is_leaf()) return s.size() == 1 && s[0] == t.activity();
  const auto& kids = t.children();
  switch (t.op()) {
    case Operator::Seq:
      return accepts_seq(kids, 0, s, 0);
    case Operator::Xor:
      return std::any_of(kids.begin(), kids.end(),
                         [&](const ProcessTree& c) { return accepts(c, s); });
    case Operator::And: {
      std::vector<Trace> parts(kids.size());
      std::vector<std::set<Activity>> alpha;
      for (const auto& c : kids) alpha.push_back(alphabet(c));
      for (const auto& a : s) {
        bool placed = false;
        for (std::size_t i = 0; i < kids.size(); ++i) {
          if (alpha[i].contains(a)) {
            parts[i].push_back(a);
            placed = true;
            break;
          }
        }
        if (!placed) return false;
      }
      for (std::size_t i = 0; i < kids.size(); ++i) {
        if (!accepts(kids[i], parts[i])) return false;
      }
      return true;
    }
    case Operator::Loop: {
      if (accepts(kids[0], s)) return true;
      for (std::size_t i = 0; i <= s.size(); ++i) {
        Trace u(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(i));
        if (!accepts(kids[0], u)) continue;
        for (std::size_t j = i; j <= s.size(); ++j) {
          Trace v(s.begin() + static_cast<std::ptrdiff_t>(i),
                  s.begin() + static_cast<std::ptrdiff_t>(j));
          Trace w(s.begin() + static_cast<std::ptrdiff_t>(j), s.end());
          if (!accepts(kids[0], w)) continue;
          for (std::size_t c = 1; c < kids.size(); ++c) {
            if (accepts(kids[c], v)) return true;
          }
        }
      }
      return false;
    }
  }
  return false;
}

// Every word over `alpha` of length <= max_len accepted by the tree.
inline std::set<Trace> enumerate_language(const ProcessTree& t, std::size_t max_len) {
  const auto al = alphabet(t);
  std::vector<Activity> letters(al.begin(), al.end());
  std::set<Trace> out;
  Trace cur;
  std::function<void()> rec = [&] {
    if (accepts(t, cur)) out.insert(cur);
    if (cur.size() == max_len) return;
    for (const auto& a : letters) {
      cur.push_back(a);
      rec();
      cur.pop_back();
    }
  };
  rec();
  return out;
}

inline std::set<ActivityPair> df_pairs(const std::set<Trace>& traces) {
  std::set<ActivityPair> out;
  for (const auto& t : traces) {
    for (std::size_t i = 0; i + 1 < t.size(); ++i) out.insert({t[i], t[i + 1]});
  }
  return out;
}

inline std::set<ActivityPair> ef_pairs(const std::set<Trace>& traces) {
  std::set<ActivityPair> out;
  for (const auto& t : traces) {
    for (std::size_t i = 0; i < t.size(); ++i) {
      for (std::size_t j = i + 1; j < t.size(); ++j) out.insert({t[i], t[j]});
    }
  }
  return out;
}

inline Relation relation(const std::set<ActivityPair>& edges, const Activity& x,
                         const Activity& y) {
  const bool xy = edges.contains({x, y});
  const bool yx = edges.contains({y, x});
  if (xy && yx) return Relation::Parallel;
  if (xy) return Relation::Forward;
  if (yx) return Relation::Backward;
  return Relation::None;
}

// Fitness over the gold activity set, diagonal included.
inline double fitness(const std::set<Activity>& activities, const std::set<ActivityPair>& gold,
                      const std::set<ActivityPair>& pred) {
  std::size_t agree = 0;
  std::size_t total = 0;
  for (const auto& x : activities) {
    for (const auto& y : activities) {
      ++total;
      if (relation(gold, x, y) == relation(pred, x, y)) ++agree;
    }
  }
  return total == 0 ? 1.0 : static_cast<double>(agree) / static_cast<double>(total);
}

struct TreeShape {
  std::size_t max_leaves = 6;
  std::size_t max_depth = 6;
  bool allow_and = true;
  bool allow_loop = true;
  double tau_prob = 0.05;
};

// Random tree with unique labels "a0", "a1", ...
class TreeGen {
 public:
  TreeGen(std::uint64_t seed, TreeShape shape) : rng_(seed), shape_(shape) {}

  ProcessTree next() {
    counter_ = 0;
    const std::size_t n = 1 + rng_.below(shape_.max_leaves);
    return build(n, 0);
  }

  pmsem::Rng& rng() { return rng_; }

 private:
  ProcessTree build(std::size_t leaves, std::size_t depth) {
    if (leaves == 1 || depth + 1 >= shape_.max_depth) {
      if (leaves == 1) {
        if (rng_.bernoulli(shape_.tau_prob)) {
          return ProcessTree::node(Operator::Xor,
                                   {make_leaf(), ProcessTree::tau()});
        }
        return make_leaf();
      }
      // Depth budget exhausted: flat sequence.
      std::vector<ProcessTree> kids;
      for (std::size_t i = 0; i < leaves; ++i) kids.push_back(make_leaf());
      return ProcessTree::node(Operator::Seq, std::move(kids));
    }
    std::vector<Operator> ops = {Operator::Seq, Operator::Xor};
    if (shape_.allow_and) ops.push_back(Operator::And);
    if (shape_.allow_loop) ops.push_back(Operator::Loop);
    const Operator op = ops[rng_.below(ops.size())];
    std::size_t arity = op == Operator::Loop ? 2 : 2 + rng_.below(std::min<std::size_t>(leaves, 3) - 1);
    std::vector<std::size_t> sizes(arity, 1);
    for (std::size_t r = leaves - arity; r > 0; --r) ++sizes[rng_.below(arity)];
    std::vector<ProcessTree> kids;
    for (std::size_t s : sizes) kids.push_back(build(s, depth + 1));
    return ProcessTree::node(op, std::move(kids));
  }

  ProcessTree make_leaf() { return ProcessTree::leaf(Activity("a" + std::to_string(counter_++))); }

  pmsem::Rng rng_;
  TreeShape shape_;
  std::size_t counter_ = 0;
};

}  // namespace oracle
