#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "pmsem/taskgen.hpp"

namespace pmsem {

struct SynthOptions {
  std::size_t n_models = 100;
  std::size_t min_activities = 2;
  std::size_t max_activities = 21;
  /// Every sequence of every generated model has at least this many events.
  std::size_t min_trace_length = 1;
  /// Languages larger than this are re-drawn.
  std::size_t max_language = 2000;
  /// Probability of wrapping a leaf as X(leaf, tau).
  double optional_prob = 0.05;
  /// Whether loops may be generated.
  bool loops = true;
};

/// Random block-structured trees over "verb object" labels. Activity counts
/// follow a skewed distribution with median 4 (clipped to the configured
/// range). Every returned entry passes validate_corpus, has a unique
/// activity set, and respects min_trace_length and max_language.
std::vector<CorpusEntry> synth_corpus(const SynthOptions& options, std::uint64_t seed);

}  // namespace pmsem
