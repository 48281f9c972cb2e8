#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

namespace pmsem {

/// Mixes a global seed with a key (usually a model or record id) into an
/// independent stream seed. FNV-1a over the key, then a splitmix64 finalizer.
std::uint64_t derive_seed(std::uint64_t global_seed, std::string_view key);

/// Seeded generator with portable sampling helpers. The standard
/// distributions are implementation-defined, so bounded draws are done here to
/// keep generated datasets byte-identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, n). n must be > 0.
  std::size_t below(std::size_t n);

  /// Uniform double in [0, 1) with 53 bits of precision.
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return unit() < p; }

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[below(i)]);
    }
  }

  /// k distinct indices drawn uniformly from [0, n), in draw order.
  std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k);

 private:
  std::mt19937_64 engine_;
};

}  // namespace pmsem
