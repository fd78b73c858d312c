#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace linkgraph {

/// Seeded generator with portable bounded draws.
///
/// std::uniform_int_distribution and std::shuffle are implementation-defined,
/// so datasets built with the same seed could differ between standard
/// libraries. Everything seed-dependent goes through this wrapper instead.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, bound). bound must be non-zero.
  std::uint64_t below(std::uint64_t bound);

  /// Uniform double in [0, 1) with 53 bits of precision.
  double unit();

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      using std::swap;
      swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

/// Derives an independent stream seed for a named sub-task so that adding a
/// stage does not perturb the draws of another.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace linkgraph
