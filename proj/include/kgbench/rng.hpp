#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <utility>

namespace kgbench {

// Philox4x32-10 counter-based generator: a keyed bijection on 128-bit counters.
// Every random decision in the toolkit is a pure function of (seed, counter),
// so results do not depend on evaluation order or thread count.
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter generate(Counter counter, Key key);

  static Key key_from_seed(std::uint64_t seed) {
    return {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  }
};

// Stage tags occupy the last counter word so that draws for different purposes
// never share a counter under the same seed.
enum class Stage : std::uint32_t {
  HeadRelationEntities = 1,
  TailRelationEntities = 2,
  TripleSample = 3,
  SplitOrder = 4,
  Init = 16,
  Shuffle = 17,
  Negatives = 18,
  Dropout = 19,
  Test = 255,
};

// Maps the top 53 bits of a 64-bit word to [0, 1).
inline double to_unit(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

// Uniform [0,1) value for one element, keyed by (seed, stage, a, b, c).
double uniform_at(std::uint64_t seed, Stage stage, std::uint32_t a, std::uint32_t b = 0, std::uint32_t c = 0);

// Sequential view over Philox: counter = (index lo, index hi, stream, stage).
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, Stage stage, std::uint32_t stream)
      : key_(Philox4x32::key_from_seed(seed)), stage_(stage), stream_(stream) {}

  std::uint64_t next_u64();
  double uniform() { return to_unit(next_u64()); }
  // Unbiased integer in [0, bound); bound must be positive.
  std::uint64_t below(std::uint64_t bound);
  bool bernoulli(double p) { return uniform() < p; }

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  Philox4x32::Key key_;
  Stage stage_;
  std::uint32_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
};

}  // namespace kgbench
