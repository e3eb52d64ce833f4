#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace snc {

/// SplitMix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t tag) noexcept {
  return mix64(mix64(parent) ^ mix64(tag + 0x632BE59BD9B4E019ull));
}

/// Purpose tags for per-session sub-streams.
enum class StreamPurpose : std::uint64_t { Payload = 1, Channel = 2, Coding = 3 };

/// Deterministic random stream over mt19937_64. All conversions to
/// uniform reals and symbols are done here from raw engine output, so
/// results do not depend on the standard library's distributions.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  /// Stream for (master_seed, session_index, purpose).
  static RandomStream for_session(std::uint64_t master_seed, std::uint64_t session_index,
                                  StreamPurpose purpose) {
    const std::uint64_t session = derive_seed(master_seed, session_index);
    return RandomStream(derive_seed(session, static_cast<std::uint64_t>(purpose)));
  }

  std::uint64_t next() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  bool bernoulli(double p) { return uniform() < p; }
  /// Uniform integer in [0, 2^bits), bits <= 8.
  std::uint8_t bits(unsigned count) { return static_cast<std::uint8_t>(engine_() >> (64 - count)); }

  /// Fills `out` with uniform values in [0, 2^bits), packing several
  /// symbols per engine draw.
  template <typename Span>
  void fill_bits(Span&& out, unsigned count) {
    const unsigned per_word = 64 / count;
    const std::uint64_t mask = (std::uint64_t{1} << count) - 1;
    std::size_t i = 0;
    while (i < out.size()) {
      std::uint64_t word = engine_();
      for (unsigned j = 0; j < per_word && i < out.size(); ++j, ++i) {
        out[i] = static_cast<std::uint8_t>(word & mask);
        word >>= count;
      }
    }
  }

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace snc
