#pragma once

#include <cassert>
#include <cstdint>
#include <string_view>
#include <vector>

namespace pnet {

// Counter-based deterministic generator built on the splitmix64 finalizer.
//
// Stream derivation rule: a stream is identified by the tuple
// (master seed, purpose tag, id1, id2), e.g. ("gibbs-chain", chain id) or
// ("e-step", iteration, record index). Equal tuples yield byte-identical
// streams on every platform; distinct tuples yield statistically independent
// streams. Callers own a stream and advance it sequentially.
class RngStream {
 public:
  RngStream() = default;

  static RngStream derive(std::uint64_t master_seed, std::string_view purpose,
                          std::uint64_t id1 = 0, std::uint64_t id2 = 0) {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a over the purpose tag
    for (char ch : purpose) {
      h ^= static_cast<unsigned char>(ch);
      h *= 0x100000001b3ULL;
    }
    std::uint64_t key = finalize(master_seed ^ h);
    key = finalize(key ^ (0x9e3779b97f4a7c15ULL * (id1 + 1)));
    key = finalize(key ^ (0xc2b2ae3d27d4eb4fULL * (id2 + 1)));
    RngStream s;
    s.key_ = key;
    return s;
  }

  std::uint64_t next_u64() {
    counter_ += 0x9e3779b97f4a7c15ULL;
    return finalize(key_ + counter_);
  }

  // Uniform double in [0, 1), 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  bool bernoulli(double p) { return next_double() < p; }

  // Uniform integer in {0, ..., n-1}; rejection sampling, no modulo bias.
  std::uint64_t below(std::uint64_t n) {
    assert(n > 0);
    const std::uint64_t threshold = (~n + 1) % n;  // 2^64 mod n
    for (;;) {
      std::uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

  // Fisher-Yates; self-contained so sequences do not depend on the stdlib.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      T tmp = v[i - 1];
      v[i - 1] = v[j];
      v[j] = tmp;
    }
  }

 private:
  static std::uint64_t finalize(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

}  // namespace pnet
