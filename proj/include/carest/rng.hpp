#pragma once

// Counter-based random numbers (Philox4x32-10, Salmon et al. 2011).
//
// A generator is addressed by (seed, stream). The seed is the 64-bit Philox
// key; the stream occupies the upper half of the 128-bit counter and the
// lower half counts blocks. Monte Carlo repetition r draws from
// derive_seed(master, r), so a repetition's numbers do not depend on which
// worker ran it or in which order.

#include <array>
#include <cstdint>
#include <limits>

namespace carest {

class Philox4x32 {
 public:
  using result_type = std::uint32_t;
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  explicit Philox4x32(std::uint64_t seed, std::uint64_t stream = 0)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        stream_(stream) {}

  result_type operator()() {
    if (pos_ == 4) {
      block_ = bijection(counter_for(block_index_++), key_);
      pos_ = 0;
    }
    return block_[pos_++];
  }

  void discard(std::uint64_t n) {
    for (std::uint64_t i = 0; i < n; ++i) (*this)();
  }

  /// The raw 10-round Philox bijection.
  static Counter bijection(Counter ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kW0;
        key[1] += kW1;
      }
      const std::uint64_t p0 = std::uint64_t{kM0} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{kM1} * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kM0 = 0xD2511F53u;
  static constexpr std::uint32_t kM1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kW0 = 0x9E3779B9u;
  static constexpr std::uint32_t kW1 = 0xBB67AE85u;

  Counter counter_for(std::uint64_t block) const {
    return {static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32),
            static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
  }

  Key key_;
  std::uint64_t stream_;
  std::uint64_t block_index_{0};
  Counter block_{};
  int pos_{4};
};

/// Seed of substream `index` under `master`; a pure function of both.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  const Philox4x32::Counter ctr{static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                                0x5EEDu, 0xC0DEu};
  const Philox4x32::Key key{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32)};
  const auto out = Philox4x32::bijection(ctr, key);
  return (std::uint64_t{out[0]} << 32) | out[1];
}

}  // namespace carest
