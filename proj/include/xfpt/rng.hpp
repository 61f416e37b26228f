#ifndef XFPT_RNG_HPP
#define XFPT_RNG_HPP

#include <cmath>
#include <cstdint>

namespace xfpt {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11 constants).
// Each stream is identified by (seed, replicate, walker); draws within a
// stream advance only the low counter word. Streams never collide for
// replicate, walker < 2^32, which makes results independent of how walkers
// are scheduled across threads.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint32_t replicate, std::uint32_t walker)
      : key0_(static_cast<std::uint32_t>(seed)),
        key1_(static_cast<std::uint32_t>(seed >> 32)),
        ctr1_(walker),
        ctr2_(replicate) {}

  // 64 uniform random bits.
  std::uint64_t next_u64() {
    if (slot_ == 2) {
      fill_block();
      slot_ = 0;
    }
    return block_[slot_++];
  }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1]; safe to pass to log().
  double uniform_pos() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }

  double exponential(double rate) { return -std::log(uniform_pos()) / rate; }

 private:
  static std::uint32_t mulhi(std::uint32_t a, std::uint32_t b) {
    return static_cast<std::uint32_t>((static_cast<std::uint64_t>(a) * b) >> 32);
  }

  void fill_block() {
    std::uint32_t x0 = ctr0_, x1 = ctr1_, x2 = ctr2_, x3 = ctr3_;
    std::uint32_t k0 = key0_, k1 = key1_;
    for (int round = 0; round < 10; ++round) {
      const std::uint32_t hi0 = mulhi(kMul0, x0), lo0 = kMul0 * x0;
      const std::uint32_t hi1 = mulhi(kMul1, x2), lo1 = kMul1 * x2;
      const std::uint32_t y0 = hi1 ^ x1 ^ k0;
      const std::uint32_t y1 = lo1;
      const std::uint32_t y2 = hi0 ^ x3 ^ k1;
      const std::uint32_t y3 = lo0;
      x0 = y0; x1 = y1; x2 = y2; x3 = y3;
      k0 += kWeyl0;
      k1 += kWeyl1;
    }
    block_[0] = (static_cast<std::uint64_t>(x1) << 32) | x0;
    block_[1] = (static_cast<std::uint64_t>(x3) << 32) | x2;
    ++ctr0_;  // 2^32 blocks (2^33 u64 draws) per stream
  }

  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  std::uint32_t key0_, key1_;
  std::uint32_t ctr0_ = 0, ctr1_, ctr2_, ctr3_ = 0;
  std::uint64_t block_[2] = {0, 0};
  int slot_ = 2;
};

}  // namespace xfpt

#endif  // XFPT_RNG_HPP
