#pragma once

#include <cmath>
#include <cstdint>

namespace klkit {

// Philox4x32-10 counter-based stream.  A stream is addressed by
// (seed, draw_index, lane); draws generated from the same address are
// identical regardless of scheduling, which is what makes the Monte Carlo
// estimates bit-reproducible under any thread count.
class PhiloxStream {
 public:
  PhiloxStream(std::uint64_t seed, std::uint64_t draw_index, std::uint32_t lane = 0)
      : key0_(static_cast<std::uint32_t>(seed)),
        key1_(static_cast<std::uint32_t>(seed >> 32)),
        ctr2_(lane),
        ctr3_(0),
        draw_lo_(static_cast<std::uint32_t>(draw_index)),
        draw_hi_(static_cast<std::uint32_t>(draw_index >> 32)) {}

  std::uint32_t next_u32() {
    if (have_ == 0) {
      fill_block();
      have_ = 4;
    }
    return out_[4 - have_--];
  }

  // uniform on [0, 1) with 53 random bits
  double next_double() {
    const std::uint64_t hi = next_u32();
    const std::uint64_t lo = next_u32();
    return static_cast<double>(((hi << 32) | lo) >> 11) * 0x1.0p-53;
  }

  // uniform on (0, 1), safe for logs and inverse CDFs
  double next_open01() {
    double u = next_double();
    return u > 0.0 ? u : 0x1.0p-53;
  }

  double next_normal() {
    if (have_normal_) {
      have_normal_ = false;
      return cached_normal_;
    }
    const double u1 = next_open01();
    const double u2 = next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925287 * u2;
    cached_normal_ = r * std::sin(a);
    have_normal_ = true;
    return r * std::cos(a);
  }

 private:
  static std::uint32_t mul_hi(std::uint32_t a, std::uint32_t b) {
    return static_cast<std::uint32_t>((static_cast<std::uint64_t>(a) * b) >> 32);
  }
  static std::uint32_t mul_lo(std::uint32_t a, std::uint32_t b) {
    return a * b;
  }

  void fill_block() {
    std::uint32_t c0 = draw_lo_, c1 = draw_hi_, c2 = ctr2_, c3 = ctr3_;
    std::uint32_t k0 = key0_, k1 = key1_;
    for (int round = 0; round < 10; ++round) {
      const std::uint32_t hi0 = mul_hi(0xD2511F53u, c0);
      const std::uint32_t lo0 = mul_lo(0xD2511F53u, c0);
      const std::uint32_t hi1 = mul_hi(0xCD9E8D57u, c2);
      const std::uint32_t lo1 = mul_lo(0xCD9E8D57u, c2);
      const std::uint32_t n0 = hi1 ^ c1 ^ k0;
      const std::uint32_t n1 = lo1;
      const std::uint32_t n2 = hi0 ^ c3 ^ k1;
      const std::uint32_t n3 = lo0;
      c0 = n0; c1 = n1; c2 = n2; c3 = n3;
      k0 += 0x9E3779B9u;
      k1 += 0xBB67AE85u;
    }
    out_[0] = c0; out_[1] = c1; out_[2] = c2; out_[3] = c3;
    ++ctr3_;  // per-stream block counter; ctr2_ stays fixed so lanes never collide
  }

  std::uint32_t key0_, key1_;
  std::uint32_t ctr2_, ctr3_;
  std::uint32_t draw_lo_, draw_hi_;
  std::uint32_t out_[4] = {0, 0, 0, 0};
  int have_ = 0;
  bool have_normal_ = false;
  double cached_normal_ = 0.0;
};

}  // namespace klkit
