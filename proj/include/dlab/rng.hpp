#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace dlab {

// Philox4x32-10 counter-based generator. A stream is identified by
// (seed, stream id); replicas get disjoint streams regardless of the
// order in which they are run, so parallel experiments reproduce
// exactly from (seed, replica index).
class Rng {
 public:
  Rng(uint64_t seed, uint64_t stream) {
    key_[0] = static_cast<uint32_t>(seed);
    key_[1] = static_cast<uint32_t>(seed >> 32);
    ctr_[0] = 0;
    ctr_[1] = 0;
    ctr_[2] = static_cast<uint32_t>(stream);
    ctr_[3] = static_cast<uint32_t>(stream >> 32);
  }

  uint64_t next_u64() {
    if (have_ == 0) refill();
    return buf_[--have_];
  }

  // uniform on [0,1), 53-bit mantissa
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double next_exp() { return -std::log1p(-next_double()); }

  // unbiased uniform integer in [0, n)
  uint64_t next_below(uint64_t n) {
    __uint128_t m = static_cast<__uint128_t>(next_u64()) * n;
    auto lo = static_cast<uint64_t>(m);
    if (lo < n) {
      uint64_t t = -n % n;
      while (lo < t) {
        m = static_cast<__uint128_t>(next_u64()) * n;
        lo = static_cast<uint64_t>(m);
      }
    }
    return static_cast<uint64_t>(m >> 64);
  }

  bool next_bernoulli(double p) { return next_double() < p; }

  // Exact Poisson sampling. Multiplication method for small means,
  // additivity split for larger ones (keeps the product above
  // double underflow).
  int64_t next_poisson(double mean) {
    if (!(mean >= 0.0)) throw std::invalid_argument("poisson mean must be >= 0");
    int64_t total = 0;
    while (mean > 30.0) {
      total += poisson_small(30.0);
      mean -= 30.0;
    }
    return total + poisson_small(mean);
  }

  // Derive an unrelated substream (used to give one replica several
  // independent random sources).
  Rng fork(uint64_t tag) const {
    Rng g = *this;
    g.ctr_[0] = static_cast<uint32_t>(tag);
    g.ctr_[1] = static_cast<uint32_t>(tag >> 32);
    g.ctr_[2] ^= 0x5eedf00du;
    g.ctr_[3] ^= 0x9e3779b9u;
    g.have_ = 0;
    g.refill();
    return Rng(g.buf_[0], g.buf_[1]);
  }

  using result_type = uint64_t;
  static constexpr uint64_t min() { return 0; }
  static constexpr uint64_t max() { return ~0ull; }
  uint64_t operator()() { return next_u64(); }

 private:
  int64_t poisson_small(double mean) {
    const double limit = std::exp(-mean);
    int64_t k = 0;
    double prod = 1.0;
    while (true) {
      prod *= next_double();
      if (prod <= limit) return k;
      ++k;
    }
  }

  static void mulhilo(uint32_t a, uint32_t b, uint32_t& hi, uint32_t& lo) {
    uint64_t p = static_cast<uint64_t>(a) * b;
    hi = static_cast<uint32_t>(p >> 32);
    lo = static_cast<uint32_t>(p);
  }

  void refill() {
    uint32_t c0 = ctr_[0], c1 = ctr_[1], c2 = ctr_[2], c3 = ctr_[3];
    uint32_t k0 = key_[0], k1 = key_[1];
    for (int round = 0; round < 10; ++round) {
      uint32_t hi0, lo0, hi1, lo1;
      mulhilo(0xD2511F53u, c0, hi0, lo0);
      mulhilo(0xCD9E8D57u, c2, hi1, lo1);
      uint32_t n0 = hi1 ^ c1 ^ k0;
      uint32_t n1 = lo1;
      uint32_t n2 = hi0 ^ c3 ^ k1;
      uint32_t n3 = lo0;
      c0 = n0; c1 = n1; c2 = n2; c3 = n3;
      k0 += 0x9E3779B9u;
      k1 += 0xBB67AE85u;
    }
    buf_[1] = (static_cast<uint64_t>(c1) << 32) | c0;
    buf_[0] = (static_cast<uint64_t>(c3) << 32) | c2;
    have_ = 2;
    if (++ctr_[0] == 0) ++ctr_[1];
  }

  uint32_t key_[2];
  uint32_t ctr_[4];
  uint64_t buf_[2] = {0, 0};
  int have_ = 0;
};

}  // namespace dlab
