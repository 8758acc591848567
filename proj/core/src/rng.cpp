#include "gff/rng.hpp"

#include <cmath>

#include "gff/constants.hpp"

namespace gff {

namespace {
constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void philox_round(std::uint32_t c[4], std::uint32_t k0, std::uint32_t k1) {
  const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * c[0];
  const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * c[2];
  const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
  const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
  const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
  const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
  c[0] = hi1 ^ c[1] ^ k0;
  c[1] = lo1;
  c[2] = hi0 ^ c[3] ^ k1;
  c[3] = lo0;
}
}  // namespace

void Philox4x32::block(std::uint64_t key, std::uint64_t counter, std::uint32_t out[4]) {
  out[0] = static_cast<std::uint32_t>(counter);
  out[1] = static_cast<std::uint32_t>(counter >> 32);
  out[2] = 0;
  out[3] = 0;
  std::uint32_t k0 = static_cast<std::uint32_t>(key);
  std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);
  for (int r = 0; r < 10; ++r) {
    philox_round(out, k0, k1);
    k0 += kPhiloxW0;
    k1 += kPhiloxW1;
  }
}

std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t stream_key(std::uint64_t master_seed, std::string_view tag, std::uint64_t index) {
  const std::uint64_t base = mix64(master_seed ^ fnv1a64(tag));
  return mix64(base ^ (0x9E3779B97F4A7C15ull * (index + 1)));
}

void RngStream::refill() {
  Philox4x32::block(key_, counter_++, buf_);
  pos_ = 0;
}

std::uint64_t RngStream::next_u64() {
  if (pos_ > 2) refill();
  const std::uint64_t lo = buf_[pos_];
  const std::uint64_t hi = buf_[pos_ + 1];
  pos_ += 2;
  return lo | (hi << 32);
}

double RngStream::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform_open() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  const double u1 = uniform_open();
  const double u2 = uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double t = 2.0 * k_pi * u2;
  cached_normal_ = r * std::sin(t);
  has_cached_normal_ = true;
  return r * std::cos(t);
}

double RngStream::exponential(double rate) {
  return -std::log(uniform_open()) / rate;
}

long long RngStream::poisson(double mean) {
  if (mean <= 0.0) return 0;
  if (mean < 30.0) {
    // Knuth: multiply uniforms until the product drops below exp(-mean).
    const double limit = std::exp(-mean);
    long long k = -1;
    double prod = 1.0;
    do {
      prod *= uniform01();
      ++k;
    } while (prod > limit);
    return k;
  }
  // Hormann's PTRS transformed rejection, valid for mean >= 10.
  const double b = 0.931 + 2.53 * std::sqrt(mean);
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  const double lmean = std::log(mean);
  for (;;) {
    double u = uniform01() - 0.5;
    const double v = uniform_open();
    const double us = 0.5 - std::fabs(u);
    const double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= v_r) return static_cast<long long>(kf);
    if (kf < 0.0 || (us < 0.013 && v > us)) continue;
    const double k = kf;
    if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
        k * lmean - mean - std::lgamma(k + 1.0)) {
      return static_cast<long long>(kf);
    }
  }
}

double RngStream::truncated_normal_nonneg(double mean) {
  const double a = -mean;  // lower bound for the standardized variable
  if (a <= 0.0) {
    for (;;) {
      const double z = normal();
      if (z >= a) return mean + z;
    }
  }
  // Robert (1995): shifted-exponential proposal on [a, inf).
  const double alpha = 0.5 * (a + std::sqrt(a * a + 4.0));
  for (;;) {
    const double z = a + exponential(alpha);
    const double d = z - alpha;
    if (uniform01() <= std::exp(-0.5 * d * d)) return mean + z;
  }
}

std::uint64_t RngStream::uniform_index(std::uint64_t n) {
  return static_cast<std::uint64_t>(
      (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
}

}  // namespace gff
