#pragma once

#include <cstdint>
#include <string_view>

namespace gff {

// Counter-based generator (Philox-4x32-10, Salmon et al. 2011) wrapped as a
// stream object.  A stream is identified by a 64-bit key; the counter is the
// block index.  Streams are derived deterministically from
//   (master seed, module tag, replicate index)
// via
//   key = mix64( mix64(master ^ fnv1a64(tag)) ^ (0x9E3779B97F4A7C15 * (index + 1)) )
// so replicate i of module "overlap" always sees the same bits for a given
// master seed, independent of scheduling or thread count.
struct Philox4x32 {
  static void block(std::uint64_t key, std::uint64_t counter, std::uint32_t out[4]);
};

std::uint64_t mix64(std::uint64_t x);
std::uint64_t fnv1a64(std::string_view s);
std::uint64_t stream_key(std::uint64_t master_seed, std::string_view tag, std::uint64_t index);

class RngStream {
 public:
  RngStream() : RngStream(0) {}
  explicit RngStream(std::uint64_t key) : key_(key) {}

  static RngStream make(std::uint64_t master_seed, std::string_view tag, std::uint64_t index) {
    return RngStream(stream_key(master_seed, tag, index));
  }

  std::uint64_t key() const { return key_; }

  std::uint64_t next_u64();
  double uniform01();      // [0, 1)
  double uniform_open();   // (0, 1), safe under log()
  double normal();         // N(0,1), Box-Muller with cached second value
  double exponential(double rate);
  long long poisson(double mean);
  // N(mean, 1) conditioned on being >= 0.  Gaussian rejection when the
  // acceptance region is wide, Robert's exponential proposal otherwise.
  double truncated_normal_nonneg(double mean);
  // index uniform in {0, ..., n-1} via the 128-bit multiply reduction
  // (bias O(n / 2^64), irrelevant at Monte Carlo scale).
  std::uint64_t uniform_index(std::uint64_t n);

 private:
  void refill();
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  std::uint32_t buf_[4] = {0, 0, 0, 0};
  int pos_ = 4;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

}  // namespace gff
