#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace pestbench {

// Seeded random source with portable draws. The mt19937_64 engine has a
// standard-defined output sequence; the int and real mappings below are
// implemented here because the standard distributions are not guaranteed
// to be identical across library implementations, and generated fixtures
// must stay stable.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform integer in [lo, hi], unbiased via rejection sampling.
  int uniform_int(int lo, int hi);

  // Uniform double in [lo, hi) with 53 bits of entropy per draw.
  double uniform_real(double lo, double hi);

 private:
  std::mt19937_64 engine_;
};

// Deterministic sub-stream seed for a labelled task, e.g. the few-shot
// exemplar draw for one scenario. Mixes the master seed with a hash of
// the label so sub-streams are independent of processing order.
std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view label);

}  // namespace pestbench
