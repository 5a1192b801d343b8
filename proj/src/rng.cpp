#include "pestbench/rng.hpp"

#include <cassert>

#include "pestbench/hash.hpp"

namespace pestbench {

int Rng::uniform_int(int lo, int hi) {
  assert(lo <= hi);
  const std::uint64_t range = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo) + 1;
  if (range == 0) {
    return static_cast<int>(engine_());  // full 64-bit range requested
  }
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % range;
  std::uint64_t draw;
  do {
    draw = engine_();
  } while (draw >= limit);
  return static_cast<int>(static_cast<std::uint64_t>(lo) + draw % range);
}

double Rng::uniform_real(double lo, double hi) {
  const double unit = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  return lo + unit * (hi - lo);
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view label) {
  std::uint64_t mixed = master_seed ^ fnv1a64(label);
  // splitmix64 finalizer
  mixed += 0x9e3779b97f4a7c15ULL;
  mixed = (mixed ^ (mixed >> 30)) * 0xbf58476d1ce4e5b9ULL;
  mixed = (mixed ^ (mixed >> 27)) * 0x94d049bb133111ebULL;
  return mixed ^ (mixed >> 31);
}

}  // namespace pestbench
