#include <doctest.h>

#include <set>

#include "pestbench/rng.hpp"

using namespace pestbench;

TEST_CASE("mt19937_64 reference value guards engine identity") {
  // The standard fixes the 10000th output of a default-seeded mt19937_64.
  std::mt19937_64 engine(5489u);
  std::uint64_t v = 0;
  for (int i = 0; i < 10000; ++i) v = engine();
  CHECK(v == 9981545732273789042ull);
}

TEST_CASE("uniform_int stays in range and hits every value") {
  Rng rng(42);
  std::set<int> seen;
  for (int i = 0; i < 2000; ++i) {
    int v = rng.uniform_int(1, 10);
    CHECK(v >= 1);
    CHECK(v <= 10);
    seen.insert(v);
  }
  CHECK(seen.size() == 10);
}

TEST_CASE("uniform_int handles a single-value range") {
  Rng rng(7);
  for (int i = 0; i < 5; ++i) CHECK(rng.uniform_int(3, 3) == 3);
}

TEST_CASE("uniform_real stays in the half-open interval") {
  Rng rng(42);
  for (int i = 0; i < 2000; ++i) {
    double v = rng.uniform_real(-5.0, 35.0);
    CHECK(v >= -5.0);
    CHECK(v < 35.0);
  }
}

TEST_CASE("identical seeds give identical streams") {
  Rng a(123);
  Rng b(123);
  for (int i = 0; i < 100; ++i) {
    CHECK(a.uniform_int(0, 1000) == b.uniform_int(0, 1000));
    CHECK(a.uniform_real(0.0, 1.0) == b.uniform_real(0.0, 1.0));
  }
}

TEST_CASE("derived seeds differ by label and are stable") {
  std::uint64_t a = derive_seed(42, "few-shot/grain-aphid-pos-0");
  std::uint64_t b = derive_seed(42, "few-shot/grain-aphid-neg-0");
  std::uint64_t c = derive_seed(43, "few-shot/grain-aphid-pos-0");
  CHECK(a != b);
  CHECK(a != c);
  CHECK(a == derive_seed(42, "few-shot/grain-aphid-pos-0"));
}

TEST_CASE("frozen draw sequence for seed 42") {
  // Pinned once from this implementation; a change here means previously
  // generated fixtures no longer reproduce.
  Rng rng(42);
  int ints[4];
  for (int& v : ints) v = rng.uniform_int(1, 10);
  double real = rng.uniform_real(0.0, 1.0);
  CHECK(ints[0] == 7);
  CHECK(ints[1] == 5);
  CHECK(ints[2] == 1);
  CHECK(ints[3] == 3);
  CHECK(real == doctest::Approx(0.90326896642837828).epsilon(1e-12));
}
