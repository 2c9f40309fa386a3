#pragma once

#include <cstdint>

namespace omg {

// Counter-based generator: (seed, stream) fix the key, each draw hashes the
// next counter value (splitmix64 finalizer).  Draw n is a pure function of
// (seed, stream, n), so replications can be assigned to threads in any order
// and still reproduce bit-identically.
class CounterRng {
 public:
  explicit CounterRng(uint64_t seed, uint64_t stream = 0);

  uint64_t next_u64();
  // Uniform in [0, 1) with 53 random bits.
  double next_unit();

 private:
  uint64_t key_ = 0;
  uint64_t counter_ = 0;
};

}  // namespace omg
