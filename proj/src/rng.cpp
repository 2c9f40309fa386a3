#include "omg/rng.hpp"

namespace omg {

namespace {

constexpr uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

uint64_t mix64(uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

CounterRng::CounterRng(uint64_t seed, uint64_t stream) {
  key_ = mix64(seed + kGamma) ^ mix64(stream * kGamma + 0x632be59bd9b4e019ULL);
}

uint64_t CounterRng::next_u64() { return mix64(key_ + ++counter_ * kGamma); }

double CounterRng::next_unit() { return (next_u64() >> 11) * 0x1.0p-53; }

}  // namespace omg
