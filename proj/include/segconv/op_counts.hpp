#pragma once

#include <cstdint>

namespace segconv {

// Multiply / add tallies, either analytical or instrumented.
struct OpCounts {
  std::uint64_t mults = 0;
  std::uint64_t adds = 0;

  OpCounts& operator+=(const OpCounts& o) {
    mults += o.mults;
    adds += o.adds;
    return *this;
  }
  friend OpCounts operator+(OpCounts a, const OpCounts& b) { return a += b; }
  friend bool operator==(const OpCounts&, const OpCounts&) = default;
};

// Instrumentation hooks for the convolution inner loops. The hot path is
// templated on one of these so the counting variant costs nothing when off.

struct NoTally {
  static constexpr bool counting = false;
  void dots(std::uint64_t, std::uint64_t) {}
};

struct Tally {
  static constexpr bool counting = true;
  OpCounts counts;

  // `count` dot products of length `len` each: len mults and len-1 adds
  // apiece (a length-0 dot product is nothing at all).
  void dots(std::uint64_t count, std::uint64_t len) {
    counts.mults += count * len;
    if (len > 0) counts.adds += count * (len - 1);
  }
};

}  // namespace segconv
