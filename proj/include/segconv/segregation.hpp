#pragma once

#include <array>
#include <utility>

#include "segconv/errors.hpp"
#include "segconv/tensor.hpp"

namespace segconv {

// ---------------------------------------------------------------------------
// Parity bookkeeping.
//
// Think of the zero-inserted upsampled input, padded by p: a kernel tap u
// lands on a real (non-inserted) value at output row y exactly when
// (y + u - p) is even. So for an output row of parity r = y mod 2 the active
// taps are u = u0, u0+2, u0+4, ... with u0 = (p + r) mod 2, and the same
// holds independently for columns. Everything below is that one observation,
// applied per axis.
// ---------------------------------------------------------------------------

// First kernel index active for output parity r under padding p.
inline int first_active_tap(int p, int r) { return (p + r) & 1; }

// How many of the n taps along one axis are active for parity r.
inline int active_tap_count(int n, int p, int r) {
  const int first = first_active_tap(p, r);
  return first >= n ? 0 : (n - first + 1) / 2;
}

// Offset (in the p/2-padded input) of the first value an output of parity r
// reads, relative to its block index. Works out to r when p is even and 0
// when p is odd -- the odd-p case is what flips the sub-kernel ordering.
inline int class_input_offset(int p, int r) {
  return (r + first_active_tap(p, r) - p) / 2 + p / 2;
}

// ---------------------------------------------------------------------------
// SubKernelSet: the four parity sub-kernels of one original kernel.
// subs[r*2 + c] serves the output class (row mod 2, col mod 2) = (r, c).
// ---------------------------------------------------------------------------

template <typename T>
struct SubKernelSet {
  std::array<Kernel<T>, 4> subs;
  std::array<std::pair<int, int>, 4> class_input_offsets;
  int source_kh = 0;
  int source_kw = 0;
  int p_orig_parity = 0;

  const Kernel<T>& sub(int r, int c) const { return subs[r * 2 + c]; }
  std::pair<int, int> offset(int r, int c) const { return class_input_offsets[r * 2 + c]; }
  int cin() const { return subs[0].cin(); }
  int cout() const { return subs[0].cout(); }
};

// Splits `k` into the four parity sub-kernels for padding p_orig. Taps keep
// their relative (u-major, v) order; data is copied into dense storage so
// the fused inner loops read contiguously. Empty sub-kernels are legal
// (a 1x1 kernel populates a single class).
template <typename T>
SubKernelSet<T> segregate(const Kernel<T>& k, int p_orig) {
  if (k.spatially_empty()) throw ContractError("cannot segregate a spatially empty kernel");
  if (p_orig < 0) throw ContractError("padding must be non-negative");

  SubKernelSet<T> set;
  set.source_kh = k.kh();
  set.source_kw = k.kw();
  set.p_orig_parity = p_orig & 1;

  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) {
      const int u0 = first_active_tap(p_orig, r);
      const int v0 = first_active_tap(p_orig, c);
      const int skh = active_tap_count(k.kh(), p_orig, r);
      const int skw = active_tap_count(k.kw(), p_orig, c);
      Kernel<T> sub(skh, skw, k.cin(), k.cout());
      for (int u = 0; u < skh; ++u)
        for (int v = 0; v < skw; ++v)
          for (int ch = 0; ch < k.cin(); ++ch)
            for (int f = 0; f < k.cout(); ++f)
              sub(u, v, ch, f) = k(u0 + 2 * u, v0 + 2 * v, ch, f);
      set.subs[r * 2 + c] = std::move(sub);
      set.class_input_offsets[r * 2 + c] = {class_input_offset(p_orig, r),
                                            class_input_offset(p_orig, c)};
    }
  }
  return set;
}

// The four sub-kernel spatial sizes for an odd n x n kernel, largest class
// first: (ceil, ceil), (ceil, floor), (floor, ceil), (floor, floor) halves.
// Even n has no such fixed recipe; use segregate directly.
inline std::array<std::pair<int, int>, 4> sub_kernel_dims(int n) {
  if (n < 1) throw ContractError("kernel size must be >= 1");
  if (n % 2 == 0) throw ContractError("sub_kernel_dims is defined for odd sizes only");
  const int hi = (n + 1) / 2;
  const int lo = n / 2;
  return {{{hi, hi}, {hi, lo}, {lo, hi}, {lo, lo}}};
}

}  // namespace segconv
