#pragma once

#include <algorithm>
#include <cstdint>

#include "segconv/errors.hpp"
#include "segconv/geometry.hpp"
#include "segconv/op_counts.hpp"
#include "segconv/tensor.hpp"

namespace segconv {

// ---------------------------------------------------------------------------
// accumulate_window: the one place dot products happen.
//
// Stores into out_pixel[f], for every output feature f, the sum over
// (u, v, ch) -- u outermost, channel innermost -- of
//     src(row0 + u, col0 + v, ch) * k(u, v, ch, f).
//
// Both the reference transpose convolution and the fused one funnel through
// this helper, so for a fixed f the surviving products are accumulated in
// the same order by the same code on both paths. That is what makes the
// fused result reproduce the reference bit for bit instead of merely to
// within rounding.
// ---------------------------------------------------------------------------

// Feature slice [f_lo, f_hi) of the window accumulation. The tile keeps a
// feature's partial sum in one register chain, so per feature the products
// land in (u, v, ch) order no matter how the features are grouped -- that is
// what lets the parallel path split on f and stay bitwise equal.
template <typename T, typename TallyT>
void accumulate_window_slice(const Tensor<T>& src, int row0, int col0, const Kernel<T>& k,
                             T* out_pixel, int f_lo, int f_hi, TallyT& tally) {
  const int kh = k.kh(), kw = k.kw(), cin = k.cin();
  const std::uint64_t len =
      static_cast<std::uint64_t>(kh) * static_cast<std::uint64_t>(kw) * static_cast<std::uint64_t>(cin);
  tally.dots(static_cast<std::uint64_t>(f_hi - f_lo), len);
  if (len == 0) return;  // spatially empty sub-kernel: contributes nothing

  constexpr int kTile = 16;
  T acc[kTile];
  for (int f0 = f_lo; f0 < f_hi; f0 += kTile) {
    const int fn = std::min(kTile, f_hi - f0);
    for (int fi = 0; fi < fn; ++fi) acc[fi] = 0;
    for (int u = 0; u < kh; ++u) {
      for (int v = 0; v < kw; ++v) {
        const T* s = src.pixel(row0 + u, col0 + v);
        for (int ch = 0; ch < cin; ++ch) {
          const T sv = s[ch];
          const T* w = k.tap(u, v, ch) + f0;
          for (int fi = 0; fi < fn; ++fi) acc[fi] += sv * w[fi];
        }
      }
    }
    for (int fi = 0; fi < fn; ++fi) out_pixel[f0 + fi] = acc[fi];
  }
}

template <typename T, typename TallyT>
void accumulate_window(const Tensor<T>& src, int row0, int col0, const Kernel<T>& k,
                       T* out_pixel, TallyT& tally) {
  const int cout = k.cout();
  if (cout == 1 && !k.spatially_empty()) {
    // One dot product; (v, ch) is contiguous in both the window row and the
    // kernel row when cout == 1.
    const int kh = k.kh(), kw = k.kw(), cin = k.cin();
    tally.dots(1, static_cast<std::uint64_t>(kh) * kw * cin);
    const int row_len = kw * cin;
    T acc = 0;
    for (int u = 0; u < kh; ++u) {
      const T* s = src.pixel(row0 + u, col0);
      const T* w = k.data() + static_cast<std::size_t>(u) * row_len;
      for (int t = 0; t < row_len; ++t) acc += s[t] * w[t];
    }
    out_pixel[0] = acc;
    return;
  }
  accumulate_window_slice(src, row0, col0, k, out_pixel, 0, cout, tally);
}

// ---------------------------------------------------------------------------
// Plain valid convolution: no padding, no striding, output
// (h - kh + 1) x (w - kw + 1) x cout.
// ---------------------------------------------------------------------------

template <typename T, typename TallyT>
Tensor<T> conv2d_valid(const Tensor<T>& src, const Kernel<T>& k, TallyT& tally) {
  if (k.spatially_empty()) throw ShapeError("conv2d_valid needs a non-empty kernel");
  if (src.channels() != k.cin())
    throw ContractError("channel mismatch: input has " + std::to_string(src.channels()) +
                        ", kernel expects " + std::to_string(k.cin()));
  const int oh = src.height() - k.kh() + 1;
  const int ow = src.width() - k.kw() + 1;
  if (oh < 1 || ow < 1)
    throw ShapeError("kernel " + std::to_string(k.kh()) + "x" + std::to_string(k.kw()) +
                     " does not fit input " + std::to_string(src.height()) + "x" +
                     std::to_string(src.width()));
  Tensor<T> out(oh, ow, k.cout());
  for (int y = 0; y < oh; ++y)
    for (int x = 0; x < ow; ++x) accumulate_window(src, y, x, k, out.pixel(y, x), tally);
  return out;
}

template <typename T>
Tensor<T> conv2d_valid(const Tensor<T>& src, const Kernel<T>& k) {
  NoTally t;
  return conv2d_valid(src, k, t);
}

// ---------------------------------------------------------------------------
// Reference 2x transpose convolution: zero-insertion upsample, pad, valid
// convolve. Deliberately literal -- this is the oracle the fused path is
// checked against, and it materializes the big intermediate on purpose.
// ---------------------------------------------------------------------------

template <typename T, typename TallyT>
Tensor<T> transpose_conv_naive(const Tensor<T>& input, const Kernel<T>& k, int p, TallyT& tally) {
  if (input.channels() != k.cin())
    throw ContractError("channel mismatch: input has " + std::to_string(input.channels()) +
                        ", kernel expects " + std::to_string(k.cin()));
  tconv_geometry(input.height(), k.kh(), k.kw(), p);  // validates shape up front
  if (input.height() != input.width())
    throw ContractError("transpose conv expects a square input, got " +
                        std::to_string(input.height()) + "x" + std::to_string(input.width()));
  const Tensor<T> up = pad(upsample2x(input), p);
  return conv2d_valid(up, k, tally);
}

template <typename T>
Tensor<T> transpose_conv_naive(const Tensor<T>& input, const Kernel<T>& k, int p) {
  NoTally t;
  return transpose_conv_naive(input, k, p, t);
}

}  // namespace segconv
