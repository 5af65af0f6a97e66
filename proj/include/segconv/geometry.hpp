#pragma once

#include <string>

#include "segconv/errors.hpp"

namespace segconv {

// Shape bookkeeping for one 2x-upsampling transpose convolution.
//
// The reference pipeline upsamples an n_in x n_in input by zero insertion to
// (2*n_in - 1) square, pads by p_orig, and runs a valid convolution with a
// kh x kw kernel. The fused path instead pads the original input by
// p_fused = p_orig / 2 and reads it directly. When a kernel dim is odd the
// parity partition covers one output row/col beyond the reference output;
// trim_extra_row / trim_extra_col mark that the fused loops must stop short.

struct TConvGeometry {
  int n_in = 0;
  int kh = 0, kw = 0;
  int p_orig = 0;
  int p_fused = 0;
  int up_h = 0, up_w = 0;  // upsampled-and-padded working size of the reference path
  int out_h = 0, out_w = 0;
  bool trim_extra_row = false;
  bool trim_extra_col = false;
};

inline TConvGeometry tconv_geometry(int n_in, int kh, int kw, int p_orig) {
  if (n_in < 1) throw ShapeError("input size must be >= 1, got " + std::to_string(n_in));
  if (kh < 1 || kw < 1)
    throw ShapeError("kernel dims must be >= 1, got " + std::to_string(kh) + "x" + std::to_string(kw));
  if (p_orig < 0) throw ShapeError("padding must be >= 0, got " + std::to_string(p_orig));

  TConvGeometry g;
  g.n_in = n_in;
  g.kh = kh;
  g.kw = kw;
  g.p_orig = p_orig;
  g.p_fused = p_orig / 2;
  g.up_h = 2 * n_in - 1 + 2 * p_orig;
  g.up_w = g.up_h;
  g.out_h = g.up_h - kh + 1;
  g.out_w = g.up_w - kw + 1;
  if (g.out_h < 1 || g.out_w < 1)
    throw ShapeError("kernel " + std::to_string(kh) + "x" + std::to_string(kw) +
                     " does not fit the padded upsampled input (" + std::to_string(g.up_h) + "x" +
                     std::to_string(g.up_w) + ")");
  // out_h = 2*n_in + 2*p_orig - kh, so its parity is the parity of kh.
  g.trim_extra_row = (g.out_h % 2) != 0;
  g.trim_extra_col = (g.out_w % 2) != 0;
  return g;
}

}  // namespace segconv
