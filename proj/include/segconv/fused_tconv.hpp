#pragma once

#include <thread>
#include <vector>

#include "segconv/errors.hpp"
#include "segconv/geometry.hpp"
#include "segconv/op_counts.hpp"
#include "segconv/reference_ops.hpp"
#include "segconv/segregation.hpp"
#include "segconv/tensor.hpp"

namespace segconv {

namespace detail {

template <typename T>
void check_fused_args(const Tensor<T>& input, const SubKernelSet<T>& sks,
                      const TConvGeometry& geom) {
  if (input.height() != geom.n_in || input.width() != geom.n_in)
    throw ContractError("input is " + std::to_string(input.height()) + "x" +
                        std::to_string(input.width()) + " but geometry was built for " +
                        std::to_string(geom.n_in) + "x" + std::to_string(geom.n_in));
  if (input.channels() != sks.cin())
    throw ContractError("channel mismatch: input has " + std::to_string(input.channels()) +
                        ", sub-kernels expect " + std::to_string(sks.cin()));
  if (sks.source_kh != geom.kh || sks.source_kw != geom.kw)
    throw ContractError("sub-kernel set was built from a " + std::to_string(sks.source_kh) + "x" +
                        std::to_string(sks.source_kw) + " kernel, geometry expects " +
                        std::to_string(geom.kh) + "x" + std::to_string(geom.kw));
  if (sks.p_orig_parity != (geom.p_orig & 1))
    throw ContractError("sub-kernel set was segregated for padding parity " +
                        std::to_string(sks.p_orig_parity) + ", geometry has p_orig " +
                        std::to_string(geom.p_orig));
}

// Core loops over an already-padded input: four small valid convolutions,
// one per output parity class, each writing its own interleaved quarter of
// the output. Classes whose dims are odd would reach one block past the true
// output; the loop bounds clamp those positions away instead of computing
// and discarding them.
template <typename T, typename TallyT>
Tensor<T> fused_from_padded(const Tensor<T>& in_padded, const SubKernelSet<T>& sks,
                            const TConvGeometry& geom, TallyT& tally) {
  Tensor<T> out(geom.out_h, geom.out_w, sks.cout());
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) {
      const Kernel<T>& sub = sks.sub(r, c);
      if (sub.spatially_empty()) continue;  // class outputs stay zero
      const auto [off_r, off_c] = sks.offset(r, c);
      const int rows = (geom.out_h - r + 1) / 2;  // block rows with 2i + r < out_h
      const int cols = (geom.out_w - c + 1) / 2;
      for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j)
          accumulate_window(in_padded, i + off_r, j + off_c, sub, out.pixel(2 * i + r, 2 * j + c),
                            tally);
    }
  }
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Fused transpose convolution. Never touches an upsampled buffer: pads the
// original input by p_fused and reads it directly through the sub-kernels.
// ---------------------------------------------------------------------------

template <typename T, typename TallyT>
Tensor<T> transpose_conv_fused(const Tensor<T>& input, const SubKernelSet<T>& sks,
                               const TConvGeometry& geom, TallyT& tally) {
  detail::check_fused_args(input, sks, geom);
  const Tensor<T> in_padded = pad(input, geom.p_fused);
  return detail::fused_from_padded(in_padded, sks, geom, tally);
}

template <typename T>
Tensor<T> transpose_conv_fused(const Tensor<T>& input, const SubKernelSet<T>& sks,
                               const TConvGeometry& geom) {
  NoTally t;
  return transpose_conv_fused(input, sks, geom, t);
}

// Convenience wrapper: segregates and computes in one call.
template <typename T>
Tensor<T> transpose_conv_fused(const Tensor<T>& input, const Kernel<T>& k, int p) {
  const TConvGeometry geom = tconv_geometry(input.height(), k.kh(), k.kw(), p);
  if (input.height() != input.width())
    throw ContractError("transpose conv expects a square input, got " +
                        std::to_string(input.height()) + "x" + std::to_string(input.width()));
  return transpose_conv_fused(input, segregate(k, p), geom);
}

// ---------------------------------------------------------------------------
// Parallel variant: output channels are split into contiguous slices, one
// worker per slice. Every (y, x, f) is accumulated by exactly one worker in
// the same per-feature order as the sequential op, so the result is bitwise
// identical for any worker count; workers beyond cout idle.
// ---------------------------------------------------------------------------

template <typename T>
Tensor<T> transpose_conv_fused_parallel(const Tensor<T>& input, const SubKernelSet<T>& sks,
                                        const TConvGeometry& geom, int workers) {
  if (workers < 1) throw ContractError("worker count must be >= 1");
  detail::check_fused_args(input, sks, geom);
  const Tensor<T> in_padded = pad(input, geom.p_fused);

  const int cout = sks.cout();
  const int active = std::min(workers, cout);
  if (active == 1) {
    // Degenerate parallelism: run the sequential core (and its cout == 1
    // fast path) rather than a one-slice worker.
    NoTally tally;
    return detail::fused_from_padded(in_padded, sks, geom, tally);
  }

  Tensor<T> out(geom.out_h, geom.out_w, cout);
  auto run_slice = [&](int f_lo, int f_hi) {
    NoTally tally;
    for (int r = 0; r < 2; ++r) {
      for (int c = 0; c < 2; ++c) {
        const Kernel<T>& sub = sks.sub(r, c);
        if (sub.spatially_empty()) continue;
        const auto [off_r, off_c] = sks.offset(r, c);
        const int rows = (geom.out_h - r + 1) / 2;
        const int cols = (geom.out_w - c + 1) / 2;
        for (int i = 0; i < rows; ++i)
          for (int j = 0; j < cols; ++j)
            accumulate_window_slice(in_padded, i + off_r, j + off_c, sub,
                                    out.pixel(2 * i + r, 2 * j + c), f_lo, f_hi, tally);
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(active);
  const int base = cout / active;
  const int rem = cout % active;
  int f = 0;
  for (int w = 0; w < active; ++w) {
    const int take = base + (w < rem ? 1 : 0);
    pool.emplace_back(run_slice, f, f + take);
    f += take;
  }
  for (auto& th : pool) th.join();
  return out;
}

}  // namespace segconv
