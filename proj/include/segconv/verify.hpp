#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>

#include "segconv/fused_tconv.hpp"
#include "segconv/reference_ops.hpp"
#include "segconv/segregation.hpp"
#include "segconv/tensor.hpp"

namespace segconv {

// Oracle-equivalence fuzzing: random transpose convolutions on integer-valued
// float data, fused vs reference, exact comparison. Integer values at these
// magnitudes make IEEE arithmetic exact, so any mismatch is a logic bug.

struct VerifyOptions {
  int cases = 200;
  int n_min = 1, n_max = 16;  // input spatial size
  int k_min = 1, k_max = 7;   // square kernel size
  int p_min = 0, p_max = 4;
  int c_min = 1, c_max = 4;  // channels, both ends
  std::uint64_t seed = 20240911;
  // Test hook: corrupt one sub-kernel element in this case (0-based) so the
  // failure path is itself exercisable. -1 disables.
  int inject_fault_case = -1;
};

struct VerifyFailure {
  int case_index = 0;
  int n = 0, k = 0, p = 0, cin = 0, cout = 0;
  std::uint64_t seed = 0;
  std::string detail;
};

struct VerifyResult {
  int cases_run = 0;
  int failures = 0;
  std::optional<VerifyFailure> first_failure;
  bool ok() const { return failures == 0; }
};

namespace detail {

template <typename T>
std::string first_mismatch(const Tensor<T>& got, const Tensor<T>& want) {
  if (!got.same_shape(want))
    return "shape mismatch: got " + std::to_string(got.height()) + "x" +
           std::to_string(got.width()) + "x" + std::to_string(got.channels()) + ", want " +
           std::to_string(want.height()) + "x" + std::to_string(want.width()) + "x" +
           std::to_string(want.channels());
  for (int y = 0; y < want.height(); ++y)
    for (int x = 0; x < want.width(); ++x)
      for (int ch = 0; ch < want.channels(); ++ch)
        if (got(y, x, ch) != want(y, x, ch))
          return "first mismatch at (" + std::to_string(y) + "," + std::to_string(x) + "," +
                 std::to_string(ch) + "): fused " + std::to_string(got(y, x, ch)) +
                 ", reference " + std::to_string(want(y, x, ch));
  return "no elementwise mismatch";
}

}  // namespace detail

inline VerifyResult run_verify(const VerifyOptions& opt) {
  if (opt.cases < 0) throw ContractError("case count must be >= 0");
  VerifyResult result;
  std::mt19937_64 rng(opt.seed);
  std::uniform_int_distribution<int> n_dist(opt.n_min, opt.n_max);
  std::uniform_int_distribution<int> p_dist(opt.p_min, opt.p_max);
  std::uniform_int_distribution<int> c_dist(opt.c_min, opt.c_max);
  std::uniform_int_distribution<int> value_dist(-8, 8);

  for (int case_i = 0; case_i < opt.cases; ++case_i) {
    const int n = n_dist(rng);
    const int p = p_dist(rng);
    // Keep the kernel inside the padded upsampled extent so geometry is valid.
    const int k_cap = std::min(opt.k_max, 2 * n - 1 + 2 * p);
    std::uniform_int_distribution<int> k_dist(std::min(opt.k_min, k_cap), k_cap);
    const int k = k_dist(rng);
    const int cin = c_dist(rng);
    const int cout = c_dist(rng);

    std::vector<float> in_data(static_cast<std::size_t>(n) * n * cin);
    for (float& v : in_data) v = static_cast<float>(value_dist(rng));
    std::vector<float> k_data(static_cast<std::size_t>(k) * k * cin * cout);
    for (float& v : k_data) v = static_cast<float>(value_dist(rng));

    const Tensor<float> input = Tensor<float>::from_data(n, n, cin, std::move(in_data));
    const Kernel<float> kernel = Kernel<float>::from_data(k, k, cin, cout, std::move(k_data));

    const TConvGeometry geom = tconv_geometry(n, k, k, p);
    SubKernelSet<float> sks = segregate(kernel, p);
    if (case_i == opt.inject_fault_case) {
      for (Kernel<float>& sub : sks.subs) {
        if (!sub.spatially_empty()) {
          sub.data()[0] += 1.0f;
          break;
        }
      }
    }

    const Tensor<float> reference = transpose_conv_naive(input, kernel, p);
    const Tensor<float> fused = transpose_conv_fused(input, sks, geom);

    ++result.cases_run;
    if (!tensors_equal_exact(fused, reference)) {
      ++result.failures;
      if (!result.first_failure) {
        VerifyFailure f;
        f.case_index = case_i;
        f.n = n;
        f.k = k;
        f.p = p;
        f.cin = cin;
        f.cout = cout;
        f.seed = opt.seed;
        f.detail = detail::first_mismatch(fused, reference);
        result.first_failure = f;
      }
    }
  }
  return result;
}

}  // namespace segconv
