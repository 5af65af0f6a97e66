#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <vector>

#include "segconv/analysis.hpp"
#include "segconv/reference_ops.hpp"

using segconv::Kernel;
using segconv::LayerShape;
using segconv::Tensor;

namespace {

// Test-local oracle, written from the definition and sharing no code with the
// library: scatter each input value through the kernel into the output.
// output(2i + u - p, 2j + v - p) += in(i, j, ch) * k(u, v, ch, f).
// Integer-valued data keeps double accumulation exact, so results compare
// with == against the library's float path.
// Scatter formulation of upsample-pad-correlate: input pixel (i, j) sits at
// row 2i + p of the padded upsampled map, and the window anchored at output
// row y covers it through tap u = 2i + p - y.
std::vector<double> scatter_tconv(const Tensor<float>& in, const Kernel<float>& k, int p,
                                  int out_h, int out_w) {
  std::vector<double> out(static_cast<std::size_t>(out_h) * out_w * k.cout(), 0.0);
  for (int i = 0; i < in.height(); ++i)
    for (int j = 0; j < in.width(); ++j)
      for (int u = 0; u < k.kh(); ++u)
        for (int v = 0; v < k.kw(); ++v) {
          const int y = 2 * i + p - u;
          const int x = 2 * j + p - v;
          if (y < 0 || y >= out_h || x < 0 || x >= out_w) continue;
          for (int ch = 0; ch < in.channels(); ++ch)
            for (int f = 0; f < k.cout(); ++f)
              out[(static_cast<std::size_t>(y) * out_w + x) * k.cout() + f] +=
                  static_cast<double>(in(i, j, ch)) * k(u, v, ch, f);
        }
  return out;
}

Tensor<float> random_int_tensor(int h, int w, int c, std::mt19937& rng) {
  Tensor<float> t(h, w, c);
  std::uniform_int_distribution<int> d(-8, 8);
  for (std::size_t i = 0; i < t.size(); ++i) t.data()[i] = static_cast<float>(d(rng));
  return t;
}

Kernel<float> random_int_kernel(int kh, int kw, int cin, int cout, std::mt19937& rng) {
  Kernel<float> k(kh, kw, cin, cout);
  std::uniform_int_distribution<int> d(-8, 8);
  for (int u = 0; u < kh; ++u)
    for (int v = 0; v < kw; ++v)
      for (int ch = 0; ch < cin; ++ch)
        for (int f = 0; f < cout; ++f) k(u, v, ch, f) = static_cast<float>(d(rng));
  return k;
}

}  // namespace

TEST_CASE("valid convolution basics") {
  SECTION("2x2 box filter sums windows") {
    const auto t = Tensor<float>::from_data(3, 3, 1, {1, 2, 3, 4, 5, 6, 7, 8, 9});
    const auto k = Kernel<float>::from_data(2, 2, 1, 1, {1, 1, 1, 1});
    const auto out = segconv::conv2d_valid(t, k);
    REQUIRE(out.height() == 2);
    REQUIRE(out.width() == 2);
    REQUIRE(out(0, 0, 0) == 12.0f);
    REQUIRE(out(0, 1, 0) == 16.0f);
    REQUIRE(out(1, 0, 0) == 24.0f);
    REQUIRE(out(1, 1, 0) == 28.0f);
  }

  SECTION("1x1 delta kernel is identity per channel") {
    std::mt19937 rng(5);
    const auto t = random_int_tensor(4, 5, 2, rng);
    const auto k = Kernel<float>::from_data(1, 1, 2, 2, {1, 0, 0, 1});
    REQUIRE(segconv::tensors_equal_exact(segconv::conv2d_valid(t, k), t));
  }

  SECTION("channel mixing") {
    const auto t = Tensor<float>::from_data(1, 1, 2, {3, 5});
    const auto k = Kernel<float>::from_data(1, 1, 2, 3, {1, 10, 100, 2, 20, 200});
    const auto out = segconv::conv2d_valid(t, k);
    REQUIRE(out(0, 0, 0) == 3.0f * 1 + 5.0f * 2);
    REQUIRE(out(0, 0, 1) == 3.0f * 10 + 5.0f * 20);
    REQUIRE(out(0, 0, 2) == 3.0f * 100 + 5.0f * 200);
  }

  SECTION("shape errors") {
    const Tensor<float> t(3, 3, 2);
    REQUIRE_THROWS_AS(segconv::conv2d_valid(t, Kernel<float>(4, 1, 2, 1)), segconv::ShapeError);
    REQUIRE_THROWS_AS(segconv::conv2d_valid(t, Kernel<float>(2, 2, 3, 1)), segconv::ContractError);
  }
}

TEST_CASE("transpose convolution matches a frozen worked example") {
  // 2x2 input, all-ones 3x3 kernel, padding 2: each output value sums the
  // input cells within one step of its pre-image.
  const auto in = Tensor<float>::from_data(2, 2, 1, {1, 2, 3, 4});
  const auto k = Kernel<float>::from_data(3, 3, 1, 1, std::vector<float>(9, 1.0f));
  const auto out = segconv::transpose_conv_naive(in, k, 2);

  const float want[5][5] = {{1, 1, 3, 2, 2},
                            {1, 1, 3, 2, 2},
                            {4, 4, 10, 6, 6},
                            {3, 3, 7, 4, 4},
                            {3, 3, 7, 4, 4}};
  REQUIRE(out.height() == 5);
  REQUIRE(out.width() == 5);
  for (int y = 0; y < 5; ++y)
    for (int x = 0; x < 5; ++x) REQUIRE(out(y, x, 0) == want[y][x]);
}

TEST_CASE("transpose convolution agrees with the scatter oracle") {
  std::mt19937 rng(20240911);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 7);
    const int p = static_cast<int>(rng() % 4);
    const int k_cap = 2 * n - 1 + 2 * p;
    const int kh = 1 + static_cast<int>(rng() % std::min(6, k_cap));
    const int kw = 1 + static_cast<int>(rng() % std::min(6, k_cap));
    const int cin = 1 + static_cast<int>(rng() % 3);
    const int cout = 1 + static_cast<int>(rng() % 3);
    if (2 * n + 2 * p - kh < 1 || 2 * n + 2 * p - kw < 1) continue;

    const auto in = random_int_tensor(n, n, cin, rng);
    const auto k = random_int_kernel(kh, kw, cin, cout, rng);
    const auto got = segconv::transpose_conv_naive(in, k, p);
    const auto want = scatter_tconv(in, k, p, got.height(), got.width());
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < want.size(); ++i)
      REQUIRE(static_cast<double>(got.data()[i]) == want[i]);
  }
}

TEST_CASE("transpose convolution is linear in the input") {
  std::mt19937 rng(77);
  const auto a = random_int_tensor(4, 4, 2, rng);
  const auto b = random_int_tensor(4, 4, 2, rng);
  Tensor<float> sum(4, 4, 2);
  for (std::size_t i = 0; i < sum.size(); ++i) sum.data()[i] = a.data()[i] + b.data()[i];
  const auto k = random_int_kernel(3, 3, 2, 2, rng);

  const auto ya = segconv::transpose_conv_naive(a, k, 1);
  const auto yb = segconv::transpose_conv_naive(b, k, 1);
  const auto ys = segconv::transpose_conv_naive(sum, k, 1);
  for (std::size_t i = 0; i < ys.size(); ++i)
    REQUIRE(ys.data()[i] == ya.data()[i] + yb.data()[i]);  // integer-exact
}

TEST_CASE("transpose convolution validates its contract") {
  const Tensor<float> rect(2, 3, 1);
  REQUIRE_THROWS_AS(segconv::transpose_conv_naive(rect, Kernel<float>(3, 3, 1, 1), 1),
                    segconv::ContractError);
  const Tensor<float> in(4, 4, 2);
  REQUIRE_THROWS_AS(segconv::transpose_conv_naive(in, Kernel<float>(3, 3, 1, 1), 1),
                    segconv::ContractError);  // channel mismatch
  REQUIRE_THROWS_AS(segconv::transpose_conv_naive(in, Kernel<float>(9, 9, 2, 1), 0),
                    segconv::ShapeError);  // kernel exceeds upsampled extent
}

TEST_CASE("instrumented reference path reproduces the closed-form counts") {
  std::mt19937 rng(3);
  const LayerShape shapes[] = {
      {4, 3, 2, 3, 3, 1}, {5, 1, 1, 4, 4, 2}, {6, 2, 4, 5, 5, 3}, {3, 2, 1, 1, 1, 0},
  };
  for (const LayerShape& s : shapes) {
    const auto in = random_int_tensor(s.n_in, s.n_in, s.cin, rng);
    const auto k = random_int_kernel(s.kh, s.kw, s.cin, s.cout, rng);
    segconv::Tally tally;
    segconv::transpose_conv_naive(in, k, s.p_orig, tally);
    const auto want = segconv::count_ops_naive(s);
    REQUIRE(tally.counts.mults == want.mults);
    REQUIRE(tally.counts.adds == want.adds);
  }
}
