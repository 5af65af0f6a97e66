#include <catch2/catch_amalgamated.hpp>

#include "segconv/geometry.hpp"
#include "segconv/netdemo/layers.hpp"

using segconv::ShapeError;
using segconv::tconv_geometry;

TEST_CASE("output extent is 2n + 2p - k") {
  for (int n = 1; n <= 12; ++n)
    for (int k = 1; k <= 7; ++k)
      for (int p = 0; p <= 4; ++p) {
        const int out = 2 * n + 2 * p - k;
        if (out < 1) {
          REQUIRE_THROWS_AS(tconv_geometry(n, k, k, p), ShapeError);
          continue;
        }
        const auto g = tconv_geometry(n, k, k, p);
        REQUIRE(g.out_h == out);
        REQUIRE(g.out_w == out);
        REQUIRE(g.up_h == 2 * n - 1 + 2 * p);
        REQUIRE(g.p_fused == p / 2);
        // An odd kernel leaves an odd output extent, which is exactly when the
        // fused path computes one extra row/column class worth of positions.
        REQUIRE(g.trim_extra_row == (out % 2 == 1));
        REQUIRE(g.trim_extra_row == (k % 2 == 1));
        REQUIRE(g.trim_extra_col == g.trim_extra_row);
      }
}

TEST_CASE("rectangular kernels get independent row/col treatment") {
  const auto g = tconv_geometry(8, 3, 4, 2);
  REQUIRE(g.out_h == 17);
  REQUIRE(g.out_w == 16);
  REQUIRE(g.trim_extra_row);
  REQUIRE_FALSE(g.trim_extra_col);
}

TEST_CASE("geometry rejects degenerate arguments") {
  REQUIRE_THROWS_AS(tconv_geometry(0, 3, 3, 1), ShapeError);
  REQUIRE_THROWS_AS(tconv_geometry(4, 0, 3, 1), ShapeError);
  REQUIRE_THROWS_AS(tconv_geometry(4, 3, 0, 1), ShapeError);
  REQUIRE_THROWS_AS(tconv_geometry(4, 3, 3, -1), ShapeError);
  // Kernel wider than the padded upsampled extent.
  REQUIRE_THROWS_AS(tconv_geometry(1, 3, 3, 0), ShapeError);
}

TEST_CASE("generator pyramid doubles the spatial extent at every stage") {
  // 4x4 kernel with padding 2: each stage maps n -> 2n, so a 4x4 seed walks
  // 4 -> 8 -> 16 -> 32 -> 64 exactly.
  int n = 4;
  for (const int expect : {8, 16, 32, 64}) {
    const auto g = tconv_geometry(n, 4, 4, 2);
    REQUIRE(g.out_h == expect);
    REQUIRE(g.out_w == expect);
    REQUIRE_FALSE(g.trim_extra_row);
    n = g.out_h;
  }
}

TEST_CASE("classifier demo shapes line up") {
  // 28x28 input, 5x5 kernel, no padding: 51x51 transpose-conv output, then a
  // ceil-mode 2x2 max pool brings it to 26x26.
  const auto g = tconv_geometry(28, 5, 5, 0);
  REQUIRE(g.out_h == 51);
  REQUIRE(g.out_w == 51);
  REQUIRE(g.trim_extra_row);
  REQUIRE(segconv::net::MaxPool2<float>::out_dim(51) == 26);
  REQUIRE(segconv::net::MaxPool2<float>::out_dim(26) == 13);
}
