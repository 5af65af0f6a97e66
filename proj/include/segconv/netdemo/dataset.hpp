#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "segconv/errors.hpp"
#include "segconv/tensor.hpp"
#include "segconv/tensor_io.hpp"

namespace segconv::net {

template <typename T>
struct LabeledSample {
  Tensor<T> image;  // 28x28x1, values in [0, 1]
  int label = 0;
};

// ---------------------------------------------------------------------------
// Synthetic digit set: seven-segment glyphs on a 28x28 canvas with per-sample
// position jitter, brightness variation, and background noise. Crude, but
// each class has a fixed distinctive shape, which is all the training demo
// needs. The repo ships no real dataset.
// ---------------------------------------------------------------------------

namespace detail {

// Segment bit order: A top, B top-right, C bottom-right, D bottom,
// E bottom-left, F top-left, G middle.
inline unsigned segment_mask(int digit) {
  static constexpr unsigned masks[10] = {
      0b0111111,  // 0: A B C D E F
      0b0000110,  // 1: B C
      0b1011011,  // 2: A B D E G
      0b1001111,  // 3: A B C D G
      0b1100110,  // 4: B C F G
      0b1101101,  // 5: A C D F G
      0b1111101,  // 6: A C D E F G
      0b0000111,  // 7: A B C
      0b1111111,  // 8: all
      0b1101111,  // 9: A B C D F G
  };
  return masks[digit];
}

}  // namespace detail

// `num_classes` in [2, 10]: class k renders digit k. Samples come out
// class-blocked; the training loop samples indices at random anyway.
template <typename T>
std::vector<LabeledSample<T>> make_synth_digits(int per_class, int num_classes,
                                                std::uint64_t seed) {
  if (per_class < 1) throw ContractError("per_class must be >= 1");
  if (num_classes < 2 || num_classes > 10)
    throw ContractError("num_classes must be in [2, 10]");

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> jitter(-2, 2);
  std::uniform_real_distribution<double> bright(0.75, 1.0);
  std::uniform_real_distribution<double> noise(0.0, 0.05);

  // Segment rectangles {top, bottom, left, right} inclusive, pre-jitter.
  struct Rect {
    int t, b, l, r;
  };
  static constexpr Rect kSegs[7] = {
      {4, 5, 8, 19},     // A
      {5, 13, 19, 20},   // B
      {14, 22, 19, 20},  // C
      {22, 23, 8, 19},   // D
      {14, 22, 7, 8},    // E
      {5, 13, 7, 8},     // F
      {13, 14, 8, 19},   // G
  };

  std::vector<LabeledSample<T>> out;
  out.reserve(static_cast<std::size_t>(per_class) * num_classes);
  for (int digit = 0; digit < num_classes; ++digit) {
    const unsigned mask = detail::segment_mask(digit);
    for (int s = 0; s < per_class; ++s) {
      const int dy = jitter(rng);
      const int dx = jitter(rng);
      const double b = bright(rng);
      Tensor<T> img(28, 28, 1);
      for (int i = 0; i < 28; ++i)
        for (int j = 0; j < 28; ++j) img(i, j, 0) = static_cast<T>(noise(rng));
      for (int seg = 0; seg < 7; ++seg) {
        if (!(mask >> seg & 1)) continue;
        const Rect& rc = kSegs[seg];
        for (int i = rc.t + dy; i <= rc.b + dy; ++i)
          for (int j = rc.l + dx; j <= rc.r + dx; ++j) {
            T& px = img(i, j, 0);
            px = std::min(T(1), static_cast<T>(b) + px);
          }
      }
      out.push_back({std::move(img), digit});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// IDX reader for externally supplied image/label files (the common format
// for handwritten-digit corpora): big-endian u32 header fields, magic
// 0x00000803 for u8 image stacks and 0x00000801 for u8 label vectors.
// ---------------------------------------------------------------------------

namespace detail {

inline std::uint32_t read_u32_be(const std::vector<unsigned char>& buf, std::size_t at,
                                 const std::string& path) {
  if (at + 4 > buf.size())
    throw ParseError(path + ": truncated header, need 4 bytes", buf.size());
  return (static_cast<std::uint32_t>(buf[at]) << 24) |
         (static_cast<std::uint32_t>(buf[at + 1]) << 16) |
         (static_cast<std::uint32_t>(buf[at + 2]) << 8) | static_cast<std::uint32_t>(buf[at + 3]);
}

}  // namespace detail

// Loads up to `limit` samples (0 = all); image and label counts must agree.
template <typename T>
std::vector<LabeledSample<T>> load_idx_dataset(const std::string& images_path,
                                               const std::string& labels_path, int limit = 0) {
  const std::vector<unsigned char> ibuf = segconv::detail::slurp(images_path);
  const std::vector<unsigned char> lbuf = segconv::detail::slurp(labels_path);

  if (detail::read_u32_be(ibuf, 0, images_path) != 0x00000803u)
    throw ParseError(images_path + ": bad magic, expected 0x00000803", 0);
  if (detail::read_u32_be(lbuf, 0, labels_path) != 0x00000801u)
    throw ParseError(labels_path + ": bad magic, expected 0x00000801", 0);

  const std::uint32_t n_images = detail::read_u32_be(ibuf, 4, images_path);
  const std::uint32_t rows = detail::read_u32_be(ibuf, 8, images_path);
  const std::uint32_t cols = detail::read_u32_be(ibuf, 12, images_path);
  const std::uint32_t n_labels = detail::read_u32_be(lbuf, 4, labels_path);
  if (n_images != n_labels)
    throw ParseError(images_path + ": image count " + std::to_string(n_images) +
                         " does not match label count " + std::to_string(n_labels),
                     4);
  if (rows < 1 || cols < 1 || rows > 4096 || cols > 4096)
    throw ParseError(images_path + ": implausible image dims " + std::to_string(rows) + "x" +
                         std::to_string(cols),
                     8);

  const std::size_t px = static_cast<std::size_t>(rows) * cols;
  const std::size_t need_i = 16 + px * n_images;
  if (ibuf.size() < need_i)
    throw ParseError(images_path + ": truncated payload, expected " + std::to_string(need_i) +
                         " bytes, got " + std::to_string(ibuf.size()),
                     ibuf.size());
  const std::size_t need_l = 8 + n_labels;
  if (lbuf.size() < need_l)
    throw ParseError(labels_path + ": truncated payload, expected " + std::to_string(need_l) +
                         " bytes, got " + std::to_string(lbuf.size()),
                     lbuf.size());

  std::size_t take = n_images;
  if (limit > 0 && static_cast<std::size_t>(limit) < take) take = limit;

  std::vector<LabeledSample<T>> out;
  out.reserve(take);
  for (std::size_t s = 0; s < take; ++s) {
    std::vector<T> values(px);
    const unsigned char* p = ibuf.data() + 16 + s * px;
    for (std::size_t i = 0; i < px; ++i) values[i] = static_cast<T>(p[i]) / T(255);
    out.push_back({Tensor<T>::from_data(static_cast<int>(rows), static_cast<int>(cols), 1,
                                        std::move(values)),
                   static_cast<int>(lbuf[8 + s])});
  }
  return out;
}

}  // namespace segconv::net
