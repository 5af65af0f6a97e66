#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <type_traits>
#include <utility>
#include <vector>

#include "segconv/errors.hpp"

namespace segconv {

enum class Precision : std::uint32_t { f32 = 0, f64 = 1 };

template <typename T>
inline constexpr Precision precision_of = std::is_same_v<T, float> ? Precision::f32 : Precision::f64;

// ---------------------------------------------------------------------------
// Allocation accounting.
//
// Tensor/Kernel storage allocations inside an active AllocScope are tallied
// into its AllocStats. Used by tests to assert that the fused transpose
// convolution never materializes an upsampled buffer.
// ---------------------------------------------------------------------------

struct AllocStats {
  std::size_t total_bytes = 0;
  std::size_t peak_single = 0;
  std::size_t allocations = 0;

  void note(std::size_t bytes) {
    total_bytes += bytes;
    peak_single = std::max(peak_single, bytes);
    ++allocations;
  }
};

class AllocScope {
 public:
  explicit AllocScope(AllocStats& stats) : prev_(current_) { current_ = &stats; }
  ~AllocScope() { current_ = prev_; }
  AllocScope(const AllocScope&) = delete;
  AllocScope& operator=(const AllocScope&) = delete;

  static void note(std::size_t bytes) {
    if (current_ != nullptr) current_->note(bytes);
  }

 private:
  AllocStats* prev_;
  static inline thread_local AllocStats* current_ = nullptr;
};

// ---------------------------------------------------------------------------
// Tensor: dense height x width x channels feature map, row-major with the
// channel index innermost. Immutable by convention after construction; all
// operations below are pure functions returning new tensors.
// ---------------------------------------------------------------------------

template <typename T>
class Tensor {
  static_assert(std::is_floating_point_v<T>, "Tensor requires float or double");

 public:
  Tensor() = default;

  // Zero-filled tensor. Intended for internally computed results.
  Tensor(int height, int width, int channels)
      : h_(height), w_(width), c_(channels) {
    check_dims(height, width, channels);
    data_.assign(size(), T(0));
    AllocScope::note(size() * sizeof(T));
  }

  // Construction from external data: validates length and rejects NaN/Inf.
  static Tensor from_data(int height, int width, int channels, std::vector<T> values) {
    check_dims(height, width, channels);
    const std::size_t expect =
        static_cast<std::size_t>(height) * static_cast<std::size_t>(width) * static_cast<std::size_t>(channels);
    if (values.size() != expect)
      throw ContractError("tensor data length " + std::to_string(values.size()) +
                          " does not match dims (" + std::to_string(height) + "x" +
                          std::to_string(width) + "x" + std::to_string(channels) + ")");
    for (const T v : values)
      if (!std::isfinite(v)) throw ContractError("tensor data contains a non-finite element");
    Tensor t;
    t.h_ = height;
    t.w_ = width;
    t.c_ = channels;
    t.data_ = std::move(values);
    AllocScope::note(t.size() * sizeof(T));
    return t;
  }

  Tensor(const Tensor& other) : h_(other.h_), w_(other.w_), c_(other.c_), data_(other.data_) {
    AllocScope::note(data_.size() * sizeof(T));
  }
  Tensor& operator=(const Tensor& other) {
    if (this != &other) {
      h_ = other.h_;
      w_ = other.w_;
      c_ = other.c_;
      data_ = other.data_;
      AllocScope::note(data_.size() * sizeof(T));
    }
    return *this;
  }
  Tensor(Tensor&&) noexcept = default;
  Tensor& operator=(Tensor&&) noexcept = default;

  int height() const { return h_; }
  int width() const { return w_; }
  int channels() const { return c_; }
  std::size_t size() const {
    return static_cast<std::size_t>(h_) * static_cast<std::size_t>(w_) * static_cast<std::size_t>(c_);
  }
  bool empty() const { return data_.empty(); }

  std::size_t index(int i, int j, int ch) const {
    return (static_cast<std::size_t>(i) * w_ + j) * c_ + ch;
  }
  T operator()(int i, int j, int ch) const { return data_[index(i, j, ch)]; }
  T& operator()(int i, int j, int ch) { return data_[index(i, j, ch)]; }
  const T* pixel(int i, int j) const { return data_.data() + index(i, j, 0); }
  T* pixel(int i, int j) { return data_.data() + index(i, j, 0); }

  const T* data() const { return data_.data(); }
  T* data() { return data_.data(); }
  const std::vector<T>& storage() const { return data_; }

  bool same_shape(const Tensor& o) const { return h_ == o.h_ && w_ == o.w_ && c_ == o.c_; }

 private:
  static void check_dims(int h, int w, int c) {
    if (h < 1 || w < 1 || c < 1)
      throw ShapeError("tensor dims must be positive, got " + std::to_string(h) + "x" +
                       std::to_string(w) + "x" + std::to_string(c));
  }

  int h_ = 0, w_ = 0, c_ = 0;
  std::vector<T> data_;
};

// ---------------------------------------------------------------------------
// Kernel: kh x kw x cin x cout filter bank, row-major in that order, so the
// cout values of one tap are contiguous.
// ---------------------------------------------------------------------------

template <typename T>
class Kernel {
  static_assert(std::is_floating_point_v<T>, "Kernel requires float or double");

 public:
  Kernel() = default;

  // Zero-filled. Spatial dims may be zero: segregation produces legal empty
  // sub-kernels (e.g. a 1x1 kernel has three empty parity classes).
  Kernel(int kh, int kw, int cin, int cout) : kh_(kh), kw_(kw), cin_(cin), cout_(cout) {
    if (kh < 0 || kw < 0 || cin < 1 || cout < 1)
      throw ShapeError("bad kernel dims " + dims_string(kh, kw, cin, cout));
    data_.assign(size(), T(0));
    AllocScope::note(size() * sizeof(T));
  }

  // Construction from external data: spatial dims must be >= 1 here, and
  // elements must be finite.
  static Kernel from_data(int kh, int kw, int cin, int cout, std::vector<T> values) {
    if (kh < 1 || kw < 1 || cin < 1 || cout < 1)
      throw ShapeError("bad kernel dims " + dims_string(kh, kw, cin, cout));
    const std::size_t expect = static_cast<std::size_t>(kh) * kw * cin * cout;
    if (values.size() != expect)
      throw ContractError("kernel data length " + std::to_string(values.size()) +
                          " does not match dims " + dims_string(kh, kw, cin, cout));
    for (const T v : values)
      if (!std::isfinite(v)) throw ContractError("kernel data contains a non-finite element");
    Kernel k;
    k.kh_ = kh;
    k.kw_ = kw;
    k.cin_ = cin;
    k.cout_ = cout;
    k.data_ = std::move(values);
    AllocScope::note(k.size() * sizeof(T));
    return k;
  }

  int kh() const { return kh_; }
  int kw() const { return kw_; }
  int cin() const { return cin_; }
  int cout() const { return cout_; }
  std::size_t size() const {
    return static_cast<std::size_t>(kh_) * kw_ * static_cast<std::size_t>(cin_) * cout_;
  }
  bool spatially_empty() const { return kh_ == 0 || kw_ == 0; }

  std::size_t index(int u, int v, int ch, int f) const {
    return ((static_cast<std::size_t>(u) * kw_ + v) * cin_ + ch) * cout_ + f;
  }
  T operator()(int u, int v, int ch, int f) const { return data_[index(u, v, ch, f)]; }
  T& operator()(int u, int v, int ch, int f) { return data_[index(u, v, ch, f)]; }
  // Pointer to the cout values of tap (u, v, ch).
  const T* tap(int u, int v, int ch) const { return data_.data() + index(u, v, ch, 0); }

  const T* data() const { return data_.data(); }
  T* data() { return data_.data(); }

 private:
  static std::string dims_string(int kh, int kw, int cin, int cout) {
    return std::to_string(kh) + "x" + std::to_string(kw) + "x" + std::to_string(cin) + "x" +
           std::to_string(cout);
  }

  int kh_ = 0, kw_ = 0, cin_ = 0, cout_ = 0;
  std::vector<T> data_;
};

// ---------------------------------------------------------------------------
// Core operations
// ---------------------------------------------------------------------------

// Zero padding of p cells on every spatial border; p = 0 returns a copy.
template <typename T>
Tensor<T> pad(const Tensor<T>& t, int p) {
  if (p < 0) throw ContractError("pad factor must be non-negative");
  Tensor<T> out(t.height() + 2 * p, t.width() + 2 * p, t.channels());
  const std::size_t row_bytes = static_cast<std::size_t>(t.width()) * t.channels() * sizeof(T);
  for (int i = 0; i < t.height(); ++i)
    std::memcpy(out.pixel(i + p, p), t.pixel(i, 0), row_bytes);
  return out;
}

// Spatial crop: the h x w window whose top-left corner is (top, left).
template <typename T>
Tensor<T> crop(const Tensor<T>& t, int top, int left, int h, int w) {
  if (top < 0 || left < 0 || h < 1 || w < 1 || top + h > t.height() || left + w > t.width())
    throw ContractError("crop window out of range");
  Tensor<T> out(h, w, t.channels());
  const std::size_t row_bytes = static_cast<std::size_t>(w) * t.channels() * sizeof(T);
  for (int i = 0; i < h; ++i) std::memcpy(out.pixel(i, 0), t.pixel(top + i, left), row_bytes);
  return out;
}

// Zero-insertion 2x upsampling: (h, w) -> (2h-1, 2w-1), original values at
// even (row, col) pairs, zeros elsewhere.
template <typename T>
Tensor<T> upsample2x(const Tensor<T>& t) {
  Tensor<T> out(2 * t.height() - 1, 2 * t.width() - 1, t.channels());
  const int c = t.channels();
  for (int i = 0; i < t.height(); ++i) {
    const T* src = t.pixel(i, 0);
    T* dst = out.pixel(2 * i, 0);
    for (int j = 0; j < t.width(); ++j)
      std::memcpy(dst + static_cast<std::size_t>(2 * j) * c, src + static_cast<std::size_t>(j) * c,
                  c * sizeof(T));
  }
  return out;
}

// Exact comparison. Same dims and IEEE-equal elements; +0.0 == -0.0.
// Dimension mismatch is "unequal", not an error.
template <typename T>
bool tensors_equal_exact(const Tensor<T>& a, const Tensor<T>& b) {
  if (!a.same_shape(b)) return false;
  const T* pa = a.data();
  const T* pb = b.data();
  const std::size_t n = a.size();
  for (std::size_t i = 0; i < n; ++i)
    if (pa[i] != pb[i]) return false;
  return true;
}

// Relative comparison: |a-b| <= rel_tol * max(|a|, |b|, 1).
template <typename T>
bool tensors_equal_approx(const Tensor<T>& a, const Tensor<T>& b, T rel_tol) {
  if (!a.same_shape(b)) return false;
  const T* pa = a.data();
  const T* pb = b.data();
  const std::size_t n = a.size();
  for (std::size_t i = 0; i < n; ++i) {
    const T scale = std::max({std::abs(pa[i]), std::abs(pb[i]), T(1)});
    if (std::abs(pa[i] - pb[i]) > rel_tol * scale) return false;
  }
  return true;
}

}  // namespace segconv
