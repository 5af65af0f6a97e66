#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "segconv/errors.hpp"
#include "segconv/fused_tconv.hpp"
#include "segconv/geometry.hpp"
#include "segconv/reference_ops.hpp"
#include "segconv/segregation.hpp"
#include "segconv/tensor.hpp"

// Minimal layer zoo for the training demo: just enough machinery to run the
// two small models (upsample+conv vs fused transpose conv) forward and
// backward. Layers cache what their backward pass needs; backward both
// returns the input gradient and accumulates parameter gradients.

namespace segconv::net {

// One contiguous trainable block: values and matching gradient storage.
template <typename T>
struct ParamBlock {
  T* values = nullptr;
  T* grads = nullptr;
  std::size_t size = 0;
};

template <typename T>
class Layer {
 public:
  virtual ~Layer() = default;
  virtual const char* name() const = 0;
  virtual Tensor<T> forward(const Tensor<T>& in) = 0;
  // Returns grad wrt input; adds this call's parameter gradients into the
  // blocks exposed by params(). Requires a preceding forward.
  virtual Tensor<T> backward(const Tensor<T>& grad_out) = 0;
  virtual std::vector<ParamBlock<T>> params() { return {}; }
  // Called after the optimizer writes new parameter values.
  virtual void on_params_updated() {}

 protected:
  void require_forward(bool has_input) const {
    if (!has_input) throw StateError(std::string(name()) + ": backward called before forward");
  }
};

// ---------------------------------------------------------------------------
// Zero-insertion upsampling, (h, w) -> (2h-1, 2w-1).
// ---------------------------------------------------------------------------

template <typename T>
class Upsample2x final : public Layer<T> {
 public:
  const char* name() const override { return "upsample2x"; }

  Tensor<T> forward(const Tensor<T>& in) override {
    in_h_ = in.height();
    in_w_ = in.width();
    has_input_ = true;
    return upsample2x(in);
  }

  Tensor<T> backward(const Tensor<T>& g) override {
    this->require_forward(has_input_);
    Tensor<T> gin(in_h_, in_w_, g.channels());
    for (int i = 0; i < in_h_; ++i)
      for (int j = 0; j < in_w_; ++j)
        for (int ch = 0; ch < g.channels(); ++ch) gin(i, j, ch) = g(2 * i, 2 * j, ch);
    return gin;
  }

 private:
  int in_h_ = 0, in_w_ = 0;
  bool has_input_ = false;
};

// ---------------------------------------------------------------------------
// Valid convolution with trainable kernel.
// ---------------------------------------------------------------------------

template <typename T>
class ConvValid final : public Layer<T> {
 public:
  explicit ConvValid(Kernel<T> k)
      : kernel_(std::move(k)), grad_(kernel_.kh(), kernel_.kw(), kernel_.cin(), kernel_.cout()) {}

  const char* name() const override { return "conv_valid"; }

  Tensor<T> forward(const Tensor<T>& in) override {
    input_ = in;
    has_input_ = true;
    return conv2d_valid(in, kernel_);
  }

  Tensor<T> backward(const Tensor<T>& g) override {
    this->require_forward(has_input_);
    const int kh = kernel_.kh(), kw = kernel_.kw(), cin = kernel_.cin(), cout = kernel_.cout();
    Tensor<T> gin(input_.height(), input_.width(), cin);
    for (int y = 0; y < g.height(); ++y) {
      for (int x = 0; x < g.width(); ++x) {
        const T* gp = g.pixel(y, x);
        for (int u = 0; u < kh; ++u) {
          for (int v = 0; v < kw; ++v) {
            T* gi = gin.pixel(y + u, x + v);
            const T* ip = input_.pixel(y + u, x + v);
            for (int ch = 0; ch < cin; ++ch) {
              const T* w = kernel_.tap(u, v, ch);
              T* gw = grad_.data() + grad_.index(u, v, ch, 0);
              T acc = 0;
              for (int f = 0; f < cout; ++f) {
                acc += w[f] * gp[f];
                gw[f] += ip[ch] * gp[f];
              }
              gi[ch] += acc;
            }
          }
        }
      }
    }
    return gin;
  }

  std::vector<ParamBlock<T>> params() override {
    return {{kernel_.data(), grad_.data(), kernel_.size()}};
  }

  const Kernel<T>& kernel() const { return kernel_; }

 private:
  Kernel<T> kernel_;
  Kernel<T> grad_;
  Tensor<T> input_;
  bool has_input_ = false;
};

// ---------------------------------------------------------------------------
// Fused 2x transpose convolution with trainable kernel.
//
// Forward runs the four sub-kernel convolutions over the p/2-padded input.
// Backward mirrors them: the output gradient is scattered back through each
// sub-kernel into a padded input-gradient buffer (then cropped), and tap
// gradients land at each tap's position in the original kernel. Neither
// direction touches an upsampled buffer.
// ---------------------------------------------------------------------------

template <typename T>
class FusedTConv final : public Layer<T> {
 public:
  FusedTConv(Kernel<T> k, int p)
      : kernel_(std::move(k)),
        grad_(kernel_.kh(), kernel_.kw(), kernel_.cin(), kernel_.cout()),
        p_(p),
        sks_(segregate(kernel_, p)) {}

  const char* name() const override { return "fused_tconv"; }

  Tensor<T> forward(const Tensor<T>& in) override {
    if (in.height() != in.width())
      throw ContractError("fused_tconv expects a square input, got " +
                          std::to_string(in.height()) + "x" + std::to_string(in.width()));
    geom_ = tconv_geometry(in.height(), kernel_.kh(), kernel_.kw(), p_);
    in_padded_ = pad(in, geom_.p_fused);
    has_input_ = true;
    NoTally tally;
    return segconv::detail::fused_from_padded(in_padded_, sks_, geom_, tally);
  }

  Tensor<T> backward(const Tensor<T>& g) override {
    this->require_forward(has_input_);
    if (g.height() != geom_.out_h || g.width() != geom_.out_w || g.channels() != kernel_.cout())
      throw ContractError("fused_tconv: output gradient shape mismatch");
    const int cin = kernel_.cin(), cout = kernel_.cout();
    Tensor<T> gpad(in_padded_.height(), in_padded_.width(), cin);
    for (int r = 0; r < 2; ++r) {
      for (int c = 0; c < 2; ++c) {
        const Kernel<T>& sub = sks_.sub(r, c);
        if (sub.spatially_empty()) continue;
        const auto [off_r, off_c] = sks_.offset(r, c);
        const int u0 = first_active_tap(p_, r);
        const int v0 = first_active_tap(p_, c);
        const int rows = (geom_.out_h - r + 1) / 2;
        const int cols = (geom_.out_w - c + 1) / 2;
        for (int i = 0; i < rows; ++i) {
          for (int j = 0; j < cols; ++j) {
            const T* gp = g.pixel(2 * i + r, 2 * j + c);
            for (int u = 0; u < sub.kh(); ++u) {
              for (int v = 0; v < sub.kw(); ++v) {
                T* gi = gpad.pixel(i + off_r + u, j + off_c + v);
                const T* ip = in_padded_.pixel(i + off_r + u, j + off_c + v);
                for (int ch = 0; ch < cin; ++ch) {
                  const T* w = sub.tap(u, v, ch);
                  T* gw = grad_.data() + grad_.index(u0 + 2 * u, v0 + 2 * v, ch, 0);
                  T acc = 0;
                  for (int f = 0; f < cout; ++f) {
                    acc += w[f] * gp[f];
                    gw[f] += ip[ch] * gp[f];
                  }
                  gi[ch] += acc;
                }
              }
            }
          }
        }
      }
    }
    const int n = geom_.n_in;
    return crop(gpad, geom_.p_fused, geom_.p_fused, n, n);
  }

  std::vector<ParamBlock<T>> params() override {
    return {{kernel_.data(), grad_.data(), kernel_.size()}};
  }

  void on_params_updated() override { sks_ = segregate(kernel_, p_); }

  const Kernel<T>& kernel() const { return kernel_; }
  int padding() const { return p_; }

 private:
  Kernel<T> kernel_;
  Kernel<T> grad_;
  int p_;
  SubKernelSet<T> sks_;
  TConvGeometry geom_;
  Tensor<T> in_padded_;
  bool has_input_ = false;
};

// ---------------------------------------------------------------------------
// ReLU.
// ---------------------------------------------------------------------------

template <typename T>
class ReLU final : public Layer<T> {
 public:
  const char* name() const override { return "relu"; }

  Tensor<T> forward(const Tensor<T>& in) override {
    input_ = in;
    has_input_ = true;
    Tensor<T> out(in.height(), in.width(), in.channels());
    const T* src = in.data();
    T* dst = out.data();
    for (std::size_t i = 0; i < in.size(); ++i) dst[i] = src[i] > T(0) ? src[i] : T(0);
    return out;
  }

  Tensor<T> backward(const Tensor<T>& g) override {
    this->require_forward(has_input_);
    Tensor<T> gin(g.height(), g.width(), g.channels());
    const T* src = input_.data();
    const T* gp = g.data();
    T* dst = gin.data();
    for (std::size_t i = 0; i < g.size(); ++i) dst[i] = src[i] > T(0) ? gp[i] : T(0);
    return gin;
  }

 private:
  Tensor<T> input_;
  bool has_input_ = false;
};

// ---------------------------------------------------------------------------
// 2x2 max pooling, stride 2, ceiling mode: a trailing odd row/column gets a
// truncated window, so 51 -> 26 rather than 25.
// ---------------------------------------------------------------------------

template <typename T>
class MaxPool2 final : public Layer<T> {
 public:
  const char* name() const override { return "maxpool2"; }

  static int out_dim(int in_dim) { return (in_dim + 1) / 2; }

  Tensor<T> forward(const Tensor<T>& in) override {
    in_h_ = in.height();
    in_w_ = in.width();
    const int oh = out_dim(in.height());
    const int ow = out_dim(in.width());
    const int c = in.channels();
    Tensor<T> out(oh, ow, c);
    argmax_.assign(static_cast<std::size_t>(oh) * ow * c, 0);
    for (int io = 0; io < oh; ++io) {
      for (int jo = 0; jo < ow; ++jo) {
        const int i_end = std::min(2 * io + 2, in.height());
        const int j_end = std::min(2 * jo + 2, in.width());
        for (int ch = 0; ch < c; ++ch) {
          T best = in(2 * io, 2 * jo, ch);
          std::size_t best_at = in.index(2 * io, 2 * jo, ch);
          for (int i = 2 * io; i < i_end; ++i) {
            for (int j = 2 * jo; j < j_end; ++j) {
              const T v = in(i, j, ch);
              if (v > best) {  // first maximum in scan order wins ties
                best = v;
                best_at = in.index(i, j, ch);
              }
            }
          }
          out(io, jo, ch) = best;
          argmax_[out.index(io, jo, ch)] = best_at;
        }
      }
    }
    has_input_ = true;
    return out;
  }

  Tensor<T> backward(const Tensor<T>& g) override {
    this->require_forward(has_input_);
    Tensor<T> gin(in_h_, in_w_, g.channels());
    const T* gp = g.data();
    T* dst = gin.data();
    for (std::size_t i = 0; i < g.size(); ++i) dst[argmax_[i]] += gp[i];
    return gin;
  }

 private:
  int in_h_ = 0, in_w_ = 0;
  std::vector<std::size_t> argmax_;
  bool has_input_ = false;
};

// ---------------------------------------------------------------------------
// Flatten to a 1x1xK feature vector.
// ---------------------------------------------------------------------------

template <typename T>
class Flatten final : public Layer<T> {
 public:
  const char* name() const override { return "flatten"; }

  Tensor<T> forward(const Tensor<T>& in) override {
    in_h_ = in.height();
    in_w_ = in.width();
    in_c_ = in.channels();
    has_input_ = true;
    return Tensor<T>::from_data(1, 1, static_cast<int>(in.size()),
                                std::vector<T>(in.data(), in.data() + in.size()));
  }

  Tensor<T> backward(const Tensor<T>& g) override {
    this->require_forward(has_input_);
    return Tensor<T>::from_data(in_h_, in_w_, in_c_,
                                std::vector<T>(g.data(), g.data() + g.size()));
  }

 private:
  int in_h_ = 0, in_w_ = 0, in_c_ = 0;
  bool has_input_ = false;
};

// ---------------------------------------------------------------------------
// Fully connected layer on 1x1xK vectors; weight laid out input-major.
// ---------------------------------------------------------------------------

template <typename T>
class Dense final : public Layer<T> {
 public:
  Dense(int in_features, int out_features, std::vector<T> weight, std::vector<T> bias)
      : in_n_(in_features), out_n_(out_features), w_(std::move(weight)), b_(std::move(bias)) {
    if (w_.size() != static_cast<std::size_t>(in_n_) * out_n_ ||
        b_.size() != static_cast<std::size_t>(out_n_))
      throw ContractError("dense: weight/bias sizes do not match features");
    gw_.assign(w_.size(), T(0));
    gb_.assign(b_.size(), T(0));
  }

  const char* name() const override { return "dense"; }

  Tensor<T> forward(const Tensor<T>& in) override {
    if (in.height() != 1 || in.width() != 1 || in.channels() != in_n_)
      throw ContractError("dense expects a 1x1x" + std::to_string(in_n_) + " input");
    input_ = in;
    has_input_ = true;
    Tensor<T> out(1, 1, out_n_);
    const T* x = in.data();
    T* y = out.data();
    for (int m = 0; m < out_n_; ++m) y[m] = b_[m];
    for (int k = 0; k < in_n_; ++k) {
      const T xk = x[k];
      const T* wk = w_.data() + static_cast<std::size_t>(k) * out_n_;
      for (int m = 0; m < out_n_; ++m) y[m] += xk * wk[m];
    }
    return out;
  }

  Tensor<T> backward(const Tensor<T>& g) override {
    this->require_forward(has_input_);
    const T* gp = g.data();
    const T* x = input_.data();
    Tensor<T> gin(1, 1, in_n_);
    T* gx = gin.data();
    for (int m = 0; m < out_n_; ++m) gb_[m] += gp[m];
    for (int k = 0; k < in_n_; ++k) {
      const T* wk = w_.data() + static_cast<std::size_t>(k) * out_n_;
      T* gwk = gw_.data() + static_cast<std::size_t>(k) * out_n_;
      T acc = 0;
      for (int m = 0; m < out_n_; ++m) {
        acc += wk[m] * gp[m];
        gwk[m] += x[k] * gp[m];
      }
      gx[k] = acc;
    }
    return gin;
  }

  std::vector<ParamBlock<T>> params() override {
    return {{w_.data(), gw_.data(), w_.size()}, {b_.data(), gb_.data(), b_.size()}};
  }

 private:
  int in_n_, out_n_;
  std::vector<T> w_, b_, gw_, gb_;
  Tensor<T> input_;
  bool has_input_ = false;
};

// ---------------------------------------------------------------------------
// Softmax + cross-entropy head. Returns the loss and the gradient wrt the
// logits (softmax(z) minus the one-hot label).
// ---------------------------------------------------------------------------

template <typename T>
std::pair<T, Tensor<T>> softmax_cross_entropy(const Tensor<T>& logits, int label) {
  if (logits.height() != 1 || logits.width() != 1)
    throw ContractError("softmax head expects a 1x1xM logits tensor");
  const int m = logits.channels();
  if (label < 0 || label >= m) throw ContractError("label out of range");
  const T* z = logits.data();
  T zmax = z[0];
  for (int i = 1; i < m; ++i) zmax = std::max(zmax, z[i]);
  T denom = 0;
  for (int i = 0; i < m; ++i) denom += std::exp(z[i] - zmax);
  const T log_denom = std::log(denom);
  const T loss = log_denom - (z[label] - zmax);
  Tensor<T> grad(1, 1, m);
  T* gp = grad.data();
  for (int i = 0; i < m; ++i) gp[i] = std::exp(z[i] - zmax) / denom;
  gp[label] -= T(1);
  return {loss, std::move(grad)};
}

}  // namespace segconv::net
