#pragma once

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <memory>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "segconv/errors.hpp"
#include "segconv/netdemo/dataset.hpp"
#include "segconv/netdemo/layers.hpp"

namespace segconv::net {

// ---------------------------------------------------------------------------
// Sequential model with SGD plumbing.
// ---------------------------------------------------------------------------

template <typename T>
class Model {
 public:
  std::string name;
  std::vector<std::unique_ptr<Layer<T>>> layers;

  Tensor<T> forward(const Tensor<T>& in) {
    Tensor<T> x = in;
    for (auto& layer : layers) x = layer->forward(x);
    return x;
  }

  Tensor<T> backward(const Tensor<T>& grad_out) {
    Tensor<T> g = grad_out;
    for (auto it = layers.rbegin(); it != layers.rend(); ++it) g = (*it)->backward(g);
    return g;
  }

  std::vector<ParamBlock<T>> params() {
    std::vector<ParamBlock<T>> all;
    for (auto& layer : layers)
      for (const ParamBlock<T>& b : layer->params()) all.push_back(b);
    return all;
  }

  void zero_grads() {
    for (ParamBlock<T>& b : params())
      for (std::size_t i = 0; i < b.size; ++i) b.grads[i] = T(0);
  }

  void sgd_step(T learning_rate) {
    for (ParamBlock<T>& b : params())
      for (std::size_t i = 0; i < b.size; ++i) b.values[i] -= learning_rate * b.grads[i];
    for (auto& layer : layers) layer->on_params_updated();
  }
};

// ---------------------------------------------------------------------------
// The two demo models. Both run 28x28x1 -> 51x51x8 -> ReLU -> 26x26x8 ->
// flatten -> 10 logits; they differ only in how the first stage is computed:
// explicit upsample-then-convolve versus the fused transpose convolution.
// Equal seeds give bitwise-equal initial weights across the two builders.
// ---------------------------------------------------------------------------

namespace detail {

template <typename T>
struct DemoInit {
  Kernel<T> kernel;          // 5x5x1x8
  std::vector<T> dense_w;    // 5408 x 10
  std::vector<T> dense_b;    // 10, zeros
};

template <typename T>
DemoInit<T> demo_init(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto draw = [&rng](std::size_t count, T scale) {
    std::uniform_real_distribution<T> dist(-scale, scale);
    std::vector<T> v(count);
    for (T& x : v) x = dist(rng);
    return v;
  };
  DemoInit<T> init{Kernel<T>::from_data(5, 5, 1, 8, draw(5 * 5 * 1 * 8, T(0.2))),
                   draw(static_cast<std::size_t>(26) * 26 * 8 * 10, T(0.013)),
                   std::vector<T>(10, T(0))};
  return init;
}

}  // namespace detail

constexpr int kDemoClasses = 10;
constexpr int kDemoFlat = 26 * 26 * 8;

template <typename T>
Model<T> build_conventional_model(std::uint64_t seed) {
  detail::DemoInit<T> init = detail::demo_init<T>(seed);
  Model<T> m;
  m.name = "conventional";
  m.layers.push_back(std::make_unique<Upsample2x<T>>());
  m.layers.push_back(std::make_unique<ConvValid<T>>(std::move(init.kernel)));
  m.layers.push_back(std::make_unique<ReLU<T>>());
  m.layers.push_back(std::make_unique<MaxPool2<T>>());
  m.layers.push_back(std::make_unique<Flatten<T>>());
  m.layers.push_back(std::make_unique<Dense<T>>(kDemoFlat, kDemoClasses, std::move(init.dense_w),
                                                std::move(init.dense_b)));
  return m;
}

template <typename T>
Model<T> build_proposed_model(std::uint64_t seed) {
  detail::DemoInit<T> init = detail::demo_init<T>(seed);
  Model<T> m;
  m.name = "proposed";
  m.layers.push_back(std::make_unique<FusedTConv<T>>(std::move(init.kernel), 0));
  m.layers.push_back(std::make_unique<ReLU<T>>());
  m.layers.push_back(std::make_unique<MaxPool2<T>>());
  m.layers.push_back(std::make_unique<Flatten<T>>());
  m.layers.push_back(std::make_unique<Dense<T>>(kDemoFlat, kDemoClasses, std::move(init.dense_w),
                                                std::move(init.dense_b)));
  return m;
}

// ---------------------------------------------------------------------------
// Training
// ---------------------------------------------------------------------------

struct TrainConfig {
  int iterations = 10000;
  int minibatch = 1;
  double learning_rate = 0.05;
  std::uint64_t seed = 7;
};

struct TrainReport {
  std::string model_name;
  int iterations = 0;
  int minibatch = 1;
  double learning_rate = 0;
  std::uint64_t seed = 0;
  double wall_seconds = 0;  // training loop only, eval excluded
  double initial_loss = 0;  // mean over the eval set, before training
  double final_loss = 0;
  double final_accuracy = 0;
  std::vector<double> loss_curve;  // mean minibatch training loss per iteration
};

template <typename T>
std::pair<double, double> evaluate(Model<T>& model, const std::vector<LabeledSample<T>>& data) {
  if (data.empty()) throw ContractError("evaluation set is empty");
  double loss_sum = 0;
  int correct = 0;
  for (const LabeledSample<T>& s : data) {
    const Tensor<T> logits = model.forward(s.image);
    loss_sum += static_cast<double>(softmax_cross_entropy(logits, s.label).first);
    int best = 0;
    for (int i = 1; i < logits.channels(); ++i)
      if (logits.data()[i] > logits.data()[best]) best = i;
    if (best == s.label) ++correct;
  }
  return {loss_sum / data.size(), static_cast<double>(correct) / data.size()};
}

// Plain SGD over uniformly drawn samples. Deterministic given cfg.seed; the
// timed region covers exactly the training loop.
template <typename T>
TrainReport train(Model<T>& model, const std::vector<LabeledSample<T>>& train_set,
                  const std::vector<LabeledSample<T>>& eval_set, const TrainConfig& cfg) {
  if (train_set.empty()) throw ContractError("training set is empty");
  if (cfg.iterations < 0) throw ContractError("iteration count must be >= 0");
  if (cfg.minibatch < 1) throw ContractError("minibatch must be >= 1");
  if (cfg.learning_rate < 0) throw ContractError("learning rate must be >= 0");

  TrainReport report;
  report.model_name = model.name;
  report.iterations = cfg.iterations;
  report.minibatch = cfg.minibatch;
  report.learning_rate = cfg.learning_rate;
  report.seed = cfg.seed;
  report.loss_curve.reserve(cfg.iterations);

  auto [loss0, acc0] = evaluate(model, eval_set);
  (void)acc0;
  report.initial_loss = loss0;

  std::mt19937_64 rng(cfg.seed);
  const T lr = static_cast<T>(cfg.learning_rate);
  const T inv_batch = T(1) / static_cast<T>(cfg.minibatch);

  const auto t0 = std::chrono::steady_clock::now();
  for (int it = 0; it < cfg.iterations; ++it) {
    model.zero_grads();
    double batch_loss = 0;
    for (int b = 0; b < cfg.minibatch; ++b) {
      const LabeledSample<T>& s = train_set[rng() % train_set.size()];
      const Tensor<T> logits = model.forward(s.image);
      auto [loss, grad] = softmax_cross_entropy(logits, s.label);
      batch_loss += static_cast<double>(loss);
      if (cfg.minibatch > 1)
        for (std::size_t i = 0; i < grad.size(); ++i) grad.data()[i] *= inv_batch;
      model.backward(grad);
    }
    model.sgd_step(lr);
    report.loss_curve.push_back(batch_loss / cfg.minibatch);
  }
  const auto t1 = std::chrono::steady_clock::now();
  report.wall_seconds = std::chrono::duration<double>(t1 - t0).count();

  auto [loss1, acc1] = evaluate(model, eval_set);
  report.final_loss = loss1;
  report.final_accuracy = acc1;
  return report;
}

// ---------------------------------------------------------------------------
// Emission
// ---------------------------------------------------------------------------

inline std::string train_report_to_json(const TrainReport& r) {
  char buf[64];
  std::string out = "{\n";
  out += "  \"model\": \"" + r.model_name + "\",\n";
  out += "  \"iterations\": " + std::to_string(r.iterations) + ",\n";
  out += "  \"minibatch\": " + std::to_string(r.minibatch) + ",\n";
  std::snprintf(buf, sizeof buf, "%.6g", r.learning_rate);
  out += "  \"learning_rate\": " + std::string(buf) + ",\n";
  out += "  \"seed\": " + std::to_string(r.seed) + ",\n";
  std::snprintf(buf, sizeof buf, "%.6f", r.wall_seconds);
  out += "  \"wall_seconds\": " + std::string(buf) + ",\n";
  std::snprintf(buf, sizeof buf, "%.8f", r.initial_loss);
  out += "  \"initial_loss\": " + std::string(buf) + ",\n";
  std::snprintf(buf, sizeof buf, "%.8f", r.final_loss);
  out += "  \"final_loss\": " + std::string(buf) + ",\n";
  std::snprintf(buf, sizeof buf, "%.4f", r.final_accuracy);
  out += "  \"final_accuracy\": " + std::string(buf) + ",\n";
  out += "  \"loss_curve\": [";
  for (std::size_t i = 0; i < r.loss_curve.size(); ++i) {
    if (i) out += ", ";
    std::snprintf(buf, sizeof buf, "%.6f", r.loss_curve[i]);
    out += buf;
  }
  out += "]\n}\n";
  return out;
}

}  // namespace segconv::net
