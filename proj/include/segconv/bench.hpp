#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "segconv/analysis.hpp"
#include "segconv/errors.hpp"
#include "segconv/fused_tconv.hpp"
#include "segconv/reference_ops.hpp"

namespace segconv {

enum class BenchVariant { naive, fused, fused_parallel };

inline const char* to_string(BenchVariant v) {
  switch (v) {
    case BenchVariant::naive: return "naive";
    case BenchVariant::fused: return "fused";
    default: return "fused_parallel";
  }
}

struct BenchRecord {
  std::string label;
  LayerShape shape;
  BenchVariant variant = BenchVariant::naive;
  int workers = 1;
  double wall_seconds = 0;  // median over repetitions
  int repetitions = 0;
  double speedup_vs_naive = 1.0;
};

namespace detail {

inline double median(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

template <typename F>
double time_median(F&& fn, int reps) {
  fn();  // warmup, result discarded
  std::vector<double> times;
  times.reserve(reps);
  for (int i = 0; i < reps; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    times.push_back(std::chrono::duration<double>(t1 - t0).count());
  }
  return median(std::move(times));
}

}  // namespace detail

// Times naive / fused / fused_parallel on seeded random data at one shape.
// Protocol: monotonic clock, one warmup run, median of `reps` measured runs.
// Segregation is done once outside the timed region (a per-layer setup cost);
// the fused timings do include the per-call padding.
inline std::vector<BenchRecord> bench_layer(const std::string& label, const LayerShape& shape,
                                            int reps, int workers, std::uint64_t seed) {
  if (reps < 3) throw ContractError("benchmark repetitions must be >= 3");
  if (workers < 1) throw ContractError("worker count must be >= 1");
  const TConvGeometry geom = geometry_of(shape);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> dist(-1.0f, 1.0f);
  std::vector<float> in_data(static_cast<std::size_t>(shape.n_in) * shape.n_in * shape.cin);
  for (float& v : in_data) v = dist(rng);
  std::vector<float> k_data(static_cast<std::size_t>(shape.kh) * shape.kw * shape.cin * shape.cout);
  for (float& v : k_data) v = dist(rng);
  const Tensor<float> input =
      Tensor<float>::from_data(shape.n_in, shape.n_in, shape.cin, std::move(in_data));
  const Kernel<float> kernel =
      Kernel<float>::from_data(shape.kh, shape.kw, shape.cin, shape.cout, std::move(k_data));
  const SubKernelSet<float> sks = segregate(kernel, shape.p_orig);

  const double t_naive =
      detail::time_median([&] { transpose_conv_naive(input, kernel, shape.p_orig); }, reps);
  const double t_fused =
      detail::time_median([&] { transpose_conv_fused(input, sks, geom); }, reps);
  const double t_par = detail::time_median(
      [&] { transpose_conv_fused_parallel(input, sks, geom, workers); }, reps);

  auto record = [&](BenchVariant v, int w, double t) {
    BenchRecord r;
    r.label = label;
    r.shape = shape;
    r.variant = v;
    r.workers = w;
    r.wall_seconds = t;
    r.repetitions = reps;
    r.speedup_vs_naive = t_naive / t;
    return r;
  };
  return {record(BenchVariant::naive, 1, t_naive), record(BenchVariant::fused, 1, t_fused),
          record(BenchVariant::fused_parallel, workers, t_par)};
}

// The flower-photo benchmark setup: 224x224 RGB input, one output channel,
// square kernels 3/4/5 with padding n-2.
inline std::vector<std::pair<std::string, LayerShape>> flowers_shapes() {
  std::vector<std::pair<std::string, LayerShape>> out;
  for (int n : {3, 4, 5})
    out.emplace_back("flowers-" + std::to_string(n) + "x" + std::to_string(n),
                     LayerShape{224, 3, 1, n, n, n - 2});
  return out;
}

// GAN generator preset: every transpose-conv layer of the named model.
inline std::vector<std::pair<std::string, LayerShape>> gan_shapes(const std::string& id) {
  const GanModel& m = gan_model(id);
  std::vector<std::pair<std::string, LayerShape>> out;
  for (const GanLayer& gl : m.layers)
    out.emplace_back(std::string(m.id) + "-L" + std::to_string(gl.layer), gl.shape);
  return out;
}

// ---------------------------------------------------------------------------
// Emission
// ---------------------------------------------------------------------------

inline std::string bench_to_csv(const std::vector<BenchRecord>& records) {
  std::string out =
      "label,input_shape,kernel_shape,padding,variant,workers,wall_seconds,repetitions,"
      "speedup_vs_naive\n";
  char buf[64];
  for (const BenchRecord& r : records) {
    out += detail::csv_field(r.label);
    out += ',';
    out += detail::shape_in_string(r.shape);
    out += ',';
    out += detail::shape_kernel_string(r.shape);
    out += ',';
    out += std::to_string(r.shape.p_orig);
    out += ',';
    out += to_string(r.variant);
    out += ',';
    out += std::to_string(r.workers);
    out += ',';
    std::snprintf(buf, sizeof buf, "%.9f", r.wall_seconds);
    out += buf;
    out += ',';
    out += std::to_string(r.repetitions);
    out += ',';
    std::snprintf(buf, sizeof buf, "%.4f", r.speedup_vs_naive);
    out += buf;
    out += '\n';
  }
  return out;
}

inline std::string bench_to_json(const std::vector<BenchRecord>& records) {
  std::string out = "[\n";
  char buf[64];
  bool first = true;
  for (const BenchRecord& r : records) {
    if (!first) out += ",\n";
    first = false;
    out += "  {\"label\": " + detail::json_string(r.label);
    out += ", \"input_shape\": " + detail::json_string(detail::shape_in_string(r.shape));
    out += ", \"kernel_shape\": " + detail::json_string(detail::shape_kernel_string(r.shape));
    out += ", \"padding\": " + std::to_string(r.shape.p_orig);
    out += ", \"variant\": " + detail::json_string(to_string(r.variant));
    out += ", \"workers\": " + std::to_string(r.workers);
    std::snprintf(buf, sizeof buf, "%.9f", r.wall_seconds);
    out += ", \"wall_seconds\": ";
    out += buf;
    out += ", \"repetitions\": " + std::to_string(r.repetitions);
    std::snprintf(buf, sizeof buf, "%.4f", r.speedup_vs_naive);
    out += ", \"speedup_vs_naive\": ";
    out += buf;
    out += "}";
  }
  out += "\n]\n";
  return out;
}

}  // namespace segconv
