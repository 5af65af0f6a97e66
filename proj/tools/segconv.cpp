// segconv CLI: oracle-equivalence fuzzing, benchmarks, op-count reports,
// image-level transpose convolution, and the two-model training demo.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "segconv.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

// SEGCONV_THREADS supplies the default worker count when --workers is absent.
int default_workers() {
  const char* env = std::getenv("SEGCONV_THREADS");
  if (env == nullptr || *env == '\0') return 1;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (end == nullptr || *end != '\0' || v < 1 || v > 4096)
    throw segconv::ContractError("SEGCONV_THREADS must be a positive integer, got '" +
                                 std::string(env) + "'");
  return static_cast<int>(v);
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::trunc);
  if (!out) throw segconv::IoError("cannot open " + out_path + " for writing");
  out << text;
  if (!out) throw segconv::IoError("write failure on " + out_path);
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

struct VerifyArgs {
  segconv::VerifyOptions opt;
};

int cmd_verify(const VerifyArgs& args) {
  if (args.opt.cases == 0)
    std::cout << "warning: --cases 0, nothing to verify\n";
  const segconv::VerifyResult res = segconv::run_verify(args.opt);
  std::cout << "verify: " << res.cases_run << " cases, " << res.failures << " failures\n";
  if (!res.ok()) {
    const segconv::VerifyFailure& f = *res.first_failure;
    std::cout << "first counterexample: case " << f.case_index << ", input " << f.n << "x" << f.n
              << "x" << f.cin << ", kernel " << f.k << "x" << f.k << "x" << f.cin << "x" << f.cout
              << ", padding " << f.p << ", seed " << f.seed << "\n  " << f.detail << "\n";
    return kExitVerifyFail;
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// bench
// ---------------------------------------------------------------------------

struct BenchArgs {
  std::string preset = "flowers";
  int size = 0, kernel = 0, padding = -1, cin = 1, cout = 1;
  int workers = 0;  // 0: take default_workers()
  int reps = 5;
  std::uint64_t seed = 42;
  std::string format = "csv";
  std::string out_path;
};

int cmd_bench(const BenchArgs& args) {
  std::vector<std::pair<std::string, segconv::LayerShape>> shapes;
  if (args.preset == "flowers") {
    shapes = segconv::flowers_shapes();
  } else if (args.preset.rfind("gan:", 0) == 0) {
    shapes = segconv::gan_shapes(args.preset.substr(4));
  } else if (args.preset == "custom") {
    if (args.size < 1 || args.kernel < 1 || args.padding < 0)
      throw segconv::ContractError(
          "custom preset needs --size, --kernel and --padding (with --cin/--cout optional)");
    shapes.emplace_back("custom", segconv::LayerShape{args.size, args.cin, args.cout, args.kernel,
                                                      args.kernel, args.padding});
  } else {
    throw segconv::ContractError("unknown preset '" + args.preset +
                                 "' (expected flowers, gan:<model>, or custom)");
  }

  const int workers = args.workers > 0 ? args.workers : default_workers();
  std::vector<segconv::BenchRecord> records;
  for (const auto& [label, shape] : shapes) {
    std::cerr << "bench: " << label << " (input " << shape.n_in << "x" << shape.n_in << "x"
              << shape.cin << ", kernel " << shape.kh << "x" << shape.kw << ", p=" << shape.p_orig
              << ")\n";
    for (segconv::BenchRecord& r : segconv::bench_layer(label, shape, args.reps, workers, args.seed))
      records.push_back(std::move(r));
  }
  emit(args.format == "json" ? segconv::bench_to_json(records) : segconv::bench_to_csv(records),
       args.out_path);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// flops
// ---------------------------------------------------------------------------

int cmd_flops(const std::string& format, const std::string& out_path) {
  const std::vector<segconv::OpReportRow> rows = segconv::gan_opcount_report();
  emit(format == "json" ? segconv::report_to_json(rows) : segconv::report_to_csv(rows), out_path);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// apply
// ---------------------------------------------------------------------------

struct ApplyArgs {
  std::string input;
  std::string kernel_spec = "ones";
  int kernel_size = 5;
  int padding = 2;
  std::string variant = "fused";
  int workers = 0;
  std::string out_path = "out.sgc";
  std::string out_image;
};

// Presets are channel-preserving (each image channel filtered on its own);
// a kernel tensor file (kh x kw x cin) mixes all channels into one.
segconv::Kernel<float> build_apply_kernel(const ApplyArgs& args, int channels) {
  const std::string& spec = args.kernel_spec;
  const int n = args.kernel_size;
  if (spec == "ones" || spec == "gaussian" || spec.rfind("random:", 0) == 0) {
    if (n < 1) throw segconv::ContractError("--kernel-size must be >= 1");
    std::vector<float> data(static_cast<std::size_t>(n) * n * channels * channels, 0.0f);
    segconv::Kernel<float> k =
        segconv::Kernel<float>::from_data(n, n, channels, channels, std::move(data));
    if (spec == "ones") {
      const float w = 1.0f / static_cast<float>(n * n);
      for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v)
          for (int ch = 0; ch < channels; ++ch) k(u, v, ch, ch) = w;
    } else if (spec == "gaussian") {
      const double sigma = std::max(0.5, n / 3.0);
      const double mid = (n - 1) / 2.0;
      double sum = 0;
      std::vector<double> g(static_cast<std::size_t>(n) * n);
      for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v) {
          const double d2 = (u - mid) * (u - mid) + (v - mid) * (v - mid);
          g[u * n + v] = std::exp(-d2 / (2 * sigma * sigma));
          sum += g[u * n + v];
        }
      for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v)
          for (int ch = 0; ch < channels; ++ch)
            k(u, v, ch, ch) = static_cast<float>(g[u * n + v] / sum);
    } else {
      std::uint64_t seed = 0;
      try {
        seed = std::stoull(spec.substr(7));
      } catch (const std::exception&) {
        throw segconv::ContractError("bad kernel preset '" + spec +
                                     "': expected random:<integer seed>");
      }
      std::mt19937_64 rng(seed);
      std::uniform_real_distribution<float> dist(-0.5f, 0.5f);
      for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v)
          for (int ch = 0; ch < channels; ++ch)
            for (int f = 0; f < channels; ++f) k(u, v, ch, f) = dist(rng);
    }
    return k;
  }
  // Anything else names a tensor file: kh x kw x cin, one output channel.
  const segconv::Tensor<float> t = segconv::load_tensor<float>(spec);
  if (t.channels() != channels)
    throw segconv::ContractError("kernel file has " + std::to_string(t.channels()) +
                                 " channels, image has " + std::to_string(channels));
  std::vector<float> data(t.data(), t.data() + t.size());
  return segconv::Kernel<float>::from_data(t.height(), t.width(), t.channels(), 1,
                                           std::move(data));
}

int cmd_apply(const ApplyArgs& args) {
  const segconv::Tensor<float> image = segconv::image::load_pnm<float>(args.input);
  if (image.height() != image.width())
    throw segconv::ContractError("transpose conv expects a square image, got " +
                                 std::to_string(image.height()) + "x" +
                                 std::to_string(image.width()));
  const segconv::Kernel<float> kernel = build_apply_kernel(args, image.channels());

  segconv::Tensor<float> result;
  if (args.variant == "naive") {
    result = segconv::transpose_conv_naive(image, kernel, args.padding);
  } else if (args.variant == "fused") {
    result = segconv::transpose_conv_fused(image, kernel, args.padding);
  } else if (args.variant == "fused_parallel") {
    const segconv::TConvGeometry geom =
        segconv::tconv_geometry(image.height(), kernel.kh(), kernel.kw(), args.padding);
    const int workers = args.workers > 0 ? args.workers : default_workers();
    result = segconv::transpose_conv_fused_parallel(image, segconv::segregate(kernel, args.padding),
                                                    geom, workers);
  } else {
    throw segconv::ContractError("unknown variant '" + args.variant +
                                 "' (naive, fused, fused_parallel)");
  }

  segconv::save_tensor(result, args.out_path);
  std::cout << "apply: " << image.height() << "x" << image.width() << "x" << image.channels()
            << " -> " << result.height() << "x" << result.width() << "x" << result.channels()
            << ", tensor written to " << args.out_path << "\n";
  if (!args.out_image.empty()) {
    segconv::image::save_pnm8(result, args.out_image);
    std::cout << "apply: clamped 8-bit image written to " << args.out_image << "\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// train-demo
// ---------------------------------------------------------------------------

struct TrainArgs {
  segconv::net::TrainConfig cfg;
  std::string images_path, labels_path;
  std::string out_path;
};

int cmd_train_demo(const TrainArgs& args) {
  using Sample = segconv::net::LabeledSample<float>;
  std::vector<Sample> train_set, eval_set;
  if (!args.images_path.empty()) {
    if (args.labels_path.empty())
      throw segconv::ContractError("--images needs a matching --labels file");
    std::vector<Sample> all =
        segconv::net::load_idx_dataset<float>(args.images_path, args.labels_path);
    if (all.size() < 20)
      throw segconv::ContractError("dataset too small: need at least 20 samples");
    if (all[0].image.height() != 28 || all[0].image.width() != 28)
      throw segconv::ContractError("demo model expects 28x28 images");
    const std::size_t eval_n = std::min<std::size_t>(all.size() / 5, 200);
    eval_set.assign(all.end() - eval_n, all.end());
    train_set.assign(all.begin(), all.end() - eval_n);
  } else {
    train_set = segconv::net::make_synth_digits<float>(40, 10, args.cfg.seed);
    eval_set = segconv::net::make_synth_digits<float>(10, 10, args.cfg.seed + 1);
  }

  segconv::net::Model<float> conventional =
      segconv::net::build_conventional_model<float>(args.cfg.seed);
  segconv::net::Model<float> proposed = segconv::net::build_proposed_model<float>(args.cfg.seed);

  std::cerr << "train-demo: conventional model, " << args.cfg.iterations << " iterations\n";
  const segconv::net::TrainReport rc =
      segconv::net::train(conventional, train_set, eval_set, args.cfg);
  std::cerr << "train-demo: proposed model, " << args.cfg.iterations << " iterations\n";
  const segconv::net::TrainReport rp = segconv::net::train(proposed, train_set, eval_set, args.cfg);

  const double ratio = rp.wall_seconds > 0 ? rc.wall_seconds / rp.wall_seconds : 0.0;
  char buf[64];
  std::string json = "{\n\"conventional\": " + segconv::net::train_report_to_json(rc) +
                     ",\n\"proposed\": " + segconv::net::train_report_to_json(rp);
  std::snprintf(buf, sizeof buf, "%.4f", ratio);
  json += ",\n\"wall_ratio_conventional_over_proposed\": " + std::string(buf) + "\n}\n";
  emit(json, args.out_path);
  std::cerr << "train-demo: conventional " << rc.wall_seconds << " s, proposed " << rp.wall_seconds
            << " s, ratio " << ratio << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"2x transpose convolution via parity sub-kernels: verification, benchmarks, "
               "op accounting, image pipeline, training demo"};
  app.require_subcommand(1);

  VerifyArgs vargs;
  CLI::App* verify = app.add_subcommand("verify", "fuzz fused vs reference oracle, exact compare");
  verify->add_option("--cases", vargs.opt.cases, "number of random cases")->check(CLI::NonNegativeNumber);
  verify->add_option("--seed", vargs.opt.seed, "rng seed");
  verify->add_option("--n-min", vargs.opt.n_min);
  verify->add_option("--n-max", vargs.opt.n_max);
  verify->add_option("--k-min", vargs.opt.k_min);
  verify->add_option("--k-max", vargs.opt.k_max);
  verify->add_option("--p-min", vargs.opt.p_min);
  verify->add_option("--p-max", vargs.opt.p_max);
  verify->add_option("--c-min", vargs.opt.c_min);
  verify->add_option("--c-max", vargs.opt.c_max);
  verify->add_option("--inject-fault", vargs.opt.inject_fault_case)->group("");

  BenchArgs bargs;
  CLI::App* bench = app.add_subcommand("bench", "time naive vs fused vs parallel");
  bench->add_option("--preset", bargs.preset, "flowers | gan:<dcgan|artgan|gpgan|ebgan> | custom");
  bench->add_option("--size", bargs.size, "custom: input size N");
  bench->add_option("--kernel", bargs.kernel, "custom: kernel size n");
  bench->add_option("--padding", bargs.padding, "custom: padding P");
  bench->add_option("--cin", bargs.cin, "custom: input channels");
  bench->add_option("--cout", bargs.cout, "custom: output channels");
  bench->add_option("--workers", bargs.workers, "worker threads for fused_parallel");
  bench->add_option("--reps", bargs.reps, "measured repetitions (>= 3)");
  bench->add_option("--seed", bargs.seed, "rng seed for input/kernel data");
  bench->add_option("--format", bargs.format, "csv | json")
      ->check(CLI::IsMember({"csv", "json"}));
  bench->add_option("--out", bargs.out_path, "write report to file instead of stdout");

  std::string flops_format = "csv", flops_out;
  CLI::App* flops = app.add_subcommand("flops", "analytical op-count report for GAN layers");
  flops->add_option("--format", flops_format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
  flops->add_option("--out", flops_out, "write report to file instead of stdout");

  ApplyArgs aargs;
  CLI::App* apply = app.add_subcommand("apply", "transpose-convolve a PGM/PPM image");
  apply->add_option("--input", aargs.input, "input image (P2/P3/P5/P6)")->required();
  apply->add_option("--kernel", aargs.kernel_spec,
                    "ones | gaussian | random:<seed> | path to kernel tensor file");
  apply->add_option("--kernel-size", aargs.kernel_size, "preset kernel size n");
  apply->add_option("--padding", aargs.padding, "padding P");
  apply->add_option("--variant", aargs.variant, "naive | fused | fused_parallel");
  apply->add_option("--workers", aargs.workers, "workers for fused_parallel");
  apply->add_option("--out", aargs.out_path, "output tensor file");
  apply->add_option("--out-image", aargs.out_image, "also write clamped 8-bit PGM/PPM");

  TrainArgs targs;
  CLI::App* train = app.add_subcommand("train-demo", "train conventional vs fused demo models");
  train->add_option("--iterations", targs.cfg.iterations)->check(CLI::NonNegativeNumber);
  train->add_option("--minibatch", targs.cfg.minibatch);
  train->add_option("--lr", targs.cfg.learning_rate, "SGD learning rate");
  train->add_option("--seed", targs.cfg.seed, "init + sampling seed");
  train->add_option("--images", targs.images_path, "IDX image file (synthetic digits if absent)");
  train->add_option("--labels", targs.labels_path, "IDX label file");
  train->add_option("--out", targs.out_path, "write JSON reports to file instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (verify->parsed()) return cmd_verify(vargs);
    if (bench->parsed()) return cmd_bench(bargs);
    if (flops->parsed()) return cmd_flops(flops_format, flops_out);
    if (apply->parsed()) return cmd_apply(aargs);
    if (train->parsed()) return cmd_train_demo(targs);
  } catch (const segconv::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const segconv::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const segconv::ShapeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const segconv::ContractError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitVerifyFail;
  }
  return kExitOk;
}
