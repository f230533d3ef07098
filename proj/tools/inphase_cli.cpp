// Command-line front end: simulate, train, denoise, eval, noise-est.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "inphase/errors.hpp"
#include "inphase/imagecore.hpp"
#include "inphase/io.hpp"
#include "inphase/metrics.hpp"
#include "inphase/pipeline.hpp"
#include "inphase/simulate.hpp"

namespace {

constexpr int kExitInvalid = 2;
constexpr int kExitNumerical = 3;

using namespace inphase;

/// "auto" -> nullopt, otherwise a finite number.
std::optional<double> parse_auto(const std::string& text, const std::string& what) {
  if (text == "auto") return std::nullopt;
  try {
    std::size_t pos = 0;
    const double v = std::stod(text, &pos);
    if (pos != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw InvalidInput(what + " must be a number or 'auto', got '" + text + "'");
  }
}

void report_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

struct SimulateArgs {
  std::string kind;
  std::vector<std::size_t> size{100, 100};
  double sigma = 0.5;
  std::uint64_t seed = 0;
  std::uint64_t surface_seed = 0;
  std::string amplitude = "mountains";
  std::string out_truth;
  std::string out_noisy;
  std::string manifest;
};

struct TrainArgs {
  std::vector<std::string> inputs;
  std::size_t components = kDefaultPreLearnedComponents;
  std::string sigma = "0";
  std::uint64_t seed = 0;
  std::size_t patch_side = 10;
  int max_iters = EmOptions{}.max_iters;
  double rel_tol = EmOptions{}.rel_tol;
  std::string out_model;
};

struct DenoiseArgs {
  std::string input;
  std::string model;
  bool self_learn = false;
  std::size_t components = kDefaultSelfLearnedComponents;
  std::string sigma = "auto";
  std::size_t patch_side = 10;
  std::string nl_h = "auto";
  std::size_t nl_window = 11;
  std::uint64_t seed = 0;
  int max_iters = EmOptions{}.max_iters;
  double rel_tol = EmOptions{}.rel_tol;
  std::string out_phase;
  std::string out_complex;
  std::string export_png;
};

struct EvalArgs {
  std::string est;
  std::string truth;
  std::string est_unwrapped;
  std::string report;
};

int run_simulate(const SimulateArgs& a) {
  const SurfaceKind kind = simulate::parse_surface(a.kind);
  const SurfaceSpec surface = simulate::default_surface(kind, a.size[0], a.size[1], a.surface_seed);
  ObservationSpec obs;
  obs.sigma = a.sigma;
  obs.seed = a.seed;
  if (a.amplitude == "mountains") {
    obs.amplitude = AmplitudeModel::mountains(a.size[0], a.size[1], a.surface_seed);
  } else if (a.amplitude != "constant") {
    throw InvalidInput("--amplitude must be 'constant' or 'mountains'");
  }
  const SimulatedPair pair = simulate::simulate_pair(surface, obs);
  io::write_phase_raster(a.out_truth, pair.truth);
  io::write_cimg(a.out_noisy, pair.noisy);
  if (!a.manifest.empty()) io::write_text(a.manifest, simulate::manifest(surface, obs));
  return 0;
}

int run_train(const TrainArgs& a) {
  std::vector<ComplexImage> images;
  for (const auto& f : a.inputs) images.push_back(io::read_cimg(f));
  EmOptions em;
  em.seed = a.seed;
  em.max_iters = a.max_iters;
  em.rel_tol = a.rel_tol;
  const auto result = pipeline::train(images, a.patch_side, a.components, em, parse_auto(a.sigma, "--sigma"));
  report_warnings(result.em.warnings);
  io::write_cmog(a.out_model, result.model);
  std::cout << "patches=" << result.pooled_patches << '\n'
            << "sigma=" << result.sigma << '\n'
            << "iterations=" << result.em.iterations << '\n'
            << "converged=" << (result.em.converged ? 1 : 0) << '\n'
            << "log_likelihood=" << metrics::format_db(result.em.log_likelihood.back()) << '\n';
  return 0;
}

int run_denoise(const DenoiseArgs& a) {
  if (a.self_learn == !a.model.empty()) throw InvalidInput("give exactly one of --model or --self-learn");
  const ComplexImage z = io::read_cimg(a.input);
  DenoiseConfig cfg;
  cfg.patch_side = a.patch_side;
  cfg.components = a.components;
  cfg.sigma = parse_auto(a.sigma, "--sigma");
  cfg.nl_h = parse_auto(a.nl_h, "--nl-h");
  cfg.nl_window = a.nl_window;
  cfg.em.seed = a.seed;
  cfg.em.max_iters = a.max_iters;
  cfg.em.rel_tol = a.rel_tol;
  if (!a.model.empty()) cfg.mode = PreLearned{io::read_cmog(a.model)};

  const DenoiseResult r = pipeline::denoise_image(z, cfg);
  report_warnings(r.warnings);
  io::write_phase_raster(a.out_phase, r.phase);
  io::write_cimg(a.out_complex, r.denoised);
  if (!a.export_png.empty()) io::write_phase_png(a.export_png, r.phase);
  std::cout << "sigma=" << r.sigma << '\n' << "nl_h=" << r.nl_h << '\n';
  return 0;
}

int run_eval(const EvalArgs& a) {
  const PhaseImage est = io::read_phase_raster(a.est);
  const PhaseImage truth = io::read_phase_raster(a.truth);
  std::optional<PhaseImage> unwrapped;
  if (!a.est_unwrapped.empty()) unwrapped = io::read_phase_raster(a.est_unwrapped);
  const MetricReport report = metrics::evaluate(est, truth, unwrapped ? &*unwrapped : nullptr);
  io::write_text(a.report, report.to_key_value());
  std::cout << report.to_json() << '\n';
  return 0;
}

int run_noise_est(const std::string& input) {
  const ComplexImage z = io::read_cimg(input);
  std::cout.precision(17);
  std::cout << "sigma=" << imagecore::estimate_noise_sigma(z) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interferometric phase denoising with complex Gaussian mixtures and NL averaging"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Generate a synthetic surface and its noisy observation");
  sim_cmd->add_option("--kind", sim.kind, "truncated_gaussian|sinusoidal|discontinuous_sinusoidal|mountains|shear_planes")
      ->required();
  sim_cmd->add_option("--size", sim.size, "Height and width")->expected(2);
  sim_cmd->add_option("--sigma", sim.sigma, "Noise standard deviation")->check(CLI::NonNegativeNumber);
  sim_cmd->add_option("--seed", sim.seed, "Noise seed");
  sim_cmd->add_option("--surface-seed", sim.surface_seed, "Seed of the random mountain surfaces");
  sim_cmd->add_option("--amplitude", sim.amplitude, "constant|mountains");
  sim_cmd->add_option("--out-truth", sim.out_truth, "Absolute phase raster")->required();
  sim_cmd->add_option("--out-noisy", sim.out_noisy, "Noisy CIMG")->required();
  sim_cmd->add_option("--manifest", sim.manifest, "Dataset manifest (key=value)");

  TrainArgs tr;
  auto* train_cmd = app.add_subcommand("train", "Fit a mixture prior from one or more CIMG images");
  train_cmd->add_option("--inputs", tr.inputs, "CIMG inputs")->required()->expected(1, -1);
  train_cmd->add_option("--components", tr.components, "Mixture components");
  train_cmd->add_option("--sigma", tr.sigma, "Noise std of the inputs, or 'auto'");
  train_cmd->add_option("--seed", tr.seed, "EM initialization seed");
  train_cmd->add_option("--patch-side", tr.patch_side, "Patch side in pixels");
  train_cmd->add_option("--max-iters", tr.max_iters, "EM iteration cap");
  train_cmd->add_option("--rel-tol", tr.rel_tol, "EM relative log-likelihood tolerance");
  train_cmd->add_option("--out-model", tr.out_model, "CMOG output")->required();

  DenoiseArgs dn;
  auto* denoise_cmd = app.add_subcommand("denoise", "Denoise a CIMG phase image");
  denoise_cmd->add_option("--input", dn.input, "Noisy CIMG")->required();
  auto* model_opt = denoise_cmd->add_option("--model", dn.model, "Pre-learned CMOG model");
  auto* self_opt = denoise_cmd->add_flag("--self-learn", dn.self_learn, "Learn the prior from the input");
  model_opt->excludes(self_opt);
  denoise_cmd->add_option("--components", dn.components, "Components when self-learning");
  denoise_cmd->add_option("--sigma", dn.sigma, "Noise std, or 'auto'");
  denoise_cmd->add_option("--patch-side", dn.patch_side, "Patch side in pixels");
  denoise_cmd->add_option("--nl-h", dn.nl_h, "NL bandwidth, or 'auto' for 0.48 sigma");
  denoise_cmd->add_option("--nl-window", dn.nl_window, "NL window side in anchors (odd)");
  denoise_cmd->add_option("--seed", dn.seed, "EM initialization seed");
  denoise_cmd->add_option("--max-iters", dn.max_iters, "EM iteration cap");
  denoise_cmd->add_option("--rel-tol", dn.rel_tol, "EM relative log-likelihood tolerance");
  denoise_cmd->add_option("--out-phase", dn.out_phase, "Wrapped phase raster")->required();
  denoise_cmd->add_option("--out-complex", dn.out_complex, "Denoised CIMG")->required();
  denoise_cmd->add_option("--export-png", dn.export_png, "Grayscale PNG of the wrapped phase");

  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("eval", "Score a wrapped estimate against the true phase");
  eval_cmd->add_option("--est", ev.est, "Wrapped estimate raster")->required();
  eval_cmd->add_option("--truth", ev.truth, "Absolute phase raster")->required();
  eval_cmd->add_option("--est-unwrapped", ev.est_unwrapped, "Externally unwrapped estimate raster");
  eval_cmd->add_option("--report", ev.report, "key=value report")->required();

  std::string noise_input;
  auto* noise_cmd = app.add_subcommand("noise-est", "Estimate the noise std of a CIMG image");
  noise_cmd->add_option("--input", noise_input, "CIMG input")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalid;
  }

  try {
    if (*sim_cmd) return run_simulate(sim);
    if (*train_cmd) return run_train(tr);
    if (*denoise_cmd) return run_denoise(dn);
    if (*eval_cmd) return run_eval(ev);
    if (*noise_cmd) return run_noise_est(noise_input);
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitInvalid;
}
