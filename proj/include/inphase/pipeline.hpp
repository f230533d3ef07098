#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "inphase/imagecore.hpp"
#include "inphase/mog.hpp"
#include "inphase/nlavg.hpp"

namespace inphase {

struct SelfLearned {};
struct PreLearned {
  CleanMixture model;
};
using TrainingMode = std::variant<SelfLearned, PreLearned>;

inline constexpr std::size_t kDefaultSelfLearnedComponents = 15;
inline constexpr std::size_t kDefaultPreLearnedComponents = 30;
inline constexpr double kNlBandwidthFactor = 0.48;
inline constexpr double kNlBandwidthFloor = 1e-6;

struct DenoiseConfig {
  std::size_t patch_side = 10;
  /// Used only when self-learning.
  std::size_t components = kDefaultSelfLearnedComponents;
  /// Known noise std, or nullopt to estimate it from first differences.
  std::optional<double> sigma;
  /// NL bandwidth, or nullopt for max(0.48 sigma, 1e-6).
  std::optional<double> nl_h;
  std::size_t nl_window = 11;
  EmOptions em;
  TrainingMode mode = SelfLearned{};

  void validate() const;
};

struct TrainResult {
  CleanMixture model;
  EmResult em;
  double sigma = 0.0;
  std::size_t pooled_patches = 0;
};

struct DenoiseResult {
  PhaseImage phase;          // wrapped estimate after NL averaging
  ComplexImage denoised;     // aggregated complex estimate after NL averaging
  ComplexImage mmse_only;    // aggregated MMSE estimate, before NL averaging
  double sigma = 0.0;
  double nl_h = 0.0;
  std::vector<double> em_trace;
  std::vector<std::string> warnings;
};

namespace pipeline {

/// Pools patches from all images, fits the mixture and removes sigma^2 from every
/// covariance. With sigma nullopt each image's noise is estimated and the
/// patch-weighted RMS of those estimates is used.
TrainResult train(const std::vector<ComplexImage>& images, std::size_t patch_side,
                  std::size_t components, const EmOptions& em, std::optional<double> sigma);

DenoiseResult denoise_image(const ComplexImage& z, const DenoiseConfig& cfg);

}  // namespace pipeline
}  // namespace inphase
