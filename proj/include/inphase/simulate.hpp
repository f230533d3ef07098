#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "inphase/imagecore.hpp"

namespace inphase {

enum class SurfaceKind {
  TruncatedGaussian,
  Sinusoidal,
  DiscontinuousSinusoidal,
  Mountains,
  ShearPlanes,
};

inline constexpr std::array<SurfaceKind, 5> kAllSurfaces = {
    SurfaceKind::TruncatedGaussian, SurfaceKind::Sinusoidal, SurfaceKind::DiscontinuousSinusoidal,
    SurfaceKind::Mountains, SurfaceKind::ShearPlanes};

struct SurfaceSpec {
  SurfaceKind kind = SurfaceKind::TruncatedGaussian;
  std::size_t height = 100;
  std::size_t width = 100;
  /// Peak absolute-phase range in radians.
  double amplitude_scale = 14.0;
  /// Only `Mountains` is random.
  std::uint64_t seed = 0;

  void validate() const;
};

/// Either a constant amplitude or a surface min-max rescaled to [low, high].
struct AmplitudeModel {
  double constant = 1.0;
  std::optional<SurfaceSpec> surface;
  double low = 0.2;
  double high = 1.0;

  static AmplitudeModel unit() { return {}; }
  static AmplitudeModel mountains(std::size_t height, std::size_t width, std::uint64_t seed);
};

struct ObservationSpec {
  double sigma = 0.0;
  AmplitudeModel amplitude;
  std::uint64_t seed = 0;
};

struct SimulatedPair {
  PhaseImage truth;  // absolute (unwrapped) phase
  ComplexImage noisy;
};

namespace simulate {

std::string_view surface_name(SurfaceKind kind);
/// Accepts the snake_case names used on the command line; throws InvalidInput otherwise.
SurfaceKind parse_surface(std::string_view name);

double default_amplitude_scale(SurfaceKind kind);
SurfaceSpec default_surface(SurfaceKind kind, std::size_t height, std::size_t width,
                            std::uint64_t seed = 0);

PhaseImage generate_surface(const SurfaceSpec& spec);

/// Per-pixel amplitude a for the requested grid.
std::vector<double> amplitude_image(const AmplitudeModel& model, std::size_t height, std::size_t width);

/// z = a exp(j phi) + n, with n circular white Gaussian of variance sigma^2.
ComplexImage observe(const PhaseImage& phase, const ObservationSpec& spec);

SimulatedPair simulate_pair(const SurfaceSpec& surface, const ObservationSpec& obs);

/// Noiseless observations of all five surfaces, used as pre-learning data.
std::vector<ComplexImage> clean_training_images(std::size_t height, std::size_t width,
                                                const AmplitudeModel& amplitude,
                                                std::uint64_t seed);

/// Plain-text key=value description of a simulated dataset.
std::string manifest(const SurfaceSpec& surface, const ObservationSpec& obs);

}  // namespace simulate
}  // namespace inphase
