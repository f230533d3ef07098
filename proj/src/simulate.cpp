#include "inphase/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "inphase/errors.hpp"

namespace inphase {

namespace {

using imagecore::kPi;
using imagecore::kTwoPi;

constexpr std::size_t kMountainBumps = 6;

struct NamedKind {
  SurfaceKind kind;
  std::string_view name;
};

constexpr std::array<NamedKind, 5> kNames = {{
    {SurfaceKind::TruncatedGaussian, "truncated_gaussian"},
    {SurfaceKind::Sinusoidal, "sinusoidal"},
    {SurfaceKind::DiscontinuousSinusoidal, "discontinuous_sinusoidal"},
    {SurfaceKind::Mountains, "mountains"},
    {SurfaceKind::ShearPlanes, "shear_planes"},
}};

PhaseImage truncated_gaussian(const SurfaceSpec& s) {
  PhaseImage out(s.height, s.width, false);
  const double cr = static_cast<double>(s.height / 2);
  const double cc = static_cast<double>(s.width / 2);
  const double spread = static_cast<double>(std::min(s.height, s.width)) / 6.0;
  const double floor = s.amplitude_scale * std::exp(-2.0);
  for (std::size_t r = 0; r < s.height; ++r) {
    for (std::size_t c = 0; c < s.width; ++c) {
      const double dr = static_cast<double>(r) - cr;
      const double dc = static_cast<double>(c) - cc;
      const double v = s.amplitude_scale * std::exp(-(dr * dr + dc * dc) / (2.0 * spread * spread));
      out(r, c) = std::max(v, floor);
    }
  }
  return out;
}

PhaseImage sinusoidal(const SurfaceSpec& s, double step) {
  PhaseImage out(s.height, s.width, false);
  const double period_r = static_cast<double>(s.height) / 3.0;
  const double period_c = static_cast<double>(s.width) / 3.0;
  for (std::size_t r = 0; r < s.height; ++r) {
    for (std::size_t c = 0; c < s.width; ++c) {
      double v = 0.5 * s.amplitude_scale * std::sin(kTwoPi * static_cast<double>(c) / period_c) *
                 std::sin(kTwoPi * static_cast<double>(r) / period_r);
      if (c >= s.width / 2) v += step;
      out(r, c) = v;
    }
  }
  return out;
}

PhaseImage mountains(const SurfaceSpec& s) {
  std::mt19937_64 rng(s.seed);
  const double extent = static_cast<double>(std::min(s.height, s.width));
  std::uniform_real_distribution<double> row(0.0, static_cast<double>(s.height));
  std::uniform_real_distribution<double> col(0.0, static_cast<double>(s.width));
  std::uniform_real_distribution<double> spread(0.08 * extent, 0.18 * extent);
  std::uniform_real_distribution<double> height(0.5, 1.0);

  struct Bump {
    double r, c, s, h;
  };
  std::vector<Bump> bumps;
  for (std::size_t b = 0; b < kMountainBumps; ++b) {
    const double br = row(rng);
    const double bc = col(rng);
    const double bs = spread(rng);
    const double bh = height(rng);
    bumps.push_back({br, bc, bs, bh});
  }

  PhaseImage out(s.height, s.width, false);
  double peak = 0.0;
  for (std::size_t r = 0; r < s.height; ++r) {
    for (std::size_t c = 0; c < s.width; ++c) {
      double v = 0.0;
      for (const auto& b : bumps) {
        const double dr = static_cast<double>(r) - b.r;
        const double dc = static_cast<double>(c) - b.c;
        v += b.h * std::exp(-(dr * dr + dc * dc) / (2.0 * b.s * b.s));
      }
      out(r, c) = v;
      peak = std::max(peak, v);
    }
  }
  for (double& v : out.data()) v *= s.amplitude_scale / peak;
  return out;
}

/// Two affine ramps with opposite column slopes meeting at the vertical midline,
/// where the right ramp sits amplitude_scale / 2 above the left one.
PhaseImage shear_planes(const SurfaceSpec& s) {
  PhaseImage out(s.height, s.width, false);
  const double slope = s.amplitude_scale / static_cast<double>(s.width);
  const double mid = static_cast<double>(s.width / 2);
  const double jump = 0.5 * s.amplitude_scale;
  for (std::size_t r = 0; r < s.height; ++r) {
    const double rr = static_cast<double>(r);
    for (std::size_t c = 0; c < s.width; ++c) {
      const double cc = static_cast<double>(c);
      out(r, c) = c < s.width / 2 ? slope * (cc + 0.5 * rr)
                                  : slope * (mid - (cc - mid) + 0.5 * rr) + jump;
    }
  }
  return out;
}

}  // namespace

void SurfaceSpec::validate() const {
  if (height == 0 || width == 0) throw InvalidInput("surface dimensions must be positive");
  if (!(amplitude_scale > 0.0) || !std::isfinite(amplitude_scale)) {
    throw InvalidInput("surface amplitude_scale must be positive");
  }
}

AmplitudeModel AmplitudeModel::mountains(std::size_t height, std::size_t width, std::uint64_t seed) {
  AmplitudeModel m;
  m.surface = SurfaceSpec{SurfaceKind::Mountains, height, width, 1.0, seed};
  return m;
}

namespace simulate {

std::string_view surface_name(SurfaceKind kind) {
  for (const auto& n : kNames) {
    if (n.kind == kind) return n.name;
  }
  throw InvalidInput("unknown surface kind");
}

SurfaceKind parse_surface(std::string_view name) {
  for (const auto& n : kNames) {
    if (n.name == name) return n.kind;
  }
  throw InvalidInput("unknown surface kind '" + std::string(name) + "'");
}

double default_amplitude_scale(SurfaceKind kind) {
  switch (kind) {
    case SurfaceKind::TruncatedGaussian:
    case SurfaceKind::Sinusoidal:
    case SurfaceKind::DiscontinuousSinusoidal:
    case SurfaceKind::Mountains:
    case SurfaceKind::ShearPlanes:
      return 14.0;
  }
  throw InvalidInput("unknown surface kind");
}

SurfaceSpec default_surface(SurfaceKind kind, std::size_t height, std::size_t width, std::uint64_t seed) {
  return SurfaceSpec{kind, height, width, default_amplitude_scale(kind), seed};
}

PhaseImage generate_surface(const SurfaceSpec& spec) {
  spec.validate();
  switch (spec.kind) {
    case SurfaceKind::TruncatedGaussian:
      return truncated_gaussian(spec);
    case SurfaceKind::Sinusoidal:
      return sinusoidal(spec, 0.0);
    case SurfaceKind::DiscontinuousSinusoidal:
      return sinusoidal(spec, spec.amplitude_scale / 3.0);
    case SurfaceKind::Mountains:
      return mountains(spec);
    case SurfaceKind::ShearPlanes:
      return shear_planes(spec);
  }
  throw InvalidInput("unknown surface kind");
}

std::vector<double> amplitude_image(const AmplitudeModel& model, std::size_t height, std::size_t width) {
  if (!model.surface) {
    if (!(model.constant >= 0.0) || !std::isfinite(model.constant)) {
      throw InvalidInput("constant amplitude must be finite and nonnegative");
    }
    return std::vector<double>(height * width, model.constant);
  }
  if (!(model.low >= 0.0) || !(model.high > model.low)) {
    throw InvalidInput("amplitude range must satisfy 0 <= low < high");
  }
  SurfaceSpec spec = *model.surface;
  spec.height = height;
  spec.width = width;
  const PhaseImage surface = generate_surface(spec);
  const auto [lo_it, hi_it] = std::minmax_element(surface.data().begin(), surface.data().end());
  const double lo = *lo_it;
  const double span = *hi_it - lo;
  std::vector<double> out(height * width);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double t = span > 0.0 ? (surface.data()[i] - lo) / span : 1.0;
    out[i] = model.low + t * (model.high - model.low);
  }
  return out;
}

ComplexImage observe(const PhaseImage& phase, const ObservationSpec& spec) {
  if (!(spec.sigma >= 0.0) || !std::isfinite(spec.sigma)) throw InvalidInput("noise sigma must be >= 0");
  phase.validate();
  const std::vector<double> amp = amplitude_image(spec.amplitude, phase.height(), phase.width());
  ComplexImage out(phase.height(), phase.width());
  auto dst = out.data();
  auto src = phase.data();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = std::polar(amp[i], src[i]);
  if (spec.sigma > 0.0) {
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> gauss(0.0, spec.sigma / std::sqrt(2.0));
    for (auto& v : dst) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      v += Complex(re, im);
    }
  }
  return out;
}

SimulatedPair simulate_pair(const SurfaceSpec& surface, const ObservationSpec& obs) {
  SimulatedPair pair;
  pair.truth = generate_surface(surface);
  pair.noisy = observe(pair.truth, obs);
  return pair;
}

std::vector<ComplexImage> clean_training_images(std::size_t height, std::size_t width,
                                                const AmplitudeModel& amplitude, std::uint64_t seed) {
  std::vector<ComplexImage> out;
  ObservationSpec obs;
  obs.sigma = 0.0;
  obs.amplitude = amplitude;
  for (SurfaceKind kind : kAllSurfaces) {
    out.push_back(observe(generate_surface(default_surface(kind, height, width, seed)), obs));
  }
  return out;
}

std::string manifest(const SurfaceSpec& surface, const ObservationSpec& obs) {
  std::ostringstream os;
  os.precision(17);
  os << "kind=" << surface_name(surface.kind) << '\n'
     << "height=" << surface.height << '\n'
     << "width=" << surface.width << '\n'
     << "amplitude_scale=" << surface.amplitude_scale << '\n'
     << "surface_seed=" << surface.seed << '\n'
     << "sigma=" << obs.sigma << '\n'
     << "noise_seed=" << obs.seed << '\n'
     << "amplitude=" << (obs.amplitude.surface ? "mountains" : "constant") << '\n';
  if (obs.amplitude.surface) {
    os << "amplitude_seed=" << obs.amplitude.surface->seed << '\n'
       << "amplitude_range=" << obs.amplitude.low << ',' << obs.amplitude.high << '\n';
  } else {
    os << "amplitude_value=" << obs.amplitude.constant << '\n';
  }
  return os.str();
}

}  // namespace simulate
}  // namespace inphase
