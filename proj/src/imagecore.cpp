#include "inphase/imagecore.hpp"

#include <cmath>
#include <string>

#include "inphase/errors.hpp"

namespace inphase {

ComplexImage::ComplexImage(std::size_t height, std::size_t width, Complex fill)
    : height_(height), width_(width), data_(height * width, fill) {}

ComplexImage::ComplexImage(std::size_t height, std::size_t width, std::vector<Complex> data)
    : height_(height), width_(width), data_(std::move(data)) {
  if (data_.size() != height_ * width_) {
    throw InvalidInput("complex image data length " + std::to_string(data_.size()) +
                       " does not match " + std::to_string(height_) + "x" + std::to_string(width_));
  }
}

void ComplexImage::require_finite() const {
  for (const auto& v : data_) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw InvalidInput("complex image contains a non-finite sample");
    }
  }
}

PhaseImage::PhaseImage(std::size_t height, std::size_t width, bool wrapped, double fill)
    : height_(height), width_(width), wrapped_(wrapped), data_(height * width, fill) {}

PhaseImage::PhaseImage(std::size_t height, std::size_t width, bool wrapped, std::vector<double> data)
    : height_(height), width_(width), wrapped_(wrapped), data_(std::move(data)) {
  if (data_.size() != height_ * width_) {
    throw InvalidInput("phase image data length " + std::to_string(data_.size()) +
                       " does not match " + std::to_string(height_) + "x" + std::to_string(width_));
  }
}

void PhaseImage::validate() const {
  for (double v : data_) {
    if (!std::isfinite(v)) throw InvalidInput("phase image contains a non-finite value");
    if (wrapped_ && (v < -imagecore::kPi || v >= imagecore::kPi)) {
      throw InvalidInput("wrapped phase value " + std::to_string(v) + " outside [-pi, pi)");
    }
  }
}

namespace imagecore {

double wrap(double phi) {
  if (!std::isfinite(phi)) throw InvalidInput("wrap: non-finite phase");
  double r = std::fmod(phi + kPi, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  double out = r - kPi;
  // r may round up to exactly 2pi after the correction above.
  if (out >= kPi) out -= kTwoPi;
  return out;
}

PhaseImage wrap(const PhaseImage& phase) {
  PhaseImage out(phase.height(), phase.width(), true);
  auto src = phase.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = wrap(src[i]);
  return out;
}

namespace {
double principal_arg(Complex v) {
  double a = std::arg(v);
  return a >= kPi ? -kPi : a;
}
}  // namespace

PhaseImage principal_argument(const ComplexImage& img) {
  PhaseImage out(img.height(), img.width(), true);
  auto src = img.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = principal_arg(src[i]);
  return out;
}

ComplexImage unit_phasor(const PhaseImage& phase, double amplitude) {
  ComplexImage out(phase.height(), phase.width());
  auto src = phase.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = std::polar(amplitude, src[i]);
  return out;
}

std::size_t patch_side_for(std::size_t m) {
  if (m == 0) throw InvalidInput("patch pixel count must be positive");
  auto side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(m))));
  if (side * side != m) {
    throw InvalidInput("patch pixel count " + std::to_string(m) + " is not a perfect square");
  }
  return side;
}

PatchSet extract_patches(const ComplexImage& img, std::size_t m) {
  const std::size_t side = patch_side_for(m);
  if (side > img.height() || side > img.width()) {
    throw InvalidInput("patch side " + std::to_string(side) + " exceeds image " +
                       std::to_string(img.height()) + "x" + std::to_string(img.width()));
  }
  PatchSet ps;
  ps.side = side;
  ps.anchor_rows = img.height() - side + 1;
  ps.anchor_cols = img.width() - side + 1;
  const std::size_t count = ps.anchor_rows * ps.anchor_cols;
  ps.patches.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(count));
  ps.positions.reserve(count);

  std::size_t i = 0;
  for (std::size_t r = 0; r < ps.anchor_rows; ++r) {
    for (std::size_t c = 0; c < ps.anchor_cols; ++c, ++i) {
      ps.positions.push_back({r, c});
      auto col = ps.patches.col(static_cast<Eigen::Index>(i));
      Eigen::Index p = 0;
      for (std::size_t dr = 0; dr < side; ++dr) {
        for (std::size_t dc = 0; dc < side; ++dc) col(p++) = img(r + dr, c + dc);
      }
    }
  }
  return ps;
}

ComplexImage aggregate_patches(const PatchSet& ps, std::size_t height, std::size_t width) {
  if (ps.patches.cols() != static_cast<Eigen::Index>(ps.count()) ||
      ps.patches.rows() != static_cast<Eigen::Index>(ps.dim())) {
    throw InvalidInput("patch matrix shape does not match patch positions");
  }
  ComplexImage out(height, width);
  std::vector<std::size_t> hits(height * width, 0);

  // Running mean, so a pixel covered only by identical values reproduces them exactly.
  for (std::size_t i = 0; i < ps.count(); ++i) {
    const Anchor a = ps.positions[i];
    if (a.row + ps.side > height || a.col + ps.side > width) {
      throw InvalidInput("patch anchored at (" + std::to_string(a.row) + ", " +
                         std::to_string(a.col) + ") falls outside the output image");
    }
    auto col = ps.patches.col(static_cast<Eigen::Index>(i));
    Eigen::Index p = 0;
    for (std::size_t dr = 0; dr < ps.side; ++dr) {
      for (std::size_t dc = 0; dc < ps.side; ++dc, ++p) {
        const std::size_t idx = (a.row + dr) * width + (a.col + dc);
        const auto n = static_cast<double>(++hits[idx]);
        Complex& mean = out.data()[idx];
        mean += (col(p) - mean) / n;
      }
    }
  }
  for (std::size_t idx = 0; idx < hits.size(); ++idx) {
    if (hits[idx] == 0) {
      throw ConsistencyError("pixel (" + std::to_string(idx / width) + ", " +
                             std::to_string(idx % width) + ") is not covered by any patch");
    }
  }
  return out;
}

double estimate_noise_sigma(const ComplexImage& img) {
  if (img.height() < 2 || img.width() < 2) {
    throw InvalidInput("noise estimation needs an image of at least 2x2 pixels");
  }
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t r = 0; r < img.height(); ++r) {
    for (std::size_t c = 0; c < img.width(); ++c) {
      if (c + 1 < img.width()) {
        sum += std::norm(img(r, c + 1) - img(r, c));
        ++n;
      }
      if (r + 1 < img.height()) {
        sum += std::norm(img(r + 1, c) - img(r, c));
        ++n;
      }
    }
  }
  return std::sqrt(sum / static_cast<double>(n) / 2.0);
}

}  // namespace imagecore
}  // namespace inphase
