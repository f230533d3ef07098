#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace inphase {

using Complex = std::complex<double>;

/// Row-major grid of complex samples, z = a*exp(j*phi) + n per pixel.
class ComplexImage {
 public:
  ComplexImage() = default;
  ComplexImage(std::size_t height, std::size_t width, Complex fill = {});
  ComplexImage(std::size_t height, std::size_t width, std::vector<Complex> data);

  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  std::size_t size() const { return data_.size(); }

  Complex& operator()(std::size_t row, std::size_t col) { return data_[row * width_ + col]; }
  const Complex& operator()(std::size_t row, std::size_t col) const {
    return data_[row * width_ + col];
  }

  std::span<Complex> data() { return data_; }
  std::span<const Complex> data() const { return data_; }

  /// Throws InvalidInput if any sample is NaN or infinite.
  void require_finite() const;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<Complex> data_;
};

/// Row-major grid of phase values in radians. `wrapped` images hold values in [-pi, pi).
class PhaseImage {
 public:
  PhaseImage() = default;
  PhaseImage(std::size_t height, std::size_t width, bool wrapped, double fill = 0.0);
  PhaseImage(std::size_t height, std::size_t width, bool wrapped, std::vector<double> data);

  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  std::size_t size() const { return data_.size(); }
  bool wrapped() const { return wrapped_; }

  double& operator()(std::size_t row, std::size_t col) { return data_[row * width_ + col]; }
  double operator()(std::size_t row, std::size_t col) const { return data_[row * width_ + col]; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  /// Checks finiteness and, for wrapped images, the [-pi, pi) range.
  void validate() const;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  bool wrapped_ = false;
  std::vector<double> data_;
};

struct Anchor {
  std::size_t row = 0;
  std::size_t col = 0;
  friend bool operator==(const Anchor&, const Anchor&) = default;
};

/// All stride-1 overlapping square patches of an image. Column i of `patches`
/// is the side x side block anchored (top-left) at positions[i], flattened row-major.
/// Anchors are ordered row-major over an anchor_rows x anchor_cols grid.
struct PatchSet {
  std::size_t side = 0;
  std::size_t anchor_rows = 0;
  std::size_t anchor_cols = 0;
  Eigen::MatrixXcd patches;
  std::vector<Anchor> positions;

  std::size_t dim() const { return side * side; }
  std::size_t count() const { return positions.size(); }
};

namespace imagecore {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// mod(phi + pi, 2pi) - pi, landing in [-pi, pi).
double wrap(double phi);
PhaseImage wrap(const PhaseImage& phase);

/// Principal argument of every sample, in [-pi, pi).
PhaseImage principal_argument(const ComplexImage& img);

/// a * exp(j * phi) per pixel with constant amplitude.
ComplexImage unit_phasor(const PhaseImage& phase, double amplitude = 1.0);

/// Returns the integer side of an m-pixel square patch, or throws InvalidInput.
std::size_t patch_side_for(std::size_t m);

PatchSet extract_patches(const ComplexImage& img, std::size_t m);

/// Each pixel becomes the mean of all patch values covering it.
ComplexImage aggregate_patches(const PatchSet& ps, std::size_t height, std::size_t width);

/// sqrt(mean |d|^2 / 2) over all horizontal and vertical first differences d.
double estimate_noise_sigma(const ComplexImage& img);

}  // namespace imagecore
}  // namespace inphase
