#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include "inphase/imagecore.hpp"

namespace inphase {

struct MetricReport {
  double psnr_db = 0.0;
  std::optional<std::size_t> nelp;
  std::optional<double> psnr_a_db;
  std::size_t n_pixels = 0;

  /// One key=value per line; infinities print as "inf" / "-inf".
  std::string to_key_value() const;
  /// Single-line JSON record.
  std::string to_json() const;
};

namespace metrics {

/// 10 log10(4 N pi^2 / ||W(est - truth)||^2); +inf on zero error.
double psnr(const PhaseImage& est_wrapped, const PhaseImage& truth_unwrapped);

struct UnwrappedScores {
  std::size_t nelp = 0;
  double psnr_a_db = 0.0;
};

/// NELP counts |est - truth| > pi; PSNR_a sums squared error only where |est - truth| <= pi
/// but keeps the full pixel count N in the numerator.
UnwrappedScores nelp_psnr_a(const PhaseImage& est_unwrapped, const PhaseImage& truth_unwrapped);

MetricReport evaluate(const PhaseImage& est_wrapped, const PhaseImage& truth_unwrapped,
                      const PhaseImage* est_unwrapped = nullptr);

std::string format_db(double value);

}  // namespace metrics
}  // namespace inphase
