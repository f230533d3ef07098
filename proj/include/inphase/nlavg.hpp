#pragma once

#include <cstddef>

#include "inphase/imagecore.hpp"

namespace inphase {

struct NlOptions {
  /// Kernel bandwidth; typically 0.48 * sigma.
  double h = 0.48;
  /// Odd neighborhood width, counted in patch anchors.
  std::size_t window_side = 11;

  void validate() const;
};

namespace nlavg {

/// Each patch is replaced by the normalized exp(-||x_i - x_j||^2 / h^2) weighted
/// mean of the patches whose anchors fall in its window (clipped at the borders).
PatchSet nl_average(const PatchSet& ps, const NlOptions& opts);

/// Normalized weights of patch i over its neighborhood, in row-major window order.
/// Mostly useful for inspection and tests.
std::vector<std::pair<std::size_t, double>> neighbor_weights(const PatchSet& ps, std::size_t i,
                                                              const NlOptions& opts);

}  // namespace nlavg
}  // namespace inphase
