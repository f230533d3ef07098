#include "inphase/nlavg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "inphase/errors.hpp"

namespace inphase {

void NlOptions::validate() const {
  if (!(h > 0.0) || !std::isfinite(h)) throw InvalidInput("NL bandwidth h must be positive and finite");
  if (window_side == 0 || window_side % 2 == 0) {
    throw InvalidInput("NL window side must be a positive odd integer, got " + std::to_string(window_side));
  }
}

namespace nlavg {

namespace {

using Eigen::Index;

void check_grid(const PatchSet& ps) {
  if (ps.count() == 0) throw InvalidInput("NL averaging needs a nonempty patch set");
  if (ps.anchor_rows * ps.anchor_cols != ps.count() ||
      ps.patches.cols() != static_cast<Index>(ps.count())) {
    throw InvalidInput("patch set is not a complete anchor grid");
  }
}

struct Window {
  std::size_t r0, r1, c0, c1;  // inclusive bounds on anchor coordinates
};

Window window_of(const PatchSet& ps, std::size_t i, std::size_t radius) {
  const std::size_t r = i / ps.anchor_cols;
  const std::size_t c = i % ps.anchor_cols;
  return {r > radius ? r - radius : 0, std::min(r + radius, ps.anchor_rows - 1),
          c > radius ? c - radius : 0, std::min(c + radius, ps.anchor_cols - 1)};
}

}  // namespace

std::vector<std::pair<std::size_t, double>> neighbor_weights(const PatchSet& ps, std::size_t i,
                                                              const NlOptions& opts) {
  opts.validate();
  check_grid(ps);
  if (i >= ps.count()) throw InvalidInput("patch index out of range");
  const double inv_h2 = 1.0 / (opts.h * opts.h);
  const Window win = window_of(ps, i, opts.window_side / 2);
  const auto xi = ps.patches.col(static_cast<Index>(i));

  std::vector<std::pair<std::size_t, double>> out;
  double total = 0.0;
  for (std::size_t r = win.r0; r <= win.r1; ++r) {
    for (std::size_t c = win.c0; c <= win.c1; ++c) {
      const std::size_t j = r * ps.anchor_cols + c;
      const double kernel =
          j == i ? 1.0 : std::exp(-(xi - ps.patches.col(static_cast<Index>(j))).squaredNorm() * inv_h2);
      out.emplace_back(j, kernel);
      total += kernel;
    }
  }
  for (auto& [j, w] : out) w /= total;
  return out;
}

PatchSet nl_average(const PatchSet& ps, const NlOptions& opts) {
  opts.validate();
  check_grid(ps);
  const double inv_h2 = 1.0 / (opts.h * opts.h);
  const std::size_t radius = opts.window_side / 2;

  PatchSet out;
  out.side = ps.side;
  out.anchor_rows = ps.anchor_rows;
  out.anchor_cols = ps.anchor_cols;
  out.positions = ps.positions;
  out.patches.resize(ps.patches.rows(), ps.patches.cols());

  Eigen::VectorXcd acc(ps.patches.rows());
  for (std::size_t i = 0; i < ps.count(); ++i) {
    const Window win = window_of(ps, i, radius);
    const auto xi = ps.patches.col(static_cast<Index>(i));
    acc.setZero();
    double total = 0.0;
    for (std::size_t r = win.r0; r <= win.r1; ++r) {
      for (std::size_t c = win.c0; c <= win.c1; ++c) {
        const std::size_t j = r * ps.anchor_cols + c;
        const auto xj = ps.patches.col(static_cast<Index>(j));
        const double kernel = j == i ? 1.0 : std::exp(-(xi - xj).squaredNorm() * inv_h2);
        if (kernel == 0.0) continue;
        // Weighted running mean: identical neighbors reproduce themselves exactly.
        total += kernel;
        acc += (kernel / total) * (xj - acc);
      }
    }
    out.patches.col(static_cast<Index>(i)) = acc;
  }
  return out;
}

}  // namespace nlavg
}  // namespace inphase
