#include "inphase/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "inphase/errors.hpp"
#include "inphase/mmse.hpp"

namespace inphase {

void DenoiseConfig::validate() const {
  if (patch_side == 0) throw InvalidInput("patch side must be positive");
  if (sigma && (!(*sigma >= 0.0) || !std::isfinite(*sigma))) throw InvalidInput("known sigma must be >= 0");
  if (nl_h && (!(*nl_h > 0.0) || !std::isfinite(*nl_h))) throw InvalidInput("NL bandwidth must be positive");
  if (nl_window == 0 || nl_window % 2 == 0) throw InvalidInput("NL window side must be odd");
  em.validate();
  if (std::holds_alternative<SelfLearned>(mode) && components == 0) {
    throw InvalidInput("self-learning needs at least one component");
  }
}

namespace pipeline {

namespace {

PatchSet pool_patches(const std::vector<PatchSet>& sets) {
  PatchSet pooled;
  pooled.side = sets.front().side;
  Eigen::Index total = 0;
  for (const auto& s : sets) total += s.patches.cols();
  pooled.patches.resize(static_cast<Eigen::Index>(pooled.dim()), total);
  pooled.positions.reserve(static_cast<std::size_t>(total));
  Eigen::Index at = 0;
  for (const auto& s : sets) {
    pooled.patches.middleCols(at, s.patches.cols()) = s.patches;
    pooled.positions.insert(pooled.positions.end(), s.positions.begin(), s.positions.end());
    at += s.patches.cols();
  }
  return pooled;
}

}  // namespace

TrainResult train(const std::vector<ComplexImage>& images, std::size_t patch_side,
                  std::size_t components, const EmOptions& em, std::optional<double> sigma) {
  if (images.empty()) throw InvalidInput("training needs at least one image");
  if (components == 0) throw InvalidInput("training needs at least one component");
  if (sigma && (!(*sigma >= 0.0) || !std::isfinite(*sigma))) throw InvalidInput("known sigma must be >= 0");

  std::vector<PatchSet> sets;
  double weighted_var = 0.0;
  for (const auto& img : images) {
    img.require_finite();
    sets.push_back(imagecore::extract_patches(img, patch_side * patch_side));
    if (!sigma) {
      const double s = imagecore::estimate_noise_sigma(img);
      weighted_var += static_cast<double>(sets.back().count()) * s * s;
    }
  }
  TrainResult out;
  const PatchSet pooled = pool_patches(sets);
  out.pooled_patches = pooled.count();
  out.sigma = sigma ? *sigma : std::sqrt(weighted_var / static_cast<double>(out.pooled_patches));
  out.em = mog::em_fit(pooled, components, em);
  out.model = mog::correct_covariances(out.em.model, out.sigma);
  return out;
}

DenoiseResult denoise_image(const ComplexImage& z, const DenoiseConfig& cfg) {
  cfg.validate();
  z.require_finite();
  if (z.height() < cfg.patch_side || z.width() < cfg.patch_side) {
    throw InvalidInput("image " + std::to_string(z.height()) + "x" + std::to_string(z.width()) +
                       " is smaller than a " + std::to_string(cfg.patch_side) + "x" +
                       std::to_string(cfg.patch_side) + " patch");
  }

  DenoiseResult out;
  out.sigma = cfg.sigma ? *cfg.sigma : imagecore::estimate_noise_sigma(z);
  if (!cfg.sigma && out.sigma == 0.0) {
    out.warnings.push_back("estimated noise level is zero; NL bandwidth floor applied");
  }

  const PatchSet patches = imagecore::extract_patches(z, cfg.patch_side * cfg.patch_side);

  CleanMixture prior;
  if (const auto* pre = std::get_if<PreLearned>(&cfg.mode)) {
    if (pre->model.dim() != patches.dim()) {
      throw InvalidInput("model patch dimension " + std::to_string(pre->model.dim()) +
                         " does not match " + std::to_string(patches.dim()));
    }
    prior = mmse::with_noise(pre->model, out.sigma);
  } else {
    EmResult fit = mog::em_fit(patches, cfg.components, cfg.em);
    out.em_trace = fit.log_likelihood;
    out.warnings.insert(out.warnings.end(), fit.warnings.begin(), fit.warnings.end());
    prior = mog::correct_covariances(fit.model, out.sigma);
  }

  const PatchSet estimated = mmse::denoise_patchset(patches, mmse::build_wiener_bank(prior));

  out.nl_h = cfg.nl_h ? *cfg.nl_h : std::max(kNlBandwidthFactor * out.sigma, kNlBandwidthFloor);
  const PatchSet averaged = nlavg::nl_average(estimated, NlOptions{out.nl_h, cfg.nl_window});

  out.mmse_only = imagecore::aggregate_patches(estimated, z.height(), z.width());
  out.denoised = imagecore::aggregate_patches(averaged, z.height(), z.width());
  out.phase = imagecore::principal_argument(out.denoised);
  return out;
}

}  // namespace pipeline
}  // namespace inphase
