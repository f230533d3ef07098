#pragma once

#include <vector>

#include <Eigen/Dense>

#include "inphase/imagecore.hpp"
#include "inphase/mog.hpp"

namespace inphase {

/// Per-component Wiener filters W_k = Sigma_k (Sigma_k + sigma^2 I)^{-1} together
/// with what is needed to evaluate log N(z; Sigma_k + sigma^2 I). Both come from a
/// single eigendecomposition Sigma_k = U diag(s) U^H.
class WienerBank {
 public:
  struct Component {
    double log_alpha = 0.0;
    Eigen::MatrixXcd basis;      // U
    Eigen::VectorXd gain;        // s / (s + sigma^2)
    Eigen::VectorXd inv_var;     // 1 / (s + sigma^2)
    double log_det = 0.0;        // sum ln(s + sigma^2)
    Eigen::MatrixXcd filter;     // U diag(gain) U^H
  };

  WienerBank() = default;
  explicit WienerBank(std::vector<Component> components, double sigma_noise)
      : components_(std::move(components)), sigma_noise_(sigma_noise) {}

  std::size_t components() const { return components_.size(); }
  std::size_t dim() const {
    return components_.empty() ? 0 : static_cast<std::size_t>(components_.front().basis.rows());
  }
  double sigma_noise() const { return sigma_noise_; }
  const Component& component(std::size_t k) const { return components_[k]; }
  const Eigen::MatrixXcd& filter(std::size_t k) const { return components_[k].filter; }

  /// Normalized posterior weights w_k(z) for each column (returns K x N).
  Eigen::MatrixXd posterior_weights(const Eigen::MatrixXcd& zs) const;

 private:
  std::vector<Component> components_;
  double sigma_noise_ = 0.0;
};

namespace mmse {

/// Copy of `cm` with a different noise level (used when estimation sigma differs from training).
CleanMixture with_noise(const CleanMixture& cm, double sigma);

WienerBank build_wiener_bank(const CleanMixture& cm);

/// Posterior mean sum_k w_k(z) W_k z.
Eigen::VectorXcd mmse_estimate(const Eigen::VectorXcd& z, const CleanMixture& cm, const WienerBank& bank);

PatchSet denoise_patchset(const PatchSet& ps, const WienerBank& bank);
PatchSet denoise_patchset(const PatchSet& ps, const CleanMixture& cm);

}  // namespace mmse
}  // namespace inphase
