#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "inphase/imagecore.hpp"

namespace inphase {

/// Mixture fitted to noisy patches: p(z) = sum_k alpha_k N(z; Gamma_k).
struct NoisyMixture {
  std::vector<double> alphas;
  std::vector<Eigen::MatrixXcd> gammas;

  std::size_t components() const { return alphas.size(); }
  std::size_t dim() const { return gammas.empty() ? 0 : static_cast<std::size_t>(gammas.front().rows()); }
};

/// Clean-signal prior: alpha_k, Sigma_k, plus the noise level it was corrected for.
struct CleanMixture {
  std::vector<double> alphas;
  std::vector<Eigen::MatrixXcd> sigmas;
  double sigma_noise = 0.0;

  std::size_t components() const { return alphas.size(); }
  std::size_t dim() const { return sigmas.empty() ? 0 : static_cast<std::size_t>(sigmas.front().rows()); }
};

struct EmOptions {
  int max_iters = 100;
  double rel_tol = 1e-5;
  /// Ridge added to every covariance, as a fraction of its mean diagonal.
  double reg_eps = 1e-6;
  std::uint64_t seed = 0;

  void validate() const;
};

struct EmResult {
  NoisyMixture model;
  /// ln p(z) for the initial parameters and after every M-step.
  std::vector<double> log_likelihood;
  int iterations = 0;
  bool converged = false;
  std::vector<std::string> warnings;
};

namespace mog {

/// Max elementwise |A - A^H|.
double hermitian_defect(const Eigen::MatrixXcd& a);

/// Cholesky factor of a Hermitian positive-definite covariance, reused for many
/// log-density evaluations.
class HermitianFactor {
 public:
  explicit HermitianFactor(const Eigen::MatrixXcd& cov);

  double log_det() const { return log_det_; }
  Eigen::Index dim() const { return llt_.matrixLLT().rows(); }

  /// x^H C^{-1} x for each column of `xs`.
  Eigen::VectorXd quadratic_forms(const Eigen::MatrixXcd& xs) const;

  /// log N(x; C) for each column of `xs`.
  Eigen::VectorXd log_densities(const Eigen::MatrixXcd& xs) const;

 private:
  Eigen::LLT<Eigen::MatrixXcd> llt_;
  double log_det_ = 0.0;
};

/// -m ln(pi) - ln det(Sigma) - x^H Sigma^{-1} x.
double circular_gaussian_logpdf(const Eigen::VectorXcd& x, const Eigen::MatrixXcd& sigma);

/// N_p x K matrix of posterior responsibilities under `model`.
Eigen::MatrixXd responsibilities(const PatchSet& ps, const NoisyMixture& model);

/// sum_i ln sum_k alpha_k N(z_i; Gamma_k).
double log_likelihood(const PatchSet& ps, const NoisyMixture& model);

EmResult em_fit(const PatchSet& ps, std::size_t components, const EmOptions& opts);

/// EM started from a given mixture instead of the random hard assignment.
EmResult em_refine(const PatchSet& ps, const NoisyMixture& initial, const EmOptions& opts);

/// Sigma_k = U (S - sigma^2 I)_+ U^H from Gamma_k = U S U^H.
CleanMixture correct_covariances(const NoisyMixture& nm, double sigma);

}  // namespace mog
}  // namespace inphase
