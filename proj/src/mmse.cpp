#include "inphase/mmse.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "inphase/errors.hpp"

namespace inphase {

namespace {

using Eigen::Index;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXd;

const double kLogPi = std::log(imagecore::kPi);

/// K x N matrix of ln(alpha_k) + ln N(z; Sigma_k + sigma^2 I).
MatrixXd component_log_densities(const WienerBank& bank, const MatrixXcd& zs) {
  const auto k_count = static_cast<Index>(bank.components());
  const double m = static_cast<double>(zs.rows());
  MatrixXd out(k_count, zs.cols());
  for (Index k = 0; k < k_count; ++k) {
    const auto& comp = bank.component(static_cast<std::size_t>(k));
    const MatrixXcd coords = comp.basis.adjoint() * zs;
    const Eigen::RowVectorXd quad = comp.inv_var.transpose() * coords.cwiseAbs2();
    out.row(k) = (-quad).array() + (comp.log_alpha - m * kLogPi - comp.log_det);
  }
  return out;
}

/// Column-wise softmax of log weights.
MatrixXd normalize_columns(const MatrixXd& log_w) {
  MatrixXd w(log_w.rows(), log_w.cols());
  for (Index i = 0; i < log_w.cols(); ++i) {
    const double peak = log_w.col(i).maxCoeff();
    if (!std::isfinite(peak)) {
      throw NumericalError("every mixture component assigns zero density to patch " + std::to_string(i));
    }
    w.col(i) = (log_w.col(i).array() - peak).exp();
    w.col(i) /= w.col(i).sum();
  }
  return w;
}

}  // namespace

MatrixXd WienerBank::posterior_weights(const MatrixXcd& zs) const {
  if (static_cast<std::size_t>(zs.rows()) != dim()) throw InvalidInput("patch dimension does not match filter bank");
  return normalize_columns(component_log_densities(*this, zs));
}

namespace mmse {

CleanMixture with_noise(const CleanMixture& cm, double sigma) {
  if (!std::isfinite(sigma) || sigma < 0.0) throw InvalidInput("noise sigma must be finite and >= 0");
  CleanMixture out = cm;
  out.sigma_noise = sigma;
  return out;
}

WienerBank build_wiener_bank(const CleanMixture& cm) {
  const double sigma = cm.sigma_noise;
  if (!std::isfinite(sigma) || sigma < 0.0) throw InvalidInput("noise sigma must be finite and >= 0");
  if (cm.components() == 0 || cm.sigmas.size() != cm.alphas.size()) {
    throw InvalidInput("clean mixture needs matching, nonempty alpha and covariance lists");
  }
  const double var = sigma * sigma;
  const Index m = cm.sigmas.front().rows();

  std::vector<WienerBank::Component> comps;
  comps.reserve(cm.components());
  for (std::size_t k = 0; k < cm.components(); ++k) {
    const MatrixXcd& cov = cm.sigmas[k];
    if (cov.rows() != m || cov.cols() != m) throw InvalidInput("clean mixture covariances differ in size");
    const double scale = std::max(1.0, cov.cwiseAbs().maxCoeff());
    if (!cov.allFinite() || mog::hermitian_defect(cov) > 1e-8 * scale) {
      throw InvalidInput("clean covariance " + std::to_string(k) + " is not Hermitian");
    }
    const double alpha = cm.alphas[k];
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw InvalidInput("mixing weights must be nonnegative");

    Eigen::SelfAdjointEigenSolver<MatrixXcd> eig(cov);
    if (eig.info() != Eigen::Success) throw NumericalError("Hermitian eigendecomposition failed");
    const VectorXd s = eig.eigenvalues().cwiseMax(0.0);
    if (var == 0.0 && !(s.array() > 0.0).all()) {
      throw InvalidInput("zero noise level needs positive-definite clean covariances (component " +
                         std::to_string(k) + " is singular)");
    }

    WienerBank::Component c;
    c.log_alpha = alpha > 0.0 ? std::log(alpha) : -std::numeric_limits<double>::infinity();
    c.basis = eig.eigenvectors();
    const VectorXd total = s.array() + var;
    c.gain = s.array() / total.array();
    c.inv_var = total.cwiseInverse();
    c.log_det = total.array().log().sum();
    c.filter = c.basis * c.gain.asDiagonal() * c.basis.adjoint();
    comps.push_back(std::move(c));
  }
  return WienerBank(std::move(comps), sigma);
}

Eigen::VectorXcd mmse_estimate(const Eigen::VectorXcd& z, const CleanMixture& cm, const WienerBank& bank) {
  if (bank.components() != cm.components() || bank.dim() != cm.dim()) {
    throw InvalidInput("filter bank was not built from this mixture");
  }
  if (static_cast<std::size_t>(z.size()) != bank.dim()) throw InvalidInput("patch dimension does not match mixture");
  const MatrixXd w = bank.posterior_weights(z);
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(z.size());
  for (std::size_t k = 0; k < bank.components(); ++k) {
    const double wk = w(static_cast<Index>(k), 0);
    if (wk == 0.0) continue;
    out += wk * (bank.filter(k) * z);
  }
  return out;
}

PatchSet denoise_patchset(const PatchSet& ps, const WienerBank& bank) {
  if (ps.dim() != bank.dim() || static_cast<std::size_t>(ps.patches.rows()) != bank.dim()) {
    throw InvalidInput("patch dimension " + std::to_string(ps.dim()) + " does not match mixture dimension " +
                       std::to_string(bank.dim()));
  }
  const MatrixXd w = bank.posterior_weights(ps.patches);
  PatchSet out;
  out.side = ps.side;
  out.anchor_rows = ps.anchor_rows;
  out.anchor_cols = ps.anchor_cols;
  out.positions = ps.positions;
  out.patches = MatrixXcd::Zero(ps.patches.rows(), ps.patches.cols());
  for (std::size_t k = 0; k < bank.components(); ++k) {
    const Eigen::RowVectorXd wk = w.row(static_cast<Index>(k));
    if (wk.maxCoeff() == 0.0) continue;
    out.patches.noalias() += bank.filter(k) * (ps.patches * wk.asDiagonal());
  }
  return out;
}

PatchSet denoise_patchset(const PatchSet& ps, const CleanMixture& cm) {
  return denoise_patchset(ps, build_wiener_bank(cm));
}

}  // namespace mmse
}  // namespace inphase
