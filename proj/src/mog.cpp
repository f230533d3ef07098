#include "inphase/mog.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "inphase/errors.hpp"

namespace inphase {

void EmOptions::validate() const {
  if (max_iters <= 0) throw InvalidInput("EM max_iters must be positive");
  if (!(rel_tol > 0.0) || !(rel_tol < 1.0)) throw InvalidInput("EM rel_tol must lie in (0, 1)");
  if (!(reg_eps > 0.0) || !std::isfinite(reg_eps)) throw InvalidInput("EM reg_eps must be positive");
}

namespace mog {

namespace {

const double kLogPi = std::log(imagecore::kPi);
constexpr double kHermitianTol = 1e-10;
constexpr double kCollapseFraction = 1e-12;

using Eigen::Index;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXd;

double mean_diagonal(const MatrixXcd& a) { return a.diagonal().real().mean(); }

/// Copies the lower triangle onto the upper one so the result is exactly Hermitian.
MatrixXcd hermitian_from_lower(const MatrixXcd& lower) {
  MatrixXcd full = lower.selfadjointView<Eigen::Lower>();
  for (Index i = 0; i < full.rows(); ++i) full(i, i) = full(i, i).real();
  return full;
}

void add_ridge(MatrixXcd& cov, double reg_eps) {
  const double scale = mean_diagonal(cov);
  const double ridge = reg_eps * (scale > 0.0 ? scale : 1.0);
  cov.diagonal().array() += ridge;
}

/// (1 / total) sum_i w_i z_i z_i^H, plus ridge.
MatrixXcd weighted_second_moment(const MatrixXcd& zs, const VectorXd& weights, double total,
                                 double reg_eps) {
  const Index m = zs.rows();
  MatrixXcd scaled = zs * weights.cwiseSqrt().asDiagonal();
  MatrixXcd lower = MatrixXcd::Zero(m, m);
  lower.selfadjointView<Eigen::Lower>().rankUpdate(scaled);
  MatrixXcd cov = hermitian_from_lower(lower) / total;
  add_ridge(cov, reg_eps);
  return cov;
}

/// N_p x K matrix of ln(alpha_k) + ln N(z_i; Gamma_k).
MatrixXd log_joint(const MatrixXcd& zs, const NoisyMixture& model) {
  const Index np = zs.cols();
  const auto k_count = static_cast<Index>(model.components());
  MatrixXd out(np, k_count);
  for (Index k = 0; k < k_count; ++k) {
    const double alpha = model.alphas[static_cast<std::size_t>(k)];
    const double log_alpha = alpha > 0.0 ? std::log(alpha) : -std::numeric_limits<double>::infinity();
    HermitianFactor factor(model.gammas[static_cast<std::size_t>(k)]);
    out.col(k) = factor.log_densities(zs).array() + log_alpha;
  }
  return out;
}

/// Row-wise log-sum-exp.
VectorXd log_normalizers(const MatrixXd& log_joint) {
  VectorXd out(log_joint.rows());
  for (Index i = 0; i < log_joint.rows(); ++i) {
    const double peak = log_joint.row(i).maxCoeff();
    if (!std::isfinite(peak)) {
      throw NumericalError("patch " + std::to_string(i) + " has zero density under every component");
    }
    out(i) = peak + std::log((log_joint.row(i).array() - peak).exp().sum());
  }
  return out;
}

void check_model(const NoisyMixture& model, Index m) {
  if (model.components() == 0 || model.gammas.size() != model.alphas.size()) {
    throw InvalidInput("mixture needs matching, nonempty alpha and covariance lists");
  }
  for (const auto& g : model.gammas) {
    if (g.rows() != m || g.cols() != m) throw InvalidInput("mixture dimension does not match patches");
  }
}

}  // namespace

double hermitian_defect(const MatrixXcd& a) {
  if (a.rows() != a.cols()) return std::numeric_limits<double>::infinity();
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

HermitianFactor::HermitianFactor(const MatrixXcd& cov) {
  if (cov.rows() != cov.cols() || cov.rows() == 0) {
    throw NumericalError("covariance must be a nonempty square matrix");
  }
  const double scale = std::max(1.0, cov.cwiseAbs().maxCoeff());
  if (!cov.allFinite()) throw NumericalError("covariance contains non-finite entries");
  if (hermitian_defect(cov) > kHermitianTol * scale) throw NumericalError("covariance is not Hermitian");
  llt_.compute(cov);
  if (llt_.info() != Eigen::Success) throw NumericalError("covariance is not positive definite");
  const auto diag = llt_.matrixLLT().diagonal().real();
  if ((diag.array() <= 0.0).any() || !diag.allFinite()) {
    throw NumericalError("covariance is numerically singular");
  }
  log_det_ = 2.0 * diag.array().log().sum();
}

VectorXd HermitianFactor::quadratic_forms(const MatrixXcd& xs) const {
  MatrixXcd whitened = llt_.matrixL().solve(xs);
  return whitened.colwise().squaredNorm().transpose();
}

VectorXd HermitianFactor::log_densities(const MatrixXcd& xs) const {
  const double offset = -static_cast<double>(dim()) * kLogPi - log_det_;
  return (-quadratic_forms(xs)).array() + offset;
}

double circular_gaussian_logpdf(const Eigen::VectorXcd& x, const MatrixXcd& sigma) {
  if (x.size() != sigma.rows()) throw InvalidInput("vector and covariance dimensions differ");
  HermitianFactor factor(sigma);
  return factor.log_densities(x)(0);
}

MatrixXd responsibilities(const PatchSet& ps, const NoisyMixture& model) {
  check_model(model, ps.patches.rows());
  MatrixXd lj = log_joint(ps.patches, model);
  const VectorXd norm = log_normalizers(lj);
  return (lj.colwise() - norm).array().exp();
}

double log_likelihood(const PatchSet& ps, const NoisyMixture& model) {
  check_model(model, ps.patches.rows());
  return log_normalizers(log_joint(ps.patches, model)).sum();
}

namespace {

void check_patches(const PatchSet& ps, std::size_t components) {
  const Index np = ps.patches.cols();
  if (components == 0) throw InvalidInput("EM needs at least one component");
  if (np < static_cast<Index>(components)) {
    throw InvalidInput("EM needs at least as many patches (" + std::to_string(np) +
                       ") as components (" + std::to_string(components) + ")");
  }
  if (!ps.patches.allFinite()) throw InvalidInput("patches contain non-finite samples");
}

EmResult run_em(const MatrixXcd& zs, NoisyMixture model, const EmOptions& opts, std::mt19937_64& rng) {
  const Index np = zs.cols();
  const auto k_count = static_cast<Index>(model.components());
  EmResult result;
  std::uniform_int_distribution<Index> pick(0, np - 1);
  for (int iter = 0;; ++iter) {
    MatrixXd lj = log_joint(zs, model);
    const VectorXd norm = log_normalizers(lj);
    const double ll = norm.sum();
    if (!std::isfinite(ll)) throw NumericalError("log-likelihood became non-finite");
    if (!result.log_likelihood.empty()) {
      const double prev = result.log_likelihood.back();
      if (ll < prev - 1e-9 * std::abs(prev)) {
        result.warnings.push_back("log-likelihood decreased at iteration " + std::to_string(iter));
      }
      result.log_likelihood.push_back(ll);
      if (std::abs(ll - prev) <= opts.rel_tol * std::abs(prev)) {
        result.converged = true;
        break;
      }
    } else {
      result.log_likelihood.push_back(ll);
    }
    if (iter >= opts.max_iters) break;

    // E-step.
    const MatrixXd resp = (lj.colwise() - norm).array().exp();
    const VectorXd mass = resp.colwise().sum().transpose();

    // M-step.
    bool rescued = false;
    for (Index k = 0; k < k_count; ++k) {
      auto& gamma = model.gammas[static_cast<std::size_t>(k)];
      auto& alpha = model.alphas[static_cast<std::size_t>(k)];
      if (mass(k) < kCollapseFraction * static_cast<double>(np)) {
        const Index donor = pick(rng);
        MatrixXcd outer = zs.col(donor) * zs.col(donor).adjoint();
        gamma = hermitian_from_lower(outer.triangularView<Eigen::Lower>());
        add_ridge(gamma, opts.reg_eps);
        alpha = 1.0 / static_cast<double>(np);
        rescued = true;
        result.warnings.push_back("component " + std::to_string(k) + " collapsed at iteration " +
                                  std::to_string(iter + 1) + "; reinitialized from patch " +
                                  std::to_string(donor));
        continue;
      }
      gamma = weighted_second_moment(zs, resp.col(k), mass(k), opts.reg_eps);
      alpha = mass(k) / static_cast<double>(np);
    }
    if (rescued) {
      const double total = std::accumulate(model.alphas.begin(), model.alphas.end(), 0.0);
      for (auto& a : model.alphas) a /= total;
    }
    result.iterations = iter + 1;
  }
  result.model = std::move(model);
  return result;
}

}  // namespace

EmResult em_fit(const PatchSet& ps, std::size_t components, const EmOptions& opts) {
  opts.validate();
  check_patches(ps, components);
  const MatrixXcd& zs = ps.patches;
  const Index np = zs.cols();
  const auto k_count = static_cast<Index>(components);

  std::mt19937_64 rng(opts.seed);
  NoisyMixture model;

  // Balanced random hard assignment: shuffled patch order dealt round-robin.
  std::vector<Index> order(static_cast<std::size_t>(np));
  std::iota(order.begin(), order.end(), Index{0});
  std::shuffle(order.begin(), order.end(), rng);
  model.alphas.assign(components, 1.0 / static_cast<double>(components));
  model.gammas.resize(components);
  for (Index k = 0; k < k_count; ++k) {
    VectorXd indicator = VectorXd::Zero(np);
    double count = 0.0;
    for (Index i = k; i < np; i += k_count) {
      indicator(order[static_cast<std::size_t>(i)]) = 1.0;
      count += 1.0;
    }
    model.gammas[static_cast<std::size_t>(k)] = weighted_second_moment(zs, indicator, count, opts.reg_eps);
  }
  return run_em(zs, std::move(model), opts, rng);
}

EmResult em_refine(const PatchSet& ps, const NoisyMixture& initial, const EmOptions& opts) {
  opts.validate();
  check_patches(ps, initial.components());
  check_model(initial, ps.patches.rows());
  std::mt19937_64 rng(opts.seed);
  return run_em(ps.patches, initial, opts, rng);
}

CleanMixture correct_covariances(const NoisyMixture& nm, double sigma) {
  if (!std::isfinite(sigma) || sigma < 0.0) throw InvalidInput("noise sigma must be finite and >= 0");
  const double var = sigma * sigma;
  CleanMixture out;
  out.alphas = nm.alphas;
  out.sigma_noise = sigma;
  out.sigmas.reserve(nm.gammas.size());
  for (const auto& gamma : nm.gammas) {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> eig(gamma);
    if (eig.info() != Eigen::Success) throw NumericalError("Hermitian eigendecomposition failed");
    const VectorXd shifted = eig.eigenvalues().array() - var;
    if (var == 0.0 && (shifted.array() >= 0.0).all()) {
      // Nothing to clip: keep Gamma bit-for-bit rather than a reconstruction.
      out.sigmas.push_back(gamma);
      continue;
    }
    const VectorXd clipped = shifted.cwiseMax(0.0);
    MatrixXcd sig = eig.eigenvectors() * clipped.asDiagonal() * eig.eigenvectors().adjoint();
    out.sigmas.push_back(hermitian_from_lower(sig.triangularView<Eigen::Lower>()));
  }
  return out;
}

}  // namespace mog
}  // namespace inphase
