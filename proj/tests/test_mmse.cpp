#include "doctest.h"

#include <cmath>

#include "inphase/errors.hpp"
#include "inphase/mmse.hpp"
#include "support/oracles.hpp"
#include "support/random.hpp"

using namespace inphase;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;

namespace {

CleanMixture single(const MatrixXcd& sigma, double noise) {
  CleanMixture cm;
  cm.alphas = {1.0};
  cm.sigmas = {sigma};
  cm.sigma_noise = noise;
  return cm;
}

CleanMixture scalar_mixture(const std::vector<double>& alphas, const std::vector<double>& variances, double noise) {
  CleanMixture cm;
  cm.alphas = alphas;
  for (double v : variances) cm.sigmas.push_back(MatrixXcd::Constant(1, 1, v));
  cm.sigma_noise = noise;
  return cm;
}

CleanMixture random_mixture(testing::Rng& rng, Eigen::Index m, std::size_t k, double noise) {
  CleanMixture cm;
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    cm.alphas.push_back(rng.uniform(0.1, 1.0));
    total += cm.alphas.back();
    cm.sigmas.push_back(rng.hermitian_psd(m, 1 + static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(m)))) *
                        rng.uniform(0.5, 3.0));
  }
  for (auto& a : cm.alphas) a /= total;
  cm.sigma_noise = noise;
  return cm;
}

double max_abs(const MatrixXcd& a) { return a.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("Wiener filters in closed form") {
  const WienerBank identity = mmse::build_wiener_bank(single(MatrixXcd::Identity(3, 3), 1.0));
  CHECK(max_abs(identity.filter(0) - 0.5 * MatrixXcd::Identity(3, 3)) <= 1e-14);

  const WienerBank zero = mmse::build_wiener_bank(single(MatrixXcd::Zero(3, 3), 1.0));
  CHECK(max_abs(zero.filter(0)) <= 1e-14);

  MatrixXcd d = MatrixXcd::Zero(2, 2);
  d(0, 0) = 3.0;
  const WienerBank diag = mmse::build_wiener_bank(single(d, 1.0));
  MatrixXcd expect = MatrixXcd::Zero(2, 2);
  expect(0, 0) = 0.75;
  CHECK(max_abs(diag.filter(0) - expect) <= 1e-14);
}

TEST_CASE("Wiener bank rejects a singular noiseless component") {
  MatrixXcd d = MatrixXcd::Zero(2, 2);
  d(0, 0) = 3.0;
  CHECK_THROWS_AS(mmse::build_wiener_bank(single(d, 0.0)), InvalidInput);
  CHECK_NOTHROW(mmse::build_wiener_bank(single(MatrixXcd::Identity(2, 2), 0.0)));
}

TEST_CASE("Wiener filters have singular values in the unit interval") {
  testing::Rng rng(3);
  for (int t = 0; t < 20; ++t) {
    const CleanMixture cm = random_mixture(rng, 6, 3, rng.uniform(0.05, 1.0));
    const WienerBank bank = mmse::build_wiener_bank(cm);
    for (std::size_t k = 0; k < 3; ++k) {
      const Eigen::JacobiSVD<MatrixXcd> svd(bank.filter(k));
      CHECK(svd.singularValues().maxCoeff() <= 1.0 + 1e-9);
      CHECK(svd.singularValues().minCoeff() >= -1e-9);
      for (int s = 0; s < 5; ++s) {
        const VectorXcd z = rng.vector(6);
        CHECK((bank.filter(k) * z).norm() <= z.norm() * (1.0 + 1e-12));
      }
    }
  }
}

TEST_CASE("single component with identity prior halves the input") {
  const CleanMixture cm = single(MatrixXcd::Identity(4, 4), 1.0);
  const WienerBank bank = mmse::build_wiener_bank(cm);
  testing::Rng rng(10);
  for (int t = 0; t < 10; ++t) {
    const VectorXcd z = rng.vector(4) * 3.0;
    CHECK(max_abs(mmse::mmse_estimate(z, cm, bank) - z / 2.0) <= 1e-14);
  }
}

TEST_CASE("single component equals the dense Wiener formula") {
  testing::Rng rng(11);
  for (Eigen::Index m : {1, 4, 9, 16}) {
    for (int t = 0; t < 5; ++t) {
      const MatrixXcd sigma = rng.hermitian_pd(m);
      const double noise = rng.uniform(0.1, 1.5);
      const CleanMixture cm = single(sigma, noise);
      const WienerBank bank = mmse::build_wiener_bank(cm);
      const MatrixXcd shifted = sigma + noise * noise * MatrixXcd::Identity(m, m);
      const MatrixXcd dense = sigma * shifted.inverse();
      const VectorXcd z = rng.vector(m);
      const VectorXcd expect = dense * z;
      CHECK((mmse::mmse_estimate(z, cm, bank) - expect).norm() <= 1e-10 * expect.norm());
    }
  }
}

TEST_CASE("scalar posterior mean agrees with quadrature") {
  const CleanMixture cm = scalar_mixture({0.5, 0.5}, {4.0, 0.25}, 1.0);
  const WienerBank bank = mmse::build_wiener_bank(cm);
  VectorXcd z(1);
  z(0) = 1.0;
  const Complex got = mmse::mmse_estimate(z, cm, bank)(0);
  const Complex ref = testing::posterior_mean_quadrature(z(0), {0.5, 0.5}, {4.0, 0.25}, 1.0);
  CHECK(std::abs(got - ref) <= 1e-3 * std::abs(ref));
}

TEST_CASE("randomized scalar mixtures agree with quadrature") {
  testing::Rng rng(12);
  for (std::size_t k = 1; k <= 3; ++k) {
    for (double noise_var : {0.25, 1.0}) {
      std::vector<double> alphas;
      std::vector<double> vars;
      double total = 0.0;
      for (std::size_t i = 0; i < k; ++i) {
        alphas.push_back(rng.uniform(0.2, 1.0));
        total += alphas.back();
        vars.push_back(rng.uniform(0.2, 3.0));
      }
      for (auto& a : alphas) a /= total;
      const CleanMixture cm = scalar_mixture(alphas, vars, std::sqrt(noise_var));
      const WienerBank bank = mmse::build_wiener_bank(cm);
      for (int t = 0; t < 4; ++t) {
        VectorXcd z(1);
        z(0) = Complex{rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
        const Complex got = mmse::mmse_estimate(z, cm, bank)(0);
        const Complex ref = testing::posterior_mean_quadrature(z(0), alphas, vars, noise_var);
        CHECK(std::abs(got - ref) <= 1e-3 * std::abs(ref));
      }
    }
  }
}

TEST_CASE("posterior mean is equivariant under a global phase") {
  testing::Rng rng(13);
  const CleanMixture cm = random_mixture(rng, 9, 4, 0.5);
  const WienerBank bank = mmse::build_wiener_bank(cm);
  for (int t = 0; t < 100; ++t) {
    const VectorXcd z = rng.vector(9) * 2.0;
    const Complex phase = std::polar(1.0, rng.uniform(-3.2, 3.2));
    const VectorXcd lhs = mmse::mmse_estimate(phase * z, cm, bank);
    const VectorXcd rhs = phase * mmse::mmse_estimate(z, cm, bank);
    CHECK((lhs - rhs).norm() <= 1e-10 * std::max(1.0, rhs.norm()));
  }
}

TEST_CASE("posterior weights form a convex combination") {
  testing::Rng rng(14);
  const CleanMixture cm = random_mixture(rng, 4, 5, 0.3);
  const WienerBank bank = mmse::build_wiener_bank(cm);
  const MatrixXcd zs = rng.matrix(4, 200) * 2.0;
  const Eigen::MatrixXd w = bank.posterior_weights(zs);
  CHECK(w.rows() == 5);
  CHECK((w.array() >= 0.0).all());
  CHECK(((w.colwise().sum().array() - 1.0).abs() <= 1e-10).all());
  for (Eigen::Index i = 0; i < zs.cols(); ++i) {
    VectorXcd mix = VectorXcd::Zero(4);
    for (std::size_t k = 0; k < 5; ++k) mix += w(static_cast<Eigen::Index>(k), i) * (bank.filter(k) * zs.col(i));
    CHECK((mmse::mmse_estimate(zs.col(i), cm, bank) - mix).norm() <= 1e-12 * std::max(1.0, mix.norm()));
  }
}

TEST_CASE("patch set denoising") {
  testing::Rng rng(15);
  PatchSet ps;
  ps.side = 2;
  ps.patches = rng.matrix(4, 50);
  for (std::size_t i = 0; i < 50; ++i) ps.positions.push_back({i / 10, i % 10});

  SUBCASE("vanishing noise leaves patches unchanged") {
    CleanMixture cm = random_mixture(rng, 4, 2, 1e-6);
    for (auto& s : cm.sigmas) s += MatrixXcd::Identity(4, 4);
    const PatchSet out = mmse::denoise_patchset(ps, cm);
    CHECK(out.positions == ps.positions);
    CHECK((out.patches - ps.patches).norm() <= 1e-4 * ps.patches.norm());
  }
  SUBCASE("zero patches stay zero") {
    PatchSet zeros = ps;
    zeros.patches.setZero();
    const PatchSet out = mmse::denoise_patchset(zeros, random_mixture(rng, 4, 3, 0.5));
    CHECK(out.patches.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("single component is a plain matrix product") {
    const MatrixXcd sigma = rng.hermitian_pd(4);
    const CleanMixture cm = single(sigma, 0.7);
    const PatchSet out = mmse::denoise_patchset(ps, cm);
    const MatrixXcd w = sigma * (sigma + 0.49 * MatrixXcd::Identity(4, 4)).inverse();
    for (Eigen::Index i = 0; i < ps.patches.cols(); ++i) {
      VectorXcd expect = VectorXcd::Zero(4);
      for (Eigen::Index r = 0; r < 4; ++r)
        for (Eigen::Index c = 0; c < 4; ++c) expect(r) += w(r, c) * ps.patches(c, i);
      CHECK((out.patches.col(i) - expect).norm() <= 1e-10 * std::max(1.0, expect.norm()));
    }
  }
  SUBCASE("batch and single-patch paths agree") {
    const CleanMixture cm = random_mixture(rng, 4, 3, 0.4);
    const WienerBank bank = mmse::build_wiener_bank(cm);
    const PatchSet out = mmse::denoise_patchset(ps, bank);
    for (Eigen::Index i = 0; i < ps.patches.cols(); ++i) {
      const VectorXcd single_path = mmse::mmse_estimate(ps.patches.col(i), cm, bank);
      CHECK((out.patches.col(i) - single_path).norm() <= 1e-12 * std::max(1.0, single_path.norm()));
    }
  }
  SUBCASE("dimension mismatch") {
    CHECK_THROWS_AS(mmse::denoise_patchset(ps, single(MatrixXcd::Identity(9, 9), 1.0)), InvalidInput);
  }
}

TEST_CASE("estimation noise level can be overridden") {
  const CleanMixture cm = single(MatrixXcd::Identity(2, 2), 0.0);
  const CleanMixture noisy = mmse::with_noise(cm, 1.0);
  CHECK(noisy.sigma_noise == 1.0);
  CHECK(noisy.sigmas[0] == cm.sigmas[0]);
  CHECK_THROWS_AS(mmse::with_noise(cm, -1.0), InvalidInput);
}
