#include "inphase/metrics.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "json.hpp"

#include "inphase/errors.hpp"

namespace inphase {

namespace {

void check_same_shape(const PhaseImage& a, const PhaseImage& b) {
  if (a.height() != b.height() || a.width() != b.width()) {
    throw InvalidInput("phase images differ in size: " + std::to_string(a.height()) + "x" +
                       std::to_string(a.width()) + " vs " + std::to_string(b.height()) + "x" +
                       std::to_string(b.width()));
  }
  if (a.size() == 0) throw InvalidInput("phase images are empty");
}

double peak_db(std::size_t n, double squared_error) {
  const double peak = 4.0 * static_cast<double>(n) * imagecore::kPi * imagecore::kPi;
  if (squared_error == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak / squared_error);
}

}  // namespace

std::string MetricReport::to_key_value() const {
  std::ostringstream os;
  os << "psnr_db=" << metrics::format_db(psnr_db) << '\n';
  if (nelp) os << "nelp=" << *nelp << '\n';
  if (psnr_a_db) os << "psnr_a_db=" << metrics::format_db(*psnr_a_db) << '\n';
  os << "n_pixels=" << n_pixels << '\n';
  return os.str();
}

std::string MetricReport::to_json() const {
  auto db = [](double v) -> nlohmann::json {
    if (std::isfinite(v)) return v;
    return v > 0 ? "inf" : "-inf";
  };
  nlohmann::json j;
  j["psnr_db"] = db(psnr_db);
  j["nelp"] = nelp ? nlohmann::json(*nelp) : nlohmann::json(nullptr);
  j["psnr_a_db"] = psnr_a_db ? db(*psnr_a_db) : nlohmann::json(nullptr);
  j["n_pixels"] = n_pixels;
  return j.dump();
}

namespace metrics {

std::string format_db(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os.precision(17);
  os << value;
  return os.str();
}

double psnr(const PhaseImage& est_wrapped, const PhaseImage& truth_unwrapped) {
  check_same_shape(est_wrapped, truth_unwrapped);
  if (!est_wrapped.wrapped()) throw InvalidInput("PSNR expects a wrapped phase estimate");
  est_wrapped.validate();
  truth_unwrapped.validate();
  double sum = 0.0;
  auto est = est_wrapped.data();
  auto truth = truth_unwrapped.data();
  for (std::size_t i = 0; i < est.size(); ++i) {
    const double e = imagecore::wrap(est[i] - truth[i]);
    sum += e * e;
  }
  return peak_db(est.size(), sum);
}

UnwrappedScores nelp_psnr_a(const PhaseImage& est_unwrapped, const PhaseImage& truth_unwrapped) {
  check_same_shape(est_unwrapped, truth_unwrapped);
  est_unwrapped.validate();
  truth_unwrapped.validate();
  auto est = est_unwrapped.data();
  auto truth = truth_unwrapped.data();
  UnwrappedScores out;
  double sum = 0.0;
  for (std::size_t i = 0; i < est.size(); ++i) {
    const double e = est[i] - truth[i];
    if (std::abs(e) > imagecore::kPi) {
      ++out.nelp;
    } else {
      sum += e * e;
    }
  }
  out.psnr_a_db = out.nelp == est.size() ? -std::numeric_limits<double>::infinity()
                                         : peak_db(est.size(), sum);
  return out;
}

MetricReport evaluate(const PhaseImage& est_wrapped, const PhaseImage& truth_unwrapped,
                      const PhaseImage* est_unwrapped) {
  MetricReport r;
  r.psnr_db = psnr(est_wrapped, truth_unwrapped);
  r.n_pixels = truth_unwrapped.size();
  if (est_unwrapped != nullptr) {
    const auto s = nelp_psnr_a(*est_unwrapped, truth_unwrapped);
    r.nelp = s.nelp;
    r.psnr_a_db = s.psnr_a_db;
  }
  return r;
}

}  // namespace metrics
}  // namespace inphase
