#include "inphase/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include <png.h>

#include "inphase/errors.hpp"

namespace inphase::io {

namespace {

constexpr std::string_view kCimgMagic = "CIMG1\n";
constexpr std::string_view kCmogMagic = "CMOG1\n";
constexpr double kHermitianLoadTol = 1e-8;

class Writer {
 public:
  explicit Writer(const std::filesystem::path& path) : out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw InvalidInput("cannot open '" + path.string() + "' for writing");
  }
  void bytes(std::string_view s) { out_.write(s.data(), static_cast<std::streamsize>(s.size())); }
  template <typename U>
  void le(U v) {
    unsigned char buf[sizeof(U)];
    for (std::size_t i = 0; i < sizeof(U); ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
    out_.write(reinterpret_cast<const char*>(buf), sizeof(U));
  }
  void f64(double v) { le(std::bit_cast<std::uint64_t>(v)); }
  void finish(const std::filesystem::path& path) {
    out_.flush();
    if (!out_) throw InvalidInput("failed writing '" + path.string() + "'");
  }

 private:
  std::ofstream out_;
};

class Reader {
 public:
  explicit Reader(const std::filesystem::path& path) : path_(path), in_(path, std::ios::binary) {
    if (!in_) throw InvalidInput("cannot open '" + path.string() + "'");
  }
  void expect(std::string_view magic) {
    std::string got(magic.size(), '\0');
    in_.read(got.data(), static_cast<std::streamsize>(got.size()));
    if (!in_ || got != magic) throw InvalidInput("'" + path_.string() + "' has a bad magic header");
  }
  template <typename U>
  U le() {
    unsigned char buf[sizeof(U)];
    in_.read(reinterpret_cast<char*>(buf), sizeof(U));
    if (!in_) throw InvalidInput("'" + path_.string() + "' is truncated");
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(buf[i]) << (8 * i);
    return v;
  }
  double f64() { return std::bit_cast<double>(le<std::uint64_t>()); }
  void expect_end() {
    if (in_.peek() != std::char_traits<char>::eof()) {
      throw InvalidInput("'" + path_.string() + "' has trailing bytes");
    }
  }

 private:
  std::filesystem::path path_;
  std::ifstream in_;
};

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open '" + path.string() + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::size_t parse_size(const std::map<std::string, std::string>& kv, const std::string& key,
                       const std::filesystem::path& where) {
  auto it = kv.find(key);
  if (it == kv.end()) throw InvalidInput("'" + where.string() + "' lacks '" + key + "'");
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument(key);
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    throw InvalidInput("'" + where.string() + "' has a malformed '" + key + "'");
  }
}

}  // namespace

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidInput("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw InvalidInput("failed writing '" + path.string() + "'");
}

std::map<std::string, std::string> parse_key_values(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream is(text);
  std::string line;
  auto trim = [](std::string s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return std::string{};
    return s.substr(first, s.find_last_not_of(" \t\r") - first + 1);
  };
  while (std::getline(is, line)) {
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw InvalidInput("malformed key=value line: '" + line + "'");
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

void write_cimg(const std::filesystem::path& path, const ComplexImage& img) {
  if (img.height() > UINT32_MAX || img.width() > UINT32_MAX) throw InvalidInput("image too large for CIMG");
  Writer w(path);
  w.bytes(kCimgMagic);
  w.le(static_cast<std::uint32_t>(img.height()));
  w.le(static_cast<std::uint32_t>(img.width()));
  for (const Complex& v : img.data()) {
    w.f64(v.real());
    w.f64(v.imag());
  }
  w.finish(path);
}

ComplexImage read_cimg(const std::filesystem::path& path) {
  Reader r(path);
  r.expect(kCimgMagic);
  const auto h = r.le<std::uint32_t>();
  const auto w = r.le<std::uint32_t>();
  if (h == 0 || w == 0) throw InvalidInput("'" + path.string() + "' declares an empty image");
  std::vector<Complex> data(static_cast<std::size_t>(h) * w);
  for (auto& v : data) {
    const double re = r.f64();
    const double im = r.f64();
    v = Complex(re, im);
  }
  r.expect_end();
  ComplexImage img(h, w, std::move(data));
  img.require_finite();
  return img;
}

std::filesystem::path sidecar_path(const std::filesystem::path& raster) {
  std::filesystem::path p = raster;
  p += ".hdr";
  return p;
}

void write_phase_raster(const std::filesystem::path& path, const PhaseImage& phase) {
  Writer w(path);
  for (double v : phase.data()) w.f64(v);
  w.finish(path);
  std::ostringstream hdr;
  hdr << "format=raw-f64le\n"
      << "height=" << phase.height() << '\n'
      << "width=" << phase.width() << '\n'
      << "wrapped=" << (phase.wrapped() ? 1 : 0) << '\n';
  write_text(sidecar_path(path), hdr.str());
}

PhaseImage read_phase_raster(const std::filesystem::path& path) {
  const auto hdr_path = sidecar_path(path);
  const auto kv = parse_key_values(read_text(hdr_path));
  if (auto it = kv.find("format"); it == kv.end() || it->second != "raw-f64le") {
    throw InvalidInput("'" + hdr_path.string() + "' does not describe a raw-f64le raster");
  }
  const std::size_t h = parse_size(kv, "height", hdr_path);
  const std::size_t w = parse_size(kv, "width", hdr_path);
  const std::size_t wrapped = parse_size(kv, "wrapped", hdr_path);
  Reader r(path);
  std::vector<double> data(h * w);
  for (auto& v : data) v = r.f64();
  r.expect_end();
  PhaseImage img(h, w, wrapped != 0, std::move(data));
  img.validate();
  return img;
}

void write_cmog(const std::filesystem::path& path, const CleanMixture& model) {
  const std::size_t m = model.dim();
  Writer w(path);
  w.bytes(kCmogMagic);
  w.le(static_cast<std::uint64_t>(model.components()));
  w.le(static_cast<std::uint64_t>(m));
  w.f64(model.sigma_noise);
  for (double a : model.alphas) w.f64(a);
  for (const auto& s : model.sigmas) {
    for (Eigen::Index r = 0; r < s.rows(); ++r) {
      for (Eigen::Index c = 0; c < s.cols(); ++c) {
        w.f64(s(r, c).real());
        w.f64(s(r, c).imag());
      }
    }
  }
  w.finish(path);
}

CleanMixture read_cmog(const std::filesystem::path& path) {
  Reader r(path);
  r.expect(kCmogMagic);
  const auto k = r.le<std::uint64_t>();
  const auto m = r.le<std::uint64_t>();
  if (k == 0 || m == 0 || k > (1u << 20) || m > (1u << 16)) {
    throw InvalidInput("'" + path.string() + "' declares an implausible model size");
  }
  CleanMixture model;
  model.sigma_noise = r.f64();
  if (!std::isfinite(model.sigma_noise) || model.sigma_noise < 0.0) {
    throw InvalidInput("'" + path.string() + "' has an invalid noise level");
  }
  model.alphas.resize(k);
  for (auto& a : model.alphas) a = r.f64();
  const auto n = static_cast<Eigen::Index>(m);
  for (std::uint64_t c = 0; c < k; ++c) {
    Eigen::MatrixXcd s(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        const double re = r.f64();
        const double im = r.f64();
        s(i, j) = Complex(re, im);
      }
    }
    if (!s.allFinite() || mog::hermitian_defect(s) > kHermitianLoadTol) {
      throw InvalidInput("'" + path.string() + "' component " + std::to_string(c) + " is not Hermitian");
    }
    model.sigmas.push_back(std::move(s));
  }
  r.expect_end();
  return model;
}

unsigned char phase_to_gray(double phase) {
  const double t = (phase + imagecore::kPi) / imagecore::kTwoPi;
  const double v = std::round(std::clamp(t, 0.0, 1.0) * 255.0);
  return static_cast<unsigned char>(v);
}

void write_phase_png(const std::filesystem::path& path, const PhaseImage& phase) {
  std::FILE* fp = std::fopen(path.c_str(), "wb");
  if (fp == nullptr) throw InvalidInput("cannot open '" + path.string() + "' for writing");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png != nullptr ? png_create_info_struct(png) : nullptr;
  if (png == nullptr || info == nullptr || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
    throw InvalidInput("failed writing PNG '" + path.string() + "'");
  }
  std::vector<unsigned char> rows(phase.size());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = phase_to_gray(phase.data()[i]);
  std::vector<png_bytep> row_ptrs(phase.height());
  for (std::size_t r = 0; r < phase.height(); ++r) row_ptrs[r] = rows.data() + r * phase.width();

  png_init_io(png, fp);
  png_set_IHDR(png, info, static_cast<png_uint_32>(phase.width()), static_cast<png_uint_32>(phase.height()), 8,
               PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, row_ptrs.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  std::fclose(fp);
}

}  // namespace inphase::io
