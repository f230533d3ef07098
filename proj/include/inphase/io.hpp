#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "inphase/imagecore.hpp"
#include "inphase/mog.hpp"

namespace inphase::io {

// CIMG: "CIMG1\n", u32 height, u32 width, then (re, im) f64 pairs, row-major, little-endian.
void write_cimg(const std::filesystem::path& path, const ComplexImage& img);
ComplexImage read_cimg(const std::filesystem::path& path);

// Phase raster: raw little-endian f64 values in `path`, with a key=value sidecar
// at `path` + ".hdr" (format, height, width, wrapped).
void write_phase_raster(const std::filesystem::path& path, const PhaseImage& phase);
PhaseImage read_phase_raster(const std::filesystem::path& path);
std::filesystem::path sidecar_path(const std::filesystem::path& raster);

// CMOG: "CMOG1\n", u64 K, u64 m, f64 sigma, K f64 alphas, then K m x m complex
// matrices as interleaved (re, im) f64, row-major, little-endian.
void write_cmog(const std::filesystem::path& path, const CleanMixture& model);
CleanMixture read_cmog(const std::filesystem::path& path);

/// 8-bit grayscale PNG, [-pi, pi) mapped linearly onto [0, 255].
void write_phase_png(const std::filesystem::path& path, const PhaseImage& phase);
unsigned char phase_to_gray(double phase);

void write_text(const std::filesystem::path& path, const std::string& text);
std::map<std::string, std::string> parse_key_values(const std::string& text);

}  // namespace inphase::io
