#pragma once

// Two-bit LSB steganography on 8-bit RGB images, with PPM (P3/P6) I/O.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "qcomm/ciphers.hpp"

namespace qcomm::stego {

using Pixel = std::array<std::uint8_t, 3>;

struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<Pixel> pixels;  // row-major

  void validate() const;
};

enum class PpmFormat { Ascii, Binary };

RgbImage read_ppm(std::istream& in);
RgbImage read_ppm_file(const std::string& path);
void write_ppm(std::ostream& out, const RgbImage& img, PpmFormat format = PpmFormat::Binary);
void write_ppm_file(const std::string& path, const RgbImage& img, PpmFormat format = PpmFormat::Binary);

inline std::size_t capacity_bits(const RgbImage& img) { return 6 * img.pixels.size(); }

// Two payload bits per channel, R, G, B, pixels in row-major order; the first
// bit lands in bit 1. With an odd payload the last channel keeps its bit 0.
RgbImage lsb_embed(const RgbImage& img, const cipher::BitSequence& payload);
cipher::BitSequence lsb_extract(const RgbImage& img, std::size_t n_bits);

}  // namespace qcomm::stego
