#include "qcomm/stego.hpp"

#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>

#include "qcomm/error.hpp"

namespace qcomm::stego {

namespace {

void skip_space_and_comments(std::istream& in) {
  for (int c = in.peek(); c != EOF; c = in.peek()) {
    if (c == '#') {
      std::string line;
      std::getline(in, line);
    } else if (std::isspace(c)) {
      in.get();
    } else {
      break;
    }
  }
}

long read_header_int(std::istream& in, const char* what) {
  skip_space_and_comments(in);
  long v = -1;
  in >> v;
  require(static_cast<bool>(in) && v >= 0, std::string("PPM: bad or missing ") + what);
  return v;
}

}  // namespace

void RgbImage::validate() const {
  require(width > 0 && height > 0, "image dimensions must be positive");
  require(pixels.size() == static_cast<std::size_t>(width) * static_cast<std::size_t>(height),
          "pixel count must equal width x height");
}

RgbImage read_ppm(std::istream& in) {
  char magic[2] = {0, 0};
  in.read(magic, 2);
  require(in && magic[0] == 'P' && (magic[1] == '3' || magic[1] == '6'),
          "PPM: expected P3 or P6 magic");
  RgbImage img;
  img.width = static_cast<int>(read_header_int(in, "width"));
  img.height = static_cast<int>(read_header_int(in, "height"));
  const long maxval = read_header_int(in, "maxval");
  require(maxval == 255, "PPM: only maxval 255 is supported");
  require(img.width > 0 && img.height > 0, "PPM: dimensions must be positive");
  const auto n = static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height);
  img.pixels.resize(n);
  if (magic[1] == '6') {
    in.get();  // single whitespace byte ends the header
    for (auto& p : img.pixels) {
      in.read(reinterpret_cast<char*>(p.data()), 3);
      require(static_cast<bool>(in), "PPM: truncated pixel data");
    }
  } else {
    for (auto& p : img.pixels)
      for (auto& ch : p) {
        const long v = read_header_int(in, "sample");
        require(v <= 255, "PPM: sample above maxval");
        ch = static_cast<std::uint8_t>(v);
      }
  }
  return img;
}

RgbImage read_ppm_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), "cannot open image '" + path + "'");
  return read_ppm(in);
}

void write_ppm(std::ostream& out, const RgbImage& img, PpmFormat format) {
  img.validate();
  out << (format == PpmFormat::Binary ? "P6" : "P3") << '\n'
      << img.width << ' ' << img.height << "\n255\n";
  if (format == PpmFormat::Binary) {
    for (const auto& p : img.pixels) out.write(reinterpret_cast<const char*>(p.data()), 3);
    return;
  }
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      const auto& p = img.pixels[static_cast<std::size_t>(y * img.width + x)];
      out << (x ? " " : "") << int(p[0]) << ' ' << int(p[1]) << ' ' << int(p[2]);
    }
    out << '\n';
  }
}

void write_ppm_file(const std::string& path, const RgbImage& img, PpmFormat format) {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), "cannot write image '" + path + "'");
  write_ppm(out, img, format);
}

RgbImage lsb_embed(const RgbImage& img, const cipher::BitSequence& payload) {
  img.validate();
  require(payload.size() <= capacity_bits(img),
          "payload of " + std::to_string(payload.size()) + " bits exceeds capacity of " +
              std::to_string(capacity_bits(img)));
  RgbImage out = img;
  for (std::size_t i = 0; i < payload.size(); i += 2) {
    auto& ch = out.pixels[i / 6][(i / 2) % 3];
    require(payload[i] <= 1 && (i + 1 >= payload.size() || payload[i + 1] <= 1),
            "payload bits must be 0 or 1");
    if (i + 1 < payload.size())
      ch = static_cast<std::uint8_t>((ch & 0xFCu) | (payload[i] << 1) | payload[i + 1]);
    else
      ch = static_cast<std::uint8_t>((ch & 0xFDu) | (payload[i] << 1));
  }
  return out;
}

cipher::BitSequence lsb_extract(const RgbImage& img, std::size_t n_bits) {
  img.validate();
  require(n_bits <= capacity_bits(img), "requested " + std::to_string(n_bits) +
                                            " bits exceeds capacity of " +
                                            std::to_string(capacity_bits(img)));
  cipher::BitSequence out;
  out.reserve(n_bits);
  for (std::size_t i = 0; i < n_bits; ++i) {
    const auto ch = img.pixels[i / 6][(i / 2) % 3];
    out.push_back(static_cast<std::uint8_t>(i % 2 == 0 ? (ch >> 1) & 1u : ch & 1u));
  }
  return out;
}

}  // namespace qcomm::stego
