#include "rwprior/harness/pgm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace rwprior {

namespace {

// Next whitespace-separated header token, skipping '#' comments.
std::string header_token(std::istream& in) {
  std::string tok;
  char ch;
  while (in.get(ch)) {
    if (ch == '#') {
      std::string ignored;
      std::getline(in, ignored);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(ch))) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(ch);
  }
  return tok;
}

}  // namespace

void write_pgm(const std::string& path, const Tensor& image, PgmFormat format) {
  const Shape s = image.shape();
  if (s.n != 1 || s.c != 1) throw ShapeError("write_pgm: expected a (1, 1, H, W) image, got " + to_string(s));
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_pgm: cannot open " + path);
  out << (format == PgmFormat::Binary ? "P5" : "P2") << "\n" << s.w << " " << s.h << "\n255\n";
  for (std::size_t y = 0; y < s.h; ++y) {
    for (std::size_t x = 0; x < s.w; ++x) {
      const auto v = static_cast<int>(std::lround(std::clamp(image.at(0, 0, y, x), 0.0, 1.0) * 255.0));
      if (format == PgmFormat::Binary)
        out.put(static_cast<char>(v));
      else
        out << v << (x + 1 == s.w ? '\n' : ' ');
    }
  }
  if (!out) throw std::runtime_error("write_pgm: write failed for " + path);
}

Tensor read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_pgm: cannot open " + path);
  const std::string magic = header_token(in);
  if (magic != "P2" && magic != "P5") throw std::runtime_error("read_pgm: " + path + " is not a P2/P5 PGM");
  const std::size_t w = std::stoul(header_token(in));
  const std::size_t h = std::stoul(header_token(in));
  const unsigned long maxval = std::stoul(header_token(in));
  if (maxval == 0 || maxval > 65535) throw std::runtime_error("read_pgm: bad maxval in " + path);
  Tensor img({1, 1, h, w});
  for (double& v : img.values()) {
    unsigned long raw = 0;
    if (magic == "P2") {
      if (!(in >> raw)) throw std::runtime_error("read_pgm: truncated data in " + path);
    } else if (maxval < 256) {
      char c;
      if (!in.get(c)) throw std::runtime_error("read_pgm: truncated data in " + path);
      raw = static_cast<unsigned char>(c);
    } else {
      char hi, lo;
      if (!in.get(hi) || !in.get(lo)) throw std::runtime_error("read_pgm: truncated data in " + path);
      raw = (static_cast<unsigned long>(static_cast<unsigned char>(hi)) << 8) | static_cast<unsigned char>(lo);
    }
    v = static_cast<double>(raw) / static_cast<double>(maxval);
  }
  return img;
}

}  // namespace rwprior
