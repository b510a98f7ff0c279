#include "itwf/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <string>

#include "itwf/errors.hpp"

namespace itwf {

namespace {

// Next whitespace-delimited header token, skipping '#' comments.
std::string header_token(std::istream &in) {
  std::string token;
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') { c = in.get(); }
    } else if (std::isspace(c)) {
      if (!token.empty()) { return token; }
    } else {
      token.push_back(static_cast<char>(c));
    }
    c = in.get();
  }
  return token;
}

long header_number(std::istream &in, std::filesystem::path const &path, char const *what) {
  std::string const token = header_token(in);
  try {
    size_t used = 0;
    long const v = std::stol(token, &used);
    if (used != token.size() || v <= 0) { throw std::invalid_argument(token); }
    return v;
  } catch (std::exception const &) {
    throw IoError("PGM " + path.string() + ": bad " + what + " '" + token + "'");
  }
}

} // namespace

GrayImage read_pgm(std::filesystem::path const &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) { throw IoError("cannot open " + path.string()); }
  if (header_token(in) != "P5") { throw IoError("PGM " + path.string() + ": not a binary P5 file"); }
  long const cols = header_number(in, path, "width");
  long const rows = header_number(in, path, "height");
  long const maxval = header_number(in, path, "maxval");
  if (maxval > 255) { throw IoError("PGM " + path.string() + ": only 8-bit images are supported"); }
  GrayImage image{rows, cols, RealVector(rows * cols)};
  std::string buffer(static_cast<size_t>(rows * cols), '\0');
  in.read(buffer.data(), static_cast<std::streamsize>(buffer.size()));
  if (in.gcount() != static_cast<std::streamsize>(buffer.size())) {
    throw IoError("PGM " + path.string() + ": truncated pixel data");
  }
  for (size_t i = 0; i < buffer.size(); ++i) {
    image.pixels[static_cast<Index>(i)] = static_cast<unsigned char>(buffer[i]) / static_cast<double>(maxval);
  }
  return image;
}

void write_pgm(std::filesystem::path const &path, GrayImage const &image) {
  if (image.pixels.size() != image.rows * image.cols) { throw IoError("write_pgm: pixel count mismatch"); }
  std::ofstream out(path, std::ios::binary);
  if (!out) { throw IoError("cannot write " + path.string()); }
  out << "P5\n" << image.cols << " " << image.rows << "\n255\n";
  std::string buffer(static_cast<size_t>(image.pixels.size()), '\0');
  for (Index i = 0; i < image.pixels.size(); ++i) {
    double const v = std::clamp(image.pixels[i], 0.0, 1.0);
    buffer[static_cast<size_t>(i)] = static_cast<char>(static_cast<unsigned char>(std::lround(v * 255.0)));
  }
  out.write(buffer.data(), static_cast<std::streamsize>(buffer.size()));
  if (!out) { throw IoError("write failed for " + path.string()); }
}

GrayImage image_from_signal(ComplexSignal const &z, Index rows, Index cols) {
  require_same_length(z.size(), rows * cols, "image_from_signal");
  return {rows, cols, z.real()};
}

GrayImage synthetic_scene(Index rows, Index cols) {
  GrayImage image{rows, cols, RealVector(rows * cols)};
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) {
      double const u = (static_cast<double>(r) + 0.5) / static_cast<double>(rows);
      double const v = (static_cast<double>(c) + 0.5) / static_cast<double>(cols);
      double value = 0.25 + 0.35 * v + 0.1 * std::sin(9.0 * u) * std::cos(7.0 * v);
      if (u > 0.15 && u < 0.45 && v > 0.1 && v < 0.35) { value = 0.9; }
      if (u > 0.6 && u < 0.85 && v > 0.55 && v < 0.9) { value = 0.1; }
      double const du = u - 0.65;
      double const dv = v - 0.25;
      if (du * du + dv * dv < 0.02) { value = 0.7; }
      image.pixels[r * cols + c] = std::clamp(value, 0.0, 1.0);
    }
  }
  return image;
}

} // namespace itwf
