#pragma once

#include <filesystem>

#include "itwf/core.hpp"

namespace itwf {

/// Grayscale image with pixel values in [0, 1], stored row-major.
struct GrayImage {
  Index rows = 0;
  Index cols = 0;
  RealVector pixels;

  /// Flattened signal of length rows * cols.
  template <FieldScalar T>
  Signal<T> to_signal() const {
    return pixels.cast<T>();
  }
};

/// Reads an 8-bit binary PGM (P5); pixels mapped to v / maxval. Throws IoError.
GrayImage read_pgm(std::filesystem::path const &path);

/// Writes P5 with values clamped to [0, 1] and scaled to 0-255. Throws IoError.
void write_pgm(std::filesystem::path const &path, GrayImage const &image);

/// Real part of a flattened signal reshaped to rows x cols, unclamped.
GrayImage image_from_signal(ComplexSignal const &z, Index rows, Index cols);

/// Deterministic test scene: smooth shading, a few blocks and a disc.
GrayImage synthetic_scene(Index rows, Index cols);

} // namespace itwf
