#pragma once

#include "gdps/image.hpp"

#include <filesystem>

namespace gdps {

// Raw binary image: 8-byte magic "GDPSF64\0", height and width as uint32
// little-endian, then height*width little-endian doubles in row-major order.
// Round trips are bit exact.
void write_f64(const std::filesystem::path &path, const ImageField &image);
ImageField read_f64(const std::filesystem::path &path);

/// Plain (P2) graymap, min-max scaled to 0..255. For viewing only.
void write_pgm(const std::filesystem::path &path, const ImageField &image);
/// Reads P2 or P5 graymaps, scaling grey levels by 1/maxval into [0, 1].
ImageField read_pgm(const std::filesystem::path &path);

/// Dispatches on the extension: .f64 or .pgm.
ImageField read_image(const std::filesystem::path &path);

} // namespace gdps
