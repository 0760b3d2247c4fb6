#pragma once

#include <string>

#include "clra/linalg.hpp"
#include "clra/metrics.hpp"

namespace clra {

// Pixels as doubles plus the intensity ceiling they were encoded against.
struct LoadedImage {
    Matrix pixels;
    double max_value = 255.0;
};

// Reads an 8-bit grayscale image, PGM (P5) or PNG. Colour, palette,
// 16-bit and alpha inputs are rejected with an IoError describing why.
LoadedImage read_image(const std::string& path);

// Nonzero pixels of an 8-bit grayscale image, shape-checked by the caller.
RegionMask read_mask(const std::string& path);

// Exports clamp to [0, max_value] and round to integer intensities.
void write_png(const std::string& path, const Matrix& pixels, double max_value);
void write_pgm(const std::string& path, const Matrix& pixels, double max_value);

// Dispatch on the output extension: .pgm writes PGM, everything else PNG.
void write_image(const std::string& path, const Matrix& pixels, double max_value);

}  // namespace clra
