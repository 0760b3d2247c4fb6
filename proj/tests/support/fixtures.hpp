#pragma once

// Shared fixtures for unit and acceptance tests: seeded random matrices and
// the synthetic images the behavioural suites run on.

#include <algorithm>
#include <cmath>

#include "clra/linalg.hpp"
#include "clra/metrics.hpp"
#include "clra/rng.hpp"

namespace fixtures {

// Dense matrix with i.i.d. uniform entries in [lo, hi).
inline clra::Matrix random_matrix(clra::Rng& rng, int rows, int cols,
                                  double lo = -1.0, double hi = 1.0) {
    clra::Matrix a(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) a(i, j) = rng.range(lo, hi);
    return a;
}

// Random matrix of exact rank r (product of two thin uniform factors).
inline clra::Matrix random_low_rank(clra::Rng& rng, int rows, int cols, int r) {
    return random_matrix(rng, rows, r) * random_matrix(rng, r, cols);
}

// Grayscale test image in [0, 255]: smooth low-frequency background plus
// uniform noise, the generic "natural-ish" input for round-trip tests.
inline clra::Matrix random_image(clra::Rng& rng, int rows, int cols) {
    clra::Matrix img(rows, cols);
    const double fr = rng.range(0.5, 2.0);
    const double fc = rng.range(0.5, 2.0);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) {
            const double smooth =
                127.0 + 60.0 * std::sin(fr * 3.14159 * i / rows) *
                            std::cos(fc * 3.14159 * j / cols);
            img(i, j) = std::clamp(smooth + rng.range(-20.0, 20.0), 0.0, 255.0);
        }
    }
    return img;
}

// Default disk geometry shared by textured_disk_image and disk_mask:
// centered, radius a quarter of the short side.
inline double disk_radius(int rows, int cols) {
    return 0.25 * std::min(rows, cols);
}

// Flat background with a high-variance textured disk: the reconstruction
// quality inside the disk separates region-adaptive compression from a
// single global truncation. Returns the image; disk_mask() gives the region.
inline clra::Matrix textured_disk_image(clra::Rng& rng, int rows, int cols) {
    const double cy = (rows - 1) / 2.0;
    const double cx = (cols - 1) / 2.0;
    const double radius = disk_radius(rows, cols);
    clra::Matrix img(rows, cols);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) {
            const double d = std::hypot(i - cy, j - cx);
            if (d <= radius) {
                // Fine high-contrast texture: per-pixel noise on a checker.
                const double checker = ((i / 2 + j / 2) % 2 == 0) ? 180.0 : 60.0;
                img(i, j) = std::clamp(checker + rng.range(-50.0, 50.0), 0.0, 255.0);
            } else {
                img(i, j) = 30.0;
            }
        }
    }
    return img;
}

inline clra::RegionMask disk_mask(int rows, int cols) {
    const double cy = (rows - 1) / 2.0;
    const double cx = (cols - 1) / 2.0;
    const double radius = disk_radius(rows, cols);
    clra::RegionMask mask = clra::RegionMask::Constant(rows, cols, false);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j)
            if (std::hypot(i - cy, j - cx) <= radius) mask(i, j) = true;
    return mask;
}

}  // namespace fixtures
