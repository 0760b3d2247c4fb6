#pragma once

#include "clra/linalg.hpp"

namespace clra {

// Binary region-of-interest gate, same shape as the images it restricts.
using RegionMask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

// Signed Sobel responses and their pointwise magnitude.
struct GradientField {
    Matrix sx;
    Matrix sy;
    Matrix magnitude;  // sqrt(sx^2 + sy^2)
};

RegionMask full_mask(int rows, int cols);

// Pixels strictly above tau.
RegionMask threshold_mask(const Matrix& image, double tau);

// Otsu's between-class-variance threshold from a 256-bin histogram over
// [0, max_value]. Returns a tau suitable for threshold_mask.
double otsu_threshold(const Matrix& image, double max_value);

// Mean squared difference over the masked pixels. Throws EmptyRegion if
// the mask selects nothing, InvalidInput on shape mismatch.
double mse(const Matrix& a, const Matrix& b, const RegionMask& mask);

// 10*log10(MAX^2 / MSE); +infinity when the masked pixels are identical.
double psnr(const Matrix& a, const Matrix& b, const RegionMask& mask,
            double max_value);

// Single-window structural similarity over the masked region, using the
// region's means, variances and covariance with stabilizers
// C1 = (0.01*MAX)^2 and C2 = (0.03*MAX)^2. Needs at least two pixels.
double ssim(const Matrix& a, const Matrix& b, const RegionMask& mask,
            double max_value);

// Mean of per-window SSIM over square windows whose top-left corners step
// by one pixel, counting only windows fully inside the mask. Cross-check
// variant; the single-window form above is the default everywhere.
double ssim_sliding(const Matrix& a, const Matrix& b, const RegionMask& mask,
                    double max_value, int window = 8);

// |intersection| / |union|. Throws UndefinedIoU when both masks are empty.
double iou(const RegionMask& a, const RegionMask& b);

// Frobenius norm of the masked difference over the Frobenius norm of the
// masked reference. Throws DegenerateRegion when the reference is all zero.
double relative_error(const Matrix& a, const Matrix& b, const RegionMask& mask);

// 3x3 Sobel with replicate padding. Throws ImageTooSmall below 3x3.
GradientField sobel(const Matrix& image);

// Edge-preservation index: 1 - sum_mask|S_a - S_b| / sum_mask|S_a| on
// gradient magnitudes. Border pixels are excluded from the sums (their
// gradients are padding artifacts). Throws DegenerateRegion when the
// reference has no edges in the effective region.
double epi(const Matrix& a, const Matrix& b, const RegionMask& mask);

}  // namespace clra
