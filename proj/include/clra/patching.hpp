#pragma once

#include <vector>

#include "clra/linalg.hpp"

namespace clra {

// Top-left corner of a p x p patch.
struct PatchPosition {
    int row = 0;
    int col = 0;

    bool operator==(const PatchPosition&) const = default;
};

// The anchor layout of a patch decomposition. Anchors step by `stride`
// along each axis and the final anchor is clamped to m-p (n-p) so the
// patches cover every pixel; positions are unique and row-major ordered.
struct PatchGrid {
    int image_rows = 0;
    int image_cols = 0;
    int patch_size = 0;
    int stride = 0;
    std::vector<PatchPosition> positions;
};

// Vectorized patches: row k of `vectors` is the p x p block at
// grid.positions[k], flattened row-major (length p^2).
struct PatchSet {
    PatchGrid grid;
    Matrix vectors;
};

// counts(i, j) = number of patches covering pixel (i, j).
using OverlapMap = Eigen::MatrixXi;

// A group of patches plus where they live, the unit reconstruction works on.
struct ClusterPatches {
    Matrix vectors;  // N_k x p^2, row-major patch layout
    std::vector<PatchPosition> positions;
};

// Anchor coordinates along one axis: {0, s, 2s, ...} with the last anchor
// clamped to extent - p.
std::vector<int> axis_anchors(int extent, int patch_size, int stride);

// Slide a p x p window with the given stride (1 <= s <= p), clamping the
// final row/column anchor for full coverage. Throws PatchTooLarge when p
// exceeds an image dimension, InvalidInput for a bad stride.
PatchSet extract_patches(const Matrix& image, int patch_size, int stride);

// Per-pixel covering-patch counts for an arbitrary position list.
// Throws InvalidPosition if any anchor puts the patch out of bounds.
OverlapMap overlap_map(const std::vector<PatchPosition>& positions,
                       int patch_size, int rows, int cols);

// Number of pixels covered by more than one of the listed patches.
long count_multi_covered(const OverlapMap& map);

// beta = (# pixels with count > 1) / (p^2 * N) for the given cluster.
// Throws EmptyCluster on an empty position list.
double overlap_proportion(const std::vector<PatchPosition>& positions,
                          int patch_size, int rows, int cols);

// ceil(N * (1 - beta)), the overlap-discounted patch count; always >= 1.
int effective_patch_count(int n_patches, double beta);

// Weighted-average reconstruction: each pixel is the mean of every patch
// value covering it. Throws CoverageGap if some pixel is covered by no
// patch. No clamping happens here; that is an export-time concern.
Matrix reconstruct_image(const std::vector<ClusterPatches>& clusters,
                         int rows, int cols, int patch_size);

// Convenience: rebuild straight from an (uncompressed) patch set.
Matrix reconstruct_image(const PatchSet& patches);

}  // namespace clra
