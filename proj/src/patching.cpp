#include "clra/patching.hpp"

#include <cmath>
#include <string>

#include "clra/errors.hpp"

namespace clra {

std::vector<int> axis_anchors(int extent, int patch_size, int stride) {
    const int last = extent - patch_size;
    std::vector<int> anchors;
    for (int a = 0; a <= last; a += stride) anchors.push_back(a);
    if (anchors.back() != last) anchors.push_back(last);
    return anchors;
}

PatchSet extract_patches(const Matrix& image, int patch_size, int stride) {
    const int m = static_cast<int>(image.rows());
    const int n = static_cast<int>(image.cols());
    if (patch_size < 1) {
        throw InvalidInput("extract_patches: patch size must be >= 1");
    }
    if (patch_size > std::min(m, n)) {
        throw PatchTooLarge("extract_patches: patch size " +
                            std::to_string(patch_size) + " exceeds image " +
                            std::to_string(m) + "x" + std::to_string(n));
    }
    if (stride < 1 || stride > patch_size) {
        throw InvalidInput("extract_patches: stride must satisfy 1 <= s <= p");
    }

    PatchSet set;
    set.grid.image_rows = m;
    set.grid.image_cols = n;
    set.grid.patch_size = patch_size;
    set.grid.stride = stride;

    const auto row_anchors = axis_anchors(m, patch_size, stride);
    const auto col_anchors = axis_anchors(n, patch_size, stride);
    set.grid.positions.reserve(row_anchors.size() * col_anchors.size());
    for (int i : row_anchors)
        for (int j : col_anchors) set.grid.positions.push_back({i, j});

    const auto count = static_cast<Eigen::Index>(set.grid.positions.size());
    set.vectors.resize(count, static_cast<Eigen::Index>(patch_size) * patch_size);
    for (Eigen::Index k = 0; k < count; ++k) {
        const auto& pos = set.grid.positions[static_cast<std::size_t>(k)];
        for (int di = 0; di < patch_size; ++di)
            for (int dj = 0; dj < patch_size; ++dj)
                set.vectors(k, di * patch_size + dj) =
                    image(pos.row + di, pos.col + dj);
    }
    return set;
}

OverlapMap overlap_map(const std::vector<PatchPosition>& positions,
                       int patch_size, int rows, int cols) {
    OverlapMap counts = OverlapMap::Zero(rows, cols);
    for (const auto& pos : positions) {
        if (pos.row < 0 || pos.col < 0 || pos.row + patch_size > rows ||
            pos.col + patch_size > cols) {
            throw InvalidPosition("overlap_map: patch at (" +
                                  std::to_string(pos.row) + ", " +
                                  std::to_string(pos.col) + ") leaves the image");
        }
        counts.block(pos.row, pos.col, patch_size, patch_size).array() += 1;
    }
    return counts;
}

long count_multi_covered(const OverlapMap& map) {
    return (map.array() > 1).count();
}

double overlap_proportion(const std::vector<PatchPosition>& positions,
                          int patch_size, int rows, int cols) {
    if (positions.empty()) {
        throw EmptyCluster("overlap_proportion: cluster has no patches");
    }
    const OverlapMap counts = overlap_map(positions, patch_size, rows, cols);
    const double denom = static_cast<double>(patch_size) * patch_size *
                         static_cast<double>(positions.size());
    return static_cast<double>(count_multi_covered(counts)) / denom;
}

int effective_patch_count(int n_patches, double beta) {
    if (n_patches < 1) {
        throw InvalidInput("effective_patch_count: need at least one patch");
    }
    if (beta < 0.0 || beta >= 1.0) {
        throw InvalidInput("effective_patch_count: beta must be in [0, 1)");
    }
    // The product N*(1-beta) is an exact multiple of 1/p^2 in theory, but the
    // floating-point route can land a hair above an integer; nudge before
    // taking the ceiling so e.g. 2.0000000000000004 still counts as 2.
    const double raw = static_cast<double>(n_patches) * (1.0 - beta);
    const int n_eff = static_cast<int>(std::ceil(raw - 1e-9));
    return std::max(1, n_eff);
}

Matrix reconstruct_image(const std::vector<ClusterPatches>& clusters,
                         int rows, int cols, int patch_size) {
    Matrix sums = Matrix::Zero(rows, cols);
    OverlapMap counts = OverlapMap::Zero(rows, cols);

    for (const auto& cluster : clusters) {
        if (cluster.vectors.rows() !=
            static_cast<Eigen::Index>(cluster.positions.size())) {
            throw InvalidInput(
                "reconstruct_image: patch rows and positions disagree");
        }
        for (Eigen::Index k = 0; k < cluster.vectors.rows(); ++k) {
            const auto& pos = cluster.positions[static_cast<std::size_t>(k)];
            if (pos.row < 0 || pos.col < 0 || pos.row + patch_size > rows ||
                pos.col + patch_size > cols) {
                throw InvalidPosition("reconstruct_image: patch at (" +
                                      std::to_string(pos.row) + ", " +
                                      std::to_string(pos.col) +
                                      ") leaves the image");
            }
            for (int di = 0; di < patch_size; ++di)
                for (int dj = 0; dj < patch_size; ++dj)
                    sums(pos.row + di, pos.col + dj) +=
                        cluster.vectors(k, di * patch_size + dj);
            counts.block(pos.row, pos.col, patch_size, patch_size).array() += 1;
        }
    }

    Matrix out(rows, cols);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) {
            if (counts(i, j) == 0) {
                throw CoverageGap("reconstruct_image: pixel (" +
                                  std::to_string(i) + ", " + std::to_string(j) +
                                  ") is covered by no patch");
            }
            out(i, j) = sums(i, j) / counts(i, j);
        }
    }
    return out;
}

Matrix reconstruct_image(const PatchSet& patches) {
    return reconstruct_image(
        {ClusterPatches{patches.vectors, patches.grid.positions}},
        patches.grid.image_rows, patches.grid.image_cols,
        patches.grid.patch_size);
}

}  // namespace clra
