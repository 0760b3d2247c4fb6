#include "clra/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "clra/errors.hpp"

namespace clra {

namespace {

void check_shapes(const Matrix& a, const Matrix& b, const RegionMask& mask,
                  const char* where) {
    if (a.rows() != b.rows() || a.cols() != b.cols() ||
        a.rows() != mask.rows() || a.cols() != mask.cols()) {
        throw InvalidInput(std::string(where) + ": shape mismatch");
    }
}

long mask_count(const RegionMask& mask) { return mask.count(); }

}  // namespace

RegionMask full_mask(int rows, int cols) {
    return RegionMask::Constant(rows, cols, true);
}

RegionMask threshold_mask(const Matrix& image, double tau) {
    return image.array() > tau;
}

double otsu_threshold(const Matrix& image, double max_value) {
    if (max_value <= 0.0) {
        throw InvalidInput("otsu_threshold: max_value must be positive");
    }
    constexpr int kBins = 256;
    std::vector<long> hist(kBins, 0);
    for (Eigen::Index i = 0; i < image.rows(); ++i) {
        for (Eigen::Index j = 0; j < image.cols(); ++j) {
            const double t = std::clamp(image(i, j), 0.0, max_value);
            int bin = static_cast<int>(t / max_value * (kBins - 1) + 0.5);
            hist[static_cast<std::size_t>(std::clamp(bin, 0, kBins - 1))]++;
        }
    }
    const double total = static_cast<double>(image.size());
    double sum_all = 0.0;
    for (int b = 0; b < kBins; ++b) sum_all += b * static_cast<double>(hist[b]);

    // Maximize between-class variance; a flat maximum (empty gap between
    // modes) is resolved to the centre of the plateau.
    double best_between = -1.0;
    double tied_sum = 0.0;
    int tied_count = 0;
    double w0 = 0.0, sum0 = 0.0;
    for (int b = 0; b < kBins - 1; ++b) {
        w0 += static_cast<double>(hist[b]);
        if (w0 == 0.0) continue;
        const double w1 = total - w0;
        if (w1 == 0.0) break;
        sum0 += b * static_cast<double>(hist[b]);
        const double mu0 = sum0 / w0;
        const double mu1 = (sum_all - sum0) / w1;
        const double between = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
        if (between > best_between) {
            best_between = between;
            tied_sum = b;
            tied_count = 1;
        } else if (between == best_between) {
            tied_sum += b;
            ++tied_count;
        }
    }
    if (tied_count == 0) return 0.0;  // single-level image: everything above 0
    return tied_sum / tied_count / (kBins - 1) * max_value;
}

double mse(const Matrix& a, const Matrix& b, const RegionMask& mask) {
    check_shapes(a, b, mask, "mse");
    const long n = mask_count(mask);
    if (n == 0) throw EmptyRegion("mse: mask selects no pixels");
    double acc = 0.0;
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            if (mask(i, j)) {
                const double d = a(i, j) - b(i, j);
                acc += d * d;
            }
    return acc / static_cast<double>(n);
}

double psnr(const Matrix& a, const Matrix& b, const RegionMask& mask,
            double max_value) {
    const double err = mse(a, b, mask);
    if (err == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(max_value * max_value / err);
}

double ssim(const Matrix& a, const Matrix& b, const RegionMask& mask,
            double max_value) {
    check_shapes(a, b, mask, "ssim");
    const long n = mask_count(mask);
    if (n < 2) throw EmptyRegion("ssim: need at least two masked pixels");

    double mean_a = 0.0, mean_b = 0.0;
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            if (mask(i, j)) {
                mean_a += a(i, j);
                mean_b += b(i, j);
            }
    mean_a /= static_cast<double>(n);
    mean_b /= static_cast<double>(n);

    double var_a = 0.0, var_b = 0.0, cov = 0.0;
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            if (mask(i, j)) {
                const double da = a(i, j) - mean_a;
                const double db = b(i, j) - mean_b;
                var_a += da * da;
                var_b += db * db;
                cov += da * db;
            }
    var_a /= static_cast<double>(n);
    var_b /= static_cast<double>(n);
    cov /= static_cast<double>(n);

    const double c1 = (0.01 * max_value) * (0.01 * max_value);
    const double c2 = (0.03 * max_value) * (0.03 * max_value);
    return ((2.0 * mean_a * mean_b + c1) * (2.0 * cov + c2)) /
           ((mean_a * mean_a + mean_b * mean_b + c1) * (var_a + var_b + c2));
}

double ssim_sliding(const Matrix& a, const Matrix& b, const RegionMask& mask,
                    double max_value, int window) {
    check_shapes(a, b, mask, "ssim_sliding");
    if (window < 2) throw InvalidInput("ssim_sliding: window must be >= 2");
    const int m = static_cast<int>(a.rows());
    const int n = static_cast<int>(a.cols());
    if (window > std::min(m, n)) {
        throw InvalidInput("ssim_sliding: window exceeds the image");
    }

    double acc = 0.0;
    long used = 0;
    RegionMask window_mask = RegionMask::Constant(window, window, true);
    for (int i = 0; i + window <= m; ++i) {
        for (int j = 0; j + window <= n; ++j) {
            if (!mask.block(i, j, window, window).all()) continue;
            acc += ssim(a.block(i, j, window, window),
                        b.block(i, j, window, window), window_mask, max_value);
            ++used;
        }
    }
    if (used == 0) {
        throw EmptyRegion("ssim_sliding: no window fits inside the mask");
    }
    return acc / static_cast<double>(used);
}

double iou(const RegionMask& a, const RegionMask& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw InvalidInput("iou: shape mismatch");
    }
    const long inter = (a && b).count();
    const long uni = (a || b).count();
    if (uni == 0) throw UndefinedIoU("iou: both masks are empty");
    return static_cast<double>(inter) / static_cast<double>(uni);
}

double relative_error(const Matrix& a, const Matrix& b, const RegionMask& mask) {
    check_shapes(a, b, mask, "relative_error");
    if (mask_count(mask) == 0) {
        throw EmptyRegion("relative_error: mask selects no pixels");
    }
    double diff = 0.0, ref = 0.0;
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            if (mask(i, j)) {
                const double d = a(i, j) - b(i, j);
                diff += d * d;
                ref += a(i, j) * a(i, j);
            }
    if (ref == 0.0) {
        throw DegenerateRegion("relative_error: reference region is all zero");
    }
    return std::sqrt(diff) / std::sqrt(ref);
}

GradientField sobel(const Matrix& image) {
    const int m = static_cast<int>(image.rows());
    const int n = static_cast<int>(image.cols());
    if (m < 3 || n < 3) {
        throw ImageTooSmall("sobel: image must be at least 3x3");
    }
    auto at = [&](int i, int j) {
        return image(std::clamp(i, 0, m - 1), std::clamp(j, 0, n - 1));
    };

    GradientField g;
    g.sx.resize(m, n);
    g.sy.resize(m, n);
    g.magnitude.resize(m, n);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) {
            const double sx = -at(i - 1, j - 1) + at(i - 1, j + 1) -
                              2.0 * at(i, j - 1) + 2.0 * at(i, j + 1) -
                              at(i + 1, j - 1) + at(i + 1, j + 1);
            const double sy = -at(i - 1, j - 1) - 2.0 * at(i - 1, j) -
                              at(i - 1, j + 1) + at(i + 1, j - 1) +
                              2.0 * at(i + 1, j) + at(i + 1, j + 1);
            g.sx(i, j) = sx;
            g.sy(i, j) = sy;
            g.magnitude(i, j) = std::hypot(sx, sy);
        }
    }
    return g;
}

double epi(const Matrix& a, const Matrix& b, const RegionMask& mask) {
    check_shapes(a, b, mask, "epi");
    const GradientField ga = sobel(a);
    const GradientField gb = sobel(b);

    // Border gradients see replicated padding, not real structure; keep the
    // sums to interior pixels.
    double diff = 0.0, ref = 0.0;
    long used = 0;
    for (Eigen::Index i = 1; i + 1 < a.rows(); ++i)
        for (Eigen::Index j = 1; j + 1 < a.cols(); ++j)
            if (mask(i, j)) {
                diff += std::abs(ga.magnitude(i, j) - gb.magnitude(i, j));
                ref += ga.magnitude(i, j);
                ++used;
            }
    if (used == 0) throw EmptyRegion("epi: mask has no interior pixels");
    if (ref == 0.0) {
        throw DegenerateRegion("epi: reference has no edges in the region");
    }
    return 1.0 - diff / ref;
}

}  // namespace clra
