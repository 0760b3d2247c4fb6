#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "clra/clustering.hpp"
#include "clra/linalg.hpp"
#include "clra/patching.hpp"

namespace clra {

// One cluster's compressed payload: truncated factors of the N_k x p^2
// member matrix, where the members live, and its overlap accounting.
struct CompressedCluster {
    TruncatedFactors factors;
    int rank = 0;
    std::vector<PatchPosition> positions;
    double beta = 0.0;  // overlapping-pixel proportion
    int n_eff = 0;      // ceil(N_k * (1 - beta))

    std::int64_t element_count() const { return factors.element_count(); }
};

// Everything needed to rebuild an image: geometry plus per-cluster factors.
struct CompressedImage {
    int rows = 0;
    int cols = 0;
    int patch_size = 0;
    int stride = 0;
    double max_value = 255.0;
    std::vector<CompressedCluster> clusters;

    std::int64_t total_patches() const {
        std::int64_t n = 0;
        for (const auto& c : clusters) n += static_cast<std::int64_t>(c.positions.size());
        return n;
    }
    std::int64_t stored_elements() const {
        std::int64_t n = 0;
        for (const auto& c : clusters) n += c.element_count();
        return n;
    }
};

struct ClusterSummary {
    int n_patches = 0;
    int rank = 0;
    double beta = 0.0;
    int n_eff = 0;
    double cf = 0.0;      // per-cluster compression factor
    double cf_eff = 0.0;  // overlap-adjusted variant
};

// Per-region metric values, attached to reports by the evaluation layer.
struct RegionMetrics {
    std::string region;  // "full", "roi", "complement"
    double mse = 0.0;
    double psnr = 0.0;
    double ssim = 0.0;
    double iou = 0.0;
    double rel_err = 0.0;
    double epi = 0.0;
};

// Pure-data run summary; cf values are element-count ratios.
struct CompressionReport {
    std::string method;  // "global" | "cluster"
    double cf_nominal = 0.0;
    double cf_effective = 0.0;
    std::vector<int> ranks;
    std::vector<ClusterSummary> clusters;
    std::vector<RegionMetrics> regions;
    double wall_time_seconds = 0.0;
    std::uint64_t seed = 0;
    int kmeans_iterations = 0;
    bool kmeans_converged = true;
    bool degenerate_spectrum = false;  // some cluster had an all-zero spectrum
};

struct ClusteredOptions {
    int patch_size = 8;
    int stride = 0;  // 0 means the default floor(patch_size / 2)
    int clusters = 8;
    double alpha = 0.95;
    std::uint64_t seed = 0;
    int max_iter = 100;
    CentroidInit init = CentroidInit::kSampled;
    unsigned workers = 1;
    double max_value = 255.0;
};

struct RankMatch {
    int rank = 0;
    double achieved_threshold = 0.0;
    bool matched = false;
};

// Abstract operation counts for one compression run.
struct CostEstimate {
    std::int64_t kmeans_ops = 0;   // T * K * N * p^2
    std::int64_t svd_ops = 0;      // p^2 * sum_k N_k * r_k
    std::int64_t epsilon_ops = 0;  // aggregation overhead, reported as 0
    std::int64_t total = 0;
};

// mn / (r * (m + n + 1)): element-count ratio of a rank-r global truncation.
double cf_global(int m, int n, int r);

// Smallest rank whose global CF does not exceed the target:
// ceil(mn / (cf * (m+n+1))), clamped to [1, min(m, n)]. `clamped` reports
// when the clamp engaged.
int rank_for_cf(int m, int n, double cf_target, bool* clamped = nullptr);

// Whole-image truncated SVD at the given rank.
std::pair<TruncatedFactors, CompressionReport> compress_global(
    const Matrix& image, int rank);

// SVD of one cluster matrix truncated by the energy rule. Fills factors and
// rank only; position/overlap fields belong to the pipeline caller.
CompressedCluster compress_cluster(const Matrix& cluster_matrix, double alpha,
                                   bool* degenerate = nullptr);

// Full pipeline: extract overlapping patches, group them with seeded
// k-means, compress each cluster independently at the shared energy
// threshold, and account for overlap. Identical inputs give identical
// results for any worker count.
std::pair<CompressedImage, CompressionReport> compress_clustered(
    const Matrix& image, const ClusteredOptions& options);

// Mid-pipeline state for alpha sweeps: clustering and each cluster's full
// factorization computed once, so different energy thresholds only cost a
// truncation. materialize(analyze_clusters(img, opt), opt.alpha) is
// identical to compress_clustered(img, opt).
struct ClusterAnalysis {
    SvdFactors factors;  // full SVD of the N_k x p^2 member matrix
    std::vector<PatchPosition> positions;
    double beta = 0.0;
};

struct ClusteredAnalysis {
    int rows = 0;
    int cols = 0;
    int patch_size = 0;
    int stride = 0;
    double max_value = 255.0;
    std::int64_t total_patches = 0;
    std::uint64_t seed = 0;
    int kmeans_iterations = 0;
    bool kmeans_converged = true;
    std::vector<ClusterAnalysis> clusters;
};

ClusteredAnalysis analyze_clusters(const Matrix& image,
                                   const ClusteredOptions& options);

std::pair<CompressedImage, CompressionReport> materialize(
    const ClusteredAnalysis& analysis, double alpha);

// Overlap-adjusted CF the analysis would produce at a given threshold,
// without building the truncated factors.
double cf_eff_at_alpha(const ClusteredAnalysis& analysis, double alpha);

// Deterministic bisection for the energy threshold whose overlap-adjusted
// CF lands closest to the target; ties prefer the higher-fidelity alpha.
double find_alpha_for_cf_eff(const ClusteredAnalysis& analysis,
                             double cf_target);

// N * p^2 / sum_k r_k * (N_k + p^2 + 1), N counting every extracted patch.
double cf_overall(const std::vector<CompressedCluster>& clusters, int p,
                  std::int64_t total_patches);

// Overlap-adjusted variant: (sum_k N_eff_k) * p^2 over the same denominator.
double cf_overall_eff(const std::vector<CompressedCluster>& clusters, int p);

// Per-cluster ratios, both plain and overlap-adjusted.
double cf_cluster(int p, int n_patches, int rank);
double cf_cluster_eff(int p, int n_patches, int n_eff, int rank);

// Relative CF gap |cf_eff - cf_g| / cf_eff.
double cf_threshold(double cf_eff, double cf_g);

// Exhaustive scan of global ranks for the one whose CF lands closest to
// cf_eff. A gap above `tolerance` is a reported outcome (matched = false),
// never an error: a matching global rank need not exist.
RankMatch match_global_rank(int m, int n, double cf_eff, double tolerance);

// Rebuild the image from every cluster's truncated factors by
// covering-count averaging. Unclamped; clamping is export policy.
Matrix decompress(const CompressedImage& archive);

// Operation-count estimate: T*K*N*p^2 for clustering plus p^2*sum N_k*r_k
// for the per-cluster SVDs.
CostEstimate estimate_cost(
    std::int64_t iterations, int k, std::int64_t n_patches, int p,
    const std::vector<std::pair<std::int64_t, int>>& per_cluster);

}  // namespace clra
