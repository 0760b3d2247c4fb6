#include "clra/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>
#include <thread>

#include "clra/errors.hpp"

namespace clra {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

double cf_global(int m, int n, int r) {
    if (m < 1 || n < 1) throw InvalidInput("cf_global: empty image shape");
    if (r < 1) throw InvalidInput("cf_global: rank must be >= 1");
    return static_cast<double>(m) * n /
           (static_cast<double>(r) * (static_cast<double>(m) + n + 1));
}

int rank_for_cf(int m, int n, double cf_target, bool* clamped) {
    if (m < 1 || n < 1) throw InvalidInput("rank_for_cf: empty image shape");
    if (!(cf_target > 0.0)) {
        throw InvalidInput("rank_for_cf: cf target must be positive");
    }
    const double exact = static_cast<double>(m) * n /
                         (cf_target * (static_cast<double>(m) + n + 1));
    // Round-trip targets (cf == cf_global(r)) land on an exact integer up to
    // floating-point noise; nudge below before the ceiling.
    const double r_real = std::ceil(exact - 1e-9);
    const int bound = std::min(m, n);
    int r = static_cast<int>(r_real);
    if (clamped) *clamped = (r < 1 || r > bound);
    return std::clamp(r, 1, bound);
}

std::pair<TruncatedFactors, CompressionReport> compress_global(
    const Matrix& image, int rank) {
    const auto start = Clock::now();
    auto factors = truncate(svd(image), rank);

    CompressionReport report;
    report.method = "global";
    report.cf_nominal = cf_global(static_cast<int>(image.rows()),
                                  static_cast<int>(image.cols()), rank);
    report.cf_effective = report.cf_nominal;
    report.ranks = {rank};
    report.wall_time_seconds = seconds_since(start);
    return {std::move(factors), std::move(report)};
}

CompressedCluster compress_cluster(const Matrix& cluster_matrix, double alpha,
                                   bool* degenerate) {
    if (cluster_matrix.rows() < 1) {
        throw EmptyCluster("compress_cluster: cluster matrix has no rows");
    }
    auto factors = svd(cluster_matrix);
    const int rank = rank_for_energy(factors.s, alpha, degenerate);

    CompressedCluster out;
    out.factors = truncate(factors, rank);
    out.rank = rank;
    out.n_eff = static_cast<int>(cluster_matrix.rows());  // caller refines
    return out;
}

ClusteredAnalysis analyze_clusters(const Matrix& image,
                                   const ClusteredOptions& options) {
    const int m = static_cast<int>(image.rows());
    const int n = static_cast<int>(image.cols());
    const int p = options.patch_size;
    const int stride = options.stride > 0 ? options.stride : std::max(1, p / 2);

    PatchSet patches = extract_patches(image, p, stride);
    const auto n_patches = static_cast<std::int64_t>(patches.grid.positions.size());
    if (options.clusters > n_patches) {
        throw TooManyClusters("analyze_clusters: " +
                              std::to_string(options.clusters) +
                              " clusters for " + std::to_string(n_patches) +
                              " patches");
    }

    ClusterModel model = kmeans(patches, options.clusters, options.seed,
                                options.max_iter, options.init, options.workers);

    // Member rows per cluster, kept in extraction order so results are
    // reproducible byte for byte.
    const int k = model.k;
    std::vector<std::vector<Eigen::Index>> members(static_cast<std::size_t>(k));
    for (Eigen::Index i = 0; i < patches.vectors.rows(); ++i) {
        members[static_cast<std::size_t>(
                    model.assignment[static_cast<std::size_t>(i)])]
            .push_back(i);
    }

    std::vector<ClusterAnalysis> analyzed(static_cast<std::size_t>(k));
    std::atomic<int> next{0};
    auto work = [&] {
        for (int c = next.fetch_add(1); c < k; c = next.fetch_add(1)) {
            const auto& rows = members[static_cast<std::size_t>(c)];
            if (rows.empty()) continue;  // dropped below
            Matrix cluster_matrix(static_cast<Eigen::Index>(rows.size()),
                                  patches.vectors.cols());
            auto& out = analyzed[static_cast<std::size_t>(c)];
            out.positions.reserve(rows.size());
            for (std::size_t r = 0; r < rows.size(); ++r) {
                cluster_matrix.row(static_cast<Eigen::Index>(r)) =
                    patches.vectors.row(rows[r]);
                out.positions.push_back(
                    patches.grid.positions[static_cast<std::size_t>(rows[r])]);
            }
            out.factors = svd(cluster_matrix);
            out.beta = overlap_proportion(out.positions, p, m, n);
        }
    };

    const unsigned workers = std::max(1u, options.workers);
    if (workers == 1 || k == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        const unsigned used = std::min(workers, static_cast<unsigned>(k));
        pool.reserve(used);
        for (unsigned t = 0; t < used; ++t) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }

    ClusteredAnalysis analysis;
    analysis.rows = m;
    analysis.cols = n;
    analysis.patch_size = p;
    analysis.stride = stride;
    analysis.max_value = options.max_value;
    analysis.total_patches = n_patches;
    analysis.seed = options.seed;
    analysis.kmeans_iterations = model.iterations;
    analysis.kmeans_converged = model.converged;
    for (int c = 0; c < k; ++c) {
        // A cluster left empty by degenerate data carries no payload.
        if (members[static_cast<std::size_t>(c)].empty()) continue;
        analysis.clusters.push_back(std::move(analyzed[static_cast<std::size_t>(c)]));
    }
    return analysis;
}

std::pair<CompressedImage, CompressionReport> materialize(
    const ClusteredAnalysis& analysis, double alpha) {
    const auto start = Clock::now();
    const int p = analysis.patch_size;

    CompressedImage archive;
    archive.rows = analysis.rows;
    archive.cols = analysis.cols;
    archive.patch_size = p;
    archive.stride = analysis.stride;
    archive.max_value = analysis.max_value;
    archive.clusters.reserve(analysis.clusters.size());

    bool any_degenerate = false;
    for (const auto& a : analysis.clusters) {
        bool flat = false;
        const int rank = rank_for_energy(a.factors.s, alpha, &flat);
        any_degenerate |= flat;

        CompressedCluster c;
        c.factors = truncate(a.factors, rank);
        c.rank = rank;
        c.positions = a.positions;
        c.beta = a.beta;
        c.n_eff = effective_patch_count(static_cast<int>(a.positions.size()),
                                        a.beta);
        archive.clusters.push_back(std::move(c));
    }

    CompressionReport report;
    report.method = "cluster";
    report.cf_nominal = cf_overall(archive.clusters, p, analysis.total_patches);
    report.cf_effective = cf_overall_eff(archive.clusters, p);
    for (const auto& c : archive.clusters) {
        report.ranks.push_back(c.rank);
        ClusterSummary s;
        s.n_patches = static_cast<int>(c.positions.size());
        s.rank = c.rank;
        s.beta = c.beta;
        s.n_eff = c.n_eff;
        s.cf = cf_cluster(p, s.n_patches, c.rank);
        s.cf_eff = cf_cluster_eff(p, s.n_patches, c.n_eff, c.rank);
        report.clusters.push_back(s);
    }
    report.seed = analysis.seed;
    report.kmeans_iterations = analysis.kmeans_iterations;
    report.kmeans_converged = analysis.kmeans_converged;
    report.degenerate_spectrum = any_degenerate;
    report.wall_time_seconds = seconds_since(start);
    return {std::move(archive), std::move(report)};
}

std::pair<CompressedImage, CompressionReport> compress_clustered(
    const Matrix& image, const ClusteredOptions& options) {
    const auto start = Clock::now();
    auto result = materialize(analyze_clusters(image, options), options.alpha);
    result.second.wall_time_seconds = seconds_since(start);
    return result;
}

double cf_eff_at_alpha(const ClusteredAnalysis& analysis, double alpha) {
    if (analysis.clusters.empty()) {
        throw InvalidInput("cf_eff_at_alpha: analysis holds no clusters");
    }
    const int p = analysis.patch_size;
    double numerator = 0.0;
    double denominator = 0.0;
    for (const auto& a : analysis.clusters) {
        const int rank = rank_for_energy(a.factors.s, alpha);
        const auto n = static_cast<int>(a.positions.size());
        numerator += static_cast<double>(effective_patch_count(n, a.beta)) *
                     static_cast<double>(p) * p;
        denominator += static_cast<double>(rank) *
                       (static_cast<double>(n) + static_cast<double>(p) * p + 1);
    }
    return numerator / denominator;
}

double find_alpha_for_cf_eff(const ClusteredAnalysis& analysis,
                             double cf_target) {
    if (!(cf_target > 0.0)) {
        throw InvalidInput("find_alpha_for_cf_eff: target must be positive");
    }
    double best_alpha = 1.0;
    double best_gap = std::numeric_limits<double>::infinity();
    auto consider = [&](double alpha) {
        const double cf = cf_eff_at_alpha(analysis, alpha);
        const double gap = std::abs(cf - cf_target);
        // Prefer the higher alpha (more retained energy) on equal CF gap.
        if (gap < best_gap || (gap == best_gap && alpha > best_alpha)) {
            best_gap = gap;
            best_alpha = alpha;
        }
        return cf;
    };

    double lo = 1e-12;  // rank floor everywhere: highest CF this run allows
    double hi = 1.0;    // full energy: lowest CF
    consider(lo);
    consider(hi);
    for (int step = 0; step < 100; ++step) {
        const double mid = 0.5 * (lo + hi);
        const double cf_mid = consider(mid);
        if (cf_mid > cf_target) {
            lo = mid;  // keep compressing less aggressively
        } else {
            hi = mid;
        }
    }
    return best_alpha;
}

namespace {

std::int64_t denominator_elements(const std::vector<CompressedCluster>& clusters,
                                  int p) {
    std::int64_t acc = 0;
    for (const auto& c : clusters) {
        acc += static_cast<std::int64_t>(c.rank) *
               (static_cast<std::int64_t>(c.positions.size()) +
                static_cast<std::int64_t>(p) * p + 1);
    }
    return acc;
}

}  // namespace

double cf_overall(const std::vector<CompressedCluster>& clusters, int p,
                  std::int64_t total_patches) {
    if (clusters.empty()) throw InvalidInput("cf_overall: no clusters");
    return static_cast<double>(total_patches) * p * p /
           static_cast<double>(denominator_elements(clusters, p));
}

double cf_overall_eff(const std::vector<CompressedCluster>& clusters, int p) {
    if (clusters.empty()) throw InvalidInput("cf_overall_eff: no clusters");
    std::int64_t n_eff_total = 0;
    for (const auto& c : clusters) n_eff_total += c.n_eff;
    return static_cast<double>(n_eff_total) * p * p /
           static_cast<double>(denominator_elements(clusters, p));
}

double cf_cluster(int p, int n_patches, int rank) {
    return static_cast<double>(n_patches) * p * p /
           (static_cast<double>(rank) *
            (static_cast<double>(n_patches) + static_cast<double>(p) * p + 1));
}

double cf_cluster_eff(int p, int n_patches, int n_eff, int rank) {
    return static_cast<double>(n_eff) * p * p /
           (static_cast<double>(rank) *
            (static_cast<double>(n_patches) + static_cast<double>(p) * p + 1));
}

double cf_threshold(double cf_eff, double cf_g) {
    if (!(cf_eff > 0.0)) throw InvalidInput("cf_threshold: cf_eff must be > 0");
    return std::abs(cf_eff - cf_g) / cf_eff;
}

RankMatch match_global_rank(int m, int n, double cf_eff, double tolerance) {
    if (!(cf_eff > 0.0)) {
        throw InvalidInput("match_global_rank: cf_eff must be > 0");
    }
    if (tolerance < 0.0) {
        throw InvalidInput("match_global_rank: tolerance must be >= 0");
    }
    RankMatch best;
    double best_gap = std::numeric_limits<double>::infinity();
    for (int r = 1; r <= std::min(m, n); ++r) {
        const double gap = std::abs(cf_global(m, n, r) - cf_eff);
        if (gap < best_gap) {
            best_gap = gap;
            best.rank = r;
        }
    }
    best.achieved_threshold = best_gap / cf_eff;
    best.matched = best.achieved_threshold <= tolerance;
    return best;
}

Matrix decompress(const CompressedImage& archive) {
    if (archive.clusters.empty()) {
        throw InvalidInput("decompress: archive holds no clusters");
    }
    std::vector<ClusterPatches> groups;
    groups.reserve(archive.clusters.size());
    for (const auto& c : archive.clusters) {
        groups.push_back({c.factors.reconstruct(), c.positions});
    }
    return reconstruct_image(groups, archive.rows, archive.cols,
                             archive.patch_size);
}

CostEstimate estimate_cost(
    std::int64_t iterations, int k, std::int64_t n_patches, int p,
    const std::vector<std::pair<std::int64_t, int>>& per_cluster) {
    if (iterations < 0 || k < 0 || n_patches < 0 || p < 0) {
        throw InvalidInput("estimate_cost: counts must be nonnegative");
    }
    CostEstimate est;
    est.kmeans_ops = iterations * k * n_patches * p * p;
    for (const auto& [n_ck, r_ck] : per_cluster) {
        est.svd_ops += static_cast<std::int64_t>(p) * p * n_ck * r_ck;
    }
    est.epsilon_ops = 0;
    est.total = est.kmeans_ops + est.svd_ops + est.epsilon_ops;
    return est;
}

}  // namespace clra
