#include "clra/clustering.hpp"

#include <limits>
#include <string>
#include <thread>

#include "clra/errors.hpp"
#include "clra/rng.hpp"

namespace clra {

namespace {

// Nearest centroid for every row; ties go to the lowest cluster index.
// Parallel blocks write disjoint slots, so the result is worker-independent.
void assign_all(const Matrix& points, const Matrix& centroids,
                std::vector<int>& assignment, std::vector<double>& best_dist,
                unsigned workers) {
    const Eigen::Index n = points.rows();
    const Eigen::Index k = centroids.rows();

    auto run = [&](Eigen::Index begin, Eigen::Index end) {
        for (Eigen::Index i = begin; i < end; ++i) {
            int best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (Eigen::Index j = 0; j < k; ++j) {
                const double d = (points.row(i) - centroids.row(j)).squaredNorm();
                if (d < best_d) {
                    best_d = d;
                    best = static_cast<int>(j);
                }
            }
            assignment[static_cast<std::size_t>(i)] = best;
            best_dist[static_cast<std::size_t>(i)] = best_d;
        }
    };

    if (workers <= 1 || n < 256) {
        run(0, n);
        return;
    }
    const unsigned used = std::min<unsigned>(workers, static_cast<unsigned>(n));
    std::vector<std::thread> pool;
    pool.reserve(used);
    const Eigen::Index chunk = (n + used - 1) / used;
    for (unsigned t = 0; t < used; ++t) {
        const Eigen::Index begin = static_cast<Eigen::Index>(t) * chunk;
        const Eigen::Index end = std::min(n, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back(run, begin, end);
    }
    for (auto& th : pool) th.join();
}

// Serial accumulation in row order keeps the floating-point result
// identical across worker counts.
Matrix member_means(const Matrix& points, const std::vector<int>& assignment,
                    int k, const Matrix& stale, std::vector<int>& counts) {
    Matrix sums = Matrix::Zero(k, points.cols());
    counts.assign(static_cast<std::size_t>(k), 0);
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
        const int c = assignment[static_cast<std::size_t>(i)];
        sums.row(c) += points.row(i);
        ++counts[static_cast<std::size_t>(c)];
    }
    for (int j = 0; j < k; ++j) {
        if (counts[static_cast<std::size_t>(j)] > 0) {
            sums.row(j) /= static_cast<double>(counts[static_cast<std::size_t>(j)]);
        } else {
            sums.row(j) = stale.row(j);  // repaired by the caller
        }
    }
    return sums;
}

Matrix init_sampled(const Matrix& points, int k, Rng& rng) {
    const auto picks =
        rng.sample_without_replacement(static_cast<std::size_t>(points.rows()),
                                       static_cast<std::size_t>(k));
    Matrix centroids(k, points.cols());
    for (int j = 0; j < k; ++j)
        centroids.row(j) = points.row(static_cast<Eigen::Index>(picks[j]));
    return centroids;
}

Matrix init_plus_plus(const Matrix& points, int k, Rng& rng) {
    const Eigen::Index n = points.rows();
    Matrix centroids(k, points.cols());
    centroids.row(0) = points.row(static_cast<Eigen::Index>(
        rng.index(static_cast<std::size_t>(n))));

    std::vector<double> dist(static_cast<std::size_t>(n));
    for (int j = 1; j < k; ++j) {
        double total = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (int c = 0; c < j; ++c)
                best = std::min(best,
                                (points.row(i) - centroids.row(c)).squaredNorm());
            dist[static_cast<std::size_t>(i)] = best;
            total += best;
        }
        Eigen::Index pick = 0;
        if (total > 0.0) {
            const double u = rng.unit() * total;
            double cum = 0.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                cum += dist[static_cast<std::size_t>(i)];
                if (cum > u) {
                    pick = i;
                    break;
                }
                pick = i;  // numeric slack: fall back to the last row
            }
        } else {
            pick = static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(n)));
        }
        centroids.row(j) = points.row(pick);
    }
    return centroids;
}

// Give every empty cluster the member patch farthest from the cluster's
// stale centroid, drawing only from clusters that keep at least two
// members so each repair strictly reduces the number of empty clusters.
int repair_empty_clusters(const Matrix& points, Matrix& centroids,
                          std::vector<int>& assignment,
                          std::vector<int>& counts) {
    const int k = static_cast<int>(centroids.rows());
    int repairs = 0;
    for (int j = 0; j < k; ++j) {
        if (counts[static_cast<std::size_t>(j)] > 0) continue;
        Eigen::Index pick = -1;
        double far = -1.0;
        for (Eigen::Index i = 0; i < points.rows(); ++i) {
            const int donor = assignment[static_cast<std::size_t>(i)];
            if (counts[static_cast<std::size_t>(donor)] < 2) continue;
            const double d = (points.row(i) - centroids.row(j)).squaredNorm();
            if (d > far) {
                far = d;
                pick = i;
            }
        }
        if (pick < 0) continue;  // nothing to donate; leave the stale centroid
        const int donor = assignment[static_cast<std::size_t>(pick)];
        assignment[static_cast<std::size_t>(pick)] = j;
        --counts[static_cast<std::size_t>(donor)];
        ++counts[static_cast<std::size_t>(j)];
        centroids.row(j) = points.row(pick);
        ++repairs;
    }
    return repairs;
}

}  // namespace

ClusterModel kmeans(const Matrix& points, int k, std::uint64_t seed,
                    int max_iter, CentroidInit init, unsigned workers) {
    const Eigen::Index n = points.rows();
    if (k < 1) throw InvalidInput("kmeans: k must be >= 1");
    if (n < 1) throw InvalidInput("kmeans: no points");
    if (static_cast<Eigen::Index>(k) > n) {
        throw TooManyClusters("kmeans: k = " + std::to_string(k) + " exceeds " +
                              std::to_string(n) + " points");
    }
    if (max_iter < 1) throw InvalidInput("kmeans: max_iter must be >= 1");

    Rng rng(seed);
    ClusterModel model;
    model.k = k;
    model.centroids = (init == CentroidInit::kSampled)
                          ? init_sampled(points, k, rng)
                          : init_plus_plus(points, k, rng);

    std::vector<int> assignment(static_cast<std::size_t>(n), -1);
    std::vector<double> best_dist(static_cast<std::size_t>(n), 0.0);
    std::vector<int> prev;

    for (int iter = 1; iter <= max_iter; ++iter) {
        assign_all(points, model.centroids, assignment, best_dist, workers);
        double j_now = 0.0;
        for (double d : best_dist) j_now += d;
        model.objective_history.push_back(j_now);
        model.iterations = iter;

        if (!prev.empty() && assignment == prev) {
            model.converged = true;
            break;
        }

        // Repair against the stale centroids, then take means of the
        // post-repair membership so every centroid is an exact member mean.
        std::vector<int> counts(static_cast<std::size_t>(k), 0);
        for (int c : assignment) ++counts[static_cast<std::size_t>(c)];
        model.repairs +=
            repair_empty_clusters(points, model.centroids, assignment, counts);
        model.centroids =
            member_means(points, assignment, k, model.centroids, counts);
        prev = assignment;
    }

    model.assignment = std::move(assignment);
    model.counts.assign(static_cast<std::size_t>(k), 0);
    for (int c : model.assignment) ++model.counts[static_cast<std::size_t>(c)];
    model.objective = objective(model, points);
    return model;
}

ClusterModel kmeans(const PatchSet& patches, int k, std::uint64_t seed,
                    int max_iter, CentroidInit init, unsigned workers) {
    return kmeans(patches.vectors, k, seed, max_iter, init, workers);
}

double objective(const ClusterModel& model, const Matrix& points) {
    if (model.assignment.size() != static_cast<std::size_t>(points.rows()) ||
        model.centroids.cols() != points.cols() ||
        model.centroids.rows() != model.k) {
        throw InvalidInput("objective: model does not match the point set");
    }
    double j = 0.0;
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
        const int c = model.assignment[static_cast<std::size_t>(i)];
        if (c < 0 || c >= model.k) {
            throw InvalidInput("objective: assignment value out of range");
        }
        j += (points.row(i) - model.centroids.row(c)).squaredNorm();
    }
    return j;
}

}  // namespace clra
