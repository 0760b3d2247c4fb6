#pragma once

#include <cstdint>
#include <vector>

#include "clra/linalg.hpp"
#include "clra/patching.hpp"

namespace clra {

enum class CentroidInit {
    kSampled,   // centroids drawn uniformly without replacement from the rows
    kPlusPlus,  // distance-weighted seeding
};

struct ClusterModel {
    int k = 0;
    Matrix centroids;             // k x d
    std::vector<int> assignment;  // length N, values in [0, k)
    std::vector<int> counts;      // members per cluster, sums to N
    double objective = 0.0;       // sum of squared distances to own centroid
    int iterations = 0;
    bool converged = false;
    int repairs = 0;  // empty-cluster reseed events (0 on non-degenerate data)
    std::vector<double> objective_history;  // J after each assignment step
};

// Lloyd iteration over the rows of `points`, deterministic for a given seed:
//   - initial centroids are rows sampled without replacement (or ++ seeding),
//   - assignment breaks distance ties toward the lowest cluster index,
//   - centroid update is the arithmetic mean of the members,
//   - convergence = assignments unchanged between consecutive iterations,
//   - an empty cluster is reseeded with the patch farthest from its stale
//     centroid (drawn from clusters that keep >= 2 members, and moved so the
//     repair makes progress).
// The result is independent of `workers`. Throws TooManyClusters when
// k > N, InvalidInput for k < 1 or max_iter < 1.
ClusterModel kmeans(const Matrix& points, int k, std::uint64_t seed,
                    int max_iter = 100,
                    CentroidInit init = CentroidInit::kSampled,
                    unsigned workers = 1);

ClusterModel kmeans(const PatchSet& patches, int k, std::uint64_t seed,
                    int max_iter = 100,
                    CentroidInit init = CentroidInit::kSampled,
                    unsigned workers = 1);

// Recompute the within-cluster sum of squared distances from scratch.
// Throws InvalidInput when shapes or assignment values are inconsistent.
double objective(const ClusterModel& model, const Matrix& points);

}  // namespace clra
