#include <doctest.h>

#include <cmath>

#include "clra/clustering.hpp"
#include "clra/errors.hpp"
#include "clra/patching.hpp"
#include "support/fixtures.hpp"

using clra::Matrix;

namespace {

Matrix coincident_pairs() {
    // Two coincident pairs at distinct points in the plane.
    Matrix pts(4, 2);
    pts << 0.0, 0.0,
           0.0, 0.0,
           5.0, 1.0,
           5.0, 1.0;
    return pts;
}

}  // namespace

TEST_CASE("kmeans: coincident pairs split into the two pairs with J = 0") {
    auto model = clra::kmeans(coincident_pairs(), 2, /*seed=*/7);
    CHECK(model.converged);
    CHECK(model.objective == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(model.counts == std::vector<int>{2, 2});
    CHECK(model.assignment[0] == model.assignment[1]);
    CHECK(model.assignment[2] == model.assignment[3]);
    CHECK(model.assignment[0] != model.assignment[2]);
}

TEST_CASE("kmeans: K=1 gives the mean and the total squared deviation") {
    clra::Rng rng(60);
    Matrix pts = fixtures::random_matrix(rng, 12, 3);
    auto model = clra::kmeans(pts, 1, 0);
    CHECK(model.converged);
    Matrix mean = pts.colwise().mean();
    CHECK((model.centroids.row(0) - mean.row(0)).norm() <= 1e-12);
    const double expected = (pts.rowwise() - mean.row(0)).squaredNorm();
    CHECK(model.objective == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("kmeans: K=N makes every point its own centroid with J = 0") {
    clra::Rng rng(61);
    Matrix pts = fixtures::random_matrix(rng, 6, 4);
    auto model = clra::kmeans(pts, 6, 3);
    CHECK(model.objective == doctest::Approx(0.0).epsilon(1e-15));
    for (int c : model.counts) CHECK(c == 1);
}

TEST_CASE("kmeans: argument validation") {
    Matrix pts = coincident_pairs();
    CHECK_THROWS_AS(clra::kmeans(pts, 5, 0), clra::TooManyClusters);
    CHECK_THROWS_AS(clra::kmeans(pts, 0, 0), clra::InvalidInput);
    CHECK_THROWS_AS(clra::kmeans(pts, 2, 0, /*max_iter=*/0), clra::InvalidInput);
}

TEST_CASE("kmeans: deterministic for a fixed seed, across worker counts") {
    clra::Rng rng(62);
    Matrix pts = fixtures::random_matrix(rng, 300, 16);
    auto a = clra::kmeans(pts, 5, 99, 100, clra::CentroidInit::kSampled, 1);
    auto b = clra::kmeans(pts, 5, 99, 100, clra::CentroidInit::kSampled, 1);
    auto c = clra::kmeans(pts, 5, 99, 100, clra::CentroidInit::kSampled, 4);
    CHECK(a.assignment == b.assignment);
    CHECK(a.assignment == c.assignment);
    CHECK((a.centroids - b.centroids).norm() == 0.0);
    CHECK((a.centroids - c.centroids).norm() == 0.0);
    CHECK(a.objective == b.objective);
    CHECK(a.objective == c.objective);
}

TEST_CASE("kmeans: different seeds may pick different initializations") {
    clra::Rng rng(63);
    Matrix pts = fixtures::random_matrix(rng, 40, 2);
    auto a = clra::kmeans(pts, 4, 1);
    auto b = clra::kmeans(pts, 4, 2);
    // Both are valid converged models regardless of agreement.
    CHECK(a.converged);
    CHECK(b.converged);
}

TEST_CASE("kmeans: objective history is non-increasing (Lloyd monotonicity)") {
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        clra::Rng rng(100 + seed);
        Matrix pts = fixtures::random_matrix(rng, 150, 8);
        auto model = clra::kmeans(pts, 6, seed);
        CHECK(model.repairs == 0);
        for (std::size_t t = 1; t < model.objective_history.size(); ++t) {
            CHECK(model.objective_history[t] <=
                  model.objective_history[t - 1] + 1e-9);
        }
    }
}

TEST_CASE("kmeans: converged centroids are member means") {
    clra::Rng rng(64);
    Matrix pts = fixtures::random_matrix(rng, 90, 5);
    auto model = clra::kmeans(pts, 4, 11);
    REQUIRE(model.converged);
    Matrix sums = Matrix::Zero(4, 5);
    std::vector<int> counts(4, 0);
    for (Eigen::Index i = 0; i < pts.rows(); ++i) {
        sums.row(model.assignment[static_cast<std::size_t>(i)]) += pts.row(i);
        ++counts[static_cast<std::size_t>(
            model.assignment[static_cast<std::size_t>(i)])];
    }
    for (int j = 0; j < 4; ++j) {
        REQUIRE(counts[static_cast<std::size_t>(j)] > 0);
        Matrix mean = sums.row(j) / counts[static_cast<std::size_t>(j)];
        CHECK((model.centroids.row(j) - mean).norm() <= 1e-12);
    }
}

TEST_CASE("kmeans: converged assignment is nearest-centroid") {
    clra::Rng rng(65);
    Matrix pts = fixtures::random_matrix(rng, 80, 6);
    auto model = clra::kmeans(pts, 5, 21);
    REQUIRE(model.converged);
    for (Eigen::Index i = 0; i < pts.rows(); ++i) {
        const int own = model.assignment[static_cast<std::size_t>(i)];
        const double own_d = (pts.row(i) - model.centroids.row(own)).squaredNorm();
        for (int j = 0; j < 5; ++j) {
            const double d = (pts.row(i) - model.centroids.row(j)).squaredNorm();
            CHECK(own_d <= d + 1e-12);
        }
    }
}

TEST_CASE("kmeans: perturbing a converged centroid increases its cluster cost") {
    clra::Rng rng(66);
    Matrix pts = fixtures::random_matrix(rng, 70, 4);
    auto model = clra::kmeans(pts, 3, 5);
    REQUIRE(model.converged);
    for (int j = 0; j < 3; ++j) {
        double base = 0.0;
        for (Eigen::Index i = 0; i < pts.rows(); ++i)
            if (model.assignment[static_cast<std::size_t>(i)] == j)
                base += (pts.row(i) - model.centroids.row(j)).squaredNorm();
        for (int trial = 0; trial < 10; ++trial) {
            Matrix delta = fixtures::random_matrix(rng, 1, 4, -0.5, 0.5);
            if (delta.norm() == 0.0) continue;
            Matrix moved = model.centroids.row(j) + delta.row(0);
            double perturbed = 0.0;
            for (Eigen::Index i = 0; i < pts.rows(); ++i)
                if (model.assignment[static_cast<std::size_t>(i)] == j)
                    perturbed += (pts.row(i) - moved.row(0)).squaredNorm();
            CHECK(perturbed > base);
        }
    }
}

TEST_CASE("kmeans: single-point reassignment never lowers J at convergence") {
    clra::Rng rng(67);
    Matrix pts = fixtures::random_matrix(rng, 50, 3);
    auto model = clra::kmeans(pts, 4, 13);
    REQUIRE(model.converged);
    const double j_star = model.objective;
    for (Eigen::Index i = 0; i < pts.rows(); ++i) {
        const int own = model.assignment[static_cast<std::size_t>(i)];
        for (int alt = 0; alt < 4; ++alt) {
            if (alt == own) continue;
            const double delta =
                (pts.row(i) - model.centroids.row(alt)).squaredNorm() -
                (pts.row(i) - model.centroids.row(own)).squaredNorm();
            CHECK(j_star + delta >= j_star - 1e-12);
        }
    }
}

TEST_CASE("kmeans: plus-plus init converges and is seed-deterministic") {
    clra::Rng rng(68);
    Matrix pts = fixtures::random_matrix(rng, 120, 6);
    auto a = clra::kmeans(pts, 4, 17, 100, clra::CentroidInit::kPlusPlus);
    auto b = clra::kmeans(pts, 4, 17, 100, clra::CentroidInit::kPlusPlus);
    CHECK(a.converged);
    CHECK(a.assignment == b.assignment);
    CHECK((a.centroids - b.centroids).norm() == 0.0);
}

TEST_CASE("kmeans: constant data stays valid even without convergence") {
    Matrix pts = Matrix::Constant(10, 4, 3.5);
    auto model = clra::kmeans(pts, 3, 1, 20);
    CHECK(model.objective == doctest::Approx(0.0).epsilon(1e-15));
    int total = 0;
    for (int c : model.counts) total += c;
    CHECK(total == 10);
    for (int c : model.assignment) CHECK((c >= 0 && c < 3));
}

TEST_CASE("objective: recomputation matches the model's stored value") {
    clra::Rng rng(69);
    Matrix pts = fixtures::random_matrix(rng, 64, 9);
    auto model = clra::kmeans(pts, 4, 23);
    CHECK(clra::objective(model, pts) ==
          doctest::Approx(model.objective).epsilon(1e-12));
}

TEST_CASE("objective: hand values") {
    Matrix two(2, 1);
    two << 0.0, 4.0;  // distance d = 4, K = 1: J = d^2/2 = 8
    auto model = clra::kmeans(two, 1, 0);
    CHECK(model.objective == doctest::Approx(8.0).epsilon(1e-12));

    Matrix one(1, 3);
    one << 1.0, 2.0, 3.0;
    CHECK(clra::kmeans(one, 1, 0).objective == 0.0);
}

TEST_CASE("objective: shape mismatch throws") {
    clra::Rng rng(70);
    Matrix pts = fixtures::random_matrix(rng, 20, 4);
    auto model = clra::kmeans(pts, 2, 1);
    Matrix other = fixtures::random_matrix(rng, 21, 4);
    CHECK_THROWS_AS(clra::objective(model, other), clra::InvalidInput);
}

TEST_CASE("kmeans over patches: intra-cluster variability shrinks with K") {
    // Two-texture image: flat half plus noisy half. More clusters should
    // cut the mean per-cluster RMS deviation.
    clra::Rng rng(71);
    clra::Matrix img(64, 64);
    for (int i = 0; i < 64; ++i)
        for (int j = 0; j < 64; ++j)
            img(i, j) = (j < 32) ? 40.0 : 150.0 + rng.range(-60.0, 60.0);

    auto patches = clra::extract_patches(img, 8, 4);
    auto variability = [&](const clra::ClusterModel& m) {
        double acc = 0.0;
        int used = 0;
        for (int j = 0; j < m.k; ++j) {
            if (m.counts[static_cast<std::size_t>(j)] == 0) continue;
            double ss = 0.0;
            for (Eigen::Index i = 0; i < patches.vectors.rows(); ++i)
                if (m.assignment[static_cast<std::size_t>(i)] == j)
                    ss += (patches.vectors.row(i) - m.centroids.row(j))
                              .squaredNorm();
            acc += std::sqrt(ss / m.counts[static_cast<std::size_t>(j)]);
            ++used;
        }
        return acc / used;
    };

    auto k2 = clra::kmeans(patches, 2, 9);
    auto k8 = clra::kmeans(patches, 8, 9);
    CHECK(variability(k8) < variability(k2));
}
