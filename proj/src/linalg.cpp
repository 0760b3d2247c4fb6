#include "clra/linalg.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <string>

#include "clra/errors.hpp"

namespace clra {

namespace {

// Make the largest-magnitude entry of each U column non-negative so the
// factorization is unique even when singular subspaces allow a sign choice.
// The corresponding Vt row flips with it, leaving the product unchanged.
void apply_sign_convention(Matrix& u, Matrix& vt) {
    for (Eigen::Index j = 0; j < u.cols(); ++j) {
        Eigen::Index pivot = 0;
        double best = -1.0;
        for (Eigen::Index i = 0; i < u.rows(); ++i) {
            const double mag = std::abs(u(i, j));
            if (mag > best) {
                best = mag;
                pivot = i;
            }
        }
        if (u(pivot, j) < 0.0) {
            u.col(j) = -u.col(j);
            vt.row(j) = -vt.row(j);
        }
    }
}

}  // namespace

SvdFactors svd(const Matrix& a) {
    if (a.rows() == 0 || a.cols() == 0) {
        throw InvalidInput("svd: matrix must be non-empty");
    }
    if (!a.allFinite()) {
        throw InvalidInput("svd: matrix contains non-finite entries");
    }
    Eigen::BDCSVD<Matrix> dec(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    SvdFactors f;
    f.u = dec.matrixU();
    f.s = dec.singularValues();
    f.vt = dec.matrixV().transpose();
    apply_sign_convention(f.u, f.vt);
    return f;
}

TruncatedFactors truncate(const SvdFactors& factors, int rank) {
    const int q = static_cast<int>(factors.s.size());
    if (rank < 1 || rank > q) {
        throw InvalidRank("truncate: rank " + std::to_string(rank) +
                          " outside [1, " + std::to_string(q) + "]");
    }
    TruncatedFactors t;
    t.u = factors.u.leftCols(rank);
    t.s = factors.s.head(rank);
    t.vt = factors.vt.topRows(rank);
    t.rank = rank;
    return t;
}

double tail_error(const Vector& s, int rank) {
    if (rank < 1 || rank > s.size()) {
        throw InvalidRank("tail_error: rank outside [1, " +
                          std::to_string(s.size()) + "]");
    }
    double sum = 0.0;
    for (Eigen::Index k = rank; k < s.size(); ++k) {
        sum += s[k] * s[k];
    }
    return std::sqrt(sum);
}

int rank_for_energy(const Vector& s, double alpha, bool* degenerate) {
    if (!(alpha > 0.0) || alpha > 1.0) {
        throw InvalidInput("rank_for_energy: alpha must be in (0, 1]");
    }
    if (s.size() == 0) {
        throw InvalidInput("rank_for_energy: empty spectrum");
    }
    if (degenerate) *degenerate = false;

    const double total = s.squaredNorm();
    if (total == 0.0) {
        if (degenerate) *degenerate = true;
        return 1;
    }
    const double target = alpha * total;
    double cumulative = 0.0;
    for (Eigen::Index k = 0; k < s.size(); ++k) {
        cumulative += s[k] * s[k];
        if (cumulative >= target) {
            return static_cast<int>(k) + 1;
        }
    }
    // Rounding can leave the running sum a hair under the target; the full
    // spectrum always satisfies alpha <= 1.
    return static_cast<int>(s.size());
}

}  // namespace clra
