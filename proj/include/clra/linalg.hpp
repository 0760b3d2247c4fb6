#pragma once

#include <Eigen/Dense>
#include <cstdint>

namespace clra {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Full singular value decomposition A = U * diag(s) * Vt, thin form:
// for an m x n matrix with q = min(m, n), U is m x q, s has q entries in
// non-increasing order, Vt is q x n.
struct SvdFactors {
    Matrix u;
    Vector s;
    Matrix vt;

    Matrix reconstruct() const { return u * s.asDiagonal() * vt; }
};

// Leading-rank slice of an SVD: U_r (m x r), s_r (r), Vt_r (r x n).
struct TruncatedFactors {
    Matrix u;
    Vector s;
    Matrix vt;
    int rank = 0;

    // Number of stored scalars: r*(m + n + 1). This is the quantity all
    // compression-factor accounting is based on.
    std::int64_t element_count() const {
        return static_cast<std::int64_t>(rank) * (u.rows() + vt.cols() + 1);
    }

    Matrix reconstruct() const { return u * s.asDiagonal() * vt; }
};

// Full SVD with a deterministic sign convention: in each column of U the
// entry of largest magnitude (lowest index on ties) is made non-negative,
// flipping the paired row of Vt. Same input always yields identical factors.
SvdFactors svd(const Matrix& a);

// Keep the leading `rank` singular triplets. Throws InvalidRank unless
// 1 <= rank <= s.size().
TruncatedFactors truncate(const SvdFactors& factors, int rank);

// Frobenius error of the optimal rank-r approximation:
// sqrt(sum of squared singular values past the first r); exactly 0 at
// rank == s.size(). Throws InvalidRank unless 1 <= rank <= s.size().
double tail_error(const Vector& s, int rank);

// Smallest r whose cumulative squared singular values reach
// alpha * total energy. Requires 0 < alpha <= 1 (InvalidInput otherwise)
// and a non-empty spectrum. An all-zero spectrum has no meaningful answer:
// the function returns 1 and sets *degenerate if provided.
int rank_for_energy(const Vector& s, double alpha, bool* degenerate = nullptr);

}  // namespace clra
