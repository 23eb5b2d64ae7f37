#pragma once

#include <cstddef>
#include <vector>

#include "attmatch/matrix.hpp"

namespace attmatch {

/// Rank-d factorization A ~= U diag(sigma) V^T with orthonormal U, V columns
/// and sigma sorted in descending order.
///
/// Sign convention: the largest-magnitude entry of each right singular vector
/// is positive (first such entry on magnitude ties), which makes the
/// factorization deterministic across runs.
struct TruncatedSvd {
    Matrix u;                   // n x d
    std::vector<double> sigma;  // d
    Matrix v;                   // m x d

    /// Left factors scaled by their singular values, U diag(sigma):
    /// the latent profile rows used for matching.
    Matrix scaled_factors() const;

    /// || A - U diag(sigma) V^T ||_F^2 against the given matrix.
    double squared_reconstruction_error(const Matrix& a) const;
};

/// Best rank-d approximation of `a` in the Frobenius sense, computed with
/// one-sided Jacobi rotations. Exact to machine precision on the dense
/// matrices this toolkit works with; throws Error when
/// rank < 1 or rank > min(rows, cols).
TruncatedSvd truncated_svd(const Matrix& a, std::size_t rank);

}  // namespace attmatch
