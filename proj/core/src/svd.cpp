#include "attmatch/svd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "attmatch/error.hpp"

namespace attmatch {

namespace {

// One-sided Jacobi on the columns of A, operated on A^T so each column is a
// contiguous row of the working matrix. Returns the transformed columns (rows
// of `work`) and accumulates the right rotations into `vt` (rows = columns of V).
void jacobi_sweeps(Matrix& work, Matrix& vt) {
    const std::size_t p = work.rows();  // number of columns of A
    const std::size_t n = work.cols();
    constexpr double kTolerance = 1e-14;
    constexpr int kMaxSweeps = 60;

    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        bool rotated = false;
        for (std::size_t j = 0; j + 1 < p; ++j) {
            for (std::size_t k = j + 1; k < p; ++k) {
                double* col_j = work.row(j).data();
                double* col_k = work.row(k).data();
                double alpha = 0, beta = 0, gamma = 0;
                for (std::size_t i = 0; i < n; ++i) {
                    alpha += col_j[i] * col_j[i];
                    beta += col_k[i] * col_k[i];
                    gamma += col_j[i] * col_k[i];
                }
                if (std::abs(gamma) <= kTolerance * std::sqrt(alpha * beta)) continue;
                rotated = true;

                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = (zeta >= 0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;

                for (std::size_t i = 0; i < n; ++i) {
                    const double a = col_j[i];
                    const double b = col_k[i];
                    col_j[i] = c * a - s * b;
                    col_k[i] = s * a + c * b;
                }
                double* v_j = vt.row(j).data();
                double* v_k = vt.row(k).data();
                for (std::size_t i = 0; i < p; ++i) {
                    const double a = v_j[i];
                    const double b = v_k[i];
                    v_j[i] = c * a - s * b;
                    v_k[i] = s * a + c * b;
                }
            }
        }
        if (!rotated) break;
    }
}

Matrix transpose(const Matrix& a) {
    Matrix t(a.cols(), a.rows());
    for (std::size_t r = 0; r < a.rows(); ++r) {
        for (std::size_t c = 0; c < a.cols(); ++c) t(c, r) = a(r, c);
    }
    return t;
}

}  // namespace

Matrix TruncatedSvd::scaled_factors() const {
    Matrix scaled(u.rows(), u.cols());
    for (std::size_t r = 0; r < u.rows(); ++r) {
        for (std::size_t c = 0; c < u.cols(); ++c) scaled(r, c) = u(r, c) * sigma[c];
    }
    return scaled;
}

double TruncatedSvd::squared_reconstruction_error(const Matrix& a) const {
    double error = 0;
    const std::size_t d = sigma.size();
    for (std::size_t r = 0; r < a.rows(); ++r) {
        for (std::size_t c = 0; c < a.cols(); ++c) {
            double approx = 0;
            for (std::size_t k = 0; k < d; ++k) approx += u(r, k) * sigma[k] * v(c, k);
            const double diff = a(r, c) - approx;
            error += diff * diff;
        }
    }
    return error;
}

TruncatedSvd truncated_svd(const Matrix& a, std::size_t rank) {
    const std::size_t min_dim = std::min(a.rows(), a.cols());
    if (rank < 1 || rank > min_dim) {
        throw Error("svd rank " + std::to_string(rank) + " out of range [1, " +
                    std::to_string(min_dim) + "]");
    }

    // Orthogonalize the smaller side's columns.
    const bool transposed = a.rows() < a.cols();
    Matrix work = transposed ? a : transpose(a);  // p x n with p = min side
    const std::size_t p = work.rows();
    const std::size_t n = work.cols();

    Matrix vt(p, p);
    for (std::size_t i = 0; i < p; ++i) vt(i, i) = 1.0;

    jacobi_sweeps(work, vt);

    std::vector<double> norms(p);
    for (std::size_t j = 0; j < p; ++j) {
        double sum = 0;
        for (double x : work.row(j)) sum += x * x;
        norms[j] = std::sqrt(sum);
    }

    std::vector<std::size_t> order(p);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return norms[x] > norms[y]; });

    // In the non-transposed case work holds columns of A^T, so the Jacobi left
    // side belongs to A's columns: left singular vectors of A are the Jacobi
    // V and vice versa when transposed.
    TruncatedSvd result;
    result.sigma.resize(rank);
    Matrix left(n, rank);   // singular vectors of the long side
    Matrix right(p, rank);  // singular vectors of the short side
    for (std::size_t out = 0; out < rank; ++out) {
        const std::size_t j = order[out];
        const double sigma_j = norms[j];
        result.sigma[out] = sigma_j;
        if (sigma_j > 0) {
            for (std::size_t i = 0; i < n; ++i) left(i, out) = work(j, i) / sigma_j;
        }
        for (std::size_t i = 0; i < p; ++i) right(i, out) = vt(j, i);
    }

    if (transposed) {
        result.u = std::move(right);
        result.v = std::move(left);
    } else {
        result.u = std::move(left);
        result.v = std::move(right);
    }

    // Deterministic signs: largest-magnitude entry of each right vector positive.
    for (std::size_t k = 0; k < rank; ++k) {
        std::size_t arg = 0;
        double best = -1.0;
        for (std::size_t i = 0; i < result.v.rows(); ++i) {
            const double mag = std::abs(result.v(i, k));
            if (mag > best) {
                best = mag;
                arg = i;
            }
        }
        if (result.v(arg, k) < 0) {
            for (std::size_t i = 0; i < result.v.rows(); ++i) result.v(i, k) = -result.v(i, k);
            for (std::size_t i = 0; i < result.u.rows(); ++i) result.u(i, k) = -result.u(i, k);
        }
    }
    return result;
}

}  // namespace attmatch
