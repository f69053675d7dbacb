#pragma once

#include <cmath>
#include <vector>

namespace polymem::detail {

// Dense row-major k x k helpers for the tiny systems used across the library
// (k <= 8 or so). Gaussian elimination with partial pivoting.

using Mat = std::vector<double>;  // k*k row major

inline bool solve_linear(Mat A, std::vector<double> b, std::vector<double>& x, int k,
                         double piv_tol = 1e-12) {
    std::vector<int> perm(k);
    for (int i = 0; i < k; ++i) perm[i] = i;
    for (int col = 0; col < k; ++col) {
        int best = col;
        for (int r = col + 1; r < k; ++r)
            if (std::abs(A[r * k + col]) > std::abs(A[best * k + col])) best = r;
        if (std::abs(A[best * k + col]) < piv_tol) return false;
        if (best != col) {
            for (int j = 0; j < k; ++j) std::swap(A[col * k + j], A[best * k + j]);
            std::swap(b[col], b[best]);
        }
        double inv = 1.0 / A[col * k + col];
        for (int r = col + 1; r < k; ++r) {
            double f = A[r * k + col] * inv;
            if (f == 0.0) continue;
            for (int j = col; j < k; ++j) A[r * k + j] -= f * A[col * k + j];
            b[r] -= f * b[col];
        }
    }
    x.assign(k, 0.0);
    for (int r = k - 1; r >= 0; --r) {
        double s = b[r];
        for (int j = r + 1; j < k; ++j) s -= A[r * k + j] * x[j];
        x[r] = s / A[r * k + r];
    }
    return true;
}

inline bool invert(const Mat& A, Mat& out, int k, double piv_tol = 1e-12) {
    out.assign(k * k, 0.0);
    std::vector<double> col(k), e(k);
    for (int c = 0; c < k; ++c) {
        std::fill(e.begin(), e.end(), 0.0);
        e[c] = 1.0;
        if (!solve_linear(A, e, col, k, piv_tol)) return false;
        for (int r = 0; r < k; ++r) out[r * k + c] = col[r];
    }
    return true;
}

}  // namespace polymem::detail
