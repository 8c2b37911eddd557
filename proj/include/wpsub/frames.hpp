#pragma once

#include "tensor.hpp"

namespace wpsub {

// Modified Gram-Schmidt in column order under the inner product <u, v> = u^T g v.
// Columns whose remainder falls below `drop_tol` (relative) are discarded.
inline Mat gram_schmidt(const Mat& g, const Mat& columns, double drop_tol = 1e-10) {
    Mat out(columns.rows(), 0);
    for (int c = 0; c < columns.cols(); ++c) {
        Vec v = columns.col(c);
        const double original = std::sqrt(std::max(0.0, v.dot(g * v)));
        for (int k = 0; k < out.cols(); ++k) v -= out.col(k).dot(g * v) * out.col(k);
        // second pass keeps orthogonality at machine level
        for (int k = 0; k < out.cols(); ++k) v -= out.col(k).dot(g * v) * out.col(k);
        const double norm = std::sqrt(std::max(0.0, v.dot(g * v)));
        if (original == 0.0 || norm <= drop_tol * original) continue;
        out.conservativeResize(Eigen::NoChange, out.cols() + 1);
        out.col(out.cols() - 1) = v / norm;
    }
    return out;
}

// Flip each column so that its first entry with magnitude above `tol` is positive.
inline void normalize_signs(Mat& columns, double tol = 1e-12) {
    for (int c = 0; c < columns.cols(); ++c) {
        const double scale = columns.col(c).lpNorm<Eigen::Infinity>();
        for (int r = 0; r < columns.rows(); ++r) {
            if (std::abs(columns(r, c)) > tol * std::max(1.0, scale)) {
                if (columns(r, c) < 0.0) columns.col(c) *= -1.0;
                break;
            }
        }
    }
}

inline double g_norm(const Mat& g, const Vec& v) { return std::sqrt(std::max(0.0, v.dot(g * v))); }

} // namespace wpsub
