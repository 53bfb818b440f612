#include "nlab/tensor_core.hpp"

#include <cmath>

namespace nlab {

CMatrix tensor(const CMatrix &a, const CMatrix &b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

CMatrix tensor_chain(std::span<const CMatrix> factors) {
    CMatrix out = identity(1);
    for (const auto &f : factors) {
        out = tensor(out, f);
    }
    return out;
}

CVector tensor(const CVector &a, const CVector &b) {
    CVector out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        out.segment(i * b.size(), b.size()) = a(i) * b;
    }
    return out;
}

CMatrix identity(Eigen::Index dim) { return CMatrix::Identity(dim, dim); }

double frobenius(const CMatrix &m) { return m.norm(); }

bool all_finite(const CMatrix &m) { return m.allFinite(); }

bool all_finite(const CVector &v) { return v.allFinite(); }

std::vector<CVector> kernel_basis(const CMatrix &m, double tol) {
    const Eigen::Index n = m.cols();
    std::vector<CVector> basis;
    if (n == 0) {
        return basis;
    }
    const double scale = frobenius(m);
    if (m.rows() == 0 || scale == 0.0) {
        for (Eigen::Index k = 0; k < n; ++k) {
            basis.push_back(CVector::Unit(n, k));
        }
        return basis;
    }

    Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeFullV);
    const auto &sigma = svd.singularValues();
    const CMatrix &v = svd.matrixV();
    for (Eigen::Index k = 0; k < n; ++k) {
        // singular values beyond min(rows, cols) are structurally zero
        const bool null_direction = k >= sigma.size() || sigma(k) <= tol * scale;
        if (null_direction) {
            basis.push_back(v.col(k));
        }
    }
    return basis;
}

bool is_projector(const CMatrix &m, double tol) {
    if (m.rows() != m.cols() || !all_finite(m)) {
        return false;
    }
    const double hermitian_defect = frobenius(m - m.adjoint());
    const double idempotent_defect = frobenius(m * m - m);
    return hermitian_defect <= tol && idempotent_defect <= tol;
}

} // namespace nlab
