#pragma once

// Dense complex linear algebra for the small spaces used throughout the
// library (C^2, C^4 and C^16). Storage is Eigen's dynamic dense types; no
// operation here ever needs more than a 16x16 matrix.

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace nlab {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

/// Kronecker product a ⊗ b. (a⊗b)(u⊗v) = au ⊗ bv.
CMatrix tensor(const CMatrix &a, const CMatrix &b);

/// Kronecker product of a sequence, left to right. Empty input gives the 1x1 identity.
CMatrix tensor_chain(std::span<const CMatrix> factors);

/// Kronecker product of two vectors.
CVector tensor(const CVector &a, const CVector &b);

CMatrix identity(Eigen::Index dim);

/// Frobenius norm. Used for every tolerance comparison in the library.
double frobenius(const CMatrix &m);

bool all_finite(const CMatrix &m);
bool all_finite(const CVector &v);

/**
 * Orthonormal basis of the numerical null space of `m`.
 *
 * Uses a full singular value decomposition. A right singular vector belongs
 * to the kernel when its singular value is at most `tol * ||m||_F`, so every
 * returned v satisfies ||m v|| <= tol ||m||_F ||v||. Columns of V beyond
 * min(rows, cols) are always in the kernel. A zero matrix yields the full
 * standard basis, a full-rank one an empty list.
 *
 * `m` may be rectangular; stacked constraint operators are the main caller.
 */
std::vector<CVector> kernel_basis(const CMatrix &m, double tol);

/// Hermitian and idempotent, both measured in Frobenius norm against `tol`.
bool is_projector(const CMatrix &m, double tol);

} // namespace nlab
