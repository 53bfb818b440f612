#pragma once

// Quantum side of the correlation calculus: outcome probabilities, the
// state-dependent correlation criterion S1 ψ = S1 S2 ψ, the unique rank-one
// partner of a local observable, the complement dual of a correlation, and
// the linear space of all states satisfying a set of correlations.

#include <span>
#include <vector>

#include "nlab/spin_observables.hpp"
#include "nlab/tensor_core.hpp"

namespace nlab {

/// Default tolerance for correlation checks on normalized states.
inline constexpr double kCorrelationTol = 1e-10;

/// Absolute round-off floor of the inner-product form <S1(1-S2)ψ|ψ>.
inline constexpr double kInnerProductNoise = 1e-14;

/// Normalized state of n qubits (dimension 2^n).
class StateVector {
  public:
    /// Throws InvalidArgument unless the entries are finite, the dimension
    /// is a power of two >= 2, and ||amplitudes|| = 1 within `tol`.
    explicit StateVector(CVector amplitudes, double tol = 1e-12);

    /// Rescales a nonzero vector to unit norm.
    static StateVector normalized(const CVector &v);

    const CVector &amplitudes() const { return amplitudes_; }
    Eigen::Index dim() const { return amplitudes_.size(); }
    int n_parties() const { return n_parties_; }

  private:
    CVector amplitudes_;
    int n_parties_ = 0;
};

/// Directed correlation source → target between space-like separated parties.
class Correlation {
  public:
    /// Throws InvalidArgument when both observables sit on the same party
    /// or belong to registers of different size.
    Correlation(LocalObservable source, LocalObservable target);

    const LocalObservable &source() const { return source_; }
    const LocalObservable &target() const { return target_; }
    int n_parties() const { return source_.n_parties(); }

  private:
    LocalObservable source_;
    LocalObservable target_;
};

/// <ψ|Pψ>, clamped into [0, 1]. Throws DimensionError on size mismatch.
double probability(const CMatrix &p, const StateVector &psi);
double probability(const Projector &p, const StateVector &psi);
double probability(const LocalObservable &s, const StateVector &psi);

/// ||S ψ||.
double action_norm(const LocalObservable &s, const StateVector &psi);
double action_norm(const CMatrix &s, const CVector &v);

/// Both evaluations of the correlation criterion for one state.
struct CorrelationResidual {
    /// ||S1 ψ - S1 S2 ψ||
    double vector_form = 0.0;
    /// Re <S1 (1 - S2) ψ | ψ>; equals vector_form² exactly in real arithmetic.
    double inner_form = 0.0;
};

/// Evaluates both forms and throws InternalError when they differ by more
/// than round-off (|inner - vector²| > 1e-12).
CorrelationResidual correlation_residual(const Correlation &c, const StateVector &psi);

/// Vector form: ||S1 ψ - S1 S2 ψ|| <= tol.
bool holds(const Correlation &c, const StateVector &psi, double tol = kCorrelationTol);

/// Inner-product form: |<S1(1-S2)ψ|ψ>| <= tol² + kInnerProductNoise.
///
/// Agrees with holds() except when the vector residual lies in the narrow
/// band (tol, sqrt(tol² + kInnerProductNoise)) that round-off on the
/// quadratic form cannot resolve.
bool holds_inner_form(const Correlation &c, const StateVector &psi, double tol = kCorrelationTol);

/**
 * Unique rank-one projector A on the other party of a two-qubit state with
 * f →ψ A.
 *
 * With u the +1 eigenvector of f's projector, f ψ = u ⊗ w where w is the
 * conditional vector of the other party; A = |w><w| / ||w||². Throws
 * PreconditionError("source annihilates state") when ||f ψ|| <= tol and
 * DimensionError for anything but two parties.
 */
Projector partner(const StateVector &psi, const LocalObservable &f, double tol = kCorrelationTol);

/// partner() embedded on the other party.
LocalObservable partner_observable(const StateVector &psi, const LocalObservable &f,
                                   double tol = kCorrelationTol);

/// (1 - target) → (1 - source). An involution.
Correlation dual(const Correlation &c);

/// Orthonormal basis of { ψ : every correlation in `rs` holds }.
///
/// Each criterion is the linear condition S1(1 - S2) ψ = 0; the operators are
/// stacked and handed to kernel_basis. An empty result means only ψ = 0.
std::vector<CVector> solution_space(std::span<const Correlation> rs, int n_parties,
                                    double tol = kCorrelationTol);

} // namespace nlab
