#pragma once

// Hardy configurations: the three correlations
//   S1(n1) → S2(n2),  S2(n2) → S1(n3),  S1(n3) → S2(n4)
// built from a state and a first direction by repeated partner
// construction, the probability of the outcome pair (1, 0) for
// (S1(n1), S2(n4)), its maximum over two-qubit states, and the breakdown of
// the correlations under a misaligned n4.

#include <cstdint>
#include <span>
#include <vector>

#include "nlab/correlation_engine.hpp"

namespace nlab {

/// Minimum angle between n_j and n_{j+2} for them to count as non-parallel.
inline constexpr double kParallelAngle = 1e-6;

struct HardyConfig {
    StateVector psi;
    Direction n1, n2, n3, n4;
    double p_violation = 0.0;
    /// angle(n1, n3) > kParallelAngle
    bool n1_n3_nonparallel = false;
    /// angle(n2, n4) > kParallelAngle
    bool n2_n4_nonparallel = false;

    bool directions_valid() const { return n1_n3_nonparallel && n2_n4_nonparallel; }

    /// The three correlations in order.
    std::vector<Correlation> correlations() const;
};

/// Two-qubit state sqrt(λ)|00> + sqrt(1-λ)|11>, λ in [0, 1].
StateVector schmidt_state(double lambda);

/// (|01> - |10>)/sqrt(2).
StateVector singlet_state();

/// <ψ| S1(n1) (1 - S2(n4)) ψ>.
double violation_probability(const StateVector &psi, const Direction &n1, const Direction &n4);

/**
 * Builds the unique directions n2, n3, n4 realizing the three correlations
 * for (ψ, n1).
 *
 * Throws PreconditionError naming the failing link when a partner does not
 * exist (the link's source annihilates ψ), DimensionError for states that are
 * not two-qubit, and InternalError if a built correlation fails holds() at
 * `tol`. Parallel n_j / n_{j+2} (for example every maximally entangled
 * state) is reported through the flags, not thrown.
 */
HardyConfig build_hardy(const StateVector &psi, const Direction &n1, double tol = kCorrelationTol);

struct OptimizerConfig {
    int starts = 32;
    std::uint64_t seed = 0;
    /// simplex size at which a start counts as converged
    double size_tol = 1e-10;
    int max_iterations = 4000;
};

struct HardyOptimum {
    StateVector psi;
    Direction n1;
    double lambda = 0.0;
    double p_max = 0.0;
    /// true when the best start met size_tol within max_iterations
    bool converged = false;
};

/// Maximizes p_violation over Schmidt coefficient λ and n1 with a
/// multi-start Nelder-Mead simplex. Deterministic for a given config.
HardyOptimum max_hardy_probability(const OptimizerConfig &config = {});

struct SensitivityReport {
    std::vector<double> epsilons;
    std::vector<double> leak_probabilities;
    /// least-squares slope of log(leak) against log(ε) over ε > 0 with leak > 0
    double fitted_exponent = 0.0;
};

/// Rotation axis for misaligning n4: n4 × n2, or a perpendicular fixed by
/// n4's azimuth when the two are (anti)parallel.
Vec3 misalignment_axis(const HardyConfig &config);

/**
 * Rotates n4 by each ε about misalignment_axis() and records the largest
 * leak <ψ| S_src (1 - S_tgt) ψ> over the three correlations, computed as
 * ||(1 - S_tgt) S_src ψ||² so that small leaks keep full relative precision.
 */
SensitivityReport sensitivity(const HardyConfig &config, std::span<const double> epsilons);

/// Log-spaced grid of `count` points from lo to hi inclusive.
std::vector<double> log_grid(double lo, double hi, std::size_t count);

} // namespace nlab
