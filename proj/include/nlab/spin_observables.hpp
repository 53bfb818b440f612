#pragma once

#include <array>
#include <optional>
#include <string>

#include "nlab/tensor_core.hpp"

namespace nlab {

using Vec3 = std::array<double, 3>;

/// Spatial direction in spherical angles, theta in [0, pi], phi in [0, 2pi).
class Direction {
  public:
    Direction() = default;

    /// Validates theta and wraps phi into [0, 2pi).
    Direction(double theta, double phi);

    /// Direction of a nonzero 3-vector. phi is 0 at the poles.
    static Direction from_vector(const Vec3 &v);

    double theta() const { return theta_; }
    double phi() const { return phi_; }

    /// n = (sin θ cos φ, sin θ sin φ, cos θ).
    Vec3 unit_vector() const;

    Direction antipode() const;

    /// Angle between the two unit vectors, in [0, pi].
    double angle_to(const Direction &other) const;

  private:
    double theta_ = 0.0;
    double phi_ = 0.0;
};

Vec3 cross(const Vec3 &a, const Vec3 &b);
double dot(const Vec3 &a, const Vec3 &b);
double norm(const Vec3 &a);

/// Rotation of `d` by `angle` about `axis` (Rodrigues). `axis` need not be normalized.
Direction rotate_about(const Direction &d, const Vec3 &axis, double angle);

/// Hermitian idempotent matrix with its rank (the trace, rounded).
class Projector {
  public:
    /// Validates with is_projector at `tol` and that the trace is integral within 1e-9.
    explicit Projector(CMatrix matrix, double tol = 1e-12);

    const CMatrix &matrix() const { return matrix_; }
    int rank() const { return rank_; }
    Eigen::Index dim() const { return matrix_.rows(); }

    /// 1 - P.
    Projector complement() const;

  private:
    CMatrix matrix_;
    int rank_ = 0;
};

/**
 * Spin-up projector along `d`:
 *
 *   [ cos²(θ/2)                 e^{-iφ} cos(θ/2) sin(θ/2) ]
 *   [ e^{iφ} cos(θ/2) sin(θ/2)  sin²(θ/2)                 ]
 *
 * Its Bloch vector is exactly d.unit_vector().
 */
Projector projector_from_direction(const Direction &d);

/// Same matrix with half-angle phases e^{∓iφ/2}. Equals
/// projector_from_direction at azimuth φ/2, so φ must range over [0, 4π)
/// to reach every rank-one projector.
CMatrix half_angle_projector(double theta, double phi);

/// Inverse of projector_from_direction, read off the Bloch vector
/// (2 Re P10, 2 Im P10, P00 - P11). Throws InvalidArgument("not a spin
/// projector") unless `p` is 2x2 with rank 1.
Direction direction_from_projector(const Projector &p);

/// A single-qubit spin projector placed on one party of an n-qubit register.
class LocalObservable {
  public:
    /// Throws InvalidArgument when `party` is outside [1, n_parties] or
    /// when `projector` is not a 2x2 rank-one projector.
    LocalObservable(Projector projector, int party, int n_parties);

    int party() const { return party_; }
    int n_parties() const { return n_parties_; }
    const Projector &projector() const { return projector_; }
    const std::optional<Direction> &direction() const { return direction_; }

    /// 1 ⊗ … ⊗ P ⊗ … ⊗ 1 with P in slot `party`.
    const CMatrix &embedded() const { return embedded_; }

    /// Observable for the complementary outcome, 1 - P on the same party.
    LocalObservable complement() const;

    /// Short human-readable label such as "S1(theta=1.5708,phi=0)".
    std::string label() const;

  private:
    Projector projector_;
    int party_;
    int n_parties_;
    std::optional<Direction> direction_;
    CMatrix embedded_;
};

LocalObservable embed(const Projector &p, int party, int n_parties);

/// Convenience: embed(projector_from_direction(d), party, n_parties).
LocalObservable spin_observable(const Direction &d, int party, int n_parties);

/// Same party count and slot, projectors within `tol` in Frobenius norm.
bool same_observable(const LocalObservable &a, const LocalObservable &b, double tol = 1e-9);

} // namespace nlab
