#include "nlab/spin_observables.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "nlab/errors.hpp"

namespace nlab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
// slack on the theta range so that round-off from atan2/acos is accepted
constexpr double kAngleSlack = 1e-12;

double wrap_phi(double phi) {
    double w = std::fmod(phi, kTwoPi);
    if (w < 0.0) {
        w += kTwoPi;
    }
    if (w >= kTwoPi) {
        w = 0.0;
    }
    return w;
}

} // namespace

Direction::Direction(double theta, double phi) {
    if (!std::isfinite(theta) || !std::isfinite(phi)) {
        throw InvalidArgument("direction angles must be finite");
    }
    if (theta < -kAngleSlack || theta > kPi + kAngleSlack) {
        throw InvalidArgument("polar angle outside [0, pi]");
    }
    theta_ = std::clamp(theta, 0.0, kPi);
    phi_ = wrap_phi(phi);
}

Direction Direction::from_vector(const Vec3 &v) {
    const double r = norm(v);
    if (!(r > 0.0) || !std::isfinite(r)) {
        throw InvalidArgument("direction from a zero or non-finite vector");
    }
    const double rho = std::hypot(v[0], v[1]);
    const double theta = std::atan2(rho, v[2]);
    // phi carries no information at the poles
    const double phi = rho <= 1e-15 * r ? 0.0 : std::atan2(v[1], v[0]);
    return {theta, phi};
}

Vec3 Direction::unit_vector() const {
    return {std::sin(theta_) * std::cos(phi_), std::sin(theta_) * std::sin(phi_), std::cos(theta_)};
}

Direction Direction::antipode() const { return {kPi - theta_, phi_ + kPi}; }

double Direction::angle_to(const Direction &other) const {
    const Vec3 a = unit_vector();
    const Vec3 b = other.unit_vector();
    // atan2 form keeps accuracy for nearly parallel vectors
    return std::atan2(norm(cross(a, b)), dot(a, b));
}

Vec3 cross(const Vec3 &a, const Vec3 &b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

double dot(const Vec3 &a, const Vec3 &b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

double norm(const Vec3 &a) { return std::sqrt(dot(a, a)); }

Direction rotate_about(const Direction &d, const Vec3 &axis, double angle) {
    const double len = norm(axis);
    if (!(len > 0.0)) {
        throw InvalidArgument("rotation axis must be nonzero");
    }
    const Vec3 k{axis[0] / len, axis[1] / len, axis[2] / len};
    const Vec3 v = d.unit_vector();
    const Vec3 kxv = cross(k, v);
    const double kv = dot(k, v);
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    Vec3 r{};
    for (int i = 0; i < 3; ++i) {
        r[i] = v[i] * c + kxv[i] * s + k[i] * kv * (1.0 - c);
    }
    return Direction::from_vector(r);
}

Projector::Projector(CMatrix matrix, double tol) : matrix_(std::move(matrix)) {
    if (!is_projector(matrix_, tol)) {
        throw InvalidArgument("matrix is not a Hermitian idempotent");
    }
    const double trace = matrix_.trace().real();
    const double rounded = std::round(trace);
    if (std::abs(trace - rounded) > 1e-9) {
        throw InvalidArgument("projector trace is not integral");
    }
    rank_ = static_cast<int>(rounded);
}

Projector Projector::complement() const {
    return Projector(identity(dim()) - matrix_);
}

Projector projector_from_direction(const Direction &d) {
    const double c = std::cos(d.theta() / 2.0);
    const double s = std::sin(d.theta() / 2.0);
    const Complex phase = std::polar(1.0, d.phi());
    CMatrix m(2, 2);
    m << c * c, std::conj(phase) * c * s,
         phase * c * s, s * s;
    return Projector(std::move(m));
}

CMatrix half_angle_projector(double theta, double phi) {
    const double c = std::cos(theta / 2.0);
    const double s = std::sin(theta / 2.0);
    const Complex phase = std::polar(1.0, phi / 2.0);
    CMatrix m(2, 2);
    m << c * c, std::conj(phase) * c * s,
         phase * c * s, s * s;
    return m;
}

Direction direction_from_projector(const Projector &p) {
    if (p.dim() != 2 || p.rank() != 1) {
        throw InvalidArgument("not a spin projector");
    }
    const CMatrix &m = p.matrix();
    const Complex off = m(1, 0);
    const Vec3 bloch{2.0 * off.real(), 2.0 * off.imag(), (m(0, 0) - m(1, 1)).real()};
    return Direction::from_vector(bloch);
}

LocalObservable::LocalObservable(Projector projector, int party, int n_parties)
    : projector_(std::move(projector)), party_(party), n_parties_(n_parties) {
    if (n_parties < 1 || party < 1 || party > n_parties) {
        throw InvalidArgument("party index out of range");
    }
    if (projector_.dim() != 2 || projector_.rank() != 1) {
        throw InvalidArgument("local observable needs a rank-one single-qubit projector");
    }
    direction_ = direction_from_projector(projector_);

    std::vector<CMatrix> factors(static_cast<std::size_t>(n_parties), identity(2));
    factors[static_cast<std::size_t>(party - 1)] = projector_.matrix();
    embedded_ = tensor_chain(factors);
}

LocalObservable LocalObservable::complement() const {
    return LocalObservable(projector_.complement(), party_, n_parties_);
}

std::string LocalObservable::label() const {
    std::ostringstream os;
    os.precision(6);
    os << 'S' << party_;
    if (direction_) {
        os << "(theta=" << direction_->theta() << ",phi=" << direction_->phi() << ')';
    }
    return os.str();
}

LocalObservable embed(const Projector &p, int party, int n_parties) {
    return LocalObservable(p, party, n_parties);
}

LocalObservable spin_observable(const Direction &d, int party, int n_parties) {
    return LocalObservable(projector_from_direction(d), party, n_parties);
}

bool same_observable(const LocalObservable &a, const LocalObservable &b, double tol) {
    return a.party() == b.party() && a.n_parties() == b.n_parties() &&
           frobenius(a.projector().matrix() - b.projector().matrix()) <= tol;
}

} // namespace nlab
