#include "nlab/correlation_engine.hpp"

#include <algorithm>
#include <cmath>

#include "nlab/errors.hpp"

namespace nlab {

namespace {

int qubit_count(Eigen::Index dim) {
    int n = 0;
    Eigen::Index d = dim;
    while (d > 1 && d % 2 == 0) {
        d /= 2;
        ++n;
    }
    return d == 1 ? n : -1;
}

void require_same_dim(Eigen::Index op, Eigen::Index state) {
    if (op != state) {
        throw DimensionError("operator dimension " + std::to_string(op) +
                             " does not match state dimension " + std::to_string(state));
    }
}

// +1 eigenvector of a rank-one projector: its largest column, normalized.
CVector range_vector(const CMatrix &p) {
    Eigen::Index best = 0;
    p.colwise().norm().maxCoeff(&best);
    CVector u = p.col(best);
    return u / u.norm();
}

} // namespace

StateVector::StateVector(CVector amplitudes, double tol) : amplitudes_(std::move(amplitudes)) {
    n_parties_ = qubit_count(amplitudes_.size());
    if (n_parties_ < 1) {
        throw InvalidArgument("state dimension must be a power of two >= 2");
    }
    if (!all_finite(amplitudes_)) {
        throw InvalidArgument("state has non-finite amplitudes");
    }
    if (std::abs(amplitudes_.norm() - 1.0) > tol) {
        throw InvalidArgument("state is not normalized");
    }
}

StateVector StateVector::normalized(const CVector &v) {
    const double n = v.norm();
    if (!(n > 0.0) || !std::isfinite(n)) {
        throw InvalidArgument("cannot normalize a zero or non-finite vector");
    }
    return StateVector(v / n);
}

Correlation::Correlation(LocalObservable source, LocalObservable target)
    : source_(std::move(source)), target_(std::move(target)) {
    if (source_.n_parties() != target_.n_parties()) {
        throw InvalidArgument("correlated observables live on registers of different size");
    }
    if (source_.party() == target_.party()) {
        throw InvalidArgument("correlation needs observables on different parties");
    }
}

double probability(const CMatrix &p, const StateVector &psi) {
    require_same_dim(p.cols(), psi.dim());
    const double value = psi.amplitudes().dot(p * psi.amplitudes()).real();
    return std::clamp(value, 0.0, 1.0);
}

double probability(const Projector &p, const StateVector &psi) { return probability(p.matrix(), psi); }

double probability(const LocalObservable &s, const StateVector &psi) {
    return probability(s.embedded(), psi);
}

double action_norm(const LocalObservable &s, const StateVector &psi) {
    return action_norm(s.embedded(), psi.amplitudes());
}

double action_norm(const CMatrix &s, const CVector &v) {
    require_same_dim(s.cols(), v.size());
    return (s * v).norm();
}

CorrelationResidual correlation_residual(const Correlation &c, const StateVector &psi) {
    const CMatrix &s1 = c.source().embedded();
    const CMatrix &s2 = c.target().embedded();
    require_same_dim(s1.cols(), psi.dim());
    const CVector &v = psi.amplitudes();

    const CVector s1v = s1 * v;
    CorrelationResidual r;
    r.vector_form = (s1v - s1 * (s2 * v)).norm();

    const CMatrix leak = s1 * (identity(s1.rows()) - s2);
    r.inner_form = (leak * v).dot(v).real();

    if (std::abs(r.inner_form - r.vector_form * r.vector_form) > 1e-12) {
        throw InternalError("inner-product and vector forms of the correlation criterion disagree");
    }
    return r;
}

bool holds(const Correlation &c, const StateVector &psi, double tol) {
    return correlation_residual(c, psi).vector_form <= tol;
}

bool holds_inner_form(const Correlation &c, const StateVector &psi, double tol) {
    return std::abs(correlation_residual(c, psi).inner_form) <= tol * tol + kInnerProductNoise;
}

Projector partner(const StateVector &psi, const LocalObservable &f, double tol) {
    if (psi.n_parties() != 2 || f.n_parties() != 2) {
        throw DimensionError("partner projector is defined for two-qubit states");
    }
    const CVector u = range_vector(f.projector().matrix());
    const CVector &a = psi.amplitudes();

    // amplitude of |i>|j> sits at index 2i + j
    CVector w = CVector::Zero(2);
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            const Complex amp = a(2 * i + j);
            if (f.party() == 1) {
                w(j) += std::conj(u(i)) * amp;
            } else {
                w(i) += std::conj(u(j)) * amp;
            }
        }
    }
    const double wn = w.norm();
    if (wn <= tol) {
        throw PreconditionError("source annihilates state: " + f.label() +
                                " has no partner projector");
    }
    w /= wn;
    CMatrix a_matrix = w * w.adjoint();
    // symmetrize away round-off so the Projector invariant check is tight
    a_matrix = 0.5 * (a_matrix + a_matrix.adjoint()).eval();
    return Projector(std::move(a_matrix));
}

LocalObservable partner_observable(const StateVector &psi, const LocalObservable &f, double tol) {
    return LocalObservable(partner(psi, f, tol), 3 - f.party(), 2);
}

Correlation dual(const Correlation &c) {
    return Correlation(c.target().complement(), c.source().complement());
}

std::vector<CVector> solution_space(std::span<const Correlation> rs, int n_parties, double tol) {
    const Eigen::Index dim = Eigen::Index{1} << n_parties;
    if (rs.empty()) {
        return kernel_basis(CMatrix::Zero(0, dim), tol);
    }
    CMatrix stacked(dim * static_cast<Eigen::Index>(rs.size()), dim);
    Eigen::Index row = 0;
    for (const auto &c : rs) {
        if (c.n_parties() != n_parties) {
            throw DimensionError("correlation party count differs from the requested register");
        }
        const CMatrix &s1 = c.source().embedded();
        const CMatrix &s2 = c.target().embedded();
        stacked.middleRows(row, dim) = s1 * (identity(dim) - s2);
        row += dim;
    }
    return kernel_basis(stacked, tol);
}

} // namespace nlab
