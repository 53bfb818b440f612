#include "nlab/hardy.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include <gsl/gsl_multimin.h>
#include <gsl/gsl_vector.h>

#include "nlab/errors.hpp"
#include "nlab/parallel.hpp"
#include "nlab/sampling.hpp"

namespace nlab {

namespace {

LocalObservable link_partner(const StateVector &psi, const LocalObservable &source, const char *link,
                             double tol) {
    try {
        return partner_observable(psi, source, tol);
    } catch (const PreconditionError &e) {
        throw PreconditionError(std::string("hardy link ") + link + ": " + e.what());
    }
}

// Schmidt coefficient from an unconstrained optimizer coordinate.
double lambda_of(double t) { return 0.5 * (1.0 + std::tanh(t)); }

double theta_of(double t) {
    // fold onto [0, pi] so the simplex can roam freely
    const double two_pi = 2.0 * std::numbers::pi;
    double w = std::fmod(t, two_pi);
    if (w < 0.0) {
        w += two_pi;
    }
    return w <= std::numbers::pi ? w : two_pi - w;
}

double hardy_objective(const gsl_vector *x, void *) {
    const double lambda = lambda_of(gsl_vector_get(x, 0));
    const Direction n1(theta_of(gsl_vector_get(x, 1)), gsl_vector_get(x, 2));
    try {
        return -build_hardy(schmidt_state(lambda), n1).p_violation;
    } catch (const PreconditionError &) {
        return 0.0;
    }
}

struct StartResult {
    std::array<double, 3> x{};
    double value = 0.0;
    bool converged = false;
};

StartResult run_start(const OptimizerConfig &config, std::size_t index) {
    Rng rng(stream_seed(config.seed, index));
    std::uniform_real_distribution<double> t_dist(0.0, 2.0);
    std::uniform_real_distribution<double> theta_dist(0.0, std::numbers::pi);
    std::uniform_real_distribution<double> phi_dist(0.0, 2.0 * std::numbers::pi);
    const double t0 = t_dist(rng);
    const double th0 = theta_dist(rng);
    const double ph0 = phi_dist(rng);

    gsl_multimin_function fn{&hardy_objective, 3, nullptr};
    gsl_vector *x = gsl_vector_alloc(3);
    gsl_vector *step = gsl_vector_alloc(3);
    gsl_vector_set(x, 0, t0);
    gsl_vector_set(x, 1, th0);
    gsl_vector_set(x, 2, ph0);
    gsl_vector_set_all(step, 0.3);

    gsl_multimin_fminimizer *s = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, 3);
    gsl_multimin_fminimizer_set(s, &fn, x, step);

    StartResult out;
    for (int iter = 0; iter < config.max_iterations; ++iter) {
        if (gsl_multimin_fminimizer_iterate(s) != GSL_SUCCESS) {
            break;
        }
        if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(s), config.size_tol) == GSL_SUCCESS) {
            out.converged = true;
            break;
        }
    }
    for (std::size_t i = 0; i < 3; ++i) {
        out.x[i] = gsl_vector_get(s->x, i);
    }
    out.value = -s->fval;

    gsl_multimin_fminimizer_free(s);
    gsl_vector_free(step);
    gsl_vector_free(x);
    return out;
}

double leak(const StateVector &psi, const LocalObservable &source, const LocalObservable &target) {
    const CVector s_psi = source.embedded() * psi.amplitudes();
    const CVector out = target.complement().embedded() * s_psi;
    return out.squaredNorm();
}

} // namespace

std::vector<Correlation> HardyConfig::correlations() const {
    const auto s1n1 = spin_observable(n1, 1, 2);
    const auto s2n2 = spin_observable(n2, 2, 2);
    const auto s1n3 = spin_observable(n3, 1, 2);
    const auto s2n4 = spin_observable(n4, 2, 2);
    return {Correlation(s1n1, s2n2), Correlation(s2n2, s1n3), Correlation(s1n3, s2n4)};
}

StateVector schmidt_state(double lambda) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) {
        throw InvalidArgument("Schmidt coefficient must lie in [0, 1]");
    }
    CVector v = CVector::Zero(4);
    v(0) = std::sqrt(lambda);
    v(3) = std::sqrt(1.0 - lambda);
    return StateVector(v);
}

StateVector singlet_state() {
    CVector v = CVector::Zero(4);
    v(1) = 1.0 / std::numbers::sqrt2;
    v(2) = -1.0 / std::numbers::sqrt2;
    return StateVector(v);
}

double violation_probability(const StateVector &psi, const Direction &n1, const Direction &n4) {
    const auto s1 = spin_observable(n1, 1, 2);
    const auto not_s4 = spin_observable(n4, 2, 2).complement();
    return probability(s1.embedded() * not_s4.embedded(), psi);
}

HardyConfig build_hardy(const StateVector &psi, const Direction &n1, double tol) {
    if (psi.n_parties() != 2) {
        throw DimensionError("Hardy configurations need a two-qubit state");
    }
    const auto s1n1 = spin_observable(n1, 1, 2);
    const auto s2n2 = link_partner(psi, s1n1, "S1(n1) -> S2(n2)", tol);
    const auto s1n3 = link_partner(psi, s2n2, "S2(n2) -> S1(n3)", tol);
    const auto s2n4 = link_partner(psi, s1n3, "S1(n3) -> S2(n4)", tol);

    HardyConfig config{psi, n1, *s2n2.direction(), *s1n3.direction(), *s2n4.direction()};
    config.p_violation = violation_probability(psi, config.n1, config.n4);
    config.n1_n3_nonparallel = config.n1.angle_to(config.n3) > kParallelAngle;
    config.n2_n4_nonparallel = config.n2.angle_to(config.n4) > kParallelAngle;

    for (const auto &c : config.correlations()) {
        if (!holds(c, psi, tol)) {
            throw InternalError("constructed Hardy correlation " + c.source().label() + " -> " +
                                c.target().label() + " does not hold");
        }
    }
    return config;
}

HardyOptimum max_hardy_probability(const OptimizerConfig &config) {
    if (config.starts < 1) {
        throw InvalidArgument("optimizer needs at least one start");
    }
    const auto starts = static_cast<std::size_t>(config.starts);
    std::vector<StartResult> results(starts);
    parallel_for(starts, [&](std::size_t i) { results[i] = run_start(config, i); });

    // first strict maximum wins, so the merge is independent of scheduling
    std::size_t best = 0;
    for (std::size_t i = 1; i < starts; ++i) {
        if (results[i].value > results[best].value) {
            best = i;
        }
    }
    const auto &r = results[best];
    const double lambda = lambda_of(r.x[0]);
    const Direction n1(theta_of(r.x[1]), r.x[2]);
    HardyOptimum out{schmidt_state(lambda), n1};
    out.lambda = lambda;
    out.p_max = build_hardy(out.psi, n1).p_violation;
    out.converged = r.converged;
    return out;
}

Vec3 misalignment_axis(const HardyConfig &config) {
    const Vec3 n4 = config.n4.unit_vector();
    const Vec3 axis = cross(n4, config.n2.unit_vector());
    if (norm(axis) > 1e-9) {
        return axis;
    }
    // any vector perpendicular to n4, chosen from its azimuth
    const double theta = config.n4.theta() + std::numbers::pi / 2.0;
    const double phi = config.n4.phi();
    return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

SensitivityReport sensitivity(const HardyConfig &config, std::span<const double> epsilons) {
    const Vec3 axis = misalignment_axis(config);
    const auto s1n1 = spin_observable(config.n1, 1, 2);
    const auto s2n2 = spin_observable(config.n2, 2, 2);
    const auto s1n3 = spin_observable(config.n3, 1, 2);

    SensitivityReport report;
    for (const double eps : epsilons) {
        if (!(eps >= 0.0) || !std::isfinite(eps)) {
            throw InvalidArgument("misalignment angles must be finite and nonnegative");
        }
        const Direction n4 = rotate_about(config.n4, axis, eps);
        const auto s2n4 = spin_observable(n4, 2, 2);
        const double worst = std::max({leak(config.psi, s1n1, s2n2), leak(config.psi, s2n2, s1n3),
                                       leak(config.psi, s1n3, s2n4)});
        report.epsilons.push_back(eps);
        report.leak_probabilities.push_back(worst);
    }

    std::vector<double> xs;
    std::vector<double> ys;
    for (std::size_t i = 0; i < report.epsilons.size(); ++i) {
        if (report.epsilons[i] > 0.0 && report.leak_probabilities[i] > 0.0) {
            xs.push_back(std::log(report.epsilons[i]));
            ys.push_back(std::log(report.leak_probabilities[i]));
        }
    }
    if (xs.size() >= 2) {
        const double n = static_cast<double>(xs.size());
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            sx += xs[i];
            sy += ys[i];
            sxx += xs[i] * xs[i];
            sxy += xs[i] * ys[i];
        }
        report.fitted_exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    } else {
        report.fitted_exponent = std::numeric_limits<double>::quiet_NaN();
    }
    return report;
}

std::vector<double> log_grid(double lo, double hi, std::size_t count) {
    if (!(lo > 0.0 && hi >= lo) || count == 0) {
        throw InvalidArgument("log grid needs 0 < lo <= hi and at least one point");
    }
    std::vector<double> out(count);
    if (count == 1) {
        out[0] = lo;
        return out;
    }
    const double a = std::log(lo);
    const double b = std::log(hi);
    for (std::size_t i = 0; i < count; ++i) {
        out[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
    }
    out.front() = lo;
    out.back() = hi;
    return out;
}

} // namespace nlab
