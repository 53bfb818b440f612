#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "nlab/errors.hpp"
#include "nlab/hardy.hpp"
#include "nlab/reality_inference.hpp"
#include "nlab/sampling.hpp"

using namespace nlab;
using std::numbers::pi;

namespace {

// Closed form for the Schmidt state sqrt(l)|00> + sqrt(1-l)|11> with
// x = cos²(θ1/2). With a² = l, b² = 1-l the chain's conditional vectors are
// w = (a c, b s) and w'' = (a³ c, b³ s), and
//   p = |w|² - <w''|w>² / |w''|².
// Independent of φ1.
double hardy_closed_form(double lambda, double x) {
    const double a2 = lambda, b2 = 1 - lambda;
    const double w = a2 * x + b2 * (1 - x);
    const double overlap = a2 * a2 * x + b2 * b2 * (1 - x);
    const double w2 = a2 * a2 * a2 * x + b2 * b2 * b2 * (1 - x);
    return w2 <= 0 ? 0.0 : w - overlap * overlap / w2;
}

double golden_max(double lambda) {
    double lo = 0.0, hi = 1.0;
    const double r = (std::sqrt(5.0) - 1) / 2;
    for (int i = 0; i < 200; ++i) {
        const double m1 = hi - r * (hi - lo), m2 = lo + r * (hi - lo);
        if (hardy_closed_form(lambda, m1) < hardy_closed_form(lambda, m2))
            lo = m1;
        else
            hi = m2;
    }
    return hardy_closed_form(lambda, (lo + hi) / 2);
}

// <ψ| (P ⊗ 1)(1 ⊗ (1 - Q)) |ψ> by explicit index loops.
double brute_force_violation(const StateVector &psi, const CMatrix &p, const CMatrix &q) {
    Complex m[4][4];
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k)
                for (int l = 0; l < 2; ++l) m[2 * i + j][2 * k + l] = p(i, k) * ((j == l ? 1.0 : 0.0) - q(j, l));
    Complex acc = 0;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) acc += std::conj(psi.amplitudes()(r)) * m[r][c] * psi.amplitudes()(c);
    return acc.real();
}

constexpr double kHardyMax = 0.09016994374947451; // (5 sqrt 5 - 11) / 2

} // namespace

TEST_CASE("closed-form oracle reaches the known maximum") {
    CHECK(std::abs((5 * std::sqrt(5.0) - 11) / 2 - kHardyMax) < 1e-16);
    double best = 0;
    for (int i = 1; i < 10000; ++i) best = std::max(best, golden_max(i * 1e-4));
    CHECK(std::abs(best - kHardyMax) < 1e-6);
}

TEST_CASE("singlet is degenerate") {
    const HardyConfig h = build_hardy(singlet_state(), Direction(0.9, 0.4));
    CHECK(h.p_violation <= 1e-12);
    CHECK(h.n1.angle_to(h.n3) < 1e-8);
    CHECK_FALSE(h.n1_n3_nonparallel);
    CHECK_FALSE(h.directions_valid());
}

TEST_CASE("product state gives no violation") {
    CVector v = CVector::Zero(4);
    v(0) = 1;
    const HardyConfig h = build_hardy(StateVector(v), Direction(1.2, 0.3));
    CHECK(h.p_violation <= 1e-12);
}

TEST_CASE("generic Schmidt state at lambda 0.8") {
    const StateVector psi = schmidt_state(0.8);
    const Direction n1(1.0, 0.0);
    const HardyConfig h = build_hardy(psi, n1);
    CHECK(h.directions_valid());
    CHECK(h.p_violation > 0);
    const double brute = brute_force_violation(psi, projector_from_direction(h.n1).matrix(),
                                               projector_from_direction(h.n4).matrix());
    CHECK(h.p_violation == doctest::Approx(brute).epsilon(1e-12));
    const double c = std::cos(0.5);
    CHECK(h.p_violation == doctest::Approx(hardy_closed_form(0.8, c * c)).epsilon(1e-10));
    for (const auto &corr : h.correlations()) CHECK(holds(corr, psi));
}

TEST_CASE("closed form matches build_hardy on random Schmidt states and directions") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0.05, 0.95);
    for (int i = 0; i < 200; ++i) {
        const double lambda = u(rng);
        const Direction n1 = random_direction(rng);
        const HardyConfig h = build_hardy(schmidt_state(lambda), n1);
        const double c = std::cos(n1.theta() / 2);
        CHECK(h.p_violation == doctest::Approx(hardy_closed_form(lambda, c * c)).epsilon(1e-9));
        for (const auto &corr : h.correlations()) CHECK(holds(corr, schmidt_state(lambda)));
    }
}

TEST_CASE("the triple n2, n3, n4 is unique") {
    std::mt19937_64 rng(32);
    for (int i = 0; i < 100; ++i) {
        const StateVector psi = haar_state(rng, 2);
        const HardyConfig h = build_hardy(psi, random_direction(rng));
        for (int j = 0; j < 20; ++j) {
            const Direction n2 = random_direction(rng);
            if (n2.angle_to(h.n2) < 1e-8) continue;
            CHECK_FALSE(holds(Correlation(spin_observable(h.n1, 1, 2), spin_observable(n2, 2, 2)), psi));
        }
    }
}

TEST_CASE("build_hardy preconditions name the failing link") {
    CVector v = CVector::Zero(4);
    v(0) = 1;
    try {
        build_hardy(StateVector(v), Direction(pi, 0.0));
        FAIL("expected PreconditionError");
    } catch (const PreconditionError &e) {
        CHECK(std::string(e.what()).find("S1(n1) -> S2(n2)") != std::string::npos);
    }
    CVector w = CVector::Zero(8);
    w(0) = 1;
    CHECK_THROWS_AS(build_hardy(StateVector(w), Direction(1.0, 0.0)), DimensionError);
}

TEST_CASE("schmidt_state range") {
    CHECK_THROWS_AS(schmidt_state(-0.1), InvalidArgument);
    CHECK_THROWS_AS(schmidt_state(1.1), InvalidArgument);
    CHECK(schmidt_state(1.0).amplitudes()(0) == Complex(1.0));
}

TEST_CASE("product slices have zero maximum") {
    std::mt19937_64 rng(33);
    for (int i = 0; i < 50; ++i) {
        const Direction n1 = random_direction(rng);
        CHECK(build_hardy(schmidt_state(1.0), n1).p_violation <= 1e-12);
        CHECK(build_hardy(schmidt_state(0.5), n1).p_violation <= 1e-12);
    }
}

TEST_CASE("optimizer finds (5 sqrt 5 - 11)/2") {
    const HardyOptimum opt = max_hardy_probability({.starts = 8, .seed = 3});
    CHECK(std::abs(opt.p_max - kHardyMax) < 1e-6);
    CHECK(opt.converged);
    CHECK(std::abs(golden_max(opt.lambda) - kHardyMax) < 1e-6);
    const HardyConfig again = build_hardy(opt.psi, opt.n1);
    CHECK(again.p_violation == doctest::Approx(opt.p_max).epsilon(1e-12));
}

TEST_CASE("optimizer is deterministic") {
    const HardyOptimum a = max_hardy_probability({.starts = 4, .seed = 42});
    const HardyOptimum b = max_hardy_probability({.starts = 4, .seed = 42});
    CHECK(a.p_max == b.p_max);
    CHECK(a.lambda == b.lambda);
    CHECK(a.n1.theta() == b.n1.theta());
}

TEST_CASE("sensitivity") {
    const HardyConfig h = build_hardy(schmidt_state(0.8), Direction(1.0, 0.0));
    SUBCASE("no leak without misalignment") {
        const std::vector<double> zero{0.0};
        CHECK(sensitivity(h, zero).leak_probabilities[0] <= 1e-20);
    }
    SUBCASE("positive and quadratic") {
        const auto eps = log_grid(1e-6, 1e-2, 13);
        const auto r = sensitivity(h, eps);
        for (double leak : r.leak_probabilities) CHECK(leak > 0);
        for (std::size_t i = 1; i < eps.size(); ++i) CHECK(r.leak_probabilities[i] > r.leak_probabilities[i - 1]);
        CHECK(std::abs(r.fitted_exponent - 2.0) < 0.1);
    }
    SUBCASE("finite differences: zero slope, constant curvature") {
        // leak(ε) ≈ c ε²: leak(h)/h → 0 and leak(2h)/leak(h) → 4
        for (double step : {1e-3, 1e-4}) {
            const std::vector<double> e{step, 2 * step};
            const auto r = sensitivity(h, e);
            CHECK(r.leak_probabilities[0] / step < 10 * step);
            CHECK(r.leak_probabilities[1] / r.leak_probabilities[0] == doctest::Approx(4.0).epsilon(1e-2));
        }
    }
    SUBCASE("axis is perpendicular to n4") {
        const Vec3 axis = misalignment_axis(h);
        CHECK(std::abs(dot(axis, h.n4.unit_vector())) < 1e-12 * norm(axis) + 1e-15);
    }
}

TEST_CASE("log_grid") {
    const auto g = log_grid(1e-4, 1e-2, 3);
    REQUIRE(g.size() == 3);
    CHECK(g[0] == 1e-4);
    CHECK(g[1] == doctest::Approx(1e-3));
    CHECK(g[2] == 1e-2);
}

TEST_CASE("Hardy conclusion follows from the three correlations") {
    // Elements of reality: S1(n1) = 1 forces S2(n4) = 1, so the joint
    // outcome (1, 0) is excluded by the logic while the state gives it p > 0.
    const StateVector psi = schmidt_state(0.8);
    const HardyConfig h = build_hardy(psi, Direction(1.0, 0.0));
    ConstraintSystem sys;
    for (const auto &c : h.correlations()) sys.correlations.add(c);
    const std::size_t s1 = *sys.correlations.find(spin_observable(h.n1, 1, 2));
    const std::size_t s4 = *sys.correlations.find(spin_observable(h.n4, 2, 2));
    const auto result = propagate(std::get<RealityLedger>(seeded(sys, s1, 1)), sys);
    const auto &ledger = std::get<RealityLedger>(result);
    REQUIRE(ledger.value(s4).has_value());
    CHECK(*ledger.value(s4) == 1);
    CHECK(h.p_violation > 0.02);
}
