#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "nlab/chains.hpp"
#include "nlab/errors.hpp"
#include "nlab/hardy.hpp"

using namespace nlab;
using std::numbers::pi;
using std::numbers::sqrt2;

namespace {

HardyConfig hardy_example() { return build_hardy(schmidt_state(0.8), Direction(1.0, 0.0)); }

Chain hardy_chain(const HardyConfig &h) {
    return Chain({spin_observable(h.n1, 1, 2), spin_observable(h.n2, 2, 2), spin_observable(h.n3, 1, 2),
                  spin_observable(h.n4, 2, 2)});
}

LocalObservable z_up(int party) { return spin_observable({0.0, 0.0}, party, 2); }

} // namespace

TEST_CASE("Chain construction") {
    CHECK_THROWS_AS(Chain({}), InvalidArgument);
    CHECK_THROWS_AS(Chain({z_up(1), z_up(1)}), InvalidArgument);
    CHECK_THROWS_AS(Chain({spin_observable({0.0, 0.0}, 1, 3)}), InvalidArgument);
    const Chain c({z_up(1), z_up(2)});
    CHECK(c.size() == 2);
    CHECK(c.head_party() == 1);
    CHECK_THROWS_AS(c.at(0), std::out_of_range);
    CHECK_THROWS_AS(c.at(3), std::out_of_range);
    CHECK(Chain::party_index(0) == 1);
    CHECK(Chain::party_index(1) == 2);
    CHECK(Chain::party_index(4) == 1);
}

TEST_CASE("verify_chain examples") {
    const HardyConfig h = hardy_example();
    CHECK(verify_chain(hardy_chain(h), h.psi));

    const Direction bent = rotate_about(h.n4, misalignment_axis(h), 1e-3);
    const Chain broken({spin_observable(h.n1, 1, 2), spin_observable(h.n2, 2, 2), spin_observable(h.n3, 1, 2),
                        spin_observable(bent, 2, 2)});
    CHECK_FALSE(verify_chain(broken, h.psi));

    CVector v = CVector::Zero(4);
    v(0) = 1;
    CHECK(verify_chain(Chain({z_up(1), z_up(2)}), StateVector(v)));
}

TEST_CASE("build_chain reproduces the Hardy chain") {
    const HardyConfig h = hardy_example();
    const Chain c = build_chain(h.psi, spin_observable(h.n1, 1, 2), 4);
    const Chain expected = hardy_chain(h);
    for (std::size_t p = 1; p <= 4; ++p) CHECK(same_observable(c.at(p), expected.at(p)));
}

TEST_CASE("nonvanishing propagates along chains") {
    CHECK(lemma1_check(hardy_chain(hardy_example()), hardy_example().psi));
    std::mt19937_64 rng(41);
    for (int i = 0; i < 10000; ++i) {
        const auto rc = random_chain(rng, 2 + i % 5);
        CHECK(lemma1_check(rc.chain, rc.psi));
    }
}

TEST_CASE("lemma1_check preconditions") {
    CVector v = CVector::Zero(4);
    v(3) = 1;
    const StateVector psi(v);
    CHECK_THROWS_AS(lemma1_check(Chain({z_up(1), z_up(2)}), psi), PreconditionError);

    const HardyConfig h = hardy_example();
    const Chain c({spin_observable(h.n1, 1, 2), z_up(2)});
    CHECK_THROWS_AS(lemma1_check(c, h.psi), PreconditionError);
}

TEST_CASE("members of a chain with nonvanishing head act nontrivially and non-identically") {
    std::mt19937_64 rng(42);
    for (int i = 0; i < 500; ++i) {
        const auto rc = random_chain(rng, 5);
        for (const auto &s : rc.chain.observables()) {
            const CVector &a = rc.psi.amplitudes();
            CHECK((s.embedded() * a).norm() > 1e-10);
            CHECK((s.embedded() * a - a).norm() > 1e-10);
        }
    }
}

TEST_CASE("maximal_chain") {
    const HardyConfig h = hardy_example();
    const Chain expected = hardy_chain(h);
    CorrelationSet b;
    for (const auto &c : expected.links()) b.add(c);

    SUBCASE("from any member returns the whole Hardy chain") {
        for (std::size_t p = 1; p <= 4; ++p) {
            const Chain m = maximal_chain(b, expected.at(p), h.psi);
            REQUIRE(m.size() == 4);
            for (std::size_t q = 1; q <= 4; ++q) CHECK(same_observable(m.at(q), expected.at(q)));
        }
    }
    SUBCASE("isolated observable gives a singleton") {
        CorrelationSet lone;
        lone.add_observable(spin_observable(h.n1, 1, 2));
        CHECK(maximal_chain(lone, spin_observable(h.n1, 1, 2), h.psi).size() == 1);
    }
    SUBCASE("disjoint chains do not mix") {
        CorrelationSet two = b;
        const Direction other(2.2, 1.1);
        const auto extra = build_chain(h.psi, spin_observable(other, 1, 2), 3);
        for (const auto &c : extra.links()) two.add(c);
        CHECK(maximal_chain(two, expected.at(2), h.psi).size() == 4);
        const Chain m = maximal_chain(two, extra.at(2), h.psi);
        REQUIRE(m.size() == 3);
        CHECK(same_observable(m.at(1), extra.at(1)));
    }
    SUBCASE("preconditions") {
        CHECK_THROWS_AS(maximal_chain(b, spin_observable({2.0, 2.0}, 1, 2), h.psi), PreconditionError);
        CorrelationSet bad = b;
        bad.add(Correlation(expected.at(4), spin_observable({2.0, 2.0}, 1, 2)));
        CHECK_THROWS_AS(maximal_chain(bad, expected.at(1), h.psi), PreconditionError);

        CVector v = CVector::Zero(4);
        v(3) = 1;
        CorrelationSet zz;
        zz.add(Correlation(z_up(1), z_up(2)));
        CHECK_THROWS_AS(maximal_chain(zz, z_up(1), StateVector(v)), PreconditionError);
    }
}

TEST_CASE("r2_derivable only runs forward") {
    const Chain c = hardy_chain(hardy_example());
    CHECK(r2_derivable(c, 1, 4));
    CHECK(r2_derivable(c, 2, 2));
    CHECK_FALSE(r2_derivable(c, 3, 2));
    CHECK_THROWS_AS(r2_derivable(c, 0, 2), std::out_of_range);
    CHECK_THROWS_AS(r2_derivable(c, 1, 5), std::out_of_range);
}

TEST_CASE("CorrelationSet closure under duality") {
    const Chain c = hardy_chain(hardy_example());
    CorrelationSet b;
    for (const auto &l : c.links()) b.add(l);
    CHECK(b.observables().size() == 4);
    CHECK_FALSE(b.is_closed());
    const CorrelationSet closed = b.closed();
    CHECK(closed.is_closed());
    CHECK(closed.observables().size() == 8);
    CHECK(closed.links().size() == 6);

    // dual_link is an involutive bijection on the links of a closed set
    std::set<std::pair<std::size_t, std::size_t>> images;
    for (const auto &l : closed.links()) {
        const auto d = closed.dual_link(l);
        REQUIRE(d.has_value());
        CHECK(closed.contains(*d));
        CHECK(*closed.dual_link(*d) == l);
        images.insert({d->source, d->target});
    }
    CHECK(images.size() == closed.links().size());

    CHECK_THROWS_AS(b.add_link(0, 2), InvalidArgument);
    CHECK_THROWS_AS(b.add_link(0, 99), InvalidArgument);
    const auto before = b.links().size();
    b.add(c.link(1));
    CHECK(b.links().size() == before);
}

TEST_CASE("closed chains force the head to annihilate") {
    for (std::size_t k = 1; k <= 5; ++k) {
        const Prop2Sweep s = prop2_sweep(k, 40, 100 + k);
        CHECK(s.annihilated == s.trials);
        CHECK(s.max_head_norm <= 1e-10);
        CHECK(s.max_impossible_residual_error <= 1e-12);
    }
}

TEST_CASE("k = 1 solution space is the kernel of the head") {
    std::mt19937_64 rng(43);
    for (int i = 0; i < 50; ++i) {
        const auto rc = random_chain(rng, 3);
        const Prop2Report r = prop2_verify(rc.chain, 1);
        CHECK(r.solution_dim >= 1);
        CHECK(r.head_annihilates);
        CHECK(r.impossible_position == 2);
        CHECK(std::abs(r.impossible_residual - sqrt2) < 1e-12);
        REQUIRE(r.cascade.size() == 2);
        CHECK(std::abs(r.cascade[0].residual - sqrt2) < 1e-12);
    }
}

TEST_CASE("2P - 1 has Frobenius norm sqrt 2") {
    std::mt19937_64 rng(44);
    for (int i = 0; i < 1000; ++i) {
        const CMatrix p = random_spin_projector(rng).matrix();
        CHECK(std::abs(frobenius(2.0 * p - identity(2)) - sqrt2) < 1e-12);
    }
}

TEST_CASE("prop2_verify preconditions") {
    std::mt19937_64 rng(45);
    const auto rc = random_chain(rng, 3);
    CHECK_THROWS_AS(prop2_verify(rc.chain, 0), PreconditionError);
    CHECK_THROWS_AS(prop2_verify(rc.chain, 2), PreconditionError);
    const Chain headed_by_two({rc.chain.at(2), rc.chain.at(3)});
    CHECK_THROWS_AS(prop2_verify(headed_by_two, 1), PreconditionError);
}

TEST_CASE("closure step on a concrete state is contradictory") {
    std::mt19937_64 rng(46);
    for (int i = 0; i < 100; ++i) {
        const auto rc = random_chain(rng, 3);
        const ClosureForcing f = closure_forcing(rc.chain, 1, rc.psi);
        CHECK(f.partner_residual < 1e-9);
        CHECK(f.closure_residual > 1e-6);
        CHECK_FALSE(f.closure_holds);
        CHECK(f.contradiction);
    }
    const auto rc = random_chain(rng, 3);
    CVector v = CVector::Zero(4);
    v(0) = 1;
    CHECK_THROWS_AS(closure_forcing(rc.chain, 1, StateVector(v)), PreconditionError);
}

TEST_CASE("prop2_sweep is deterministic") {
    const Prop2Sweep a = prop2_sweep(2, 20, 9);
    const Prop2Sweep b = prop2_sweep(2, 20, 9);
    CHECK(a.max_head_norm == b.max_head_norm);
    CHECK(a.solution_dim_histogram == b.solution_dim_histogram);
}
