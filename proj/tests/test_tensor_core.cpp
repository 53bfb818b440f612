#include <doctest.h>

#include <random>
#include <vector>

#include "nlab/errors.hpp"
#include "nlab/tensor_core.hpp"

using namespace nlab;

namespace {

CMatrix random_matrix(std::mt19937_64 &rng, Eigen::Index rows, Eigen::Index cols) {
    std::normal_distribution<double> g;
    CMatrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = {g(rng), g(rng)};
    return m;
}

CMatrix pauli_x() {
    CMatrix x(2, 2);
    x << 0, 1, 1, 0;
    return x;
}

} // namespace

TEST_CASE("tensor of identities is the identity") {
    CHECK(frobenius(tensor(identity(2), identity(2)) - identity(4)) == 0.0);
}

TEST_CASE("tensor of diag(1,0) with identity") {
    CMatrix p = CMatrix::Zero(2, 2);
    p(0, 0) = 1;
    CMatrix expected = CMatrix::Zero(4, 4);
    expected(0, 0) = 1;
    expected(1, 1) = 1;
    CHECK(frobenius(tensor(p, identity(2)) - expected) == 0.0);
}

TEST_CASE("sigma_x tensor sigma_x fixes the Bell state (|00>+|11>)/sqrt2") {
    // hand-written anti-diagonal
    CMatrix xx = CMatrix::Zero(4, 4);
    xx(0, 3) = xx(1, 2) = xx(2, 1) = xx(3, 0) = 1;
    CHECK(frobenius(tensor(pauli_x(), pauli_x()) - xx) == 0.0);

    CVector bell = CVector::Zero(4);
    bell(0) = bell(3) = 1.0 / std::sqrt(2.0);
    CHECK((xx * bell - bell).norm() < 1e-15);
}

TEST_CASE("vector tensor follows the |i>|j> -> 2i+j layout") {
    CVector a(2), b(2);
    a << 1, 2;
    b << 3, Complex(0, 1);
    CVector ab = tensor(a, b);
    REQUIRE(ab.size() == 4);
    CHECK(ab(0) == Complex(3, 0));
    CHECK(ab(1) == Complex(0, 1));
    CHECK(ab(2) == Complex(6, 0));
    CHECK(ab(3) == Complex(0, 2));
}

TEST_CASE("tensor_chain") {
    CHECK(tensor_chain({}).rows() == 1);
    const std::vector<CMatrix> three{pauli_x(), identity(2), pauli_x()};
    CMatrix chained = tensor_chain(three);
    CHECK(chained.rows() == 8);
    CHECK(frobenius(chained - tensor(tensor(pauli_x(), identity(2)), pauli_x())) == 0.0);
}

TEST_CASE("kernel_basis examples") {
    SUBCASE("zero matrix gives the full standard basis") {
        auto k = kernel_basis(CMatrix::Zero(4, 4), 1e-12);
        CHECK(k.size() == 4);
    }
    SUBCASE("identity has trivial kernel") {
        CHECK(kernel_basis(identity(4), 1e-12).empty());
    }
    SUBCASE("diag(1,0,0,2) has kernel span{e1,e2}") {
        CMatrix m = CMatrix::Zero(4, 4);
        m(0, 0) = 1;
        m(3, 3) = 2;
        auto k = kernel_basis(m, 1e-12);
        REQUIRE(k.size() == 2);
        for (const auto &v : k) {
            CHECK(std::abs(v(0)) < 1e-14);
            CHECK(std::abs(v(3)) < 1e-14);
            CHECK(std::abs(v.norm() - 1.0) < 1e-12);
        }
    }
    SUBCASE("rectangular stack") {
        CMatrix m = CMatrix::Zero(6, 4);
        m(0, 0) = 1;
        m(5, 1) = 1;
        CHECK(kernel_basis(m, 1e-12).size() == 2);
    }
}

TEST_CASE("is_projector examples") {
    CMatrix p = CMatrix::Zero(2, 2);
    p(0, 0) = 1;
    CHECK(is_projector(p, 1e-12));
    CHECK_FALSE(is_projector(pauli_x(), 1e-12));
    CHECK_FALSE(is_projector(CMatrix::Zero(2, 3), 1e-12));

    CMatrix not_hermitian = CMatrix::Zero(2, 2);
    not_hermitian(0, 0) = 1;
    not_hermitian(0, 1) = 1;
    CHECK_FALSE(is_projector(not_hermitian, 1e-12));

    CMatrix half(2, 2);
    half << 0.5, 0.5, 0.5, 0.5;
    CHECK(is_projector(half, 1e-12));
}

TEST_CASE("tensor is bilinear and associative") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        CMatrix a = random_matrix(rng, 2, 2), a2 = random_matrix(rng, 2, 2);
        CMatrix b = random_matrix(rng, 2, 2), c = random_matrix(rng, 2, 2);
        const Complex s(0.3, -1.7);
        CHECK(frobenius(tensor(s * a + a2, b) - (s * tensor(a, b) + tensor(a2, b))) < 1e-12);
        CHECK(frobenius(tensor(a, s * b + c) - (s * tensor(a, b) + tensor(a, c))) < 1e-12);
        CHECK(frobenius(tensor(tensor(a, b), c) - tensor(a, tensor(b, c))) < 1e-12);
        // mixed product
        CMatrix d = random_matrix(rng, 2, 2);
        CHECK(frobenius(tensor(a, b) * tensor(c, d) - tensor(CMatrix(a * c), CMatrix(b * d))) < 1e-11);
    }
}

TEST_CASE("kernel_basis of random low-rank matrices") {
    std::mt19937_64 rng(5);
    const double tol = 1e-10;
    for (int trial = 0; trial < 300; ++trial) {
        const Eigen::Index n = trial % 2 == 0 ? 4 : 16;
        const Eigen::Index rank = static_cast<Eigen::Index>(trial % n);
        CMatrix m = random_matrix(rng, n, rank) * random_matrix(rng, rank, n);
        auto k = kernel_basis(m, tol);
        CHECK(static_cast<Eigen::Index>(k.size()) == n - rank);
        const double scale = frobenius(m);
        for (std::size_t i = 0; i < k.size(); ++i) {
            CHECK((m * k[i]).norm() <= tol * scale + 1e-15);
            for (std::size_t j = 0; j < k.size(); ++j) {
                const Complex ip = k[i].dot(k[j]);
                CHECK(std::abs(ip - Complex(i == j ? 1.0 : 0.0)) < 1e-12);
            }
        }
    }
}

TEST_CASE("all_finite") {
    CMatrix m = identity(2);
    CHECK(all_finite(m));
    m(1, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_FALSE(all_finite(m));
    CVector v = CVector::Zero(2);
    v(1) = Complex(0, std::numeric_limits<double>::infinity());
    CHECK_FALSE(all_finite(v));
}
