#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "rlocus/error.hpp"
#include "rlocus/poly.hpp"

using namespace rlocus;

TEST_SUITE("poly") {

TEST_CASE("arithmetic and trimming") {
    const RealPolynomial a{1, 2, 3};
    const RealPolynomial b{-1, -2, -3};
    CHECK((a + b).is_zero());
    CHECK((a + b).degree() == -1);
    CHECK((a * RealPolynomial{0, 1}) == RealPolynomial{0, 1, 2, 3});
    CHECK(poly_arith(a, b, PolyOp::Sub) == RealPolynomial{2, 4, 6});
    CHECK(poly_derivative(a) == RealPolynomial{2, 6});
    CHECK(RealPolynomial{5}.derivative().is_zero());
    CHECK(RealPolynomial{1, 0, 0}.degree() == 0);
    CHECK(a.eval(2.0) == doctest::Approx(17.0));
}

TEST_CASE("multiplication matches the complex expansion oracle") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-3, 3);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Complex> roots;
        for (int i = 0; i < 3; ++i) {
            const Complex r(u(rng), u(rng));
            roots.push_back(r);
            roots.push_back(std::conj(r));
        }
        roots.push_back(u(rng));
        const RealPolynomial p = poly_from_roots(roots);
        const auto ref = oracle::expand(roots);
        REQUIRE(p.degree() == 7);
        for (int i = 0; i <= 7; ++i) CHECK(std::abs(p[i] - ref[i]) <= 1e-10 * (1 + std::abs(ref[i])));
    }
}

TEST_CASE("poly_from_roots rejects unpaired complex roots") {
    const std::vector<Complex> roots{{1, 1}};
    CHECK_THROWS_AS(poly_from_roots(roots), Error);
}

TEST_CASE("reference denominator roots") {
    const auto rs = complex_roots(RealPolynomial{1.25, 4.25, 4, 1});
    REQUIRE(rs.roots.size() == 3);
    CHECK(std::abs(rs.roots[0].value - Complex(-2.5)) <= 1e-12);
    CHECK(std::abs(rs.roots[1].value - Complex(-1.0)) <= 1e-12);
    CHECK(std::abs(rs.roots[2].value - Complex(-0.5)) <= 1e-12);
    for (const auto& r : rs.roots) CHECK(r.value.imag() == 0.0);
}

TEST_CASE("complex pair comes out exactly conjugate") {
    const auto rs = complex_roots(RealPolynomial{50, -10, 1});
    REQUIRE(rs.roots.size() == 2);
    CHECK(rs.roots[0].value == std::conj(rs.roots[1].value));
    CHECK(std::abs(rs.roots[0].value - Complex(5, 5)) <= 1e-12);
}

TEST_CASE("double roots are clustered with multiplicity") {
    // (s + 1)^2 (s - 2)(s^2 + 2s + 5)
    const std::vector<Complex> roots{-1.0, -1.0, 2.0, {-1, 2}, {-1, -2}};
    const auto rs = complex_roots(poly_from_roots(roots));
    REQUIRE(rs.roots.size() == 4);
    CHECK(rs.total_multiplicity() == 5);
    int doubles = 0;
    for (const auto& r : rs.roots)
        if (r.multiplicity == 2) {
            ++doubles;
            CHECK(std::abs(r.value + 1.0) <= 1e-7);
            CHECK(r.value.imag() == 0.0);
        }
    CHECK(doubles == 1);
}

TEST_CASE("triple roots need a looser cluster radius") {
    // a triple root splits by about eps^(1/3), beyond the default radius
    const std::vector<Complex> roots{-1.0, -1.0, -1.0, 2.0};
    const auto p = poly_from_roots(roots);
    CHECK(complex_roots(p).roots.size() > 2);
    RootOptions opts;
    opts.cluster_tol = 1e-4;
    const auto rs = complex_roots(p, opts);
    REQUIRE(rs.roots.size() == 2);
    CHECK(rs.roots[0].multiplicity == 3);
    CHECK(std::abs(rs.roots[0].value + 1.0) <= 1e-5);
    CHECK(rs.total_multiplicity() == 4);
}

TEST_CASE("roots at the origin") {
    const auto rs = complex_roots(RealPolynomial{0, 0, -1, 1});
    REQUIRE(rs.total_multiplicity() == 3);
    CHECK(rs.roots[0].value == Complex(0.0));
    CHECK(rs.roots[0].multiplicity == 2);
}

TEST_CASE("degenerate and constant input") {
    CHECK_THROWS_AS(complex_roots(RealPolynomial{}), Error);
    CHECK(complex_roots(RealPolynomial{3}).roots.empty());
}

TEST_CASE("random polynomials: residual and count") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-5, 5);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> c(2 + trial % 9);
        for (double& x : c) x = u(rng);
        const RealPolynomial p(c);
        const auto rs = complex_roots(p);
        CHECK(rs.total_multiplicity() == p.degree());
        for (const auto& r : rs.roots) {
            const double scale = [&] {
                double s = 0, a = 1;
                for (double x : c) s += std::abs(x) * a, a *= std::abs(r.value);
                return s;
            }();
            CHECK(std::abs(oracle::horner(c, r.value)) <= 1e-10 * scale);
        }
    }
}

TEST_CASE("nonnegative real roots") {
    // (w - 1)(w - 3)(w + 2)(w^2 + 1)
    const std::vector<Complex> roots{1.0, 3.0, -2.0, {0, 1}, {0, -1}};
    const auto rr = nonneg_real_roots(poly_from_roots(roots));
    REQUIRE(rr.size() == 2);
    CHECK(rr[0].value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rr[1].value == doctest::Approx(3.0).epsilon(1e-12));
}

}
