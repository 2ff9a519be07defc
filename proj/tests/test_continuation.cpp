#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "rlocus/continuation.hpp"
#include "rlocus/error.hpp"

using namespace rlocus;

namespace {

Plant p1() { return Plant(1, 1, {}, {0.0}); }
Plant p2() { return plant_from_coefficients(RealPolynomial{50, -10, 1}, RealPolynomial{1.25, 4.25, 4, 1}, 1.0); }

double M_of(const Plant& p, double s, double w, double K) { return std::log(std::abs(oracle::loop(p, {s, w}))) + K; }
double P_of(const Plant& p, double s, double w) { return std::arg(oracle::loop(p, {s, w})); }

}  // namespace

TEST_SUITE("continuation") {

TEST_CASE("Jacobian partials against central differences") {
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> u(-4, 4);
    const Direction3 d(Eigen::Vector3d(0.3, -0.2, 1.0));
    for (int trial = 0; trial < 10; ++trial) {
        const auto rc = oracle::random_case(rng);
        for (int i = 0; i < 20; ++i) {
            const double s = u(rng), w = u(rng), K = u(rng);
            const Eigen::Matrix3d J = jacobian(rc.plant, {s, w, K}, d);
            const double Ms = oracle::central([&](double x) { return M_of(rc.plant, x, w, K); }, s);
            const double Mw = oracle::central([&](double x) { return M_of(rc.plant, s, x, K); }, w);
            // phase differences are wrapped so branch cuts do not matter
            const double Ps = wrap_angle(P_of(rc.plant, s + 1e-6, w) - P_of(rc.plant, s - 1e-6, w)) / 2e-6;
            const double Pw = wrap_angle(P_of(rc.plant, s, w + 1e-6) - P_of(rc.plant, s, w - 1e-6)) / 2e-6;
            CHECK(std::abs(J(0, 0) - Ms) <= 1e-5 * std::max(1.0, std::abs(Ms)));
            CHECK(std::abs(J(0, 1) - Mw) <= 1e-5 * std::max(1.0, std::abs(Mw)));
            CHECK(std::abs(J(1, 0) - Ps) <= 1e-5 * std::max(1.0, std::abs(Ps)));
            CHECK(std::abs(J(1, 1) - Pw) <= 1e-5 * std::max(1.0, std::abs(Pw)));
            CHECK(J(1, 0) == -J(0, 1));
            CHECK(J(1, 1) == J(0, 0));
            CHECK(J(0, 2) == 1.0);
            CHECK(J(1, 2) == 0.0);
        }
    }
}

TEST_CASE("Direction3 normalizes and rejects zero") {
    const Direction3 d(Eigen::Vector3d(3, 4, 0));
    CHECK(d.vec().norm() == doctest::Approx(1.0));
    CHECK(d[0] == doctest::Approx(0.6));
    CHECK_THROWS_AS(Direction3(Eigen::Vector3d::Zero()), Error);
}

TEST_CASE("corrector lands on the locus") {
    // P1 at k = 1: root W0(-1)
    const oracle::C w = oracle::lambert_w(-1.0, {-0.3, 1.3});
    const Plant p = p1();
    const LocusPoint guess{w.real() + 0.01, w.imag() - 0.02, 0.01};
    const Direction3 d = lifted_tangent(p, w);
    const auto out = correct(p, guess, d, 1e-10, 30);
    REQUIRE(out.converged());
    const Residuals r = residuals(p, out.point);
    CHECK(std::abs(r.M) <= 1e-10);
    CHECK(std::abs(r.P) <= 1e-10);
    CHECK(locus_distance(r) <= 1e-10);
    CHECK(out.kappa < 1.0);
    CHECK(out.predictor_delta > out.delta);
}

TEST_CASE("corrector keeps real-axis points on the axis") {
    const Plant p = p2();
    const Direction3 d(Eigen::Vector3d(1, 0, 1));
    const auto out = correct(p, {-0.8, 0.0, std::log(1e-4)}, d);
    REQUIRE(out.converged());
    CHECK(out.point.omega == 0.0);
}

TEST_CASE("corrector reports singular points instead of throwing") {
    const Direction3 d(Eigen::Vector3d(1, 0, 1));
    const auto out = correct(p2(), {-1.0, 0.0, 0.0}, d);
    CHECK(out.status == CorrectorStatus::SingularPoint);
}

TEST_CASE("step controller forced cases") {
    StepController ctl;
    ctl.h = 0.01;
    ctl.kappa_nom = 1.1;
    ctl.delta_nom = 1e-3;
    ctl.h_max = 0.015;

    // nominal: unchanged, accepted
    auto a = step_update(ctl, 1.1, 1e-3, true);
    CHECK(a.new_h == 0.01);
    CHECK(!a.repeat);
    // kappa four times nominal: halve and repeat
    auto b = step_update(ctl, 4 * 1.1, 1e-3, true);
    CHECK(b.new_h == 0.005);
    CHECK(b.repeat);
    // both factors small: double, capped at h_max
    auto c = step_update(ctl, 1.1 / 64, 1e-3 / 64, true);
    CHECK(c.new_h == 0.015);
    CHECK(!c.repeat);
    ctl.h_max = 1.0;
    CHECK(step_update(ctl, 1.1 / 64, 1e-3 / 64, true).new_h == 0.02);
    // corrector failure: halve and repeat
    auto f = step_update(ctl, 0.0, 0.0, false);
    CHECK(f.new_h == 0.005);
    CHECK(f.repeat);
    ctl.h = ctl.h_min;
    CHECK_THROWS_AS(step_update(ctl, 0.0, 0.0, false), Error);
}

TEST_CASE("departure angles") {
    const Plant p = p2();
    // poles sorted -2.5, -1, -0.5: -2.5 moves left, -1 right, -0.5 left
    CHECK(departure_direction_pole(p, 0) == oracle::pi);
    CHECK(departure_direction_pole(p, 1) == 0.0);
    CHECK(departure_direction_pole(p, 2) == oracle::pi);
    // double pole at the origin: +-pi/2
    const Plant dbl(1, 0.5, {}, {0.0, 0.0});
    const auto th = departure_angles(dbl, 0.0, 2, GainSign::Positive);
    REQUIRE(th.size() == 2);
    CHECK(std::abs(std::abs(th[0]) - oracle::pi / 2) <= 1e-12);
    CHECK(std::abs(th[0] + th[1]) <= 1e-12);
    CHECK_THROWS_AS(departure_direction_pole(dbl, 0), Error);
}

TEST_CASE("departure angle matches the residue direction") {
    std::mt19937 rng(29);
    for (int trial = 0; trial < 10; ++trial) {
        const auto rc = oracle::random_case(rng);
        for (std::size_t i = 0; i < rc.plant.poles().size(); ++i) {
            const Complex q = rc.plant.poles()[i];
            bool simple = true;
            for (std::size_t j = 0; j < rc.plant.poles().size(); ++j)
                if (j != i && std::abs(rc.plant.poles()[j] - q) < 1e-3) simple = false;
            if (!simple) continue;
            // residue of L at q by direct products; the root leaves along -R
            oracle::C R = rc.plant.alpha() * std::exp(-rc.plant.delay() * q);
            for (Complex z : rc.plant.zeros()) R *= q - z;
            for (std::size_t j = 0; j < rc.plant.poles().size(); ++j)
                if (j != i) R /= q - rc.plant.poles()[j];
            const double ref = std::arg(-R);
            CHECK(std::abs(wrap_angle(departure_direction_pole(rc.plant, i) - ref)) <= 1e-9);
        }
    }
}

TEST_CASE("entry direction and lifted tangent") {
    const Plant p = p2();
    const RegionSpec region(-3.5, 5);
    const BoundaryFunctions bf(p, region);
    const auto cs = boundary_crossings(bf, region);
    for (const auto& c : cs.inward) {
        const Complex d0 = entry_direction_crossing(p, bf, c);
        const double e = 1e-6;
        const auto s1 = oracle::root_near(p, c.k * (1 + e), Complex(-3.5, c.omega));
        const auto s0 = oracle::root_near(p, c.k * (1 - e), Complex(-3.5, c.omega));
        REQUIRE(s1);
        REQUIRE(s0);
        const oracle::C ref = (*s1 - *s0) / (2 * c.k * e);
        CHECK(std::abs(d0 - ref) <= 1e-4 * std::abs(ref));
        CHECK(d0.real() > 0.0);
        // ds/dK = k ds/dk
        const Direction3 t = lifted_tangent(p, Complex(-3.5, c.omega));
        CHECK(std::abs(t[0] / t[2] - c.k * d0.real()) <= 1e-8 * (1 + std::abs(c.k * d0)));
        CHECK(std::abs(t[1] / t[2] - c.k * d0.imag()) <= 1e-8 * (1 + std::abs(c.k * d0)));
    }
}

TEST_CASE("refinement helpers") {
    const Plant p = p1();
    const oracle::C w = oracle::lambert_w(-1.0, {-0.3, 1.3});
    const auto g = refine_at_gain(p, {-0.3, 1.3, 0.1}, 0.0, GainSign::Positive);
    REQUIRE(g);
    CHECK(std::abs(g->s() - w) <= 1e-12);
    // crossing of P1 with sigma = -2: real root at k = 2 e^-2
    const auto a = refine_at_abscissa(p, {-2.0, 0.0, -1.0}, -2.0, GainSign::Positive);
    REQUIRE(a);
    CHECK(std::abs(a->Kval - std::log(2 * std::exp(-2.0))) <= 1e-12);
}

}
