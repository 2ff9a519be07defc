#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "rlocus/error.hpp"
#include "rlocus/plant.hpp"

using namespace rlocus;

namespace {

Plant p2() { return plant_from_coefficients(RealPolynomial{50, -10, 1}, RealPolynomial{1.25, 4.25, 4, 1}, 1.0); }

ErrorCode code_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no error thrown");
    return ErrorCode::IoError;
}

}  // namespace

TEST_SUITE("plant") {

TEST_CASE("coefficients to zero-pole-gain") {
    const Plant p = p2();
    CHECK(p.alpha() == 1.0);
    REQUIRE(p.poles().size() == 3);
    REQUIRE(p.zeros().size() == 2);
    const double expect[] = {-2.5, -1.0, -0.5};
    for (int i = 0; i < 3; ++i) CHECK(std::abs(p.poles()[i] - Complex(expect[i])) <= 1e-9);
    CHECK(std::abs(p.zeros()[0] - Complex(5, 5)) <= 1e-9);
    CHECK(std::abs(p.zeros()[1] - Complex(5, -5)) <= 1e-9);
}

TEST_CASE("invalid plants") {
    CHECK(code_of([] { Plant(1, 0, {}, {0.0}); }) == ErrorCode::InvalidPlant);
    CHECK(code_of([] { Plant(1, -1, {}, {0.0}); }) == ErrorCode::InvalidPlant);
    CHECK(code_of([] { Plant(0, 1, {}, {0.0}); }) == ErrorCode::InvalidPlant);
    CHECK(code_of([] { Plant(1, 1, {1.0, 2.0}, {0.0}); }) == ErrorCode::InvalidPlant);
    CHECK(code_of([] { Plant(1, 1, {}, {Complex(1, 1)}); }) == ErrorCode::InvalidPlant);
    try {
        Plant(1, -1, {}, {0.0});
    } catch (const Error& e) {
        CHECK(std::string(e.what()) == "delay must be positive");
    }
}

TEST_CASE("conjugate partners snap to exact conjugates") {
    const Plant p(1, 1, {}, {Complex(-1, 2), Complex(-1 + 1e-13, -2)});
    CHECK(p.poles()[0] == std::conj(p.poles()[1]));
}

TEST_CASE("log_eval against direct evaluation") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(-4, 4);
    for (int trial = 0; trial < 20; ++trial) {
        const auto rc = oracle::random_case(rng);
        for (int i = 0; i < 20; ++i) {
            const Complex s(u(rng), u(rng));
            const oracle::C L = oracle::loop(rc.plant, s);
            const LogValue lv = log_eval(rc.plant, s);
            CHECK(lv.lnmag == doctest::Approx(std::log(std::abs(L))).epsilon(1e-10));
            CHECK(std::abs(wrap_angle(lv.phase - std::arg(L))) <= 1e-9);
            CHECK(gain_at(rc.plant, s) == doctest::Approx(1.0 / std::abs(L)).epsilon(1e-10));
        }
    }
}

TEST_CASE("dlog_ratio against a difference quotient") {
    const Plant p = p2();
    for (const Complex s : {Complex(0.3, 0.7), Complex(-3, 2), Complex(1, -4)}) {
        const double e = 1e-6;
        const oracle::C d = (oracle::loop(p, s + e) - oracle::loop(p, s - e)) / (2 * e) / oracle::loop(p, s);
        CHECK(std::abs(dlog_ratio(p, s) - d) <= 1e-7 * std::abs(d));
    }
}

TEST_CASE("branch numerator of the reference plant") {
    // -(s^5 - 5 s^4 - 5.75 s^3 + 264.5 s^2 + 597.5 s + 287.5)
    const double ref[] = {-287.5, -597.5, -264.5, 5.75, 5, -1};
    const RealPolynomial b = branch_numerator(p2());
    REQUIRE(b.degree() == 5);
    for (int i = 0; i <= 5; ++i) CHECK(std::abs(b[i] - ref[i]) <= 1e-9);
}

TEST_CASE("branch numerator matches the rational oracle on random plants") {
    std::mt19937 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const auto rc = oracle::random_case(rng);
        const auto N = oracle::expand(rc.plant.zeros());
        const auto D = oracle::expand(rc.plant.poles());
        auto ref = oracle::sub(oracle::mul(oracle::deriv(N), D), oracle::mul(N, oracle::deriv(D)));
        const auto ND = oracle::mul(N, D);
        ref.resize(std::max(ref.size(), ND.size()), 0.0);
        for (std::size_t i = 0; i < ND.size(); ++i) ref[i] -= rc.plant.delay() * ND[i];
        const RealPolynomial b = branch_numerator(rc.plant);
        double scale = 0;
        for (auto c : ref) scale = std::max(scale, std::abs(c));
        for (std::size_t i = 0; i < ref.size(); ++i) CHECK(std::abs(b[i] - ref[i].real()) <= 1e-11 * scale);
    }
}

TEST_CASE("singular evaluation") {
    const Plant p = p2();
    CHECK(code_of([&] { log_eval(p, Complex(-1.0)); }) == ErrorCode::SingularPoint);
    CHECK(code_of([&] { require_regular(p, Complex(5, 5)); }) == ErrorCode::SingularPoint);
    CHECK_NOTHROW(require_regular(p, Complex(-1.0 + 1e-6)));
}

}
