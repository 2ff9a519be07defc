#include "rlocus/plant.hpp"

#include <cmath>
#include <sstream>

#include "rlocus/error.hpp"

namespace rlocus {

namespace {

void canonicalize_conjugates(std::vector<Complex>& roots, const char* what) {
    std::vector<bool> used(roots.size(), false);
    for (std::size_t i = 0; i < roots.size(); ++i) {
        if (used[i]) continue;
        used[i] = true;
        const Complex r = roots[i];
        if (!std::isfinite(r.real()) || !std::isfinite(r.imag())) {
            std::ostringstream msg;
            msg << what << "[" << i << "] is not finite";
            throw Error(ErrorCode::InvalidPlant, msg.str());
        }
        if (r.imag() == 0.0) continue;
        std::size_t best = roots.size();
        double best_dist = 0.0;
        for (std::size_t j = 0; j < roots.size(); ++j) {
            if (used[j]) continue;
            const double d = std::abs(roots[j] - std::conj(r));
            if (best == roots.size() || d < best_dist) {
                best = j;
                best_dist = d;
            }
        }
        if (best == roots.size() || best_dist > 1e-9 * (1.0 + std::abs(r))) {
            std::ostringstream msg;
            msg << what << "[" << i << "] = " << r.real() << (r.imag() < 0 ? "-" : "+") << std::abs(r.imag())
                << "j has no conjugate partner";
            throw Error(ErrorCode::InvalidPlant, msg.str());
        }
        used[best] = true;
        roots[best] = std::conj(r);
    }
}

}  // namespace

Plant::Plant(double alpha, double delay, std::vector<Complex> zeros, std::vector<Complex> poles)
    : alpha_(alpha), delay_(delay), zeros_(std::move(zeros)), poles_(std::move(poles)) {
    if (!(delay_ > 0.0) || !std::isfinite(delay_))
        throw Error(ErrorCode::InvalidPlant, "delay must be positive");
    if (alpha_ == 0.0 || !std::isfinite(alpha_))
        throw Error(ErrorCode::InvalidPlant, "alpha must be finite and nonzero");
    if (zeros_.size() > poles_.size())
        throw Error(ErrorCode::InvalidPlant, "improper system: more zeros than poles");
    canonicalize_conjugates(zeros_, "zeros");
    canonicalize_conjugates(poles_, "poles");
}

Plant plant_from_coefficients(const RealPolynomial& num, const RealPolynomial& den, double delay) {
    if (num.is_zero()) throw Error(ErrorCode::InvalidPlant, "numerator must be nonzero");
    if (den.is_zero()) throw Error(ErrorCode::InvalidPlant, "denominator must be nonzero");
    if (num.degree() > den.degree())
        throw Error(ErrorCode::InvalidPlant, "improper system: deg(num) > deg(den)");
    if (!(delay > 0.0)) throw Error(ErrorCode::InvalidPlant, "delay must be positive");
    const double alpha = num.leading() / den.leading();
    return Plant(alpha, delay, complex_roots(num).expanded(), complex_roots(den).expanded());
}

void require_regular(const Plant& plant, Complex s) {
    const double tol = 1e-12 * (1.0 + std::abs(s));
    for (const Complex z : plant.zeros())
        if (std::abs(s - z) <= tol) throw Error(ErrorCode::SingularPoint, "evaluation at a zero of G");
    for (const Complex p : plant.poles())
        if (std::abs(s - p) <= tol) throw Error(ErrorCode::SingularPoint, "evaluation at a pole of G");
}

LogValue log_eval(const Plant& plant, Complex s) {
    require_regular(plant, s);
    double lnmag = std::log(std::abs(plant.alpha())) - plant.delay() * s.real();
    double phase = plant.alpha() < 0.0 ? kPi : 0.0;
    for (const Complex z : plant.zeros()) {
        const Complex d = s - z;
        lnmag += std::log(std::hypot(d.real(), d.imag()));
        phase += std::atan2(d.imag(), d.real());
    }
    for (const Complex p : plant.poles()) {
        const Complex d = s - p;
        lnmag -= std::log(std::hypot(d.real(), d.imag()));
        phase -= std::atan2(d.imag(), d.real());
    }
    phase -= plant.delay() * s.imag();
    return {lnmag, wrap_angle(phase)};
}

Complex dlog_ratio(const Plant& plant, Complex s) {
    require_regular(plant, s);
    Complex acc(-plant.delay(), 0.0);
    for (const Complex z : plant.zeros()) acc += 1.0 / (s - z);
    for (const Complex p : plant.poles()) acc -= 1.0 / (s - p);
    return acc;
}

RealPolynomial branch_numerator(const Plant& plant) {
    const RealPolynomial n = poly_from_roots(plant.zeros());
    const RealPolynomial d = poly_from_roots(plant.poles());
    return n.derivative() * d - n * d.derivative() - plant.delay() * (n * d);
}

double gain_at(const Plant& plant, Complex s) {
    return std::exp(-log_eval(plant, s).lnmag);
}

}  // namespace rlocus
