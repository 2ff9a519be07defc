#pragma once

#include <vector>

#include "rlocus/numeric.hpp"
#include "rlocus/poly.hpp"

namespace rlocus {

// SISO dead-time system alpha * prod(s - z_r) / prod(s - p_i) * exp(-h s),
// stored in zero-pole-gain form. Immutable after construction.
class Plant {
public:
    // Throws InvalidPlant when h <= 0, alpha == 0, the system is improper,
    // or zeros/poles are not closed under conjugation. Conjugate partners are
    // snapped to exact conjugates.
    Plant(double alpha, double delay, std::vector<Complex> zeros, std::vector<Complex> poles);

    double alpha() const { return alpha_; }
    double delay() const { return delay_; }
    const std::vector<Complex>& zeros() const { return zeros_; }
    const std::vector<Complex>& poles() const { return poles_; }
    bool is_biproper() const { return zeros_.size() == poles_.size(); }

    friend bool operator==(const Plant&, const Plant&) = default;

private:
    double alpha_;
    double delay_;
    std::vector<Complex> zeros_;
    std::vector<Complex> poles_;
};

// num/den with ascending coefficients.
Plant plant_from_coefficients(const RealPolynomial& num, const RealPolynomial& den, double delay);

// ln|G(s) e^{-hs}| and its principal phase in (-pi, pi].
struct LogValue {
    double lnmag;
    double phase;
};

// Sums of logarithms and arctangents; never forms e^{-hs} or the products.
// Throws SingularPoint at a pole or zero.
LogValue log_eval(const Plant& plant, Complex s);

// G'(s)/G(s) - h.
Complex dlog_ratio(const Plant& plant, Complex s);

// N'D - ND' - hND for G = alpha N/D with monic N, D. alpha is left out; it
// does not change the zero set.
RealPolynomial branch_numerator(const Plant& plant);

// The k > 0 with |k G(s) e^{-hs}| = 1.
double gain_at(const Plant& plant, Complex s);

// Throws SingularPoint when s lies within 1e-12 (1 + |s|) of a pole or zero.
void require_regular(const Plant& plant, Complex s);

}  // namespace rlocus
