#pragma once

#include <complex>
#include <span>
#include <vector>

#include "rlocus/numeric.hpp"

namespace rlocus {

// Real polynomial with coefficients in ascending degree order: coeffs[d]
// multiplies x^d. Trailing zeros are trimmed, so the zero polynomial has an
// empty coefficient list and degree -1.
class RealPolynomial {
public:
    RealPolynomial() = default;
    explicit RealPolynomial(std::vector<double> coeffs);
    RealPolynomial(std::initializer_list<double> coeffs);

    static RealPolynomial constant(double c);
    // x - r for real r.
    static RealPolynomial linear_factor(double r);
    // (x - r)(x - conj(r)) for complex r.
    static RealPolynomial quadratic_factor(Complex r);

    const std::vector<double>& coeffs() const { return coeffs_; }
    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    bool is_zero() const { return coeffs_.empty(); }
    double leading() const { return coeffs_.empty() ? 0.0 : coeffs_.back(); }
    double operator[](std::size_t d) const { return d < coeffs_.size() ? coeffs_[d] : 0.0; }
    double max_abs_coeff() const;

    double eval(double x) const;
    Complex eval(Complex z) const;

    RealPolynomial derivative() const;

    friend bool operator==(const RealPolynomial&, const RealPolynomial&) = default;

private:
    void normalize();

    std::vector<double> coeffs_;
};

RealPolynomial operator+(const RealPolynomial& a, const RealPolynomial& b);
RealPolynomial operator-(const RealPolynomial& a, const RealPolynomial& b);
RealPolynomial operator*(const RealPolynomial& a, const RealPolynomial& b);
RealPolynomial operator*(double s, const RealPolynomial& p);

enum class PolyOp { Add, Sub, Mul };

RealPolynomial poly_arith(const RealPolynomial& a, const RealPolynomial& b, PolyOp op);
RealPolynomial poly_derivative(const RealPolynomial& p);

// Monic real polynomial with the given roots. Conjugate pairs are combined
// into real quadratic factors before multiplication; the roots must be
// closed under conjugation.
RealPolynomial poly_from_roots(std::span<const Complex> roots);

struct Root {
    Complex value;
    int multiplicity = 1;
};

struct RootSet {
    std::vector<Root> roots;

    int total_multiplicity() const;
    // Each root repeated according to its multiplicity.
    std::vector<Complex> expanded() const;
};

struct RootOptions {
    double tol_root = 1e-8;
    double tol_imag = 1e-8;
    double cluster_tol = 1e-6;
};

// All complex roots with multiplicities. Companion-matrix eigenvalues with
// balancing, Newton polishing, clustering of near-coincident roots and
// conjugate symmetrization. Throws DegeneratePolynomial for the zero
// polynomial; a nonzero constant has no roots.
RootSet complex_roots(const RealPolynomial& p, const RootOptions& opts = {});

struct RealRoot {
    double value;
    int multiplicity = 1;
};

// Non-negative real roots sorted ascending; roots slightly below zero are
// clamped to zero.
std::vector<RealRoot> nonneg_real_roots(const RealPolynomial& p, const RootOptions& opts = {});

}  // namespace rlocus
