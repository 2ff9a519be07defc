#pragma once

#include <vector>

#include "rlocus/numeric.hpp"
#include "rlocus/plant.hpp"
#include "rlocus/poly.hpp"

namespace rlocus {

// Half-plane Re(s) >= sigma0 and the gain cap k_max.
struct RegionSpec {
    double sigma0;
    double kmax;
    double lnkmax;

    // Throws InvalidRegion unless kmax > 0 and both values are finite.
    RegionSpec(double sigma0, double kmax);
};

struct BoundaryTolerances {
    double tol_bnd = 1e-9;
    double tol_dir = 1e-9;
    double tol_bisect = 1e-10;
};

// K(w) = h sigma0 - ln|G(sigma0 + jw)| and the continuous phase phi(w) of
// G(s)e^{-hs} along the boundary line, with their critical polynomials in w.
class BoundaryFunctions {
public:
    // Throws PoleOrZeroOnBoundary, or BiProperGainCapViolated when a
    // bi-proper plant is paired with k_max >= e^{h sigma0}/|G(inf)|.
    BoundaryFunctions(const Plant& plant, const RegionSpec& region, const BoundaryTolerances& tol = {});

    const Plant& plant() const { return plant_; }
    double sigma0() const { return sigma0_; }
    const std::vector<double>& dsz() const { return dsz_; }
    const std::vector<double>& dsp() const { return dsp_; }
    double phi0() const { return phi0_; }
    const RealPolynomial& kprime_poly() const { return kprime_poly_; }
    const RealPolynomial& phiprime_poly() const { return phiprime_poly_; }
    const BoundaryTolerances& tolerances() const { return tol_; }

    double K(double omega) const;
    double K_prime(double omega) const;
    double phi(double omega) const;
    double phi_prime(double omega) const;
    // phi without the offset phi0.
    double phi1(double omega) const;

    // ln|G(inf)| for bi-proper plants; +inf in the limit otherwise.
    double K_at_infinity() const;

private:
    Plant plant_;
    double sigma0_;
    BoundaryTolerances tol_;
    std::vector<double> dsz_;
    std::vector<double> dsp_;
    std::vector<double> wz_;
    std::vector<double> wp_;
    double phi0_ = 0.0;
    RealPolynomial kprime_poly_;
    RealPolynomial phiprime_poly_;
};

BoundaryFunctions boundary_functions(const Plant& plant, const RegionSpec& region,
                                     const BoundaryTolerances& tol = {});

struct Interval {
    double lo;
    double hi;
};

// {w >= 0 : K(w) <= ln k_max} as a sorted union of disjoint closed intervals.
std::vector<Interval> magnitude_intervals(const BoundaryFunctions& bf, const RegionSpec& region);

enum class CrossingDirection { Inward, Outward };

inline const char* to_string(CrossingDirection d) {
    return d == CrossingDirection::Inward ? "inward" : "outward";
}

struct BoundaryCrossing {
    double omega;
    double Kval;
    double k;  // |k|; the sign lives in `sign`
    CrossingDirection direction;
    GainSign sign = GainSign::Positive;
};

struct CrossingSet {
    std::vector<BoundaryCrossing> inward;
    std::vector<BoundaryCrossing> outward;

    std::size_t size() const { return inward.size() + outward.size(); }
};

// Roots on Re(s) = sigma0 with w >= 0 and gain up to k_max. Positive gains
// meet the phase lines (2l+1)pi, negative gains the lines 2l pi. Throws
// DegenerateCrossing when |phi'(w)| <= tol_dir at a crossing.
CrossingSet boundary_crossings(const BoundaryFunctions& bf, const RegionSpec& region,
                               GainSign sign = GainSign::Positive);

}  // namespace rlocus
