#include "rlocus/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rlocus/error.hpp"

namespace rlocus {

RegionSpec::RegionSpec(double sigma0_, double kmax_) : sigma0(sigma0_), kmax(kmax_), lnkmax(0.0) {
    if (!std::isfinite(sigma0)) throw Error(ErrorCode::InvalidRegion, "sigma0 must be finite");
    if (!(kmax > 0.0) || !std::isfinite(kmax)) throw Error(ErrorCode::InvalidRegion, "kmax must be positive");
    lnkmax = std::log(kmax);
}

namespace {

// Product of the polynomials, skipping index `skip` (pass size() for none).
RealPolynomial product_except(const std::vector<RealPolynomial>& factors, std::size_t skip) {
    RealPolynomial acc = RealPolynomial::constant(1.0);
    for (std::size_t i = 0; i < factors.size(); ++i)
        if (i != skip) acc = acc * factors[i];
    return acc;
}

template <class F>
double bisect(F&& f, double lo, double hi, double f_lo, double tol) {
    for (int it = 0; it < 200 && hi - lo > tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double f_mid = f(mid);
        if (f_mid == 0.0) return mid;
        if ((f_mid < 0.0) == (f_lo < 0.0)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Strictly interior, distinct critical points of a polynomial in w.
std::vector<double> critical_points(const RealPolynomial& p, double lo, double hi) {
    std::vector<double> out;
    if (p.degree() <= 0) return out;
    for (const auto& r : nonneg_real_roots(p))
        if (r.value > lo && r.value < hi) out.push_back(r.value);
    return out;
}

}  // namespace

BoundaryFunctions::BoundaryFunctions(const Plant& plant, const RegionSpec& region, const BoundaryTolerances& tol)
    : plant_(plant), sigma0_(region.sigma0), tol_(tol) {
    for (const Complex z : plant_.zeros()) {
        if (std::abs(sigma0_ - z.real()) <= tol_.tol_bnd) {
            std::ostringstream msg;
            msg << "zero " << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag())
                << "j lies on the boundary Re(s) = " << sigma0_;
            throw Error(ErrorCode::PoleOrZeroOnBoundary, msg.str());
        }
        dsz_.push_back(sigma0_ - z.real());
        wz_.push_back(z.imag());
    }
    for (const Complex p : plant_.poles()) {
        if (std::abs(sigma0_ - p.real()) <= tol_.tol_bnd) {
            std::ostringstream msg;
            msg << "pole " << p.real() << (p.imag() < 0 ? "-" : "+") << std::abs(p.imag())
                << "j lies on the boundary Re(s) = " << sigma0_;
            throw Error(ErrorCode::PoleOrZeroOnBoundary, msg.str());
        }
        dsp_.push_back(sigma0_ - p.real());
        wp_.push_back(p.imag());
    }
    if (plant_.is_biproper() && !(region.lnkmax < K_at_infinity())) {
        std::ostringstream msg;
        msg << "bi-proper plant: the controller gain must be bounded by k_max < e^{h sigma0}/|G(inf)| = "
            << std::exp(K_at_infinity()) << ", got k_max = " << region.kmax;
        throw Error(ErrorCode::BiProperGainCapViolated, msg.str());
    }

    // gamma(w) = ds^2 + (w - w0)^2 and dw(w) = w - w0 as polynomials in w.
    std::vector<RealPolynomial> gz, gp, dwz, dwp;
    for (std::size_t r = 0; r < dsz_.size(); ++r) {
        gz.emplace_back(std::vector<double>{dsz_[r] * dsz_[r] + wz_[r] * wz_[r], -2.0 * wz_[r], 1.0});
        dwz.emplace_back(std::vector<double>{-wz_[r], 1.0});
    }
    for (std::size_t i = 0; i < dsp_.size(); ++i) {
        gp.emplace_back(std::vector<double>{dsp_[i] * dsp_[i] + wp_[i] * wp_[i], -2.0 * wp_[i], 1.0});
        dwp.emplace_back(std::vector<double>{-wp_[i], 1.0});
    }
    const RealPolynomial gamma_z = product_except(gz, gz.size());
    const RealPolynomial gamma_p = product_except(gp, gp.size());

    RealPolynomial sum_dwp, sum_dwz, sum_dsz, sum_dsp;
    for (std::size_t i = 0; i < gp.size(); ++i) {
        const RealPolynomial rest = product_except(gp, i);
        sum_dwp = sum_dwp + dwp[i] * rest;
        sum_dsp = sum_dsp + dsp_[i] * rest;
    }
    for (std::size_t r = 0; r < gz.size(); ++r) {
        const RealPolynomial rest = product_except(gz, r);
        sum_dwz = sum_dwz + dwz[r] * rest;
        sum_dsz = sum_dsz + dsz_[r] * rest;
    }
    kprime_poly_ = gamma_z * sum_dwp - gamma_p * sum_dwz;
    phiprime_poly_ = gamma_p * sum_dsz - gamma_z * sum_dsp - plant_.delay() * (gamma_z * gamma_p);

    phi0_ = log_eval(plant_, Complex(sigma0_, 0.0)).phase - phi1(0.0);
}

double BoundaryFunctions::K(double omega) const {
    double acc = plant_.delay() * sigma0_ - std::log(std::abs(plant_.alpha()));
    for (std::size_t i = 0; i < dsp_.size(); ++i) acc += std::log(std::hypot(dsp_[i], omega - wp_[i]));
    for (std::size_t r = 0; r < dsz_.size(); ++r) acc -= std::log(std::hypot(dsz_[r], omega - wz_[r]));
    return acc;
}

double BoundaryFunctions::K_prime(double omega) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < dsp_.size(); ++i) {
        const double dw = omega - wp_[i];
        acc += dw / (dsp_[i] * dsp_[i] + dw * dw);
    }
    for (std::size_t r = 0; r < dsz_.size(); ++r) {
        const double dw = omega - wz_[r];
        acc -= dw / (dsz_[r] * dsz_[r] + dw * dw);
    }
    return acc;
}

double BoundaryFunctions::phi1(double omega) const {
    // Single-argument arctangent keeps phi continuous because ds never
    // changes sign along the line.
    double acc = -plant_.delay() * omega;
    for (std::size_t r = 0; r < dsz_.size(); ++r) acc += std::atan((omega - wz_[r]) / dsz_[r]);
    for (std::size_t i = 0; i < dsp_.size(); ++i) acc -= std::atan((omega - wp_[i]) / dsp_[i]);
    return acc;
}

double BoundaryFunctions::phi(double omega) const { return phi0_ + phi1(omega); }

double BoundaryFunctions::phi_prime(double omega) const {
    double acc = -plant_.delay();
    for (std::size_t r = 0; r < dsz_.size(); ++r) {
        const double dw = omega - wz_[r];
        acc += dsz_[r] / (dsz_[r] * dsz_[r] + dw * dw);
    }
    for (std::size_t i = 0; i < dsp_.size(); ++i) {
        const double dw = omega - wp_[i];
        acc -= dsp_[i] / (dsp_[i] * dsp_[i] + dw * dw);
    }
    return acc;
}

double BoundaryFunctions::K_at_infinity() const {
    if (!plant_.is_biproper()) return std::numeric_limits<double>::infinity();
    return plant_.delay() * sigma0_ - std::log(std::abs(plant_.alpha()));
}

BoundaryFunctions boundary_functions(const Plant& plant, const RegionSpec& region, const BoundaryTolerances& tol) {
    return BoundaryFunctions(plant, region, tol);
}

std::vector<Interval> magnitude_intervals(const BoundaryFunctions& bf, const RegionSpec& region) {
    const double lnkmax = region.lnkmax;
    const auto& plant = bf.plant();

    std::vector<double> crit = critical_points(bf.kprime_poly(), 0.0, std::numeric_limits<double>::infinity());

    // Tail cap: K stays above ln k_max beyond it.
    double scale = crit.empty() ? 0.0 : crit.back();
    for (const Complex z : plant.zeros()) scale = std::max(scale, std::abs(z));
    for (const Complex p : plant.poles()) scale = std::max(scale, std::abs(p));
    const double margin = plant.is_biproper() ? std::min(1.0, 0.5 * (bf.K_at_infinity() - lnkmax)) : 1.0;
    double cap = 1.0 + 2.0 * scale;
    for (int it = 0; it < 200 && !(bf.K(cap) > lnkmax + margin); ++it) cap *= 2.0;

    std::vector<double> breaks{0.0};
    breaks.insert(breaks.end(), crit.begin(), crit.end());
    breaks.push_back(cap);

    auto g = [&](double w) { return bf.K(w) - lnkmax; };
    std::vector<Interval> out;
    auto push = [&](double lo, double hi) {
        if (!out.empty() && lo <= out.back().hi) {
            out.back().hi = std::max(out.back().hi, hi);
            return;
        }
        out.push_back({lo, hi});
    };
    const double tol = bf.tolerances().tol_bisect;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        const double a = breaks[i];
        const double b = breaks[i + 1];
        const double ga = g(a);
        const double gb = g(b);
        if (ga <= 0.0 && gb <= 0.0) {
            push(a, b);
        } else if (ga <= 0.0) {
            push(a, bisect(g, a, b, ga, tol));
        } else if (gb <= 0.0) {
            push(bisect(g, a, b, ga, tol), b);
        }
    }
    return out;
}

CrossingSet boundary_crossings(const BoundaryFunctions& bf, const RegionSpec& region, GainSign sign) {
    const double offset = phase_target(sign);
    const auto& tol = bf.tolerances();
    CrossingSet result;
    double last_omega = -1.0;

    auto emit = [&](double w) {
        if (last_omega >= 0.0 && std::abs(w - last_omega) <= 10.0 * tol.tol_bisect) return;
        last_omega = w;
        const double dphi = bf.phi_prime(w);
        if (std::abs(dphi) <= tol.tol_dir) {
            std::ostringstream msg;
            msg << "crossing direction is ill-posed at w = " << w << " (phi'(w) = " << dphi << ")";
            throw Error(ErrorCode::DegenerateCrossing, msg.str());
        }
        const double K = bf.K(w);
        BoundaryCrossing c{w, K, std::exp(K), dphi < 0.0 ? CrossingDirection::Inward : CrossingDirection::Outward,
                           sign};
        (c.direction == CrossingDirection::Inward ? result.inward : result.outward).push_back(c);
    };

    for (const Interval& iv : magnitude_intervals(bf, region)) {
        std::vector<double> pts{iv.lo};
        for (double w : critical_points(bf.phiprime_poly(), iv.lo, iv.hi)) pts.push_back(w);
        pts.push_back(iv.hi);

        for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
            const double L = pts[i];
            const double R = pts[i + 1];
            const double phiL = bf.phi(L);
            const double phiR = bf.phi(R);
            const double phi_max = std::max(phiL, phiR);
            const double phi_min = std::min(phiL, phiR);
            const double slack = 1e-12 * (1.0 + std::max(std::abs(phi_max), std::abs(phi_min))) / kTwoPi;
            const auto l_max = static_cast<long long>(std::floor((phi_max - offset) / kTwoPi + slack));
            const auto l_min = static_cast<long long>(std::ceil((phi_min - offset) / kTwoPi - slack));
            if (l_min > l_max) continue;
            // ascending w order: walk l from the L side
            const bool increasing = phiR >= phiL;
            for (long long step = 0; step <= l_max - l_min; ++step) {
                const long long l = increasing ? l_min + step : l_max - step;
                const double line = offset + kTwoPi * static_cast<double>(l);
                auto g = [&](double w) { return bf.phi(w) - line; };
                const double gL = phiL - line;
                const double gR = phiR - line;
                const double eps = slack * kTwoPi;
                double w;
                if (std::abs(gL) <= eps) {
                    w = L;
                } else if (std::abs(gR) <= eps) {
                    w = R;
                } else if ((gL < 0.0) != (gR < 0.0)) {
                    w = bisect(g, L, R, gL, tol.tol_bisect);
                } else {
                    w = std::abs(gL) < std::abs(gR) ? L : R;
                }
                emit(w);
            }
        }
    }

    auto by_gain = [](const BoundaryCrossing& a, const BoundaryCrossing& b) { return a.Kval < b.Kval; };
    std::stable_sort(result.inward.begin(), result.inward.end(), by_gain);
    std::stable_sort(result.outward.begin(), result.outward.end(), by_gain);
    return result;
}

}  // namespace rlocus
