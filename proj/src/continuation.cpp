#include "rlocus/continuation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rlocus/error.hpp"

namespace rlocus {

namespace {

// ln|G(s)e^{-hs}|, its unwrapped phase sum, and the partials of the
// log-magnitude in sigma and omega.
struct LogTerms {
    double lnmag;
    double phase;
    double dm_dsigma;
    double dm_domega;
};

LogTerms log_terms(const Plant& plant, double sigma, double omega) {
    require_regular(plant, Complex(sigma, omega));
    const double h = plant.delay();
    LogTerms t{std::log(std::abs(plant.alpha())) - h * sigma, (plant.alpha() < 0.0 ? kPi : 0.0) - h * omega, -h, 0.0};
    for (const Complex z : plant.zeros()) {
        const double ds = sigma - z.real();
        const double dw = omega - z.imag();
        const double g = ds * ds + dw * dw;
        t.lnmag += std::log(std::hypot(ds, dw));
        t.phase += std::atan2(dw, ds);
        t.dm_dsigma += ds / g;
        t.dm_domega += dw / g;
    }
    for (const Complex p : plant.poles()) {
        const double ds = sigma - p.real();
        const double dw = omega - p.imag();
        const double g = ds * ds + dw * dw;
        t.lnmag -= std::log(std::hypot(ds, dw));
        t.phase -= std::atan2(dw, ds);
        t.dm_dsigma -= ds / g;
        t.dm_domega -= dw / g;
    }
    return t;
}

Residuals residuals_from(const LogTerms& t, double Kval, GainSign sign) {
    return {t.lnmag + Kval, wrap_angle(t.phase - phase_target(sign))};
}

bool finite(const Eigen::Vector3d& v) { return v.allFinite(); }

}  // namespace

Direction3::Direction3(const Eigen::Vector3d& v) {
    const double n = v.norm();
    if (!(n > 0.0) || !std::isfinite(n)) throw Error(ErrorCode::InvalidArgument, "direction must be a nonzero finite vector");
    d_ = v / n;
}

Residuals residuals(const Plant& plant, const LocusPoint& p, GainSign sign) {
    return residuals_from(log_terms(plant, p.sigma, p.omega), p.Kval, sign);
}

double locus_distance(const Residuals& r) {
    return std::abs(1.0 - std::exp(Complex(r.M, r.P)));
}

Eigen::Matrix3d jacobian(const Plant& plant, const LocusPoint& p, const Direction3& d) {
    const LogTerms t = log_terms(plant, p.sigma, p.omega);
    Eigen::Matrix3d J;
    J << t.dm_dsigma, t.dm_domega, 1.0,
         -t.dm_domega, t.dm_dsigma, 0.0,
         d[0], d[1], d[2];
    return J;
}

LocusPoint predict(const LocusPoint& prev, const Direction3& d, double h) {
    return LocusPoint::from(prev.vec() + h * d.vec());
}

CorrectorOutcome correct(const Plant& plant, const LocusPoint& predicted, const Direction3& dir, double tol,
                         int max_iter, GainSign sign) {
    CorrectorOutcome out;
    out.point = predicted;
    const Eigen::Vector3d xp = predicted.vec();
    const Eigen::Vector3d& d = dir.vec();
    // Real-axis trajectories of real plants stay on the axis exactly.
    const bool on_axis = predicted.omega == 0.0 && d[1] == 0.0;

    Eigen::Vector3d x = xp;
    LogTerms t;
    try {
        t = log_terms(plant, x[0], x[1]);
    } catch (const Error&) {
        out.status = CorrectorStatus::SingularPoint;
        return out;
    }
    Residuals r = residuals_from(t, x[2], sign);
    out.predictor_delta = locus_distance(r);

    double first_step = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        out.iterations = it + 1;
        Eigen::Vector3d dx;
        const double f3 = (x - xp).dot(d);
        if (on_axis) {
            Eigen::Matrix2d J;
            J << t.dm_dsigma, 1.0, d[0], d[2];
            Eigen::PartialPivLU<Eigen::Matrix2d> lu(J);
            if (!(lu.rcond() > 1e-12)) {
                out.status = CorrectorStatus::SingularJacobian;
                return out;
            }
            const Eigen::Vector2d step = lu.solve(Eigen::Vector2d(-r.M, -f3));
            dx = {step[0], 0.0, step[1]};
        } else {
            Eigen::Matrix3d J;
            J << t.dm_dsigma, t.dm_domega, 1.0,
                 -t.dm_domega, t.dm_dsigma, 0.0,
                 d[0], d[1], d[2];
            Eigen::PartialPivLU<Eigen::Matrix3d> lu(J);
            if (!(lu.rcond() > 1e-12)) {
                out.status = CorrectorStatus::SingularJacobian;
                return out;
            }
            dx = lu.solve(Eigen::Vector3d(-r.M, -r.P, -f3));
        }
        if (!finite(dx)) {
            out.status = CorrectorStatus::NoConvergence;
            return out;
        }
        x += dx;
        const double step_norm = dx.norm();
        if (it == 0) first_step = step_norm;
        if (it == 1) out.kappa = first_step > 0.0 ? step_norm / first_step : 0.0;

        try {
            t = log_terms(plant, x[0], x[1]);
        } catch (const Error&) {
            out.point = LocusPoint::from(x);
            out.status = CorrectorStatus::SingularPoint;
            return out;
        }
        r = residuals_from(t, x[2], sign);
        out.point = LocusPoint::from(x);
        out.delta = locus_distance(r);
        if (step_norm <= tol && std::abs(r.M) <= tol && std::abs(r.P) <= tol) {
            out.status = CorrectorStatus::Converged;
            return out;
        }
    }
    out.status = CorrectorStatus::NoConvergence;
    return out;
}

StepDecision step_update(const StepController& ctl, double kappa, double delta, bool converged) {
    const double kappa_df = std::sqrt(kappa / ctl.kappa_nom);
    const double delta_df = std::sqrt(delta / ctl.delta_nom);
    double hdf = std::max(kappa_df, delta_df);
    if (!std::isfinite(hdf) || !converged) hdf = 2.0;
    const double bar = std::max(std::min(hdf, 2.0), 0.5);
    const bool repeat = bar == 2.0 || !converged;
    if (repeat && ctl.h <= ctl.h_min)
        throw Error(ErrorCode::StepUnderflow, "step length underflow: the corrector keeps failing at h_min");
    const double new_h = std::clamp(ctl.h / bar, ctl.h_min, ctl.h_max);
    return {new_h, repeat};
}

StepDecision step_update(const StepController& ctl, const CorrectorOutcome& out) {
    return step_update(ctl, out.kappa, out.delta, out.converged());
}

std::vector<double> departure_angles(const Plant& plant, Complex pole, int multiplicity, GainSign sign) {
    if (multiplicity < 1) throw Error(ErrorCode::InvalidArgument, "pole multiplicity must be positive");
    const double same = 1e-9 * (1.0 + std::abs(pole));
    double phase = plant.alpha() < 0.0 ? kPi : 0.0;
    for (const Complex z : plant.zeros()) {
        const Complex d = pole - z;
        phase += std::atan2(d.imag(), d.real());
    }
    for (const Complex p : plant.poles()) {
        if (std::abs(p - pole) <= same) continue;
        const Complex d = pole - p;
        phase -= std::atan2(d.imag(), d.real());
    }
    phase -= plant.delay() * pole.imag();

    std::vector<double> out;
    for (int j = 0; j < multiplicity; ++j) {
        double theta = wrap_angle((phase - phase_target(sign) + kTwoPi * j) / multiplicity);
        if (pole.imag() == 0.0) {
            // exact real directions for real poles
            if (std::abs(theta) < 1e-9) theta = 0.0;
            if (std::abs(std::abs(theta) - kPi) < 1e-9) theta = kPi;
        }
        out.push_back(theta);
    }
    return out;
}

double departure_direction_pole(const Plant& plant, std::size_t pole_index, GainSign sign) {
    if (pole_index >= plant.poles().size()) throw Error(ErrorCode::InvalidArgument, "pole index out of range");
    const Complex pole = plant.poles()[pole_index];
    int mult = 0;
    for (const Complex p : plant.poles())
        if (std::abs(p - pole) <= 1e-9 * (1.0 + std::abs(pole))) ++mult;
    if (mult > 1) throw Error(ErrorCode::InvalidArgument, "repeated pole: use departure_angles");
    return departure_angles(plant, pole, 1, sign).front();
}

Complex entry_direction_crossing(const Plant& plant, const BoundaryFunctions& bf, const BoundaryCrossing& c) {
    (void)plant;
    const double dphi = bf.phi_prime(c.omega);
    if (std::abs(dphi) <= bf.tolerances().tol_dir)
        throw Error(ErrorCode::DegenerateCrossing, "tangential boundary crossing has no entry direction");
    return -1.0 / (c.k * Complex(dphi, bf.K_prime(c.omega)));
}

Direction3 lifted_tangent(const Plant& plant, Complex s) {
    const Complex ds_dK = -1.0 / dlog_ratio(plant, s);
    return Direction3(Eigen::Vector3d(ds_dK.real(), ds_dK.imag(), 1.0));
}

std::optional<LocusPoint> refine_at_gain(const Plant& plant, const LocusPoint& start, double Kval, GainSign sign,
                                         double tol, int max_iter) {
    const bool on_axis = start.omega == 0.0;
    double sigma = start.sigma;
    double omega = start.omega;
    for (int it = 0; it < max_iter; ++it) {
        LogTerms t;
        try {
            t = log_terms(plant, sigma, omega);
        } catch (const Error&) {
            return std::nullopt;
        }
        const Residuals r = residuals_from(t, Kval, sign);
        double ds = 0.0;
        double dw = 0.0;
        if (on_axis) {
            if (t.dm_dsigma == 0.0) return std::nullopt;
            ds = -r.M / t.dm_dsigma;
        } else {
            // [a b; -b a] [ds dw]^T = -[M P]^T
            const double a = t.dm_dsigma;
            const double b = t.dm_domega;
            const double det = a * a + b * b;
            if (!(det > 0.0)) return std::nullopt;
            ds = (-a * r.M + b * r.P) / det;
            dw = (-b * r.M - a * r.P) / det;
        }
        sigma += ds;
        omega += dw;
        if (!std::isfinite(sigma) || !std::isfinite(omega)) return std::nullopt;
        if (std::hypot(ds, dw) <= tol * (1.0 + std::hypot(sigma, omega))) {
            LocusPoint p{sigma, omega, Kval};
            const Residuals rr = residuals(plant, p, sign);
            if (std::abs(rr.M) <= 1e-9 && std::abs(rr.P) <= 1e-9) return p;
            return std::nullopt;
        }
    }
    return std::nullopt;
}

std::optional<LocusPoint> refine_at_abscissa(const Plant& plant, const LocusPoint& start, double sigma, GainSign sign,
                                             double tol, int max_iter) {
    double omega = start.omega;
    double K = start.Kval;
    for (int it = 0; it < max_iter; ++it) {
        LogTerms t;
        try {
            t = log_terms(plant, sigma, omega);
        } catch (const Error&) {
            return std::nullopt;
        }
        const Residuals r = residuals_from(t, K, sign);
        double dw = 0.0;
        double dK = 0.0;
        if (start.omega == 0.0) {
            dK = -r.M;
        } else {
            // [Mw 1; Ms 0] [dw dK]^T = -[M P]^T, using dP/domega = dM/dsigma
            if (t.dm_dsigma == 0.0) return std::nullopt;
            dw = -r.P / t.dm_dsigma;
            dK = -r.M - t.dm_domega * dw;
        }
        omega += dw;
        K += dK;
        if (!std::isfinite(omega) || !std::isfinite(K)) return std::nullopt;
        if (std::hypot(dw, dK) <= tol * (1.0 + std::abs(omega) + std::abs(K))) {
            LocusPoint p{sigma, omega, K};
            const Residuals rr = residuals(plant, p, sign);
            if (std::abs(rr.M) <= 1e-9 && std::abs(rr.P) <= 1e-9) return p;
            return std::nullopt;
        }
    }
    return std::nullopt;
}

}  // namespace rlocus
