#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

#include "rlocus/boundary.hpp"
#include "rlocus/numeric.hpp"
#include "rlocus/plant.hpp"

namespace rlocus {

// Point of the lifted locus: root s = sigma + j omega and K = ln|k|.
struct LocusPoint {
    double sigma = 0.0;
    double omega = 0.0;
    double Kval = 0.0;

    Complex s() const { return {sigma, omega}; }
    Eigen::Vector3d vec() const { return {sigma, omega, Kval}; }
    static LocusPoint from(const Eigen::Vector3d& v) { return {v[0], v[1], v[2]}; }
};

// Unit vector in (sigma, omega, K) space.
class Direction3 {
public:
    // Normalizes v; throws InvalidArgument for a zero or non-finite vector.
    explicit Direction3(const Eigen::Vector3d& v);

    const Eigen::Vector3d& vec() const { return d_; }
    double operator[](int i) const { return d_[i]; }
    // Angle of the (sigma, omega) component.
    double angle() const { return std::atan2(d_[1], d_[0]); }

private:
    Eigen::Vector3d d_;
};

// Magnitude and phase residuals of 1 + k G(s) e^{-hs} = 0. P is wrapped into
// (-pi, pi]. Throws SingularPoint at a pole or zero.
struct Residuals {
    double M;
    double P;
};

Residuals residuals(const Plant& plant, const LocusPoint& p, GainSign sign = GainSign::Positive);

// |1 - e^{M + jP}|, the distance of a point from the locus.
double locus_distance(const Residuals& r);

// Rows (dM/dsigma, dM/domega, 1), (dP/dsigma, dP/domega, 0), d^T.
Eigen::Matrix3d jacobian(const Plant& plant, const LocusPoint& p, const Direction3& d);

LocusPoint predict(const LocusPoint& prev, const Direction3& d, double h);

enum class CorrectorStatus { Converged, NoConvergence, SingularJacobian, SingularPoint };

struct CorrectorOutcome {
    LocusPoint point;
    int iterations = 0;
    double kappa = 0.0;            // ||step 1|| / ||step 0||
    double delta = 0.0;            // locus distance at the final iterate
    double predictor_delta = 0.0;  // locus distance at the predicted point
    CorrectorStatus status = CorrectorStatus::NoConvergence;

    bool converged() const { return status == CorrectorStatus::Converged; }
};

// Newton on (M, P, (x - x_pred) . d) = 0 starting from the prediction.
// Never throws for numerical trouble; the status says what happened.
CorrectorOutcome correct(const Plant& plant, const LocusPoint& predicted, const Direction3& dir, double tol = 1e-6,
                         int max_iter = 20, GainSign sign = GainSign::Positive);

struct StepController {
    double h = 1e-2;
    double kappa_nom = 1.1;
    double delta_nom = 1e-3;
    double h_min = 1e-8;
    double h_max = 0.5;
};

struct StepDecision {
    double new_h;
    bool repeat;
};

// Deceleration factor max(sqrt(kappa/kappa_nom), sqrt(delta/delta_nom))
// limited to [1/2, 2]; h is divided by it. A factor of 2 or a failed
// corrector asks for the prediction to be repeated. Throws StepUnderflow when
// a repeat is needed and h is already at h_min.
StepDecision step_update(const StepController& ctl, double kappa, double delta, bool converged);
StepDecision step_update(const StepController& ctl, const CorrectorOutcome& out);

// Departure angle of the locus from a simple open-loop pole. Throws
// InvalidArgument for a repeated pole.
double departure_direction_pole(const Plant& plant, std::size_t pole_index, GainSign sign = GainSign::Positive);

// Departure angles from a pole of multiplicity mu: the mu solutions of the
// phase equation, spaced 2 pi / mu apart.
std::vector<double> departure_angles(const Plant& plant, Complex pole, int multiplicity,
                                     GainSign sign = GainSign::Positive);

// ds/dk at a boundary crossing root, -(k (phi'(w) + j K'(w)))^{-1}.
// Throws DegenerateCrossing when |phi'(w)| <= tol_dir.
Complex entry_direction_crossing(const Plant& plant, const BoundaryFunctions& bf, const BoundaryCrossing& c);

// ds/dK = -(G'/G - h)^{-1}: tangent of the lifted locus through a regular
// point, paired with K component 1.
Direction3 lifted_tangent(const Plant& plant, Complex s);

// Solves (M, P) = 0 for (sigma, omega) with K frozen.
std::optional<LocusPoint> refine_at_gain(const Plant& plant, const LocusPoint& start, double Kval, GainSign sign,
                                         double tol = 1e-12, int max_iter = 50);

// Solves (M, P) = 0 for (omega, K) with sigma frozen.
std::optional<LocusPoint> refine_at_abscissa(const Plant& plant, const LocusPoint& start, double sigma, GainSign sign,
                                             double tol = 1e-12, int max_iter = 50);

}  // namespace rlocus
