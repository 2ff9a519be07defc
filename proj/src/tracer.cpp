#include "rlocus/tracer.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <map>
#include <sstream>

#include "rlocus/error.hpp"

namespace rlocus {

const char* to_string(OriginKind k) {
    switch (k) {
        case OriginKind::OpenLoopPole: return "open_loop_pole";
        case OriginKind::BoundaryEntry: return "boundary_entry";
        case OriginKind::BranchContinuation: return "branch_continuation";
    }
    return "unknown";
}

const char* to_string(TerminationKind k) {
    switch (k) {
        case TerminationKind::GainCap: return "gain_cap";
        case TerminationKind::LeftRegion: return "left_region";
        case TerminationKind::ReachedBranch: return "reached_branch";
        case TerminationKind::StepFailure: return "step_failure";
    }
    return "unknown";
}

bool RootLocusResult::has_step_failure() const {
    return std::any_of(trajectories.begin(), trajectories.end(),
                       [](const Trajectory& t) { return t.termination.kind == TerminationKind::StepFailure; });
}

namespace {

constexpr double kSeedRadius = 1e-3;

bool is_real_point(const LocusPoint& p) { return p.omega == 0.0; }

double segment_distance(Complex a, Complex b, Complex p) {
    const Complex ab = b - a;
    const double len2 = std::norm(ab);
    if (len2 == 0.0) return std::abs(p - a);
    const double t = std::clamp(((p - a) * std::conj(ab)).real() / len2, 0.0, 1.0);
    return std::abs(a + t * ab - p);
}

Direction3 direction_from_ds(Complex ds_dK, bool real_axis) {
    return Direction3(Eigen::Vector3d(ds_dK.real(), real_axis ? 0.0 : ds_dK.imag(), 1.0));
}

Direction3 planar_direction(double angle) {
    double c = std::cos(angle);
    double s = std::sin(angle);
    if (angle == 0.0) {
        c = 1.0;
        s = 0.0;
    } else if (angle == kPi) {
        c = -1.0;
        s = 0.0;
    }
    return Direction3(Eigen::Vector3d(c, s, 0.0));
}

// Pole seed: a point at radius kSeedRadius (1 + |p|) along the departure
// angle with K chosen so that M = 0, then polished with K frozen.
std::optional<Seed> pole_seed(const Plant& plant, std::size_t pole_index, int multiplicity, double theta,
                              GainSign sign) {
    const Complex pole = plant.poles()[pole_index];
    const double radius = kSeedRadius * (1.0 + std::abs(pole));
    Complex s1 = pole + std::polar(radius, theta);
    if (pole.imag() == 0.0 && (theta == 0.0 || theta == kPi)) s1 = Complex(pole.real() + (theta == 0.0 ? radius : -radius), 0.0);
    const double K1 = -log_eval(plant, s1).lnmag;
    LocusPoint start{s1.real(), s1.imag(), K1};
    if (auto polished = refine_at_gain(plant, start, K1, sign)) start = *polished;
    const bool real_axis = is_real_point(start);
    Complex ds_dK = -1.0 / dlog_ratio(plant, start.s());
    (void)multiplicity;
    Seed seed{start, direction_from_ds(ds_dK, real_axis),
              TrajectoryOrigin{OriginKind::OpenLoopPole, pole_index, theta, false}, sign, pole, std::nullopt};
    return seed;
}

}  // namespace

std::vector<Seed> seed_points(const Plant& plant, const RegionSpec& region, const CrossingSet& crossings,
                              GainSign sign, const TraceOptions& opts) {
    std::vector<Seed> seeds;
    const auto& poles = plant.poles();
    std::vector<bool> seen(poles.size(), false);
    for (std::size_t i = 0; i < poles.size(); ++i) {
        if (seen[i]) continue;
        const Complex p = poles[i];
        int mult = 0;
        for (std::size_t j = i; j < poles.size(); ++j)
            if (std::abs(poles[j] - p) <= 1e-9 * (1.0 + std::abs(p))) {
                seen[j] = true;
                ++mult;
            }
        if (p.real() < region.sigma0) continue;
        if (opts.mirror && p.imag() < 0.0) continue;
        for (double theta : departure_angles(plant, p, mult, sign)) {
            if (opts.mirror && p.imag() == 0.0 && std::sin(theta) < -1e-12) continue;
            if (auto s = pole_seed(plant, i, mult, theta, sign)) seeds.push_back(*s);
        }
    }
    for (std::size_t i = 0; i < crossings.inward.size(); ++i) {
        const BoundaryCrossing& c = crossings.inward[i];
        const double dphi_scale = 1.0;
        (void)dphi_scale;
        // ds/dk from the crossing data, lifted to ds/dK = k ds/dk
        const Complex s(region.sigma0, c.omega);
        const Complex d0 = -1.0 / dlog_ratio(plant, s) / c.k;
        const Complex ds_dK = c.k * d0;
        const bool real_axis = c.omega == 0.0;
        seeds.push_back(Seed{LocusPoint{region.sigma0, c.omega, c.Kval}, direction_from_ds(ds_dK, real_axis),
                             TrajectoryOrigin{OriginKind::BoundaryEntry, i, std::arg(d0), false}, sign, std::nullopt,
                             std::nullopt});
        if (!opts.mirror && c.omega > 0.0) {
            seeds.push_back(Seed{LocusPoint{region.sigma0, -c.omega, c.Kval},
                                 direction_from_ds(std::conj(ds_dK), false),
                                 TrajectoryOrigin{OriginKind::BoundaryEntry, i, -std::arg(d0), true}, sign,
                                 std::nullopt, std::nullopt});
        }
    }
    return seeds;
}

namespace {

struct Tracer {
    const Plant& plant;
    const RegionSpec& region;
    const std::vector<BranchPoint>& branches;
    const std::vector<BoundaryCrossing>& w_out;
    const TraceOptions& opts;

    // Branch captured by the step cur -> next, if any.
    std::optional<std::size_t> captured_branch(const Seed& seed, const LocusPoint& cur, const LocusPoint& next,
                                               double h) const {
        std::optional<std::size_t> best;
        double best_dist = std::numeric_limits<double>::infinity();
        for (std::size_t b = 0; b < branches.size(); ++b) {
            const BranchPoint& bp = branches[b];
            if (bp.sign != seed.sign || !bp.active) continue;
            if (seed.skip_branch && *seed.skip_branch == b) continue;
            const double rb = std::max(10.0 * h, 1e-3) * (1.0 + std::abs(bp.s));
            const double dist = segment_distance(cur.s(), next.s(), bp.s);
            if (dist > rb) continue;
            const double tol_Kb = 1e-2 * (1.0 + std::abs(bp.Kval));
            if (bp.Kval < std::min(cur.Kval, next.Kval) - tol_Kb || bp.Kval > std::max(cur.Kval, next.Kval) + tol_Kb)
                continue;
            // must be heading toward the branch
            if (((bp.s - cur.s()) * std::conj(next.s() - cur.s())).real() <= 0.0) continue;
            if (dist < best_dist) {
                best = b;
                best_dist = dist;
            }
        }
        return best;
    }

    std::optional<LocusPoint> refine_cap(const LocusPoint& cur, const LocusPoint& next, GainSign sign) const {
        const double t = (region.lnkmax - cur.Kval) / (next.Kval - cur.Kval);
        if (is_real_point(cur) && is_real_point(next)) {
            // bisection along the real axis for M(sigma, 0, ln k_max) = 0
            auto M = [&](double sigma) { return residuals(plant, {sigma, 0.0, region.lnkmax}, sign).M; };
            double a = cur.sigma;
            double b = next.sigma;
            double fa = M(a);
            const double fb = M(b);
            if ((fa < 0.0) != (fb < 0.0)) {
                for (int it = 0; it < 200 && std::abs(b - a) > 1e-15 * (1.0 + std::abs(a)); ++it) {
                    const double mid = 0.5 * (a + b);
                    const double fm = M(mid);
                    if (fm == 0.0) {
                        a = b = mid;
                        break;
                    }
                    if ((fm < 0.0) == (fa < 0.0)) {
                        a = mid;
                        fa = fm;
                    } else {
                        b = mid;
                    }
                }
                LocusPoint p{0.5 * (a + b), 0.0, region.lnkmax};
                const Residuals r = residuals(plant, p, sign);
                if (std::abs(r.M) <= opts.tol_corr && std::abs(r.P) <= opts.tol_corr) return p;
            }
        }
        const Eigen::Vector3d guess = cur.vec() + t * (next.vec() - cur.vec());
        return refine_at_gain(plant, LocusPoint{guess[0], guess[1], region.lnkmax}, region.lnkmax, sign);
    }

    std::optional<LocusPoint> refine_exit(const LocusPoint& cur, const LocusPoint& next, GainSign sign) const {
        const double t = (region.sigma0 - cur.sigma) / (next.sigma - cur.sigma);
        const Eigen::Vector3d guess = cur.vec() + t * (next.vec() - cur.vec());
        LocusPoint start{region.sigma0, is_real_point(cur) && is_real_point(next) ? 0.0 : guess[1], guess[2]};
        return refine_at_abscissa(plant, start, region.sigma0, sign);
    }

    void match_exit(Termination& term, const LocusPoint& exit) const {
        const double w = std::abs(exit.omega);
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < w_out.size(); ++j) {
            const double dw = std::abs(w_out[j].omega - w);
            const double dK = std::abs(w_out[j].Kval - exit.Kval);
            if (dw > opts.tol_match_omega || dK > opts.tol_match_K) continue;
            const double score = dw / opts.tol_match_omega + dK / opts.tol_match_K;
            if (score < best) {
                best = score;
                term.exit_match = j;
                term.exit_conjugate = exit.omega < 0.0;
            }
        }
        if (!term.exit_match) {
            std::ostringstream msg;
            msg << "exit at w = " << exit.omega << ", K = " << exit.Kval << " matches no outward crossing";
            term.diagnostic = msg.str();
        }
    }

    Trajectory run(const Seed& seed) const {
        Trajectory tr;
        tr.origin = seed.origin;
        tr.sign = seed.sign;
        tr.start_pole = seed.pole;
        LocusPoint cur = seed.start;

        if (cur.Kval > region.lnkmax) {
            // gain cap hit before the first step: only possible for pole seeds
            // with a tiny k_max; move the seed toward the pole
            if (seed.pole) {
                const Complex pole = *seed.pole;
                const Complex offset = cur.s() - pole;
                const Complex guess = pole + offset * std::exp(region.lnkmax - cur.Kval);
                LocusPoint g{guess.real(), is_real_point(cur) ? 0.0 : guess.imag(), region.lnkmax};
                if (auto p = refine_at_gain(plant, g, region.lnkmax, seed.sign)) {
                    tr.points.push_back(*p);
                    tr.termination.kind = TerminationKind::GainCap;
                    return tr;
                }
            }
            tr.termination.kind = TerminationKind::StepFailure;
            tr.termination.diagnostic = "seed lies above the gain cap";
            return tr;
        }
        tr.points.push_back(cur);

        StepController ctl = opts.step;
        ctl.h = std::clamp(ctl.h, ctl.h_min, ctl.h_max);
        Direction3 dir = seed.dir;

        auto fail = [&](const std::string& why) {
            tr.termination.kind = TerminationKind::StepFailure;
            tr.termination.diagnostic = why;
            return tr;
        };
        auto shrink = [&]() {
            if (ctl.h <= ctl.h_min) return false;
            ctl.h = std::max(ctl.h / 2.0, ctl.h_min);
            return true;
        };

        for (std::size_t step = 0; step < opts.max_steps; ++step) {
            const LocusPoint pred = predict(cur, dir, ctl.h);
            const CorrectorOutcome out = correct(plant, pred, dir, opts.tol_corr, opts.max_iter, seed.sign);
            StepDecision dec{};
            try {
                dec = step_update(ctl, out.kappa, out.predictor_delta, out.converged());
            } catch (const Error& e) {
                return fail(e.what());
            }
            if (dec.repeat) {
                ctl.h = dec.new_h;
                continue;
            }
            const LocusPoint next = out.point;
            // jump guard: the corrector must stay near the prediction
            if ((next.vec() - pred.vec()).norm() > 2.0 * ctl.h) {
                if (!shrink()) return fail("corrector left the prediction neighbourhood at h_min");
                continue;
            }
            if (auto b = captured_branch(seed, cur, next, ctl.h)) {
                const BranchPoint& bp = branches[*b];
                tr.termination.kind = TerminationKind::ReachedBranch;
                tr.termination.branch = *b;
                const Complex approach = bp.s - cur.s();
                tr.termination.arrival_angle = std::arg(approach);
                if (is_real_point(cur) && bp.s.imag() == 0.0)
                    tr.termination.arrival_angle = approach.real() >= 0.0 ? 0.0 : kPi;
                tr.points.push_back(LocusPoint{bp.s.real(), bp.s.imag(), bp.Kval});
                return tr;
            }
            if (!(next.Kval > cur.Kval)) {
                if (!shrink()) return fail("gain stopped increasing along the trajectory");
                continue;
            }

            const double tK = next.Kval > region.lnkmax ? (region.lnkmax - cur.Kval) / (next.Kval - cur.Kval)
                                                        : std::numeric_limits<double>::infinity();
            const double tS = next.sigma < region.sigma0 ? (region.sigma0 - cur.sigma) / (next.sigma - cur.sigma)
                                                         : std::numeric_limits<double>::infinity();
            if (std::isfinite(tK) && tK <= tS) {
                if (auto p = refine_cap(cur, next, seed.sign)) {
                    tr.points.push_back(*p);
                    tr.termination.kind = TerminationKind::GainCap;
                    return tr;
                }
                if (!shrink()) return fail("could not refine the gain-cap endpoint");
                continue;
            }
            if (std::isfinite(tS)) {
                if (auto p = refine_exit(cur, next, seed.sign)) {
                    tr.points.push_back(*p);
                    tr.termination.kind = TerminationKind::LeftRegion;
                    match_exit(tr.termination, *p);
                    return tr;
                }
                if (!shrink()) return fail("could not refine the region exit point");
                continue;
            }

            tr.points.push_back(next);
            dir = Direction3(next.vec() - cur.vec());
            cur = next;
            ctl.h = dec.new_h;
        }
        return fail("maximum number of continuation steps exceeded");
    }
};

std::vector<Trajectory> trace_all(const Plant& plant, const RegionSpec& region, const std::vector<Seed>& seeds,
                                  const std::vector<BranchPoint>& branches, const RootLocusResult& result,
                                  const TraceOptions& opts) {
    std::vector<Trajectory> out(seeds.size());
    auto one = [&](std::size_t i) {
        const auto& w_out = result.crossings_for(seeds[i].sign).outward;
        return trace(plant, region, seeds[i], branches, w_out, opts);
    };
    if (!opts.parallel || seeds.size() < 2) {
        for (std::size_t i = 0; i < seeds.size(); ++i) out[i] = one(i);
        return out;
    }
    std::vector<std::future<Trajectory>> futures;
    futures.reserve(seeds.size());
    for (std::size_t i = 0; i < seeds.size(); ++i) futures.push_back(std::async(std::launch::async, one, i));
    for (std::size_t i = 0; i < seeds.size(); ++i) out[i] = futures[i].get();
    return out;
}

std::size_t conjugate_branch(const std::vector<BranchPoint>& branches, std::size_t b) {
    const BranchPoint& bp = branches[b];
    if (bp.s.imag() == 0.0) return b;
    for (std::size_t j = 0; j < branches.size(); ++j)
        if (branches[j].sign == bp.sign && std::abs(branches[j].s - std::conj(bp.s)) <= 1e-9 * (1.0 + std::abs(bp.s)))
            return j;
    return b;
}

Trajectory mirror_of(const Trajectory& t, const std::vector<BranchPoint>& branches) {
    Trajectory m = t;
    m.mirrored = true;
    for (auto& p : m.points) p.omega = -p.omega;
    if (m.start_pole) m.start_pole = std::conj(*m.start_pole);
    m.origin.angle = -m.origin.angle;
    if (m.origin.kind == OriginKind::BoundaryEntry) m.origin.conjugate = !m.origin.conjugate;
    if (m.origin.kind == OriginKind::BranchContinuation) m.origin.index = conjugate_branch(branches, m.origin.index);
    if (m.termination.branch) m.termination.branch = conjugate_branch(branches, *m.termination.branch);
    m.termination.arrival_angle = -m.termination.arrival_angle;
    if (m.termination.exit_match) m.termination.exit_conjugate = !m.termination.exit_conjugate;
    return m;
}

}  // namespace

Trajectory trace(const Plant& plant, const RegionSpec& region, const Seed& seed,
                 const std::vector<BranchPoint>& branches, const std::vector<BoundaryCrossing>& w_out,
                 const TraceOptions& opts) {
    return Tracer{plant, region, branches, w_out, opts}.run(seed);
}

RootLocusResult run(const Plant& plant, const RegionSpec& region, const TraceOptions& opts) {
    RootLocusResult result{plant, region, opts, {}, std::nullopt, {}, {}, {}};
    const BoundaryFunctions bf(plant, region);

    std::vector<GainSign> signs{GainSign::Positive};
    if (opts.negative_gains) signs.push_back(GainSign::Negative);

    for (GainSign sign : signs) {
        CrossingSet cs = boundary_crossings(bf, region, sign);
        if (sign == GainSign::Positive)
            result.crossings = std::move(cs);
        else
            result.negative_crossings = std::move(cs);

        for (const BranchPoint& b : branch_candidates(plant, region, sign)) {
            if (b.active && std::abs(b.s.real() - region.sigma0) <= bf.tolerances().tol_bnd) {
                std::ostringstream msg;
                msg << "branch point at " << b.s.real() << (b.s.imag() < 0 ? "-" : "+") << std::abs(b.s.imag())
                    << "j lies on the boundary";
                throw Error(ErrorCode::BranchOnBoundary, msg.str());
            }
            if (b.s.real() < region.sigma0) continue;
            if (!b.active) {
                std::ostringstream msg;
                msg << "inactive " << to_string(sign) << "-gain branch point at " << b.s.real() << "+" << b.s.imag()
                    << "j with k = " << b.k << " above k_max";
                result.diagnostics.push_back(msg.str());
                continue;
            }
            result.branch_points.push_back(b);
        }
    }

    std::vector<Seed> wave;
    for (GainSign sign : signs) {
        auto s = seed_points(plant, region, result.crossings_for(sign), sign, opts);
        wave.insert(wave.end(), s.begin(), s.end());
    }

    // (branch, outgoing angle) pairs already spawned
    std::vector<std::pair<std::size_t, double>> spawned;
    constexpr std::size_t kMaxTrajectories = 20000;
    while (!wave.empty() && result.trajectories.size() < kMaxTrajectories) {
        std::vector<Trajectory> traced = trace_all(plant, region, wave, result.branch_points, result, opts);
        std::vector<Seed> next;
        for (const Trajectory& t : traced) {
            if (t.termination.kind != TerminationKind::ReachedBranch) continue;
            const std::size_t b = *t.termination.branch;
            const BranchPoint& bp = result.branch_points[b];
            const bool real_branch = bp.s.imag() == 0.0;
            std::vector<double> incoming{t.termination.arrival_angle};
            // the mirror image of a non-real arrival meets the same real branch
            const bool real_arrival = t.points.size() >= 2 && is_real_point(t.points[t.points.size() - 2]);
            if (opts.mirror && real_branch && !real_arrival) incoming.push_back(-t.termination.arrival_angle);
            for (double in : incoming) {
                double out_angle = redirect(in, bp.multiplicity);
                if (real_branch) {
                    if (std::abs(out_angle) < 1e-2) out_angle = 0.0;
                    if (std::abs(std::abs(out_angle) - kPi) < 1e-2) out_angle = kPi;
                }
                if (opts.mirror && real_branch && std::sin(out_angle) < -1e-9) continue;
                const bool dup = std::any_of(spawned.begin(), spawned.end(), [&](const auto& sp) {
                    return sp.first == b && std::abs(wrap_angle(sp.second - out_angle)) < 1e-6;
                });
                if (dup) continue;
                spawned.emplace_back(b, out_angle);
                next.push_back(Seed{LocusPoint{bp.s.real(), bp.s.imag(), bp.Kval}, planar_direction(out_angle),
                                    TrajectoryOrigin{OriginKind::BranchContinuation, b, out_angle, false}, bp.sign,
                                    std::nullopt, b});
            }
        }
        for (auto& t : traced) result.trajectories.push_back(std::move(t));
        std::stable_sort(next.begin(), next.end(), [&](const Seed& a, const Seed& b) {
            if (a.start.Kval != b.start.Kval) return a.start.Kval < b.start.Kval;
            return a.origin.angle < b.origin.angle;
        });
        wave = std::move(next);
    }
    if (!wave.empty()) result.diagnostics.push_back("trajectory limit reached; remaining branch continuations dropped");

    // each outward crossing absorbs at most one exit
    std::map<std::pair<std::size_t, int>, std::size_t> claimed;
    for (std::size_t i = 0; i < result.trajectories.size(); ++i) {
        Trajectory& t = result.trajectories[i];
        if (t.termination.kind != TerminationKind::LeftRegion) continue;
        if (!t.termination.exit_match) {
            result.diagnostics.push_back("unmatched region exit: " + t.termination.diagnostic);
            continue;
        }
        const auto key = std::make_pair(*t.termination.exit_match,
                                        (t.sign == GainSign::Positive ? 0 : 2) + (t.termination.exit_conjugate ? 1 : 0));
        if (claimed.count(key)) {
            t.termination.exit_match.reset();
            t.termination.diagnostic = "outward crossing already matched by another trajectory";
            result.diagnostics.push_back("unmatched region exit: " + t.termination.diagnostic);
            continue;
        }
        claimed[key] = i;
    }

    for (const Trajectory& t : result.trajectories)
        if (t.termination.kind == TerminationKind::StepFailure)
            result.diagnostics.push_back("step failure: " + t.termination.diagnostic);

    if (opts.mirror) {
        const std::size_t n = result.trajectories.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Trajectory& t = result.trajectories[i];
            const bool real = std::all_of(t.points.begin(), t.points.end(), is_real_point) &&
                              (!t.start_pole || t.start_pole->imag() == 0.0);
            if (!real) result.trajectories.push_back(mirror_of(t, result.branch_points));
        }
    }

    for (auto& msg : validate(result)) result.diagnostics.push_back("invariant: " + msg);
    return result;
}

std::vector<std::string> validate(const RootLocusResult& result) {
    std::vector<std::string> issues;
    const double tol = result.options.tol_corr;
    for (std::size_t i = 0; i < result.trajectories.size(); ++i) {
        const Trajectory& t = result.trajectories[i];
        for (std::size_t j = 0; j < t.points.size(); ++j) {
            const LocusPoint& p = t.points[j];
            std::ostringstream where;
            where << "trajectory " << i << " point " << j;
            if (j > 0 && !(p.Kval > t.points[j - 1].Kval)) issues.push_back(where.str() + ": gain not increasing");
            if (p.sigma < result.region.sigma0 - result.options.tol_exit)
                issues.push_back(where.str() + ": outside the region");
            if (p.Kval > result.region.lnkmax + 1e-12 * (1.0 + std::abs(result.region.lnkmax)))
                issues.push_back(where.str() + ": above the gain cap");
            try {
                const Residuals r = residuals(result.plant, p, t.sign);
                if (std::abs(r.M) > tol || std::abs(r.P) > tol) issues.push_back(where.str() + ": residual above tolerance");
            } catch (const Error&) {
                issues.push_back(where.str() + ": singular point");
            }
        }
    }
    return issues;
}

}  // namespace rlocus
