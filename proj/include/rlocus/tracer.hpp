#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rlocus/boundary.hpp"
#include "rlocus/branch.hpp"
#include "rlocus/continuation.hpp"
#include "rlocus/plant.hpp"

namespace rlocus {

struct TraceOptions {
    StepController step;  // step.h is the initial step length h0
    double tol_corr = 1e-6;
    int max_iter = 20;
    std::size_t max_steps = 200000;
    bool mirror = true;
    bool negative_gains = false;
    bool parallel = true;
    double tol_match_omega = 1e-4;
    double tol_match_K = 1e-3;
    double tol_exit = 1e-9;
};

enum class OriginKind { OpenLoopPole, BoundaryEntry, BranchContinuation };
enum class TerminationKind { GainCap, LeftRegion, ReachedBranch, StepFailure };

const char* to_string(OriginKind k);
const char* to_string(TerminationKind k);

struct TrajectoryOrigin {
    OriginKind kind = OriginKind::OpenLoopPole;
    // pole index into Plant::poles(), crossing index into the inward list of
    // the trajectory's gain sign, or branch index into RootLocusResult::branch_points
    std::size_t index = 0;
    double angle = 0.0;      // departure / outgoing angle where meaningful
    bool conjugate = false;  // seeded at the conjugate (-omega) of the referenced crossing
};

struct Termination {
    TerminationKind kind = TerminationKind::StepFailure;
    std::optional<std::size_t> branch;      // ReachedBranch
    double arrival_angle = 0.0;             // ReachedBranch: direction of approach in the s-plane
    std::optional<std::size_t> exit_match;  // LeftRegion: index into the outward list, if matched
    bool exit_conjugate = false;            // LeftRegion: matched the conjugate of that crossing
    std::string diagnostic;
};

struct Trajectory {
    TrajectoryOrigin origin;
    GainSign sign = GainSign::Positive;
    std::optional<Complex> start_pole;  // k = 0 start, not part of `points`
    std::vector<LocusPoint> points;     // corrected points, K strictly increasing
    Termination termination;
    bool mirrored = false;
};

struct Seed {
    LocusPoint start;
    Direction3 dir;
    TrajectoryOrigin origin;
    GainSign sign = GainSign::Positive;
    std::optional<Complex> pole;
    std::optional<std::size_t> skip_branch;  // branch the seed starts from
};

// Pole seeds (one per departure angle) and W^in seeds for one gain sign.
// With mirroring, seeds in the lower half-plane are left to the mirror.
std::vector<Seed> seed_points(const Plant& plant, const RegionSpec& region, const CrossingSet& crossings,
                              GainSign sign, const TraceOptions& opts = {});

// Follows one trajectory until it reaches a branch point, the gain cap, or
// the boundary. `branches` is indexed like RootLocusResult::branch_points;
// `w_out` is the outward crossing list of the seed's gain sign.
Trajectory trace(const Plant& plant, const RegionSpec& region, const Seed& seed,
                 const std::vector<BranchPoint>& branches, const std::vector<BoundaryCrossing>& w_out,
                 const TraceOptions& opts = {});

struct RootLocusResult {
    Plant plant;
    RegionSpec region;
    TraceOptions options;
    CrossingSet crossings;                 // positive gains
    std::optional<CrossingSet> negative_crossings;
    std::vector<BranchPoint> branch_points;  // active, inside the region, both signs
    std::vector<Trajectory> trajectories;
    std::vector<std::string> diagnostics;

    const CrossingSet& crossings_for(GainSign sign) const {
        return sign == GainSign::Positive || !negative_crossings ? crossings : *negative_crossings;
    }
    bool has_step_failure() const;
};

// Critical points, seeds, all trajectories with branch continuations, and
// the conjugate mirror. Throws PoleOrZeroOnBoundary,
// BiProperGainCapViolated, BranchOnBoundary or DegenerateCrossing.
RootLocusResult run(const Plant& plant, const RegionSpec& region, const TraceOptions& opts = {});

// Checks the structural invariants of a result; returns one message per
// violation.
std::vector<std::string> validate(const RootLocusResult& result);

}  // namespace rlocus
