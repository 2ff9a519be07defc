#pragma once

#include <vector>

#include "rlocus/boundary.hpp"
#include "rlocus/numeric.hpp"
#include "rlocus/plant.hpp"

namespace rlocus {

// Multiple root of the locus: N trajectories meet at s with gain k.
struct BranchPoint {
    Complex s;
    double k;
    double Kval;
    int multiplicity;  // N >= 2
    GainSign sign = GainSign::Positive;
    bool active = true;  // Kval <= ln k_max
};

struct BranchOptions {
    double tol_phase = 1e-6;
};

// Zeros of G' - hG inside the region that satisfy the phase condition, with
// gain up to k_max, sorted by gain.
std::vector<BranchPoint> branch_points(const Plant& plant, const RegionSpec& region,
                                       GainSign sign = GainSign::Positive, const BranchOptions& opts = {});

// Same as branch_points but keeps candidates above k_max (flagged inactive)
// and does not filter by region; used for diagnostics and the boundary check.
std::vector<BranchPoint> branch_candidates(const Plant& plant, const RegionSpec& region,
                                           GainSign sign = GainSign::Positive, const BranchOptions& opts = {});

// Outgoing direction after a branch point of multiplicity N: unchanged for
// odd N, rotated by -pi/N for even N. Result in (-pi, pi].
double redirect(double incoming_angle, int multiplicity);

}  // namespace rlocus
