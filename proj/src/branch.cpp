#include "rlocus/branch.hpp"

#include <algorithm>
#include <cmath>

#include "rlocus/error.hpp"

namespace rlocus {

namespace {

Complex polish_simple_root(const RealPolynomial& p, Complex r) {
    const RealPolynomial dp = p.derivative();
    Complex x = r;
    double res = std::abs(p.eval(x));
    for (int it = 0; it < 10 && res > 0.0; ++it) {
        const Complex d = dp.eval(x);
        if (d == Complex(0.0)) break;
        const Complex y = x - p.eval(x) / d;
        const double res_y = std::abs(p.eval(y));
        if (!(res_y < res)) break;
        x = y;
        res = res_y;
    }
    if (r.imag() == 0.0) x.imag(0.0);
    return x;
}

}  // namespace

std::vector<BranchPoint> branch_candidates(const Plant& plant, const RegionSpec& region, GainSign sign,
                                           const BranchOptions& opts) {
    std::vector<BranchPoint> out;
    const RealPolynomial num = branch_numerator(plant);
    if (num.degree() < 1) return out;
    const double target = phase_target(sign);
    for (const Root& r : complex_roots(num).roots) {
        const Complex s = r.multiplicity == 1 ? polish_simple_root(num, r.value) : r.value;
        LogValue lv;
        try {
            lv = log_eval(plant, s);
        } catch (const Error&) {
            continue;  // coincides with a pole or zero
        }
        if (std::abs(wrap_angle(lv.phase - target)) > opts.tol_phase) continue;
        const double K = -lv.lnmag;
        out.push_back({s, std::exp(K), K, r.multiplicity + 1, sign, K <= region.lnkmax});
    }
    std::stable_sort(out.begin(), out.end(), [](const BranchPoint& a, const BranchPoint& b) { return a.Kval < b.Kval; });
    return out;
}

std::vector<BranchPoint> branch_points(const Plant& plant, const RegionSpec& region, GainSign sign,
                                       const BranchOptions& opts) {
    std::vector<BranchPoint> out;
    for (const auto& b : branch_candidates(plant, region, sign, opts))
        if (b.active && b.s.real() >= region.sigma0) out.push_back(b);
    return out;
}

double redirect(double incoming_angle, int multiplicity) {
    if (multiplicity < 2) throw Error(ErrorCode::InvalidArgument, "branch multiplicity must be at least 2");
    if (multiplicity % 2 == 1) return wrap_angle(incoming_angle);
    return wrap_angle(incoming_angle - kPi / multiplicity);
}

}  // namespace rlocus
