#pragma once
// Test-side reference computations. Nothing here calls into the library's
// numerics; plants are only read through their zero/pole/gain accessors.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <random>
#include <vector>

#include "rlocus/plant.hpp"

namespace oracle {

using C = std::complex<double>;
constexpr double pi = std::numbers::pi;

// G(s) e^{-hs} by direct products.
inline C loop(const rlocus::Plant& p, C s) {
    C num = p.alpha();
    C den = 1.0;
    for (C z : p.zeros()) num *= s - z;
    for (C q : p.poles()) den *= s - q;
    return num / den * std::exp(-p.delay() * s);
}

// Monic polynomial from roots by complex multiplication, ascending.
inline std::vector<C> expand(const std::vector<C>& roots) {
    std::vector<C> c{1.0};
    for (C r : roots) {
        std::vector<C> next(c.size() + 1, 0.0);
        for (std::size_t i = 0; i < c.size(); ++i) {
            next[i + 1] += c[i];
            next[i] -= r * c[i];
        }
        c = next;
    }
    return c;
}

inline std::vector<C> mul(const std::vector<C>& a, const std::vector<C>& b) {
    std::vector<C> c(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
    return c;
}

inline std::vector<C> deriv(const std::vector<C>& a) {
    std::vector<C> d;
    for (std::size_t i = 1; i < a.size(); ++i) d.push_back(double(i) * a[i]);
    if (d.empty()) d.push_back(0.0);
    return d;
}

inline std::vector<C> sub(std::vector<C> a, const std::vector<C>& b) {
    a.resize(std::max(a.size(), b.size()), 0.0);
    for (std::size_t i = 0; i < b.size(); ++i) a[i] -= b[i];
    return a;
}

inline C horner(const std::vector<double>& c, C x) {
    C acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
    return acc;
}

// Central difference of a real function.
template <class F>
double central(F&& f, double x, double step = 1e-6) {
    return (f(x + step) - f(x - step)) / (2.0 * step);
}

// Complex Newton on w e^w = z starting from w0.
inline C lambert_w(C z, C w0) {
    C w = w0;
    for (int i = 0; i < 100; ++i) {
        const C ew = std::exp(w);
        const C f = w * ew - z;
        const C step = f / (ew * (w + 1.0));
        w -= step;
        if (std::abs(step) < 1e-15 * (1.0 + std::abs(w))) break;
    }
    return w;
}

// Root of 1 + k L(s) = 0 near s0 by complex Newton with a difference
// quotient for the derivative.
inline std::optional<C> root_near(const rlocus::Plant& p, double k, C s0) {
    C s = s0;
    for (int i = 0; i < 60; ++i) {
        const double e = 1e-7 * (1.0 + std::abs(s));
        const C f = 1.0 + k * loop(p, s);
        const C df = k * (loop(p, s + e) - loop(p, s - e)) / (2.0 * e);
        const C step = f / df;
        s -= step;
        if (!std::isfinite(s.real()) || !std::isfinite(s.imag())) return std::nullopt;
        if (std::abs(step) < 1e-14 * (1.0 + std::abs(s))) return s;
    }
    return std::abs(1.0 + k * loop(p, s)) < 1e-10 ? std::optional<C>(s) : std::nullopt;
}

struct GridCrossing {
    double omega;
    double k;
    bool inward;
};

// A frequency beyond which 1/|L(sigma0 + jw)| > kmax for sure, from
// |s - p| >= w - a and |s - z| <= w + a.
inline double grid_extent(const rlocus::Plant& p, double sigma0, double kmax) {
    double a = 0.0;
    for (C q : p.poles()) a = std::max(a, std::abs(C(sigma0) - q));
    for (C z : p.zeros()) a = std::max(a, std::abs(C(sigma0) - z));
    const double scale = std::abs(p.alpha()) * std::exp(-p.delay() * sigma0);
    auto lower_gain = [&](double w) {
        double v = 1.0 / scale;
        for (std::size_t i = 0; i < p.poles().size(); ++i) v *= (w - a);
        for (std::size_t i = 0; i < p.zeros().size(); ++i) v /= (w + a);
        return v;
    };
    double top = 2.0 * a + 1.0;
    while (lower_gain(top) <= kmax && top < 1e9) top *= 2.0;
    return top;
}

// Boundary crossings with w >= 0 and gain in (0, kmax] for positive gain:
// unwrap the phase of the loop along a uniform grid, bracket every pass
// through an odd multiple of pi and refine by bisection. Direction from the
// sign of Re(s) after raising k slightly.
inline std::vector<GridCrossing> grid_crossings(const rlocus::Plant& p, double sigma0, double kmax,
                                                double step = 1e-3) {
    const double top = grid_extent(p, sigma0, kmax);
    auto at = [&](double w) { return loop(p, C(sigma0, w)); };
    // phase continuous along the grid: phi(w) = base + arg(L(w)/L(w_i))
    std::vector<GridCrossing> out;
    double w = 0.0;
    C prev = at(0.0);
    double phase = std::arg(prev);
    while (w < top) {
        const double w1 = std::min(w + step, top);
        const C cur = at(w1);
        const double phase1 = phase + std::arg(cur / prev);
        // lines (2l+1) pi between phase and phase1, inclusive at the left end
        const double u0 = (phase - pi) / (2 * pi);
        const double u1 = (phase1 - pi) / (2 * pi);
        const double lo = std::min(u0, u1);
        const double hi = std::max(u0, u1);
        for (double l = std::ceil(lo); l <= hi; l += 1.0) {
            if (w > 0.0 && l == u0) continue;  // counted in the previous cell
            const double target = pi + 2 * pi * l;
            double a0 = w;
            double b0 = w1;
            const double fa = phase - target;
            auto ph = [&](double x) { return phase + std::arg(at(x) / prev); };
            for (int it = 0; it < 200 && b0 - a0 > 1e-14 * (1 + b0); ++it) {
                const double m = 0.5 * (a0 + b0);
                const double fm = ph(m) - target;
                if ((fm > 0) == (fa > 0) && fm != 0.0)
                    a0 = m;
                else
                    b0 = m;
            }
            const double wc = fa == 0.0 ? w : 0.5 * (a0 + b0);
            const double k = 1.0 / std::abs(at(wc));
            if (k > kmax) continue;
            const C s0(sigma0, wc);
            const auto s1 = root_near(p, k * (1.0 + 1e-6), s0);
            const bool inward = s1 && s1->real() > sigma0;
            out.push_back({wc, k, inward});
        }
        prev = cur;
        phase = phase1;
        w = w1;
    }
    return out;
}

// Random real plant: n <= 6 poles, m <= min(3, n - 1) zeros, conjugate pairs
// closed, h in [0.1, 2], sigma0 at least 0.1 from every real part.
struct RandomCase {
    rlocus::Plant plant;
    double sigma0;
    double kmax;
};

inline std::vector<C> random_roots(std::mt19937& rng, int count) {
    std::uniform_real_distribution<double> re(-4.0, 1.5);
    std::uniform_real_distribution<double> im(0.3, 4.0);
    std::bernoulli_distribution pair(0.5);
    std::vector<C> out;
    while (static_cast<int>(out.size()) < count) {
        if (count - static_cast<int>(out.size()) >= 2 && pair(rng)) {
            const C r(re(rng), im(rng));
            out.push_back(r);
            out.push_back(std::conj(r));
        } else {
            out.push_back(re(rng));
        }
    }
    return out;
}

inline RandomCase random_case(std::mt19937& rng) {
    std::uniform_int_distribution<int> nd(1, 6);
    std::uniform_real_distribution<double> hd(0.1, 2.0);
    std::uniform_real_distribution<double> ad(0.5, 4.0);
    std::uniform_real_distribution<double> sd(-4.0, 0.5);
    std::uniform_real_distribution<double> kd(0.5, 20.0);
    const int n = nd(rng);
    std::uniform_int_distribution<int> md(0, std::min(3, n - 1));
    const int m = md(rng);
    auto poles = random_roots(rng, n);
    auto zeros = random_roots(rng, m);
    double sigma0 = 0.0;
    for (;;) {
        sigma0 = sd(rng);
        bool clear = true;
        for (C r : poles) clear = clear && std::abs(r.real() - sigma0) > 0.1;
        for (C r : zeros) clear = clear && std::abs(r.real() - sigma0) > 0.1;
        if (clear) break;
    }
    RandomCase rc{rlocus::Plant(ad(rng), hd(rng), zeros, poles), sigma0, kd(rng)};
    // keep the dense grid affordable
    if (grid_extent(rc.plant, rc.sigma0, rc.kmax) > 400.0) return random_case(rng);
    return rc;
}

}  // namespace oracle
