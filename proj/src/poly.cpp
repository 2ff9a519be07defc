#include "rlocus/poly.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rlocus/error.hpp"

namespace rlocus {

RealPolynomial::RealPolynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
    normalize();
}

RealPolynomial::RealPolynomial(std::initializer_list<double> coeffs) : coeffs_(coeffs) {
    normalize();
}

RealPolynomial RealPolynomial::constant(double c) {
    return RealPolynomial(std::vector<double>{c});
}

RealPolynomial RealPolynomial::linear_factor(double r) {
    return RealPolynomial(std::vector<double>{-r, 1.0});
}

RealPolynomial RealPolynomial::quadratic_factor(Complex r) {
    return RealPolynomial(std::vector<double>{std::norm(r), -2.0 * r.real(), 1.0});
}

void RealPolynomial::normalize() {
    while (!coeffs_.empty() && coeffs_.back() == 0.0) coeffs_.pop_back();
}

double RealPolynomial::max_abs_coeff() const {
    double m = 0.0;
    for (double c : coeffs_) m = std::max(m, std::abs(c));
    return m;
}

double RealPolynomial::eval(double x) const {
    double acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
    return acc;
}

Complex RealPolynomial::eval(Complex z) const {
    Complex acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + *it;
    return acc;
}

RealPolynomial RealPolynomial::derivative() const {
    if (coeffs_.size() <= 1) return {};
    std::vector<double> d(coeffs_.size() - 1);
    for (std::size_t i = 1; i < coeffs_.size(); ++i) d[i - 1] = static_cast<double>(i) * coeffs_[i];
    return RealPolynomial(std::move(d));
}

RealPolynomial operator+(const RealPolynomial& a, const RealPolynomial& b) {
    std::vector<double> c(std::max(a.coeffs().size(), b.coeffs().size()), 0.0);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = a[i] + b[i];
    return RealPolynomial(std::move(c));
}

RealPolynomial operator-(const RealPolynomial& a, const RealPolynomial& b) {
    std::vector<double> c(std::max(a.coeffs().size(), b.coeffs().size()), 0.0);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = a[i] - b[i];
    return RealPolynomial(std::move(c));
}

RealPolynomial operator*(const RealPolynomial& a, const RealPolynomial& b) {
    if (a.is_zero() || b.is_zero()) return {};
    const auto& ac = a.coeffs();
    const auto& bc = b.coeffs();
    std::vector<double> c(ac.size() + bc.size() - 1, 0.0);
    for (std::size_t i = 0; i < ac.size(); ++i)
        for (std::size_t j = 0; j < bc.size(); ++j) c[i + j] += ac[i] * bc[j];
    return RealPolynomial(std::move(c));
}

RealPolynomial operator*(double s, const RealPolynomial& p) {
    std::vector<double> c = p.coeffs();
    for (double& v : c) v *= s;
    return RealPolynomial(std::move(c));
}

RealPolynomial poly_arith(const RealPolynomial& a, const RealPolynomial& b, PolyOp op) {
    switch (op) {
        case PolyOp::Add: return a + b;
        case PolyOp::Sub: return a - b;
        case PolyOp::Mul: return a * b;
    }
    return {};
}

RealPolynomial poly_derivative(const RealPolynomial& p) { return p.derivative(); }

RealPolynomial poly_from_roots(std::span<const Complex> roots) {
    RealPolynomial acc = RealPolynomial::constant(1.0);
    std::vector<bool> used(roots.size(), false);
    for (std::size_t i = 0; i < roots.size(); ++i) {
        if (used[i]) continue;
        used[i] = true;
        const Complex r = roots[i];
        if (r.imag() == 0.0) {
            acc = acc * RealPolynomial::linear_factor(r.real());
            continue;
        }
        // pair with the closest unused conjugate
        std::size_t best = roots.size();
        double best_dist = 0.0;
        for (std::size_t j = i + 1; j < roots.size(); ++j) {
            if (used[j]) continue;
            const double d = std::abs(roots[j] - std::conj(r));
            if (best == roots.size() || d < best_dist) {
                best = j;
                best_dist = d;
            }
        }
        if (best == roots.size() || best_dist > 1e-9 * (1.0 + std::abs(r)))
            throw Error(ErrorCode::InvalidArgument, "root list is not closed under conjugation");
        used[best] = true;
        acc = acc * RealPolynomial::quadratic_factor(r);
    }
    return acc;
}

int RootSet::total_multiplicity() const {
    int total = 0;
    for (const auto& r : roots) total += r.multiplicity;
    return total;
}

std::vector<Complex> RootSet::expanded() const {
    std::vector<Complex> out;
    for (const auto& r : roots)
        for (int i = 0; i < r.multiplicity; ++i) out.push_back(r.value);
    return out;
}

namespace {

// Parlett-Reinsch balancing with radix 2 (exact in floating point).
void balance(Eigen::MatrixXd& a) {
    constexpr double radix = 2.0;
    constexpr double sqrdx = radix * radix;
    const Eigen::Index n = a.rows();
    bool done = false;
    while (!done) {
        done = true;
        for (Eigen::Index i = 0; i < n; ++i) {
            double r = 0.0;
            double c = 0.0;
            for (Eigen::Index j = 0; j < n; ++j) {
                if (j == i) continue;
                c += std::abs(a(j, i));
                r += std::abs(a(i, j));
            }
            if (c == 0.0 || r == 0.0) continue;
            double g = r / radix;
            double f = 1.0;
            const double s = c + r;
            while (c < g) {
                f *= radix;
                c *= sqrdx;
            }
            g = r * radix;
            while (c > g) {
                f /= radix;
                c /= sqrdx;
            }
            if ((c + r) / f < 0.95 * s) {
                done = false;
                g = 1.0 / f;
                a.row(i) *= g;
                a.col(i) *= f;
            }
        }
    }
}

// p(z) and p'(z) by Horner.
std::pair<Complex, Complex> eval_with_derivative(const std::vector<double>& c, Complex z) {
    Complex p = 0.0;
    Complex dp = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) {
        dp = dp * z + p;
        p = p * z + *it;
    }
    return {p, dp};
}

std::vector<Complex> companion_eigenvalues(const std::vector<double>& c) {
    const int d = static_cast<int>(c.size()) - 1;
    if (d == 1) return {Complex(-c[0] / c[1], 0.0)};
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(d, d);
    for (int i = 1; i < d; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < d; ++i) comp(i, d - 1) = -c[i] / c[d];
    balance(comp);
    Eigen::EigenSolver<Eigen::MatrixXd> solver(comp, false);
    if (solver.info() != Eigen::Success)
        throw Error(ErrorCode::NoConvergence, "companion eigenvalue iteration failed");
    std::vector<Complex> out(d);
    for (int i = 0; i < d; ++i) out[i] = solver.eigenvalues()[i];
    return out;
}

void polish(const std::vector<double>& c, std::vector<Complex>& z) {
    for (std::size_t i = 0; i < z.size(); ++i) {
        double nearest = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < z.size(); ++j)
            if (j != i) nearest = std::min(nearest, std::abs(z[i] - z[j]));
        Complex x = z[i];
        auto [px, dpx] = eval_with_derivative(c, x);
        for (int it = 0; it < 8 && std::abs(px) > 0.0; ++it) {
            if (dpx == Complex(0.0)) break;
            const Complex step = px / dpx;
            if (!std::isfinite(std::abs(step)) || std::abs(x - step - z[i]) > 0.25 * nearest) break;
            const Complex y = x - step;
            auto [py, dpy] = eval_with_derivative(c, y);
            if (!(std::abs(py) < std::abs(px))) break;
            x = y;
            px = py;
            dpx = dpy;
        }
        z[i] = x;
    }
}

std::vector<Root> cluster(const std::vector<Complex>& z, double tol) {
    const std::size_t n = z.size();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double scale = 1.0 + std::max(std::abs(z[i]), std::abs(z[j]));
            if (std::abs(z[i] - z[j]) <= tol * scale) parent[find(i)] = find(j);
        }
    std::vector<Root> out;
    std::vector<std::size_t> slot(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t r = find(i);
        if (slot[r] == n) {
            slot[r] = out.size();
            out.push_back({Complex(0.0), 0});
        }
        Root& root = out[slot[r]];
        root.value += z[i];
        root.multiplicity += 1;
    }
    for (auto& r : out) r.value /= static_cast<double>(r.multiplicity);
    return out;
}

// Forces exact conjugate symmetry: near-real roots become real, the rest are
// paired with their closest conjugate partner and averaged.
void symmetrize(std::vector<Root>& roots, double tol_imag) {
    std::vector<Root> real, upper, lower;
    for (const auto& r : roots) {
        if (std::abs(r.value.imag()) <= tol_imag * std::max(1.0, std::abs(r.value.real())))
            real.push_back({Complex(r.value.real(), 0.0), r.multiplicity});
        else if (r.value.imag() > 0.0)
            upper.push_back(r);
        else
            lower.push_back(r);
    }
    std::vector<Root> out = real;
    std::vector<bool> taken(lower.size(), false);
    for (const auto& u : upper) {
        std::size_t best = lower.size();
        double best_dist = 0.0;
        for (std::size_t j = 0; j < lower.size(); ++j) {
            if (taken[j] || lower[j].multiplicity != u.multiplicity) continue;
            const double d = std::abs(u.value - std::conj(lower[j].value));
            if (best == lower.size() || d < best_dist) {
                best = j;
                best_dist = d;
            }
        }
        if (best == lower.size()) {
            // No partner: keep as-is (cannot happen for well-conditioned real input).
            out.push_back(u);
            continue;
        }
        taken[best] = true;
        const Complex avg = 0.5 * (u.value + std::conj(lower[best].value));
        out.push_back({avg, u.multiplicity});
        out.push_back({std::conj(avg), u.multiplicity});
    }
    for (std::size_t j = 0; j < lower.size(); ++j)
        if (!taken[j]) out.push_back(lower[j]);
    roots = std::move(out);
}

}  // namespace

RootSet complex_roots(const RealPolynomial& p, const RootOptions& opts) {
    if (p.is_zero()) throw Error(ErrorCode::DegeneratePolynomial, "cannot find roots of the zero polynomial");
    RootSet result;
    if (p.degree() == 0) return result;

    const double scale = p.max_abs_coeff();
    std::vector<double> c(p.coeffs());
    for (double& v : c) v /= scale;

    // Exact zeros at the origin.
    std::size_t zeros_at_origin = 0;
    while (c[zeros_at_origin] == 0.0) ++zeros_at_origin;
    c.erase(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(zeros_at_origin));

    std::vector<Root> roots;
    if (c.size() > 1) {
        std::vector<Complex> z = companion_eigenvalues(c);
        polish(c, z);
        roots = cluster(z, opts.cluster_tol);
        symmetrize(roots, opts.tol_imag);
    }
    if (zeros_at_origin > 0) roots.push_back({Complex(0.0), static_cast<int>(zeros_at_origin)});

    std::sort(roots.begin(), roots.end(), [](const Root& a, const Root& b) {
        if (a.value.real() != b.value.real()) return a.value.real() < b.value.real();
        return a.value.imag() > b.value.imag();
    });
    result.roots = std::move(roots);
    return result;
}

std::vector<RealRoot> nonneg_real_roots(const RealPolynomial& p, const RootOptions& opts) {
    std::vector<RealRoot> out;
    if (p.degree() <= 0) return out;
    for (const auto& r : complex_roots(p, opts).roots) {
        const double re = r.value.real();
        if (std::abs(r.value.imag()) > opts.tol_imag * std::max(1.0, std::abs(re))) continue;
        if (re < -opts.tol_imag) continue;
        const double v = std::max(0.0, re);
        if (!out.empty() && std::abs(out.back().value - v) <= opts.cluster_tol * (1.0 + v)) {
            out.back().multiplicity += r.multiplicity;
            continue;
        }
        out.push_back({v, r.multiplicity});
    }
    std::sort(out.begin(), out.end(), [](const RealRoot& a, const RealRoot& b) { return a.value < b.value; });
    return out;
}
}  // namespace rlocus
