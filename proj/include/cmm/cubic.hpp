#pragma once

// Real roots of a monic cubic x^3 + c2 x^2 + c1 x + c0.
//
// Three-real-root case uses the trigonometric form of the depressed cubic, the
// one-root case uses Cardano's formula in its cancellation-free arrangement. Each
// root gets one Newton polish step. When the discriminant is within a relative
// 1e-12 of zero the closed forms are ill-conditioned, so the roots are bracketed
// between the critical points of the cubic and refined by bisection.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

namespace cmm::cubic {

struct Monic {
    double c2 = 0.0;
    double c1 = 0.0;
    double c0 = 0.0;

    double operator()(double x) const { return ((x + c2) * x + c1) * x + c0; }
    double derivative(double x) const { return (3.0 * x + 2.0 * c2) * x + c1; }
};

enum class Method { Trigonometric, Cardano, Bisection };

struct Roots {
    std::vector<double> values;  // ascending, repeated roots listed with multiplicity
    Method method = Method::Cardano;
};

namespace detail {

inline double newton_polish(const Monic& f, double x) {
    const double d = f.derivative(x);
    if (d == 0.0 || !std::isfinite(d)) return x;
    const double step = f(x) / d;
    const double polished = x - step;
    return std::abs(f(polished)) <= std::abs(f(x)) ? polished : x;
}

inline double bisect(const Monic& f, double lo, double hi) {
    double flo = f(lo);
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        const double fmid = f(mid);
        if (fmid == 0.0) return mid;
        if ((fmid < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Cauchy bound on the magnitude of any root.
inline double root_bound(const Monic& f) {
    return 1.0 + std::max({std::abs(f.c2), std::abs(f.c1), std::abs(f.c0)});
}

}  // namespace detail

/// Brackets roots on the monotone pieces between critical points. Tangential (double)
/// roots at a critical point are reported twice.
inline std::vector<double> roots_by_bisection(const Monic& f, double tangency_tol = 1e-12) {
    const double bound = detail::root_bound(f);
    std::vector<double> knots{-bound};
    // critical points: 3x^2 + 2 c2 x + c1 = 0
    const double disc = f.c2 * f.c2 - 3.0 * f.c1;
    if (disc > 0.0) {
        const double s = std::sqrt(disc);
        const double q = -(f.c2 + std::copysign(s, f.c2));
        double x1 = q / 3.0;
        double x2 = (q != 0.0) ? f.c1 / q : -x1;
        if (x1 > x2) std::swap(x1, x2);
        knots.push_back(x1);
        knots.push_back(x2);
    }
    knots.push_back(bound);

    const double scale = std::max({1.0, std::abs(f.c0), std::abs(f.c1) * bound, bound * bound * bound});
    // a critical point where f vanishes is a tangency: a double root, and the monotone
    // pieces on either side hold no further root there
    std::vector<bool> tangent(knots.size(), false);
    for (std::size_t i = 1; i + 1 < knots.size(); ++i) tangent[i] = std::abs(f(knots[i])) <= tangency_tol * scale;

    std::vector<double> roots;
    for (std::size_t i = 1; i + 1 < knots.size(); ++i) {
        if (tangent[i]) roots.insert(roots.end(), 2, knots[i]);
    }
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        if (tangent[i] || tangent[i + 1]) continue;
        const double lo = knots[i];
        const double hi = knots[i + 1];
        const double flo = f(lo);
        const double fhi = f(hi);
        if (fhi == 0.0) {
            roots.push_back(hi);
        } else if (flo != 0.0 && (flo < 0.0) != (fhi < 0.0)) {
            roots.push_back(detail::bisect(f, lo, hi));
        }
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

inline Roots solve(const Monic& f) {
    const double c2 = f.c2;
    const double p = f.c1 - c2 * c2 / 3.0;
    const double q = 2.0 * c2 * c2 * c2 / 27.0 - c2 * f.c1 / 3.0 + f.c0;
    const double shift = -c2 / 3.0;
    // discriminant of t^3 + p t + q is -(4p^3 + 27q^2)
    const double a = 4.0 * p * p * p;
    const double b = 27.0 * q * q;
    const double disc = -(a + b);
    const double disc_scale = std::abs(a) + b;

    Roots out;
    if (disc_scale > 0.0 && std::abs(disc) <= 1e-12 * disc_scale) {
        out.method = Method::Bisection;
        out.values = roots_by_bisection(f);
        return out;
    }
    if (disc > 0.0) {
        out.method = Method::Trigonometric;
        const double r = 2.0 * std::sqrt(-p / 3.0);
        const double arg = std::clamp(3.0 * q / (p * r), -1.0, 1.0);
        const double theta = std::acos(arg) / 3.0;
        for (int k = 0; k < 3; ++k) {
            const double t = r * std::cos(theta - 2.0 * std::numbers::pi * k / 3.0);
            out.values.push_back(detail::newton_polish(f, t + shift));
        }
    } else {
        out.method = Method::Cardano;
        // t = u + v with u^3 = -q/2 - sign(q) sqrt(q^2/4 + p^3/27), v = -p/(3u)
        const double inner = std::sqrt(q * q / 4.0 + p * p * p / 27.0);
        const double u3 = -q / 2.0 - std::copysign(inner, q);
        const double u = std::cbrt(u3);
        const double t = (u == 0.0) ? 0.0 : u - p / (3.0 * u);
        out.values.push_back(detail::newton_polish(f, t + shift));
    }
    std::sort(out.values.begin(), out.values.end());
    return out;
}

}  // namespace cmm::cubic
