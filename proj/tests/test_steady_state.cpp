#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "cmm/steady_state.hpp"

using namespace cmm;

namespace {

SystemParams fig2(double kerr_ratio, DriveDirection dir) { return presets::with_kerr_ratio(kerr_ratio, dir).scaled(presets::mechanical_frequency); }

// Independent root oracle: the cubic is monotone between the switching points, so
// bisection on each monotone piece of [0, 10 eta_a eps^2 / kappa'^2] finds every root.
std::vector<double> oracle_roots(const ReducedCoefficients& c, double eps) {
    const double rhs = c.eta_a * eps * eps;
    const double top = 10.0 * rhs / (c.kappa_m_prime * c.kappa_m_prime);
    auto f = [&](double M) {
        const double s = c.delta_m_prime + c.k0_prime * M;
        return (c.kappa_m_prime * c.kappa_m_prime + s * s) * M - rhs;
    };
    std::vector<double> knots{0.0};
    const double K = c.k0_prime, D = c.delta_m_prime, k2 = c.kappa_m_prime * c.kappa_m_prime;
    if (K != 0.0) {
        const double disc = 16.0 * K * K * D * D - 12.0 * K * K * (k2 + D * D);
        if (disc > 0.0) {
            for (double sgn : {-1.0, 1.0}) {
                const double M = (-4.0 * K * D + sgn * std::sqrt(disc)) / (6.0 * K * K);
                if (M > 0.0 && M < top) knots.push_back(M);
            }
        }
    }
    knots.push_back(top);
    std::sort(knots.begin(), knots.end());
    std::vector<double> roots;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        double lo = knots[i], hi = knots[i + 1];
        if ((f(lo) < 0.0) == (f(hi) < 0.0)) continue;
        for (int it = 0; it < 300 && lo < hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (mid == lo || mid == hi) break;
            ((f(mid) < 0.0) == (f(lo) < 0.0) ? lo : hi) = mid;
        }
        roots.push_back(0.5 * (lo + hi));
    }
    return roots;
}

int count_roots(const ReducedCoefficients& c, double eps) {
    return static_cast<int>(solve_magnon_number(c, eps).size());
}

}  // namespace

TEST(ReducedCoefficients, KerrBalancesMechanics) {
    const auto c = reduced_coefficients(fig2(1.0, DriveDirection::Clockwise));
    EXPECT_EQ(c.k0_prime, 0.0);
    EXPECT_FALSE(critical_drive(c).has_value());
}

TEST(ReducedCoefficients, DecoupledCavity) {
    auto p = fig2(0.1, DriveDirection::Clockwise);
    p.g_ma = 0.0;
    const auto c = reduced_coefficients(p);
    EXPECT_EQ(c.eta_a, 0.0);
    EXPECT_EQ(c.kappa_m_prime, p.kappa_m);
    EXPECT_EQ(c.delta_m_prime, p.delta_m());
}

TEST(ReducedCoefficients, BaselineEtaA) {
    const auto c = reduced_coefficients(fig2(1.0, DriveDirection::Clockwise));
    // 0.2^2 / (0.1^2 + (-1 - 0.2)^2)
    EXPECT_NEAR(c.eta_a, 0.04 / 1.45, 1e-12);
    EXPECT_NEAR(c.eta_a, 0.0275862068965517, 1e-12);
    EXPECT_GT(c.kappa_m_prime, 0.1);
    EXPECT_GT(c.eta_b, 0.0);
}

TEST(MagnonNumber, UndrivenHasZeroRoot) {
    const auto roots = solve_magnon_number(reduced_coefficients(fig2(0.1, DriveDirection::Clockwise)), 0.0);
    ASSERT_EQ(roots.size(), 1u);
    EXPECT_EQ(roots[0].M, 0.0);
    EXPECT_EQ(roots[0].branch, Branch::Unique);
}

TEST(MagnonNumber, LinearRegimeSlope) {
    const auto c = reduced_coefficients(fig2(1.0, DriveDirection::Clockwise));
    const double slope = c.eta_a / (c.kappa_m_prime * c.kappa_m_prime + c.delta_m_prime * c.delta_m_prime);
    for (double eps : {1.0, 10.0, 300.0, 5000.0}) {
        const auto roots = solve_magnon_number(c, eps);
        ASSERT_EQ(roots.size(), 1u);
        EXPECT_NEAR(roots[0].M / (eps * eps), slope, 1e-12 * slope);
    }
}

TEST(MagnonNumber, ThreeRootsInsideBistableWindow) {
    const auto c = reduced_coefficients(fig2(0.1, DriveDirection::Clockwise));
    const double eps = 1.2 * critical_drive(c).value();
    const auto roots = solve_magnon_number(c, eps);
    const auto oracle = oracle_roots(c, eps);
    ASSERT_EQ(oracle.size(), 3u);
    ASSERT_EQ(roots.size(), 3u);
    EXPECT_EQ(roots[0].branch, Branch::Lower);
    EXPECT_EQ(roots[1].branch, Branch::Middle);
    EXPECT_EQ(roots[2].branch, Branch::Upper);
    for (int i = 0; i < 3; ++i) {
        EXPECT_NEAR(roots[i].M, oracle[i], 1e-9 * oracle[i]);
        EXPECT_LE(std::abs(c.residual(roots[i].M, eps)), 1e-9 * c.eta_a * eps * eps);
    }
    EXPECT_LT(roots[0].M, roots[1].M);
    EXPECT_LT(roots[1].M, roots[2].M);
}

TEST(MagnonNumber, ClosedFormAgreesWithBisectionOnRandomCoefficients) {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int three = 0;
    for (int k = 0; k < 1000; ++k) {
        ReducedCoefficients c;
        c.kappa_m_prime = 0.05 + 0.5 * u(rng);
        c.delta_m_prime = 4.0 * (u(rng) - 0.5);
        c.eta_a = 0.001 + 0.2 * u(rng);
        const double mag = std::pow(10.0, -8.0 + 4.0 * u(rng));
        c.k0_prime = (u(rng) < 0.5 ? -1.0 : 1.0) * mag;
        const double eps = std::pow(10.0, 4.0 * u(rng));
        const auto roots = solve_magnon_number(c, eps);
        const auto oracle = oracle_roots(c, eps);
        if (oracle.size() != roots.size()) {
            // only a near-tangent pair may be merged by one route and split by the other
            const auto rep = bistability(c);
            ASSERT_TRUE(rep.bistable) << "case " << k;
            continue;
        }
        if (roots.size() == 3) ++three;
        for (std::size_t i = 0; i < roots.size(); ++i) {
            EXPECT_NEAR(roots[i].M, oracle[i], 1e-8 * oracle[i]) << "case " << k;
            EXPECT_LE(std::abs(c.residual(roots[i].M, eps)), 1e-9 * c.eta_a * eps * eps) << "case " << k;
        }
    }
    EXPECT_GT(three, 20);
}

TEST(MagnonNumber, ThreeRootsOnlyInsideTurningWindow) {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 300; ++k) {
        ReducedCoefficients c;
        c.kappa_m_prime = 0.05 + 0.3 * u(rng);
        c.delta_m_prime = 3.0 * (u(rng) - 0.5);
        c.eta_a = 0.01 + 0.1 * u(rng);
        c.k0_prime = (u(rng) < 0.5 ? -1.0 : 1.0) * 1e-5;
        const auto rep = bistability(c);
        const double eps = std::pow(10.0, 1.0 + 3.0 * u(rng));
        const auto roots = solve_magnon_number(c, eps);
        if (roots.size() == 3 && roots[0].M != roots[1].M && roots[1].M != roots[2].M) {
            ASSERT_TRUE(rep.bistable);
            EXPECT_GT(c.delta_m_prime * c.delta_m_prime - 3.0 * c.kappa_m_prime * c.kappa_m_prime, 0.0);
            const double lo = std::min(rep.turning_drives[0], rep.turning_drives[1]);
            const double hi = std::max(rep.turning_drives[0], rep.turning_drives[1]);
            EXPECT_GT(eps, lo * (1 - 1e-9));
            EXPECT_LT(eps, hi * (1 + 1e-9));
        }
    }
}

TEST(MagnonNumber, NonreciprocalUnlessUncoupled) {
    const auto cw = reduced_coefficients(fig2(0.1, DriveDirection::Clockwise));
    const auto ccw = reduced_coefficients(fig2(0.1, DriveDirection::Counterclockwise));
    for (double eps : {10.0, 100.0, 1000.0}) {
        EXPECT_NE(solve_magnon_number(cw, eps).front().M, solve_magnon_number(ccw, eps).front().M);
    }
    auto p = fig2(0.1, DriveDirection::Clockwise);
    auto q = fig2(0.1, DriveDirection::Counterclockwise);
    p.g_ma = q.g_ma = 0.0;
    EXPECT_EQ(solve_magnon_number(reduced_coefficients(p), 100.0).front().M,
              solve_magnon_number(reduced_coefficients(q), 100.0).front().M);
}

TEST(CriticalDrive, AbsentInLinearRegime) {
    EXPECT_FALSE(critical_drive(reduced_coefficients(fig2(1.0, DriveDirection::Clockwise))).has_value());
}

TEST(CriticalDrive, AbsentWhenSignsAgree) {
    ReducedCoefficients c{0.1, 1.0, 1e-6, 0.02, 1e-6};
    EXPECT_FALSE(critical_drive(c).has_value());
}

TEST(CriticalDrive, SwitchingPointsCoalesceAtThreshold) {
    // Delta_m'^2 = 3 kappa_m'^2: the two switching points merge at -2 Delta_m' / (3 K0')
    ReducedCoefficients c;
    c.kappa_m_prime = 0.1;
    c.delta_m_prime = std::sqrt(3.0) * 0.1;
    c.eta_a = 0.03;
    c.k0_prime = -1.8e-6;
    const auto rep = bistability(c);
    ASSERT_EQ(rep.turning_points.size(), 1u);
    const double merged = -2.0 * c.delta_m_prime / (3.0 * c.k0_prime);
    EXPECT_NEAR(rep.turning_points[0], merged, 1e-6 * merged);
    ASSERT_TRUE(rep.epsilon_d_critical.has_value());
    EXPECT_NEAR(*rep.epsilon_d_critical, c.drive_for(merged), 1e-6 * *rep.epsilon_d_critical);
    EXPECT_FALSE(rep.bistable);
}

TEST(CriticalDrive, NonreciprocalThresholds) {
    const auto cw = reduced_coefficients(fig2(0.1, DriveDirection::Clockwise));
    const auto ccw = reduced_coefficients(fig2(0.1, DriveDirection::Counterclockwise));
    const double ecw = critical_drive(cw).value();
    const double eccw = critical_drive(ccw).value();
    EXPECT_GT(std::abs(ecw - eccw), 1e-3 * ecw);
}

TEST(Bistability, OnsetFoundByBisectionIsLowerTurningDrive) {
    for (auto dir : {DriveDirection::Clockwise, DriveDirection::Counterclockwise}) {
        const auto c = reduced_coefficients(fig2(0.1, dir));
        const auto rep = bistability(c);
        ASSERT_TRUE(rep.bistable);
        double lo = 0.0, hi = 1.0;
        while (count_roots(c, hi) < 3) hi *= 1.5;
        lo = hi / 1.5;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            (count_roots(c, mid) == 3 ? hi : lo) = mid;
        }
        const double onset = *std::min_element(rep.turning_drives.begin(), rep.turning_drives.end());
        EXPECT_NEAR(hi, onset, 1e-6 * onset);
        // every turning point satisfies the switching-point quadratic
        for (double M : rep.turning_points) {
            const double q = 3.0 * c.k0_prime * c.k0_prime * M * M + 4.0 * c.k0_prime * c.delta_m_prime * M +
                             c.kappa_m_prime * c.kappa_m_prime + c.delta_m_prime * c.delta_m_prime;
            EXPECT_LE(std::abs(q), 1e-9 * (c.kappa_m_prime * c.kappa_m_prime + c.delta_m_prime * c.delta_m_prime));
        }
    }
}

TEST(MeanFields, UndrivenStateIsZero) {
    auto p = fig2(0.1, DriveDirection::Clockwise);
    p.epsilon_d = 0.0;
    const auto st = mean_fields(p, 0.0);
    EXPECT_EQ(st.a_s, complex(0.0, 0.0));
    EXPECT_EQ(st.b_s, complex(0.0, 0.0));
    EXPECT_EQ(st.m_s, complex(0.0, 0.0));
}

TEST(MeanFields, ClosureAndMechanicalAmplitude) {
    for (double ratio : {1.0, 0.1}) {
        for (auto dir : {DriveDirection::Clockwise, DriveDirection::Counterclockwise}) {
            auto p = fig2(ratio, dir);
            for (double eps : {5.0, 400.0, 600.0, 2500.0}) {
                p.epsilon_d = eps;
                for (const auto& st : steady_states(p)) {
                    const double M = st.magnon_number;
                    EXPECT_LE(std::abs(std::norm(st.m_s) - M), 1e-9 * M);
                    const double expected = p.g_mb * M / std::hypot(p.kappa_b, p.omega_b);
                    EXPECT_NEAR(std::abs(st.b_s), expected, 1e-12 * expected);
                    EXPECT_EQ(st.m_s.imag(), 0.0);
                    EXPECT_GE(st.m_s.real(), 0.0);
                    // the fields satisfy the stationary balance equations
                    const complex i{0.0, 1.0};
                    const complex ra = complex(p.kappa_a, p.delta_a_shifted()) * st.a_s + i * p.g_ma * st.m_s;
                    const complex rm = complex(p.kappa_m, st.delta_m_tilde + st.delta_k) * st.m_s + i * p.g_ma * st.a_s;
                    EXPECT_NEAR(std::abs(ra), eps, 1e-9 * eps);  // |drive| after the phase rotation
                    EXPECT_LE(std::abs(rm), 1e-9 * eps);
                }
            }
        }
    }
}

TEST(MeanFields, RejectsNonRoot) {
    auto p = fig2(0.1, DriveDirection::Clockwise);
    p.epsilon_d = 100.0;
    const double M = solve_magnon_number(reduced_coefficients(p), p.epsilon_d).front().M;
    EXPECT_THROW(mean_fields(p, 1.01 * M), Error);
}

TEST(Hysteresis, LinearRegimeHasNoLoop) {
    const auto p = fig2(1.0, DriveDirection::Clockwise);
    std::vector<double> grid;
    for (int k = 0; k <= 200; ++k) grid.push_back(10.0 * k);
    const auto t = hysteresis_sweep(p, grid);
    for (std::size_t k = 0; k < grid.size(); ++k) EXPECT_EQ(t.M_up[k], t.M_down[k]);
}

TEST(Hysteresis, LoopBetweenTurningDrives) {
    for (auto dir : {DriveDirection::Clockwise, DriveDirection::Counterclockwise}) {
        const auto p = fig2(0.1, dir);
        const auto rep = bistability(reduced_coefficients(p));
        std::vector<double> grid;
        const double step = 5.0;
        for (int k = 0; k <= 500; ++k) grid.push_back(step * k);
        const auto t = hysteresis_sweep(p, grid);
        const double onset = std::min(rep.turning_drives[0], rep.turning_drives[1]);
        const double vanish = std::max(rep.turning_drives[0], rep.turning_drives[1]);
        ASSERT_LT(vanish, grid.back());
        bool differs = false;
        double up_jump = -1.0, down_jump = -1.0;
        for (std::size_t k = 1; k < grid.size(); ++k) {
            if (t.M_up[k] != t.M_down[k]) differs = true;
            if (t.branch_up[k - 1] == Branch::Lower && t.branch_up[k] != Branch::Lower) up_jump = grid[k];
            if (t.branch_down[k] == Branch::Upper && t.branch_down[k - 1] != Branch::Upper) down_jump = grid[k];
        }
        EXPECT_TRUE(differs);
        EXPECT_LE(std::abs(up_jump - vanish), step);
        EXPECT_LE(std::abs(down_jump - onset), step);
        // outside the window both traces agree
        for (std::size_t k = 0; k < grid.size(); ++k) {
            if (grid[k] < onset || grid[k] > vanish) EXPECT_EQ(t.M_up[k], t.M_down[k]);
        }
    }
}

TEST(Hysteresis, RejectsDescendingGrid) {
    EXPECT_THROW(hysteresis_sweep(fig2(0.1, DriveDirection::Clockwise), {2.0, 1.0}), Error);
}

TEST(Validity, ZeroDriveAndMonotone) {
    auto p = fig2(1.0, DriveDirection::Clockwise);
    p.epsilon_d = 0.0;
    EXPECT_EQ(linearization_validity(p, steady_states(p).front()), 0.0);
    double prev = 0.0;
    for (double eps = 1.0; eps < 1e4; eps *= 2.0) {
        p.epsilon_d = eps;
        const double margin = linearization_validity(p, steady_states(p).front());
        EXPECT_GT(margin, prev);
        prev = margin;
    }
}

TEST(Validity, MarginEqualsMagnonNumber) {
    // |m_s|^2 = eps^2 g^2 / |...|^2 is the margin itself, so they coincide on every solved state
    auto p = fig2(0.1, DriveDirection::Counterclockwise);
    for (double eps : {3.0, 500.0, 900.0}) {
        p.epsilon_d = eps;
        for (const auto& st : steady_states(p)) {
            EXPECT_NEAR(linearization_validity(p, st), st.magnon_number, 1e-9 * st.magnon_number);
        }
    }
}
