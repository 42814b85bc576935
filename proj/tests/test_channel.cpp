#include <gtest/gtest.h>

#include <cmath>

#include "daran/channel.hpp"
#include "daran/rng.hpp"
#include "oracles.hpp"

using namespace daran;

namespace {
const D2UEnvParams kSub = D2UEnvParams::suburban();
const D2BEnvParams kSubB = D2BEnvParams::suburban();
}

TEST(LosProbability, VerticalLinkIsCertain) {
    EXPECT_NEAR(los_probability(0.0, 80.0, kSub), 1.0, 1e-12);
}

TEST(LosProbability, GrazingLinkValue) {
    // Sigmoid at theta = 0 for the suburban fit.
    EXPECT_NEAR(los_probability(1000.0, 0.0, kSub), 0.0245174, 1e-6);
}

TEST(LosProbability, MonotoneInElevation) {
    double prev = -1.0;
    for (double h = 0.0; h <= 400.0; h += 5.0) {
        const double p = los_probability(300.0, h, kSub);
        EXPECT_GE(p, prev);
        prev = p;
    }
}

TEST(D2UPathloss, ReducesToFreeSpaceWithoutExcess) {
    D2UEnvParams env = kSub;
    env.eta_los = env.eta_nlos = 0.0;
    const double d = std::hypot(300.0, 40.0);
    const double fspl = 20.0 * std::log10(4.0 * kPi * env.f_c * d / kSpeedOfLight);
    EXPECT_NEAR(d2u_pathloss(300.0, 40.0, env), fspl, 1e-12);
}

TEST(D2UPathloss, SixDbPerDistanceDoubling) {
    // Doubling both coordinates keeps the elevation angle, so only the
    // free-space term grows.
    const double a = d2u_pathloss(100.0, 50.0, kSub);
    const double b = d2u_pathloss(200.0, 100.0, kSub);
    EXPECT_NEAR(b - a, 20.0 * std::log10(2.0), 1e-9);
}

TEST(D2UPathloss, HoverReferenceValues) {
    EXPECT_NEAR(d2u_pathloss(0.0, 80.0, kSub), 78.2138, 1e-3);
    EXPECT_NEAR(d2u_pathloss(0.0, 20.0, kSub), 66.1726, 1e-3);
}

TEST(D2UPathloss, ThrowsAtCoincidentPoints) {
    EXPECT_THROW(d2u_pathloss(0.0, 0.0, kSub), std::invalid_argument);
}

TEST(D2BPathloss, UnitRangeAtOffsetAngleIsFloor) {
    // Log term and excess term both vanish.
    EXPECT_NEAR(d2b_pathloss(1.0, 0.0, {3.04, -23.29, 0.0, 4.14, 20.7, 80.0}), 20.7, 1e-12);
}

TEST(D2BPathloss, ReferenceValueAtExcessDip) {
    const double theta_dip = kSubB.theta0 + kSubB.b_scale;
    EXPECT_NEAR(d2b_pathloss(900.0, theta_dip, kSubB), 75.0378, 1e-3);
}

TEST(D2BPathloss, ExcessTermNonPositiveForSuburbanFit) {
    for (double th = 0.0; th <= 90.0; th += 0.25) {
        const double excess = d2b_pathloss(1.0, th, kSubB) - kSubB.eta0;
        EXPECT_LE(excess, 1e-9) << "theta " << th;
    }
}

TEST(D2BPathloss, RejectsBadArguments) {
    EXPECT_THROW(d2b_pathloss(0.0, 10.0, kSubB), std::invalid_argument);
    EXPECT_THROW(d2b_pathloss(100.0, -1.0, kSubB), std::invalid_argument);
    EXPECT_THROW(d2b_pathloss(100.0, 90.5, kSubB), std::invalid_argument);
}

TEST(ElevationLoss, SlopeSignPattern) {
    const double bracket = kSub.a + std::log(kSub.a) / kSub.b;
    EXPECT_NEAR(bracket, 8.5664, 1e-3);
    EXPECT_LT(elevation_loss_slope(bracket, kSub), 0.0);
    EXPECT_LT(elevation_loss_slope(0.0, kSub), 0.0);
    EXPECT_GT(elevation_loss_slope(89.9, kSub), 0.0);
}

TEST(ElevationLoss, SlopeMatchesFiniteDifference) {
    for (double th : {5.0, 15.0, 20.0, 40.0, 70.0}) {
        const double fd =
            (elevation_loss(th + 1e-5, kSub) - elevation_loss(th - 1e-5, kSub)) / 2e-5;
        EXPECT_NEAR(elevation_loss_slope(th, kSub), fd, 1e-5) << "theta " << th;
    }
}

TEST(OptimalElevationAngle, MatchesGoldenSectionOracle) {
    const double golden = oracle::golden_section(
        [&](double th) { return elevation_loss(th, kSub); }, 0.5, 89.5);
    const double newton = optimal_elevation_angle(kSub);
    EXPECT_NEAR(newton, golden, 1e-4);
    EXPECT_NEAR(newton, 20.338712, 1e-3);
}

TEST(OptimalElevationAngle, DegenerateExcessReturnsZero) {
    D2UEnvParams env = kSub;
    env.eta_nlos = env.eta_los;
    EXPECT_DOUBLE_EQ(optimal_elevation_angle(env), 0.0);
}

TEST(ElevationLoss, QuasiConvexOnRandomTriples) {
    DetRng rng(12345);
    for (int i = 0; i < 2000; ++i) {
        double t1 = rng.uniform(0.0, 89.9), t2 = rng.uniform(0.0, 89.9), t3 = rng.uniform(0.0, 89.9);
        if (t1 > t2) std::swap(t1, t2);
        if (t2 > t3) std::swap(t2, t3);
        if (t1 > t2) std::swap(t1, t2);
        const double mid = elevation_loss(t2, kSub);
        const double ends = std::max(elevation_loss(t1, kSub), elevation_loss(t3, kSub));
        EXPECT_LE(mid, ends + 1e-9);
    }
}

TEST(HeightInterval, MatchesGridScanAtReferenceRanges) {
    // Frozen endpoints from the 0.01 m scan oracle.
    const HeightInterval i700 = d2b_feasible_height_interval(700.0, kSubB);
    ASSERT_FALSE(i700.empty);
    EXPECT_NEAR(i700.lower, 0.0, 1e-9);
    EXPECT_NEAR(i700.upper, 52.905, 0.02);

    const HeightInterval i900 = d2b_feasible_height_interval(900.0, kSubB);
    EXPECT_NEAR(i900.upper, 50.892, 0.02);

    const HeightInterval i130 = d2b_feasible_height_interval(130.0, kSubB);
    EXPECT_NEAR(i130.upper, 34.501, 0.02);
}

TEST(HeightInterval, AgreesWithScanOracleOnRandomRanges) {
    DetRng rng(777);
    for (int i = 0; i < 40; ++i) {
        const double r = rng.uniform(95.0, 1300.0);
        const auto scan = oracle::scan_height_range(r, kSubB, 400.0);
        const HeightInterval iv = d2b_feasible_height_interval(r, kSubB);
        ASSERT_EQ(iv.empty, scan.empty) << "r " << r;
        if (iv.empty) continue;
        EXPECT_NEAR(iv.lower, scan.lower, 0.02) << "r " << r;
        EXPECT_NEAR(iv.upper, scan.upper, 0.02) << "r " << r;
    }
}

TEST(HeightInterval, EndpointsSitOnTheCap) {
    // r = 1300 sits past the point where ground level itself breaks the cap,
    // so its interval has a strictly positive lower endpoint.
    for (double r : {200.0, 700.0, 1100.0, 1300.0}) {
        const HeightInterval iv = d2b_feasible_height_interval(r, kSubB);
        ASSERT_FALSE(iv.empty);
        const double pl_up = d2b_pathloss(r, elevation_deg(r, iv.upper), kSubB);
        EXPECT_NEAR(pl_up, kSubB.p_db_max, 0.01) << "r " << r;
        if (iv.lower > 0.0) {
            const double pl_lo = d2b_pathloss(r, elevation_deg(r, iv.lower), kSubB);
            EXPECT_NEAR(pl_lo, kSubB.p_db_max, 0.01) << "r " << r;
        }
    }
}

TEST(HeightInterval, EmptyFarOut) {
    EXPECT_TRUE(d2b_feasible_height_interval(1400.0, kSubB).empty);
}

TEST(HeightInterval, UncappedEnvironmentIsUnbounded) {
    const D2BEnvParams env = D2BEnvParams::suburban(std::numeric_limits<double>::infinity());
    const HeightInterval iv = d2b_feasible_height_interval(500.0, env);
    ASSERT_FALSE(iv.empty);
    EXPECT_NEAR(iv.lower, 0.0, 1e-9);
    EXPECT_GT(iv.upper, 1e4);
}

TEST(HorizontalRadius, MatchesScanOracle) {
    for (double h : {0.0, 20.0, 34.0, 45.0, 60.0, 80.0, 120.0}) {
        const double impl = d2b_feasible_horizontal_radius(h, kSubB, 900.0);
        const double scan = oracle::scan_horizontal_radius(h, kSubB, 900.0);
        EXPECT_NEAR(impl, scan, 0.2) << "h " << h;
    }
    EXPECT_NEAR(d2b_feasible_horizontal_radius(80.0, kSubB, 900.0), 89.3, 0.2);
}

TEST(HorizontalRadius, UnconstrainedClampsToCap) {
    const D2BEnvParams env = D2BEnvParams::suburban(std::numeric_limits<double>::infinity());
    EXPECT_DOUBLE_EQ(d2b_feasible_horizontal_radius(50.0, env, 900.0), 900.0);
}

TEST(RegionCache, RadiusMatchesDirectComputation) {
    const D2BRegionCache cache(kSubB, 900.0);
    for (double h : {0.0, 15.0, 30.0, 34.2, 40.0, 51.0, 55.0, 70.0, 100.0, 300.0}) {
        const double direct = d2b_feasible_horizontal_radius(h, kSubB, 900.0);
        EXPECT_NEAR(cache.radius(h), direct, 0.05) << "h " << h;
    }
}

TEST(RegionCache, RadiusNonIncreasingInHeight) {
    const D2BRegionCache cache(kSubB, 900.0);
    double prev = std::numeric_limits<double>::infinity();
    for (double h = 0.0; h <= 200.0; h += 1.0) {
        const double r = cache.radius(h);
        EXPECT_LE(r, prev + 1e-6) << "h " << h;
        prev = r;
    }
}

TEST(RegionCache, MinCeilingAndConservativeCeilingLookup) {
    const D2BRegionCache cache(kSubB, 900.0);
    EXPECT_NEAR(cache.min_ceiling(), 34.50, 0.05);
    DetRng rng(99);
    for (int i = 0; i < 50; ++i) {
        const double r = rng.uniform(90.0, 900.0);
        const double approx = cache.ceiling_at(r, 0.25);
        const HeightInterval iv = d2b_feasible_height_interval(r, kSubB);
        ASSERT_FALSE(iv.empty);
        EXPECT_LE(approx, iv.upper + 1e-6) << "r " << r;
        EXPECT_GE(approx, iv.upper - 1.5) << "r " << r;
    }
}

TEST(EnvParams, InvariantsEnforced) {
    D2UEnvParams bad = kSub;
    bad.eta_nlos = -1.0;
    EXPECT_THROW(bad.validate(), std::invalid_argument);
    D2BEnvParams badb = kSubB;
    badb.b_scale = 0.0;
    EXPECT_THROW(badb.validate(), std::invalid_argument);
}
