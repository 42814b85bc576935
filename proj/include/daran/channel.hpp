#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "daran/errors.hpp"
#include "daran/geometry.hpp"

namespace daran {

// Elevation angle in degrees from a ground point at horizontal range r to an
// aerial point at height h. Zero range maps to the vertical ray (90 deg).
inline double elevation_deg(double r, double h) {
    if (r < 0.0 || h < 0.0) throw std::invalid_argument("elevation_deg: negative geometry");
    if (r == 0.0 && h == 0.0) throw std::invalid_argument("elevation_deg: coincident points");
    if (r == 0.0) return 90.0;
    return rad_to_deg(std::atan(h / r));
}

// Air-to-ground channel environment: sigmoid line-of-sight model plus
// LoS/NLoS excess losses on top of free space.
struct D2UEnvParams {
    double a;         // LoS sigmoid scale (degree-fitted, dimensionless)
    double b;         // LoS sigmoid slope, 1/deg
    double eta_los;   // excess loss under LoS, dB
    double eta_nlos;  // excess loss under NLoS, dB
    double f_c;       // carrier frequency, Hz

    void validate() const {
        if (!(a > 0.0) || !(b > 0.0))
            throw std::invalid_argument("D2UEnvParams: a and b must be positive");
        if (eta_nlos < eta_los)
            throw std::invalid_argument("D2UEnvParams: eta_nlos below eta_los");
        if (!(f_c > 0.0)) throw std::invalid_argument("D2UEnvParams: f_c must be positive");
    }

    static D2UEnvParams suburban() { return {4.88, 0.43, 0.1, 21.0, 2.4e9}; }
};

// Drone-to-base-station channel environment: log-distance in the horizontal
// range plus an angle-dependent excess term with a dip near theta0 + B.
struct D2BEnvParams {
    double alpha;     // horizontal-distance pathloss exponent
    double a_excess;  // excess-loss scale, dB (negative in measured fits)
    double theta0;    // excess-loss angle offset, deg
    double b_scale;   // excess-loss angle scale, deg
    double eta0;      // excess-loss floor, dB
    double p_db_max;  // backhaul pathloss cap, dB (+inf disables the cap)

    void validate() const {
        if (!(alpha > 0.0)) throw std::invalid_argument("D2BEnvParams: alpha must be positive");
        if (!(b_scale > 0.0)) throw std::invalid_argument("D2BEnvParams: b_scale must be positive");
    }

    static D2BEnvParams suburban(double cap = 80.0) {
        return {3.04, -23.29, -3.61, 4.14, 20.7, cap};
    }
};

// Closed height range [lower, upper] that keeps the backhaul link under its
// pathloss cap at a fixed horizontal range.
struct HeightInterval {
    double lower = 0.0;
    double upper = 0.0;
    bool empty = true;

    bool contains(double h, double tol = 0.0) const {
        return !empty && h >= lower - tol && h <= upper + tol;
    }
};

// Probability of a line-of-sight link between a ground user at horizontal
// range r_du and a drone at height h.
inline double los_probability(double r_du, double h, const D2UEnvParams& env) {
    const double theta = elevation_deg(r_du, h);
    return 1.0 / (1.0 + env.a * std::exp(-env.b * (theta - env.a)));
}

// Expected drone-to-user pathloss in dB: free-space term over the 3D distance
// plus the LoS-probability mix of the two excess losses.
inline double d2u_pathloss(double r_du, double h, const D2UEnvParams& env) {
    const double d = std::hypot(r_du, h);
    if (!(d > 0.0)) throw std::invalid_argument("d2u_pathloss: zero 3D distance");
    const double p = los_probability(r_du, h, env);
    const double fspl = 20.0 * std::log10(4.0 * kPi * env.f_c * d / kSpeedOfLight);
    return fspl + p * env.eta_los + (1.0 - p) * env.eta_nlos;
}

// Drone-to-base-station pathloss in dB at horizontal range r_db and elevation
// angle theta_deg (as seen from the base station).
inline double d2b_pathloss(double r_db, double theta_deg, const D2BEnvParams& env) {
    if (!(r_db > 0.0)) throw std::invalid_argument("d2b_pathloss: non-positive range");
    if (theta_deg < 0.0 || theta_deg > 90.0)
        throw std::invalid_argument("d2b_pathloss: angle outside [0, 90] deg");
    const double excess =
        env.a_excess * (theta_deg - env.theta0) * std::exp((env.theta0 - theta_deg) / env.b_scale);
    return 10.0 * env.alpha * std::log10(r_db) + excess + env.eta0;
}

// Angle-dependent part of the drone-to-user pathloss at fixed horizontal
// range: secant spreading term plus the LoS/NLoS excess mix. Strictly
// quasi-convex on [0, 90) when eta_nlos > eta_los.
inline double elevation_loss(double theta_deg, const D2UEnvParams& env) {
    const double sec = 1.0 / std::cos(deg_to_rad(theta_deg));
    const double mix =
        (env.eta_los - env.eta_nlos) / (1.0 + env.a * std::exp(-env.b * (theta_deg - env.a)));
    return 20.0 * std::log10(sec) + mix;
}

// d(elevation_loss)/d(theta) with theta in degrees. The spreading term picks
// up a pi/180 factor so both terms are per-degree slopes.
inline double elevation_loss_slope(double theta_deg, const D2UEnvParams& env) {
    const double spread =
        (20.0 / std::log(10.0)) * std::tan(deg_to_rad(theta_deg)) * (kPi / 180.0);
    const double e = std::exp(-env.b * (theta_deg - env.a));
    const double den = 1.0 + env.a * e;
    const double mix = env.a * env.b * (env.eta_los - env.eta_nlos) * e / (den * den);
    return spread + mix;
}

// Second derivative of elevation_loss, per degree squared.
inline double elevation_loss_curvature(double theta_deg, const D2UEnvParams& env) {
    const double c = std::cos(deg_to_rad(theta_deg));
    const double spread = (20.0 / std::log(10.0)) / (c * c) * (kPi / 180.0) * (kPi / 180.0);
    const double e = std::exp(-env.b * (theta_deg - env.a));
    const double den = 1.0 + env.a * e;
    const double diff = env.eta_nlos - env.eta_los;
    const double mix = env.a * env.b * env.b * diff * e * (den - 2.0 * env.a * e) / (den * den * den);
    return spread + mix;
}

// Elevation angle (degrees) minimizing elevation_loss: safeguarded Newton on
// the slope, bracketed where the slope changes sign, bisection fallback.
// Returns 0 when the NLoS penalty does not exceed the LoS one (the loss is
// then non-decreasing in theta).
inline double optimal_elevation_angle(const D2UEnvParams& env) {
    env.validate();
    if (env.eta_nlos <= env.eta_los) return 0.0;

    // Below a + ln(a)/b the sigmoid mix dominates and the slope is negative;
    // near 90 deg the secant term dominates and it is positive.
    double lo = env.a + std::log(env.a) / env.b;
    if (!(lo > 0.0) || lo >= 89.0 || !(elevation_loss_slope(lo, env) < 0.0)) lo = 0.0;
    double hi = 90.0 - 1e-7;
    if (elevation_loss_slope(lo, env) >= 0.0) return lo;

    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double fx = elevation_loss_slope(x, env);
        if (fx < 0.0) lo = x; else hi = x;
        const double curv = elevation_loss_curvature(x, env);
        double next = (curv > 0.0) ? x - fx / curv : 0.5 * (lo + hi);
        if (!(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - x) <= 1e-6 || hi - lo <= 1e-9) return next;
        x = next;
    }
    return x;
}

namespace detail {

// Bisect the elevation angle where the backhaul pathloss crosses its cap.
// One side of [th_lo, th_hi] must be under the cap, the other over.
inline double bisect_cap_crossing(double r_db, const D2BEnvParams& env, double th_lo,
                                  double th_hi, bool feasible_at_hi) {
    for (int it = 0; it < 60 && th_hi - th_lo > 1e-5; ++it) {
        const double mid = 0.5 * (th_lo + th_hi);
        const bool ok = d2b_pathloss(r_db, mid, env) <= env.p_db_max;
        if (ok == feasible_at_hi) th_hi = mid; else th_lo = mid;
    }
    return feasible_at_hi ? th_hi : th_lo;
}

}  // namespace detail

// Height range keeping the backhaul under its cap at horizontal range r_db.
// The cap profile over the elevation angle dips at theta0 + b_scale; the
// interval is the angle range around that dip mapped back to heights. Heights
// are reported up to an elevation of 90 - 1e-3 deg.
inline HeightInterval d2b_feasible_height_interval(double r_db, const D2BEnvParams& env) {
    if (!(r_db > 0.0))
        throw std::invalid_argument("d2b_feasible_height_interval: non-positive range");
    env.validate();

    const double theta_cap = 90.0 - 1e-3;
    const auto feasible = [&](double th) { return d2b_pathloss(r_db, th, env) <= env.p_db_max; };

    const double theta_dip = std::clamp(env.theta0 + env.b_scale, 0.0, theta_cap);
    if (!feasible(theta_dip)) return {};

    double th_lo = 0.0;
    if (!feasible(0.0)) th_lo = detail::bisect_cap_crossing(r_db, env, 0.0, theta_dip, true);
    double th_hi = theta_cap;
    if (!feasible(theta_cap))
        th_hi = detail::bisect_cap_crossing(r_db, env, theta_dip, theta_cap, false);

    HeightInterval out;
    out.empty = false;
    out.lower = (th_lo == 0.0) ? 0.0 : r_db * tan_deg(th_lo);
    out.upper = r_db * tan_deg(th_hi);
    return out;
}

// Largest horizontal range from the base station that stays under the
// backhaul cap at height h (outer boundary; interior infeasible pockets are
// ignored). Unbounded results are clamped to r_cap.
inline double d2b_feasible_horizontal_radius(double h, const D2BEnvParams& env, double r_cap) {
    if (h < 0.0)
        throw std::invalid_argument("d2b_feasible_horizontal_radius: negative height");
    if (!(r_cap > 0.0))
        throw std::invalid_argument("d2b_feasible_horizontal_radius: non-positive cap");
    env.validate();

    const auto feasible = [&](double r) {
        return d2b_pathloss(r, elevation_deg(r, h), env) <= env.p_db_max;
    };
    if (feasible(r_cap)) return r_cap;

    // Walk inward to find the outermost feasible range, then bisect.
    const int steps = 4096;
    double inner = -1.0, outer = r_cap;
    for (int i = steps - 1; i >= 1; --i) {
        const double r = r_cap * static_cast<double>(i) / steps;
        if (feasible(r)) { inner = r; break; }
        outer = r;
    }
    if (inner < 0.0) return 0.0;
    while (outer - inner > 1e-4) {
        const double mid = 0.5 * (inner + outer);
        if (feasible(mid)) inner = mid; else outer = mid;
    }
    return inner;
}

// Tabulated backhaul feasibility geometry over the coverage disk. The ceiling
// u(r) is sampled on a fixed range grid; the outer radius R(h) is recovered
// through the suffix maximum of u (R is non-increasing in h) and refined with
// a local bisection per query.
class D2BRegionCache {
  public:
    D2BRegionCache(const D2BEnvParams& env, double r_cap) : env_(env), r_cap_(r_cap) {
        if (!(r_cap > 0.0)) throw std::invalid_argument("D2BRegionCache: non-positive cap");
        env.validate();
        const int n = 4096;
        grid_r_.resize(n);
        ceiling_.resize(n);
        suffix_max_.resize(n);
        min_ceiling_ = std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i) {
            grid_r_[i] = r_cap * static_cast<double>(i + 1) / n;
            const HeightInterval iv = d2b_feasible_height_interval(grid_r_[i], env_);
            ceiling_[i] = iv.empty ? -1.0 : iv.upper;
            // Ranges where even the vertical ray stays under the cap have no
            // effective ceiling.
            if (!iv.empty && d2b_pathloss(grid_r_[i], 90.0 - 1e-3, env_) <= env_.p_db_max)
                ceiling_[i] = std::numeric_limits<double>::infinity();
            if (ceiling_[i] >= 0.0 && std::isfinite(ceiling_[i]))
                min_ceiling_ = std::min(min_ceiling_, ceiling_[i]);
        }
        double run = -1.0;
        for (int i = n - 1; i >= 0; --i) {
            run = std::max(run, ceiling_[i]);
            suffix_max_[i] = run;
        }
    }

    const D2BEnvParams& env() const { return env_; }
    double r_cap() const { return r_cap_; }

    // Minimum finite ceiling across the disk; +inf when no range has one.
    double min_ceiling() const { return min_ceiling_; }

    // Interpolated height ceiling at range r, pulled inward by `margin` so
    // clamped heights stay strictly feasible despite grid error. Infinite
    // where the vertical ray is under the cap; -inf where nothing is.
    double ceiling_at(double r, double margin = 0.0) const {
        const int n = static_cast<int>(grid_r_.size());
        const double step = r_cap_ / n;
        if (!(r > 0.0)) r = step;
        if (r >= r_cap_) {
            const double c = ceiling_[n - 1];
            return c < 0.0 ? -std::numeric_limits<double>::infinity() : c - margin;
        }
        const int i = std::min(n - 2, std::max(0, static_cast<int>(r / step) - 1));
        const double c0 = ceiling_[i], c1 = ceiling_[i + 1];
        if (c0 < 0.0 || c1 < 0.0) return -std::numeric_limits<double>::infinity();
        // Lower envelope of the two bracketing samples; margin absorbs the
        // residual in-cell variation.
        return std::min(c0, c1) - margin;
    }

    // Outer feasibility radius at height h, clamped to the coverage cap.
    double radius(double h) const {
        if (h < 0.0) throw std::invalid_argument("D2BRegionCache::radius: negative height");
        const int n = static_cast<int>(grid_r_.size());
        if (suffix_max_[n - 1] >= h) return r_cap_;
        if (suffix_max_[0] < h) return 0.0;
        // Largest grid index whose suffix still reaches h.
        int lo = 0, hi = n - 1;
        while (lo + 1 < hi) {
            const int mid = (lo + hi) / 2;
            if (suffix_max_[mid] >= h) lo = mid; else hi = mid;
        }
        double inner = grid_r_[lo], outer = grid_r_[lo + 1];
        const auto feasible = [&](double r) {
            return d2b_pathloss(r, elevation_deg(r, h), env_) <= env_.p_db_max;
        };
        if (!feasible(inner)) {
            // Grid ceiling slightly above the true boundary at this height;
            // fall back to the exact scan.
            return d2b_feasible_horizontal_radius(h, env_, r_cap_);
        }
        while (outer - inner > 1e-4) {
            const double mid = 0.5 * (inner + outer);
            if (feasible(mid)) inner = mid; else outer = mid;
        }
        return inner;
    }

  private:
    D2BEnvParams env_;
    double r_cap_;
    double min_ceiling_;
    std::vector<double> grid_r_;
    std::vector<double> ceiling_;
    std::vector<double> suffix_max_;
};

// Process-wide cache registry: the tabulation costs a few hundred
// milliseconds and identical environments recur across runs.
inline std::shared_ptr<const D2BRegionCache> shared_region_cache(const D2BEnvParams& env,
                                                                 double r_cap) {
    using Key = std::array<double, 7>;
    static std::map<Key, std::shared_ptr<const D2BRegionCache>> registry;
    static std::mutex mu;
    const Key key{env.alpha, env.a_excess, env.theta0, env.b_scale, env.eta0, env.p_db_max, r_cap};
    {
        std::lock_guard<std::mutex> lk(mu);
        auto it = registry.find(key);
        if (it != registry.end()) return it->second;
    }
    auto built = std::make_shared<const D2BRegionCache>(env, r_cap);
    std::lock_guard<std::mutex> lk(mu);
    return registry.emplace(key, std::move(built)).first->second;
}

}  // namespace daran
