#pragma once

#include <functional>
#include <optional>

#include "fiap/rng.hpp"

namespace fiap {

// Autonomous evolution between events: dlam/ds = sigma(s, lam) - lam.
// When sigma is affine, sigma(s, lam) = alpha + beta * lam, the flow has a
// closed form; otherwise a fixed-step RK4 integrator is used.
struct DriftModel {
    bool affine = true;
    double alpha = 0.0;
    double beta = 1.0;  // identity drift: sigma = lam, lam stays constant
    std::function<double(double, double)> sigma;
    double rk4_step = 1e-3;
};

// Evolves lam0 from t0 to t1 under drift only. Throws on non-finite
// intermediate values or t1 < t0.
double integrate_drift(const DriftModel& drift, double lam0, double t0, double t1);

using RateMap = std::function<double(double)>;

namespace detail {

[[noreturn]] void throw_bound_violation(double lam, double bound, double t);
[[noreturn]] void throw_nonpositive_bound(double lam, double bound, double t);
void check_rate_finite(double lam, double t);

// Shared thinning loop; the engine instantiates it with a concrete evaluator
// so the hot path avoids std::function.
template <typename F>
std::optional<double> thin_next(F&& intensity, double dominating_rate, double t0,
                                double t1, RngStream& rng) {
    if (dominating_rate <= 0.0) {
        const double lam = intensity(t0);
        if (lam > 0.0) {
            throw_nonpositive_bound(lam, dominating_rate, t0);
        }
        return std::nullopt;
    }
    double t = t0;
    while (true) {
        t += rng.exponential(dominating_rate);
        if (t > t1) {
            return std::nullopt;
        }
        const double lam = intensity(t);
        check_rate_finite(lam, t);
        if (lam > dominating_rate * (1.0 + 1e-9) + 1e-12) {
            throw_bound_violation(lam, dominating_rate, t);
        }
        if (rng.uniform01() * dominating_rate < lam) {
            return t;
        }
    }
}

}  // namespace detail

// First accepted point on (t0, t1] of a dominating-rate homogeneous Poisson
// stream thinned with acceptance probability intensity(t) / dominating_rate.
// The caller guarantees dominating_rate bounds the intensity on the window;
// the bound is checked at every candidate and violations throw. Returns
// nullopt when no candidate is accepted before t1.
std::optional<double> next_event_thinning(const RateMap& intensity,
                                          double dominating_rate,
                                          double t0,
                                          double t1,
                                          RngStream& rng);

}  // namespace fiap
