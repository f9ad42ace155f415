#include "fiap/point_process.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace fiap {

namespace {

void check_finite(double value, const char* what, double t) {
    if (!std::isfinite(value)) {
        char buf[128];
        std::snprintf(buf, sizeof(buf), "%s is non-finite at t=%.9g", what, t);
        throw std::runtime_error(buf);
    }
}

double affine_flow(double alpha, double beta, double lam0, double dt) {
    // dlam/ds = alpha + (beta - 1) * lam
    const double c = beta - 1.0;
    if (c == 0.0) {
        return lam0 + alpha * dt;
    }
    const double fixed = -alpha / c;
    return fixed + (lam0 - fixed) * std::exp(c * dt);
}

}  // namespace

double integrate_drift(const DriftModel& drift, double lam0, double t0, double t1) {
    if (t1 < t0) {
        throw std::invalid_argument("integrate_drift requires t1 >= t0");
    }
    check_finite(lam0, "intensity", t0);
    if (t1 == t0) {
        return lam0;
    }
    if (drift.affine) {
        const double out = affine_flow(drift.alpha, drift.beta, lam0, t1 - t0);
        check_finite(out, "intensity", t1);
        return out;
    }
    if (!drift.sigma) {
        throw std::invalid_argument("non-affine DriftModel without sigma callable");
    }
    const auto rhs = [&](double s, double lam) { return drift.sigma(s, lam) - lam; };
    double lam = lam0;
    double t = t0;
    const double h = drift.rk4_step;
    while (t < t1) {
        const double step = std::min(h, t1 - t);
        const double k1 = rhs(t, lam);
        const double k2 = rhs(t + 0.5 * step, lam + 0.5 * step * k1);
        const double k3 = rhs(t + 0.5 * step, lam + 0.5 * step * k2);
        const double k4 = rhs(t + step, lam + step * k3);
        lam += step / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t += step;
        check_finite(lam, "intensity", t);
    }
    return lam;
}

namespace detail {

void throw_bound_violation(double lam, double bound, double t) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "intensity %.9g exceeds dominating rate %.9g at t=%.9g",
                  lam, bound, t);
    throw std::runtime_error(buf);
}

void throw_nonpositive_bound(double lam, double bound, double t) {
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "dominating rate %.9g <= 0 with positive intensity %.9g at t=%.9g",
                  bound, lam, t);
    throw std::runtime_error(buf);
}

void check_rate_finite(double lam, double t) {
    check_finite(lam, "intensity", t);
}

}  // namespace detail

std::optional<double> next_event_thinning(const RateMap& intensity,
                                          double dominating_rate,
                                          double t0,
                                          double t1,
                                          RngStream& rng) {
    if (!std::isfinite(dominating_rate)) {
        throw std::invalid_argument("dominating rate must be finite");
    }
    return detail::thin_next(intensity, dominating_rate, t0, t1, rng);
}

}  // namespace fiap
