#pragma once

#include <cmath>
#include <cstdint>
#include <optional>

#include "errors.hpp"

namespace ngramstat::bounds {

// Closed-form accuracy theory for probing estimators with p-wise independent
// hashing, plus the data-agnostic occupancy estimators. All probability
// bounds are clamped to [0,1] so monotonicity holds in infeasible regimes.

// P(|X - E(X)| >= T) <= (p C / (e^{2/3} T^2))^{p/2} for a sum X of p-wise
// independent variables with C = max(p, Var(X)).
inline double tail_bound(double p, double c, double t) {
    if (!(t > 0.0)) throw usage_error("tail bound requires T > 0");
    const double v = p * c / (std::exp(2.0 / 3.0) * t * t);
    return std::min(1.0, std::pow(v, p / 2.0));
}

// Failure probability of a single probing run with buffer M, precision eps
// and split parameter alpha in [4p/M, 1):
//   delta <= p^{p/2} / (e^{p/3} M^{p/2}) *
//            ( alpha^{p/2}/(1-alpha)^p + 4^{p/2}/(alpha^{p/2} eps^p (2^{p/2}-1)) )
inline double delta_given_alpha(double p, double m_capacity, double eps, double alpha) {
    if (!(eps > 0.0) || !(eps < 1.0))
        throw usage_error("precision eps must lie in (0,1)");
    if (!(alpha >= 4.0 * p / m_capacity) || !(alpha < 1.0))
        throw usage_error("alpha must lie in [4p/M, 1)");
    const double lead = std::pow(p, p / 2.0) /
                        (std::exp(p / 3.0) * std::pow(m_capacity, p / 2.0));
    const double spill = std::pow(alpha, p / 2.0) / std::pow(1.0 - alpha, p);
    const double miss = std::pow(4.0, p / 2.0) /
                        (std::pow(alpha, p / 2.0) * std::pow(eps, p) *
                         (std::pow(2.0, p / 2.0) - 1.0));
    return std::min(1.0, lead * (spill + miss));
}

// Simplified form at alpha = 1/2 (valid for M >= 8p):
//   delta = p^{p/2}/(e^{p/3} M^{p/2}) (2^{p/2} + 8^{p/2}/(eps^p (2^{p/2}-1)))
inline double delta_simplified(double p, double m_capacity, double eps) {
    const double lead = std::pow(p, p / 2.0) /
                        (std::exp(p / 3.0) * std::pow(m_capacity, p / 2.0));
    const double val = lead * (std::pow(2.0, p / 2.0) +
                               std::pow(8.0, p / 2.0) /
                                   (std::pow(eps, p) * (std::pow(2.0, p / 2.0) - 1.0)));
    return std::min(1.0, val);
}

// Best achievable delta over the alpha domain: 1e-3 grid scan refined by
// golden-section around the best grid point.
inline double delta_best(double p, double m_capacity, double eps) {
    const double lo = 4.0 * p / m_capacity;
    if (lo >= 1.0) return 1.0;
    double best_alpha = lo;
    double best = delta_given_alpha(p, m_capacity, eps, lo);
    for (double a = lo + 1e-3; a < 1.0; a += 1e-3) {
        const double d = delta_given_alpha(p, m_capacity, eps, a);
        if (d < best) {
            best = d;
            best_alpha = a;
        }
    }
    double gl = std::max(lo, best_alpha - 1e-3);
    double gr = std::min(1.0 - 1e-12, best_alpha + 1e-3);
    constexpr double invphi = 0.6180339887498949;
    double x1 = gr - invphi * (gr - gl);
    double x2 = gl + invphi * (gr - gl);
    double f1 = delta_given_alpha(p, m_capacity, eps, x1);
    double f2 = delta_given_alpha(p, m_capacity, eps, x2);
    for (int i = 0; i < 60; ++i) {
        if (f1 < f2) {
            gr = x2; x2 = x1; f2 = f1;
            x1 = gr - invphi * (gr - gl);
            f1 = delta_given_alpha(p, m_capacity, eps, x1);
        } else {
            gl = x1; x1 = x2; f1 = f2;
            x2 = gl + invphi * (gr - gl);
            f2 = delta_given_alpha(p, m_capacity, eps, x2);
        }
    }
    return std::min({best, f1, f2});
}

// Smallest precision eps whose best-alpha failure bound stays within delta;
// bisection to 1e-4 absolute. Empty when even eps -> 1 gives no guarantee.
inline std::optional<double> epsilon_for(double p, double m_capacity, double delta) {
    if (!(delta > 0.0) || !(delta < 1.0))
        throw usage_error("delta must lie in (0,1)");
    if (m_capacity < 8.0 * p)
        throw usage_error("epsilon_for requires M >= 8p");
    if (delta_best(p, m_capacity, 1.0 - 1e-9) > delta) return std::nullopt;
    double lo = 1e-9, hi = 1.0;
    while (hi - lo > 1e-4) {
        const double mid = 0.5 * (lo + hi);
        if (delta_best(p, m_capacity, mid) <= delta)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

// Intermediate expression from the M = 576/eps^2, p = 2, alpha = 1-eps
// derivation: (2/(e^{2/3} 576)) ((1-eps) + 4/(1-eps)). Increasing in eps.
inline double sizing_rule_expression(double eps) {
    if (!(eps > 0.0) || !(eps < 1.0))
        throw usage_error("eps must lie in (0,1)");
    return 2.0 / (std::exp(2.0 / 3.0) * 576.0) * ((1.0 - eps) + 4.0 / (1.0 - eps));
}

// Valid failure bound under the M = 576/eps^2, p = 2 sizing rule: a miss at
// precision eps is no more likely than a miss at any tighter precision, so
// the expression's eps -> 0 limit, 10/(e^{2/3} 576) ~= 0.0089, bounds delta
// for every eps. The rule therefore guarantees better than 99% reliability.
inline double sizing_rule_reliability(double eps) {
    const double limit = 10.0 / (std::exp(2.0 / 3.0) * 576.0);
    return std::min(sizing_rule_expression(eps), limit);
}

// Storage needed for an iceberg estimate with accuracy eps, 19 times out of
// 20, when r of m distinct items satisfy the predicate: ceil(20 m/(eps^2 r)).
inline double iceberg_memory(double m, double r, double eps) {
    if (!(r > 0.0)) throw usage_error("iceberg memory requires r > 0");
    if (!(eps > 0.0)) throw usage_error("iceberg memory requires eps > 0");
    if (r > m) throw usage_error("iceberg memory requires r <= m");
    return std::ceil(20.0 * m / (eps * eps * r));
}

// Data-agnostic view-size estimates for eta draws into V cells. Two forms are
// exposed because they disagree: the first scales the per-cell omission
// probability by the number of draws, the second by the number of cells
// (classical occupancy). Callers must label which one they report.
struct AgnosticEstimates {
    double unoccupied_eta_form;    // eta (1 - 1/V)^eta
    double expected_distinct;      // V (1 - (1 - 1/V)^eta)
};

inline AgnosticEstimates agnostic_estimates(double v_cells, double eta) {
    if (!(v_cells >= 1.0)) throw usage_error("cell count V must be >= 1");
    if (!(eta >= 0.0)) throw usage_error("draw count eta must be >= 0");
    const double omit = std::pow(1.0 - 1.0 / v_cells, eta);
    return AgnosticEstimates{eta * omit, v_cells * (1.0 - omit)};
}

// Estimated number of (n-1)-grams from m observed n-grams in a V-cell space
// over an alphabet of sigma_size symbols: m (1 - (m/V)^sigma).
inline double agnostic_lower_gram(double m, double v_cells, double sigma_size) {
    if (!(m >= 0.0) || !(m <= v_cells))
        throw usage_error("m must lie in [0, V]");
    if (!(sigma_size >= 1.0)) throw usage_error("alphabet size must be >= 1");
    return m * (1.0 - std::pow(m / v_cells, sigma_size));
}

}  // namespace ngramstat::bounds
