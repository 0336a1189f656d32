#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "psook/gauss_hermite.hpp"

// J-function for consistent-Gaussian LLR messages: J(sigma) is the mutual
// information between a bit and an LLR message L ~ N(sigma^2/2, sigma^2).
// Realized as a dense quadrature-built table with monotone cubic
// (Fritsch-Carlson) interpolation, not the usual polynomial fit.
//
// The table stores the complement D(sigma) = 1 - J(sigma) = E[log2(1+e^-L)].
// D stays representable down to ~1e-196 at the table edge while 1 - D
// collapses to 1.0 in double beyond sigma ~ 17.5; the complement API keeps
// full precision where it matters (CN updates, convergence checks).

namespace psook {

namespace detail {

inline constexpr double kLog2E_j = 1.4426950408889634;

inline double log2_1p_exp_neg(double l) {
    // log2(1 + e^-l), stable for both signs
    if (l >= 0.0) return std::log1p(std::exp(-l)) * kLog2E_j;
    return (-l + std::log1p(std::exp(l))) * kLog2E_j;
}

class JTable {
public:
    static constexpr double kSigmaMax = 60.0;
    static constexpr double kStep = 1e-3;

    static const JTable& instance() {
        static const JTable table;
        return table;
    }

    /// D(sigma) = 1 - J(sigma); clamps sigma to the table range.
    double complement(double sigma) const {
        if (sigma <= 0.0) return 1.0;
        if (sigma >= kSigmaMax) return d_.back();
        const double u = sigma / kStep;
        const auto i = static_cast<size_t>(u);
        const double t = u - static_cast<double>(i);
        const double t2 = t * t, t3 = t2 * t;
        const double h00 = 2 * t3 - 3 * t2 + 1;
        const double h10 = t3 - 2 * t2 + t;
        const double h01 = -2 * t3 + 3 * t2;
        const double h11 = t3 - t2;
        const double v = h00 * d_[i] + h10 * kStep * m_[i] +
                         h01 * d_[i + 1] + h11 * kStep * m_[i + 1];
        return std::max(0.0, v);
    }

    double floor_value() const { return d_.back(); }

    /// Solves complement(sigma) = d for d in (floor, 1): binary search for
    /// the grid interval, then safeguarded Newton on the local cubic.
    double invert(double d) const {
        size_t lo = 0, hi = d_.size() - 1;
        while (hi - lo > 1) {
            const size_t mid = (lo + hi) / 2;
            (d_[mid] >= d ? lo : hi) = mid;
        }
        const double y0 = d_[lo], y1 = d_[lo + 1];
        const double m0 = kStep * m_[lo], m1 = kStep * m_[lo + 1];
        auto value = [&](double t) {
            const double t2 = t * t, t3 = t2 * t;
            return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * m0 +
                   (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * m1 - d;
        };
        auto slope = [&](double t) {
            const double t2 = t * t;
            return (6 * t2 - 6 * t) * y0 + (3 * t2 - 4 * t + 1) * m0 +
                   (-6 * t2 + 6 * t) * y1 + (3 * t2 - 2 * t) * m1;
        };
        double ta = 0.0, tb = 1.0, t = 0.5;
        for (int k = 0; k < 60; ++k) {
            const double v = value(t);
            if (v == 0.0) break;
            (v > 0.0 ? ta : tb) = t;  // interpolant decreases in t
            const double s = slope(t);
            double tn = (s != 0.0) ? t - v / s : 0.5 * (ta + tb);
            if (!(tn > ta && tn < tb)) tn = 0.5 * (ta + tb);
            if (std::abs(tn - t) < 1e-13) { t = tn; break; }
            t = tn;
        }
        return (static_cast<double>(lo) + t) * kStep;
    }

private:
    JTable() {
        const auto n = static_cast<size_t>(kSigmaMax / kStep) + 1;
        d_.resize(n);
        d_[0] = 1.0;
        for (size_t i = 1; i < n; ++i) {
            const double s = static_cast<double>(i) * kStep;
            const double s2 = s * s;
            d_[i] = quad::gauss_expect(0.5 * s2, s2, log2_1p_exp_neg);
        }
        build_derivatives();
    }

    // Fritsch-Carlson tangents: guarantees the interpolant is monotone
    // wherever the data are, so inversion by bisection is sound.
    void build_derivatives() {
        const size_t n = d_.size();
        std::vector<double> delta(n - 1);
        for (size_t i = 0; i + 1 < n; ++i) delta[i] = (d_[i + 1] - d_[i]) / kStep;
        m_.resize(n);
        m_[0] = delta[0];
        m_[n - 1] = delta[n - 2];
        for (size_t i = 1; i + 1 < n; ++i) {
            if (delta[i - 1] * delta[i] <= 0.0) m_[i] = 0.0;
            else m_[i] = 0.5 * (delta[i - 1] + delta[i]);
        }
        for (size_t i = 0; i + 1 < n; ++i) {
            if (delta[i] == 0.0) { m_[i] = m_[i + 1] = 0.0; continue; }
            const double a = m_[i] / delta[i];
            const double b = m_[i + 1] / delta[i];
            const double r = a * a + b * b;
            if (r > 9.0) {
                const double tau = 3.0 / std::sqrt(r);
                m_[i] = tau * a * delta[i];
                m_[i + 1] = tau * b * delta[i];
            }
        }
    }

    std::vector<double> d_;  // complement values on the sigma grid
    std::vector<double> m_;  // interpolation tangents
};

}  // namespace detail

/// 1 - J(sigma), full precision near J = 1.
inline double j_fun_complement(double sigma) {
    if (sigma < 0.0) throw std::domain_error("j_fun_complement: sigma must be >= 0");
    return detail::JTable::instance().complement(sigma);
}

inline double j_fun(double sigma) {
    return 1.0 - j_fun_complement(sigma);
}

/// Inverse of j_fun_complement; strictly decreasing in d. Saturates at the
/// table edge for d below the table floor.
inline double j_inv_complement(double d, bool* saturated = nullptr) {
    if (d < 0.0 || d > 1.0) throw std::domain_error("j_inv_complement: d outside [0,1]");
    if (saturated) *saturated = false;
    const auto& tab = detail::JTable::instance();
    if (d >= 1.0) return 0.0;
    if (d <= tab.floor_value()) {
        if (saturated) *saturated = true;
        return detail::JTable::kSigmaMax;
    }
    return tab.invert(d);
}

/// Inverse of j_fun on [0, 1); mi = 1 saturates at the table maximum.
inline double j_inv(double mi, bool* saturated = nullptr) {
    if (mi < 0.0 || mi > 1.0) throw std::domain_error("j_inv: mi outside [0,1]");
    return j_inv_complement(1.0 - mi, saturated);
}

}  // namespace psook
