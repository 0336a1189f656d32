#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "psook/gauss_hermite.hpp"

// Rate and capacity computations for on-off keying over the average-power
// constrained AWGN channel, plus the time-sharing (TS) rate optimizations
// used to pick shaping operating points.
//
// Conventions: unit average power P = 1, Es/N0 = 1/(2 sigma^2), all rates
// in bits per channel use.

namespace psook {

inline constexpr double kLog2E = 1.4426950408889634;  // 1/ln(2)

/// Binary OOK input: levels {0, amplitude} with P(pulse) = p1.
struct OokInput {
    double p1 = 0.5;
    double amplitude = 1.0;
};

/// One SNR operating point; keeps the dB and linear forms consistent.
struct SnrPoint {
    double es_n0_db = 0.0;
    double sigma2 = 0.5;

    static SnrPoint from_db(double db) {
        return {db, 1.0 / (2.0 * std::pow(10.0, db / 10.0))};
    }
    static SnrPoint from_sigma2(double s2) {
        if (s2 <= 0.0) throw std::domain_error("SnrPoint: sigma2 must be positive");
        return {10.0 * std::log10(1.0 / (2.0 * s2)), s2};
    }
};

/// A complete time-sharing operating point. Case 1 shares one pulse
/// amplitude between shaped and uniform symbols, case 2 allows two.
struct TsConfig {
    int case_id = 1;
    double rate_code = 0.5;   // R_C
    double rate_tx = 0.25;    // R_TX, bits per channel use
    double p1 = 0.5;          // pulse probability of the shaped symbols
    double amp_shaped = 1.0;  // A_S
    double amp_uniform = 1.0; // A_U

    /// Average power of the mux'd frame; equals 1 for a valid config.
    double average_power() const {
        return rate_code * p1 * amp_shaped * amp_shaped +
               (1.0 - rate_code) * 0.5 * amp_uniform * amp_uniform;
    }
    bool power_feasible(double tol = 1e-9) const {
        return std::abs(average_power() - 1.0) <= tol;
    }
};

inline double binary_entropy(double p) {
    if (p < 0.0 || p > 1.0) throw std::domain_error("binary_entropy: p outside [0,1]");
    double h = 0.0;
    if (p > 0.0) h -= p * std::log2(p);
    if (p < 1.0) h -= (1.0 - p) * std::log2(1.0 - p);
    return h;
}

/// Inverse of H2 on [0, 0.5]; bisection to 1e-12 absolute in p.
inline double binary_entropy_inv(double h) {
    if (h < 0.0 || h > 1.0) throw std::domain_error("binary_entropy_inv: h outside [0,1]");
    if (h == 0.0) return 0.0;
    if (h >= 1.0) return 0.5;
    double lo = 0.0, hi = 0.5;
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        (binary_entropy(mid) < h ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

/// Mutual information I(X;Y) of Y = X + N, N ~ N(0, sigma2), X in
/// {0, A} with prior (1-p1, p1). Gauss-Hermite quadrature over both
/// conditional output densities; stable log-sum-exp in the integrand.
inline double mi_ook(const OokInput& in, double sigma2) {
    if (sigma2 <= 0.0) throw std::domain_error("mi_ook: sigma2 must be positive");
    if (in.p1 < 0.0 || in.p1 > 1.0) throw std::domain_error("mi_ook: p1 outside [0,1]");
    if (in.amplitude < 0.0) throw std::domain_error("mi_ook: amplitude must be >= 0");
    const double p1 = in.p1, a = in.amplitude;
    if (p1 == 0.0 || p1 == 1.0 || a == 0.0) return 0.0;

    const double inv2s2 = 1.0 / (2.0 * sigma2);
    double mi = 0.0;
    for (int sym = 0; sym < 2; ++sym) {
        const double x = sym ? a : 0.0;
        const double px = sym ? p1 : 1.0 - p1;
        mi += px * quad::gauss_expect(x, sigma2, [&](double y) {
            // log p(y|x') - log p(y|x), x' in {0, A}
            const double base = (y - x) * (y - x) * inv2s2;
            const double e0 = base - y * y * inv2s2;
            const double ea = base - (y - a) * (y - a) * inv2s2;
            const double m = std::max(e0, ea);
            const double lse =
                m + std::log((1.0 - p1) * std::exp(e0 - m) + p1 * std::exp(ea - m));
            return -lse * kLog2E;  // log2( p(y|x) / p_Y(y) )
        });
    }
    return std::clamp(mi, 0.0, binary_entropy(p1));
}

/// H(X|Y) = H2(p1) - I(X;Y); in [0, H2(p1)].
inline double cond_entropy_ook(const OokInput& in, double sigma2) {
    return std::max(0.0, binary_entropy(in.p1) - mi_ook(in, sigma2));
}

namespace detail {

// Golden-section maximization of a unimodal f on [a, b].
template <typename F>
std::pair<double, double> golden_max(F&& f, double a, double b, double tol) {
    constexpr double kInvPhi = 0.6180339887498949;
    double c = b - kInvPhi * (b - a);
    double d = a + kInvPhi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc > fd) {
            b = d; d = c; fd = fc;
            c = b - kInvPhi * (b - a);
            fc = f(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + kInvPhi * (b - a);
            fd = f(d);
        }
    }
    const double x = 0.5 * (a + b);
    return {x, f(x)};
}

inline constexpr double kP1SearchMin = 1e-4;

}  // namespace detail

struct CapacityPoint {
    double capacity;  // bits per channel use
    double p1_opt;
    double amp_opt;
};

/// OOK capacity under the active power constraint A = sqrt(1/p1).
/// Pulse probabilities above 0.5 are never optimal here (checked as a
/// test property), so the search runs over p1 in [1e-4, 0.5].
inline CapacityPoint ook_capacity(const SnrPoint& snr) {
    const double s2 = snr.sigma2;
    auto rate = [&](double p1) { return mi_ook({p1, std::sqrt(1.0 / p1)}, s2); };
    auto [p_opt, val] = detail::golden_max(rate, detail::kP1SearchMin, 0.5, 1e-6);
    const double uniform = rate(0.5);
    if (uniform > val) return {uniform, 0.5, std::sqrt(2.0)};
    return {val, p_opt, std::sqrt(1.0 / p_opt)};
}

/// R_TS = R_C I(X_S;Y_S) + (1-R_C) I(X_U;Y_U).
inline double ts_rate(const TsConfig& cfg, const SnrPoint& snr) {
    if (!cfg.power_feasible(1e-6)) throw std::domain_error("ts_rate: config violates power constraint");
    return cfg.rate_code * mi_ook({cfg.p1, cfg.amp_shaped}, snr.sigma2) +
           (1.0 - cfg.rate_code) * mi_ook({0.5, cfg.amp_uniform}, snr.sigma2);
}

struct TsOptimum {
    double rate;
    double p1;
    double amp_shaped;
    double amp_uniform;
};

namespace detail {

inline double case1_amp(double rc, double p1) {
    return 1.0 / std::sqrt(rc * p1 + (1.0 - rc) * 0.5);
}

inline double case1_rate(double rc, double p1, double s2) {
    const double a = case1_amp(rc, p1);
    return rc * mi_ook({p1, a}, s2) + (1.0 - rc) * mi_ook({0.5, a}, s2);
}

// A_U from the case-2 power constraint, given (p1, A_S).
inline double case2_amp_uniform(double rc, double p1, double amp_s) {
    const double au2 = (1.0 - rc * p1 * amp_s * amp_s) / ((1.0 - rc) * 0.5);
    return std::sqrt(std::max(0.0, au2));
}

inline double case2_rate(double rc, double p1, double amp_s, double s2) {
    const double au = case2_amp_uniform(rc, p1, amp_s);
    if (au <= 0.0) return rc * mi_ook({p1, amp_s}, s2);
    return rc * mi_ook({p1, amp_s}, s2) + (1.0 - rc) * mi_ook({0.5, au}, s2);
}

// Best A_S at fixed p1 (case 2); the search stays inside A_U^2 >= 0.
inline std::pair<double, double> case2_best_amp(double rc, double p1, double s2) {
    const double amp_max = std::sqrt(1.0 / (rc * p1));
    auto rate = [&](double a) { return case2_rate(rc, p1, a, s2); };
    auto [a_opt, val] = golden_max(rate, 1e-6, amp_max * (1.0 - 1e-9), 1e-6);
    // The shared-amplitude (case-1) point is feasible; never do worse.
    const double a1 = case1_amp(rc, p1);
    if (a1 < amp_max) {
        const double v1 = rate(a1);
        if (v1 > val) return {a1, v1};
    }
    return {a_opt, val};
}

}  // namespace detail

/// Case 1: maximize R_TS over p1 with the shared amplitude pinned by the
/// power constraint.
inline TsOptimum optimize_ts_case1(double rate_code, const SnrPoint& snr) {
    if (rate_code <= 0.0 || rate_code > 1.0)
        throw std::domain_error("optimize_ts_case1: rate_code outside (0,1]");
    const double s2 = snr.sigma2;
    auto rate = [&](double p1) { return detail::case1_rate(rate_code, p1, s2); };
    auto [p_opt, val] = detail::golden_max(rate, detail::kP1SearchMin, 0.5, 1e-6);
    const double uniform = rate(0.5);
    if (uniform > val) { p_opt = 0.5; val = uniform; }
    const double a = detail::case1_amp(rate_code, p_opt);
    return {val, p_opt, a, a};
}

/// Case 2: nested search, outer over p1 and inner over A_S, with A_U
/// given by the power constraint.
inline TsOptimum optimize_ts_case2(double rate_code, const SnrPoint& snr) {
    if (rate_code <= 0.0 || rate_code >= 1.0)
        throw std::domain_error("optimize_ts_case2: rate_code outside (0,1)");
    const double s2 = snr.sigma2;
    auto best_at = [&](double p1) { return detail::case2_best_amp(rate_code, p1, s2); };
    auto outer = [&](double p1) { return best_at(p1).second; };
    auto [p_opt, val] = detail::golden_max(outer, detail::kP1SearchMin, 0.5, 1e-6);
    const double uniform = outer(0.5);
    if (uniform > val) { p_opt = 0.5; val = uniform; }
    auto [a_s, v] = best_at(p_opt);
    // Feasible-set inclusion: the case-1 optimum is a valid case-2 point.
    const TsOptimum c1 = optimize_ts_case1(rate_code, snr);
    if (c1.rate > v) return {c1.rate, c1.p1, c1.amp_shaped, c1.amp_uniform};
    return {v, p_opt, a_s, detail::case2_amp_uniform(rate_code, p_opt, a_s)};
}

struct OperatingPoint {
    double es_n0_db;
    TsConfig config;
};

/// Smallest Es/N0 at which the TS scheme supports rate_tx with the given
/// code rate. p1 is pinned by H2^{-1}(R_TX/R_C); case 1 then has no free
/// parameter, case 2 optimizes A_S at every probed SNR. Bisection in dB.
inline OperatingPoint required_snr(double rate_code, double rate_tx, int case_id) {
    if (case_id != 1 && case_id != 2) throw std::domain_error("required_snr: case_id must be 1 or 2");
    if (rate_tx > rate_code * (1.0 + 1e-12))
        throw std::domain_error("required_snr: rate_tx exceeds rate_code");
    const double p1 = binary_entropy_inv(std::min(1.0, rate_tx / rate_code));

    auto rate_at = [&](double es_db) {
        const double s2 = SnrPoint::from_db(es_db).sigma2;
        if (case_id == 1) return detail::case1_rate(rate_code, p1, s2);
        return detail::case2_best_amp(rate_code, p1, s2).second;
    };

    double lo = -20.0, hi = 20.0;
    if (rate_at(hi) < rate_tx) throw std::domain_error("required_snr: rate not achievable by 20 dB");
    while (hi - lo > 1e-3) {
        const double mid = 0.5 * (lo + hi);
        (rate_at(mid) >= rate_tx ? hi : lo) = mid;
    }
    const double es_db = hi;

    TsConfig cfg;
    cfg.case_id = case_id;
    cfg.rate_code = rate_code;
    cfg.rate_tx = rate_tx;
    cfg.p1 = p1;
    if (case_id == 1) {
        cfg.amp_shaped = cfg.amp_uniform = detail::case1_amp(rate_code, p1);
    } else {
        const double s2 = SnrPoint::from_db(es_db).sigma2;
        cfg.amp_shaped = detail::case2_best_amp(rate_code, p1, s2).first;
        cfg.amp_uniform = detail::case2_amp_uniform(rate_code, p1, cfg.amp_shaped);
    }
    return {es_db, cfg};
}

/// Convenience: the full operating TsConfig for (case, R_TX, R_C).
inline TsConfig make_ts_config(int case_id, double rate_tx, double rate_code) {
    return required_snr(rate_code, rate_tx, case_id).config;
}

struct RateSelection {
    double rate_code_opt;
    double es_n0_db;  // requirement of the chosen rate
    std::vector<std::pair<double, double>> evaluated;  // (R_C, required Es/N0)
};

// Rates whose requirements differ by less than this are treated as tied
// and the tie goes to the larger R_C (more shaped symbols). Matches the
// bisection tolerance of required_snr; finer distinctions are noise.
inline constexpr double kRateTieToleranceDb = 0.01;

/// Picks the R_C in rate_set with the smallest required Es/N0.
inline RateSelection select_code_rate(double rate_tx, std::span<const double> rate_set,
                                      int case_id) {
    if (rate_set.empty()) throw std::domain_error("select_code_rate: empty rate set");
    RateSelection sel;
    for (double rc : rate_set) {
        if (rate_tx > rc * (1.0 + 1e-12)) continue;
        sel.evaluated.emplace_back(rc, required_snr(rc, rate_tx, case_id).es_n0_db);
    }
    if (sel.evaluated.empty())
        throw std::domain_error("select_code_rate: no feasible code rate in set");
    double best = sel.evaluated.front().second;
    for (const auto& [rc, es] : sel.evaluated) best = std::min(best, es);
    sel.rate_code_opt = 0.0;
    for (const auto& [rc, es] : sel.evaluated) {
        if (es <= best + kRateTieToleranceDb && rc > sel.rate_code_opt) {
            sel.rate_code_opt = rc;
            sel.es_n0_db = es;
        }
    }
    return sel;
}

/// E_b/N_0 axis used by the CER plots: one information bit per R_TX uses.
inline double eb_n0_db_from_es(double es_n0_db, double rate_tx) {
    return es_n0_db - 10.0 * std::log10(rate_tx);
}

inline double es_n0_db_from_eb(double eb_n0_db, double rate_tx) {
    return eb_n0_db + 10.0 * std::log10(rate_tx);
}

/// Es/N0 at which the OOK capacity equals target_rate (bisection, 1e-4 dB).
inline double es_at_capacity(double target_rate) {
    if (target_rate <= 0.0 || target_rate >= 1.0)
        throw std::domain_error("es_at_capacity: rate outside (0,1)");
    double lo = -30.0, hi = 30.0;
    while (hi - lo > 1e-4) {
        const double mid = 0.5 * (lo + hi);
        (ook_capacity(SnrPoint::from_db(mid)).capacity >= target_rate ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

/// Es/N0 at which uniform OOK (p1 = 0.5, A = sqrt(2)) achieves target_rate.
inline double es_at_uniform(double target_rate) {
    if (target_rate <= 0.0 || target_rate >= 1.0)
        throw std::domain_error("es_at_uniform: rate outside (0,1)");
    double lo = -30.0, hi = 30.0;
    while (hi - lo > 1e-4) {
        const double mid = 0.5 * (lo + hi);
        (mi_ook({0.5, std::sqrt(2.0)}, SnrPoint::from_db(mid).sigma2) >= target_rate ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

struct CrossingPoint {
    double es_n0_db;          // where R_TS meets R_TX = R_C H2(p1*)
    double rate;              // common rate value at the crossing
    double gap_to_capacity_db;  // crossing Es/N0 minus Es/N0 where capacity = rate
};

namespace detail {

inline std::pair<double, double> ts_curves_at(double rate_code, int case_id, double es_db) {
    const SnrPoint snr = SnrPoint::from_db(es_db);
    const TsOptimum opt = case_id == 1 ? optimize_ts_case1(rate_code, snr)
                                       : optimize_ts_case2(rate_code, snr);
    return {opt.rate, rate_code * binary_entropy(opt.p1)};  // (R_TS, R_TX)
}

}  // namespace detail

/// Crossing of the achievable-rate curve R_TS with the transmitted-rate
/// curve R_TX = R_C H2(p1*): the optimal operating point for a code rate.
/// R_TS - R_TX changes sign exactly once on the scanned range (checked as
/// a test property); bisection to 1e-4 dB.
inline CrossingPoint ts_crossing(double rate_code, int case_id) {
    auto gap = [&](double es) {
        const auto [rts, rtx] = detail::ts_curves_at(rate_code, case_id, es);
        return rts - rtx;
    };
    double lo = -15.0, hi = 15.0;
    if (gap(lo) >= 0.0 || gap(hi) <= 0.0)
        throw std::domain_error("ts_crossing: no sign change on the scan range");
    while (hi - lo > 1e-4) {
        const double mid = 0.5 * (lo + hi);
        (gap(mid) >= 0.0 ? hi : lo) = mid;
    }
    const double es = 0.5 * (lo + hi);
    const auto [rts, rtx] = detail::ts_curves_at(rate_code, case_id, es);
    const double rate = 0.5 * (rts + rtx);
    return {es, rate, es - es_at_capacity(rate)};
}

}  // namespace psook
