#pragma once

#include <cmath>
#include <stdexcept>

#include "psook/infotheory.hpp"

// Surrogate channel for shaped OOK: the nonuniform prior breaks the LLR
// consistency condition, so threshold analysis replaces the shaped channel
// by a uniform-input OOK AWGN channel whose conditional entropy H(X|Y)
// matches the shaped channel's. Matching is done in the noise variance
// only; the amplitude is carried over unchanged.

namespace psook {

struct SurrogateChannel {
    double sigma2_tilde;  // matched noise variance
    double amp;           // surrogate pulse amplitude (= shaped amplitude)
    double cond_entropy;  // matched H(X|Y) target in bits
    bool degenerate = false;  // target entropy ~ 0, bracket edge returned

    /// Variance of the surrogate's channel LLR messages, sigma_ch^2 = A^2/sigma2.
    double llr_variance() const { return amp * amp / sigma2_tilde; }
};

/// Finds sigma2_tilde with H_uniform(sigma2_tilde) = H_shaped(sigma2_shaped)
/// to 1e-8. H(X|Y) of the uniform channel is strictly increasing in the
/// noise variance, so bisection (log-spaced, bracket [1e-6, 1e6]*A^2) has a
/// unique root.
inline SurrogateChannel match_surrogate(double p1, double amp_shaped,
                                        double sigma2_shaped) {
    if (p1 <= 0.0 || p1 >= 1.0) throw std::domain_error("match_surrogate: p1 outside (0,1)");
    if (amp_shaped <= 0.0) throw std::domain_error("match_surrogate: amplitude must be positive");
    if (sigma2_shaped <= 0.0) throw std::domain_error("match_surrogate: sigma2 must be positive");

    const double target = cond_entropy_ook({p1, amp_shaped}, sigma2_shaped);
    if (target >= 1.0)
        throw std::domain_error("match_surrogate: target entropy >= 1 bit unreachable by a uniform binary channel");

    const double a2 = amp_shaped * amp_shaped;
    double lo = 1e-6 * a2, hi = 1e6 * a2;
    const OokInput uni{0.5, amp_shaped};

    if (target < 1e-12) return {lo, amp_shaped, target, true};
    if (cond_entropy_ook(uni, hi) < target)
        throw std::domain_error("match_surrogate: target entropy above bracket range");

    double h_mid = 0.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = std::sqrt(lo * hi);
        h_mid = cond_entropy_ook(uni, mid);
        if (std::abs(h_mid - target) < 1e-10) { lo = hi = mid; break; }
        (h_mid < target ? lo : hi) = mid;
    }
    const double s2 = std::sqrt(lo * hi);
    return {s2, amp_shaped, target, false};
}

}  // namespace psook
