#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <ostream>
#include <thread>
#include <tuple>
#include <utility>
#include <vector>

#include "psook/infotheory.hpp"
#include "psook/txchain.hpp"

// Monte Carlo CER harness and the achievable-rate curve writer. Every frame
// draws from an RNG stream derived from (master seed, SNR index, frame
// index), and the stop rule is applied by scanning frame results in index
// order, so the outcome is independent of the worker count.

namespace psook {

struct StopRule {
    uint64_t min_frame_errors = 100;
    uint64_t max_frames = 1000000;
};

struct CerRecord {
    double eb_n0_db = 0.0;      // nominal-R_TX axis
    double es_n0_db = 0.0;
    uint64_t frames = 0;
    uint64_t frame_errors = 0;
    double cer = 0.0;
    double mean_iterations = 0.0;
    double rtx_nominal = 0.0;
    double rtx_realized = 0.0;
    double eb_realized_db = 0.0;  // same Es/N0 on the realized-R_TX axis
    double wilson_lo = 0.0, wilson_hi = 0.0;
};

/// 95% Wilson score interval for e errors in n frames.
inline std::pair<double, double> wilson_interval(uint64_t e, uint64_t n) {
    if (n == 0) return {0.0, 1.0};
    const double z = 1.959963984540054;
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(e) / nn;
    const double z2n = z * z / nn;
    const double denom = 1.0 + z2n;
    const double center = p + 0.5 * z2n;
    const double half = z * std::sqrt(p * (1.0 - p) / nn + 0.25 * z2n / nn);
    // at p-hat = 0 (resp. 1) the lower (upper) endpoint is analytically exact;
    // evaluating the formula there leaves ~1e-18 cancellation dust
    const double lo = e == 0 ? 0.0 : std::max(0.0, (center - half) / denom);
    const double hi = e == n ? 1.0 : std::min(1.0, (center + half) / denom);
    return {lo, hi};
}

namespace detail {

struct FrameOutcome {
    uint8_t error = 0;
    int iterations = 0;
};

inline FrameOutcome simulate_frame(const FramePlan& plan, double sigma2, uint64_t master,
                                   uint64_t snr_index, uint64_t frame_index, int max_iter) {
    Rng rng(derive_seed(master, snr_index, frame_index));
    std::vector<uint8_t> info(static_cast<size_t>(plan.input_length()));
    for (auto& b : info) b = static_cast<uint8_t>(rng.bit());
    const TxFrame tx = transmit(info, plan);
    const std::vector<double> y = channel_awgn(tx.symbols, sigma2, rng);
    const RxResult rx = receive(y, plan, sigma2, max_iter);
    FrameOutcome out;
    out.iterations = rx.iterations;
    out.error = (rx.status == FrameStatus::CompositionFail || rx.info_bits != info) ? 1 : 0;
    return out;
}

}  // namespace detail

/// CER over an ascending Eb/N0 grid (nominal R_TX from the plan config).
/// Frames are processed in blocks; each block may fan out over `workers`
/// threads, and the stop rule consumes results strictly in frame order.
/// `snr_index_base` offsets the per-point RNG stream index so a resumed
/// run (grid suffix) reproduces the uninterrupted run byte for byte.
inline std::vector<CerRecord> run_cer(const FramePlan& plan, const std::vector<double>& eb_grid,
                                      const StopRule& stop, uint64_t master_seed,
                                      int workers = 1, int bp_max_iter = 100,
                                      const std::function<void(const CerRecord&)>& on_point = {},
                                      uint64_t snr_index_base = 0) {
    std::vector<CerRecord> records;
    const double rtx_nom = plan.ts.rate_tx;
    constexpr uint64_t kBlock = 256;

    for (size_t si = 0; si < eb_grid.size(); ++si) {
        CerRecord rec;
        rec.eb_n0_db = eb_grid[si];
        rec.es_n0_db = es_n0_db_from_eb(eb_grid[si], rtx_nom);
        rec.rtx_nominal = rtx_nom;
        rec.rtx_realized = plan.rtx_realized();
        rec.eb_realized_db = eb_n0_db_from_es(rec.es_n0_db, rec.rtx_realized);
        const double sigma2 = SnrPoint::from_db(rec.es_n0_db).sigma2;

        uint64_t iter_sum = 0;
        std::vector<detail::FrameOutcome> block(kBlock);
        bool done = false;
        for (uint64_t base = 0; base < stop.max_frames && !done; base += kBlock) {
            const uint64_t count = std::min(kBlock, stop.max_frames - base);
            auto work = [&](int worker, int stride) {
                for (uint64_t f = static_cast<uint64_t>(worker); f < count; f += static_cast<uint64_t>(stride))
                    block[f] = detail::simulate_frame(plan, sigma2, master_seed,
                                                      snr_index_base + si, base + f,
                                                      bp_max_iter);
            };
            if (workers <= 1) {
                work(0, 1);
            } else {
                std::vector<std::thread> pool;
                pool.reserve(static_cast<size_t>(workers));
                for (int w = 0; w < workers; ++w) pool.emplace_back(work, w, workers);
                for (auto& t : pool) t.join();
            }
            for (uint64_t f = 0; f < count; ++f) {
                ++rec.frames;
                rec.frame_errors += block[f].error;
                iter_sum += static_cast<uint64_t>(block[f].iterations);
                if (rec.frame_errors >= stop.min_frame_errors) { done = true; break; }
            }
        }
        rec.cer = rec.frames ? static_cast<double>(rec.frame_errors) / rec.frames : 0.0;
        rec.mean_iterations = rec.frames ? static_cast<double>(iter_sum) / rec.frames : 0.0;
        std::tie(rec.wilson_lo, rec.wilson_hi) = wilson_interval(rec.frame_errors, rec.frames);
        records.push_back(rec);
        if (on_point) on_point(rec);
    }
    return records;
}

/// Eb/N0 (nominal axis) where the CER curve crosses `target`, by log-CER
/// interpolation between the bracketing grid points; NaN without a bracket.
inline double eb_at_cer(const std::vector<CerRecord>& records, double target) {
    for (size_t i = 1; i < records.size(); ++i) {
        const auto& a = records[i - 1];
        const auto& b = records[i];
        if (a.cer >= target && b.cer <= target && a.cer > 0.0 && b.cer > 0.0 && a.cer != b.cer) {
            const double t = (std::log(target) - std::log(a.cer)) /
                             (std::log(b.cer) - std::log(a.cer));
            return a.eb_n0_db + t * (b.eb_n0_db - a.eb_n0_db);
        }
    }
    return std::nan("");
}

/// Achievable-rate curve CSV: capacity and uniform-OOK references plus the
/// solid (R_TS) and dashed (R_TX = R_C H2(p1*)) curve per code rate.
inline void emit_rate_curves(std::ostream& out, int case_id, const std::vector<double>& rc_set,
                             const std::vector<double>& es_grid) {
    out << "es_n0_db,capacity,uniform_ook";
    char label[64];
    for (double rc : rc_set) {
        std::snprintf(label, sizeof(label), ",rts_rc%.4g,rtx_rc%.4g", rc, rc);
        out << label;
    }
    out << "\n";
    char num[64];
    for (double es : es_grid) {
        const SnrPoint snr = SnrPoint::from_db(es);
        std::snprintf(num, sizeof(num), "%.6f,%.9f,%.9f", es,
                      ook_capacity(snr).capacity, mi_ook({0.5, std::sqrt(2.0)}, snr.sigma2));
        out << num;
        for (double rc : rc_set) {
            const TsOptimum opt = case_id == 1 ? optimize_ts_case1(rc, snr)
                                               : optimize_ts_case2(rc, snr);
            std::snprintf(num, sizeof(num), ",%.9f,%.9f", opt.rate,
                          rc * binary_entropy(opt.p1));
            out << num;
        }
        out << "\n";
    }
}

}  // namespace psook
