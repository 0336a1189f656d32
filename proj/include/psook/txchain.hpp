#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "psook/ccdm.hpp"
#include "psook/infotheory.hpp"
#include "psook/ldpc.hpp"
#include "psook/rng.hpp"

// The time-sharing transceiver: CCDM -> systematic FEC -> per-class OOK
// mapping -> block mux -> AWGN -> soft demappers with prior -> BP ->
// dematcher. Bit 1 maps to the pulse, so p1 is both P(bit 1) and P(pulse).

namespace psook {

enum class BitRole : uint8_t { Shaped, Uniform, Punctured };

enum class FrameStatus : uint8_t { Ok, DecodeFail, CompositionFail };

struct FramePlan {
    const LiftedCode* code = nullptr;
    SystematicEncoder encoder;
    TsConfig ts;
    Composition comp;         // meaningful only when use_matcher
    bool use_matcher = true;  // false: uniform signaling, info bits go in raw
    std::vector<BitRole> role;     // per codeword position
    std::vector<int> tx_positions; // transmit order: shaped block, then parity

    int input_length() const { return use_matcher ? comp.k_prime : encoder.k(); }
    int n_tx() const { return static_cast<int>(tx_positions.size()); }

    /// k'/n_tx for the shaped chain, k/n_tx for uniform signaling.
    double rtx_realized() const {
        return static_cast<double>(input_length()) / n_tx();
    }

    double amplitude(int pos) const {
        return role[static_cast<size_t>(pos)] == BitRole::Shaped ? ts.amp_shaped
                                                                 : ts.amp_uniform;
    }
};

/// Builds the frame plan for a lifted code and TS configuration. Shaped
/// bits sit on the encoder's info positions (the pivot preference in
/// build_systematic_encoder steers those onto the leading columns).
inline FramePlan make_frame_plan(const LiftedCode& code, const TsConfig& ts,
                                 bool use_matcher = true) {
    if (std::abs(code.rate_code() - ts.rate_code) > 1e-6)
        throw std::invalid_argument("make_frame_plan: code rate does not match config");
    FramePlan plan;
    plan.code = &code;
    plan.encoder = build_systematic_encoder(code);
    plan.ts = ts;
    plan.use_matcher = use_matcher;
    if (use_matcher) plan.comp = make_composition(plan.encoder.k(), ts.p1);

    const int n = code.n_full();
    plan.role.assign(static_cast<size_t>(n), BitRole::Uniform);
    for (int pos : plan.encoder.info_positions) plan.role[static_cast<size_t>(pos)] = BitRole::Shaped;
    for (int pos : code.punctured_bits) plan.role[static_cast<size_t>(pos)] = BitRole::Punctured;

    for (int pos : plan.encoder.info_positions)
        if (plan.role[static_cast<size_t>(pos)] == BitRole::Shaped) plan.tx_positions.push_back(pos);
    for (int pos = 0; pos < n; ++pos)
        if (plan.role[static_cast<size_t>(pos)] == BitRole::Uniform) plan.tx_positions.push_back(pos);
    return plan;
}

struct TxFrame {
    std::vector<double> symbols;    // length n_tx, mux order
    std::vector<uint8_t> codeword;  // length n_full (ground truth)
};

inline TxFrame transmit(const std::vector<uint8_t>& info_bits, const FramePlan& plan) {
    if (static_cast<int>(info_bits.size()) != plan.input_length())
        throw std::invalid_argument("transmit: info length mismatch");
    const std::vector<uint8_t> u =
        plan.use_matcher ? dm_match(info_bits, plan.comp) : info_bits;
    TxFrame frame;
    frame.codeword = plan.encoder.encode(u);
    frame.symbols.reserve(plan.tx_positions.size());
    for (int pos : plan.tx_positions)
        frame.symbols.push_back(frame.codeword[static_cast<size_t>(pos)] ? plan.amplitude(pos) : 0.0);
    return frame;
}

inline std::vector<double> channel_awgn(const std::vector<double>& symbols, double sigma2,
                                        Rng& rng) {
    if (sigma2 < 0.0) throw std::domain_error("channel_awgn: sigma2 must be >= 0");
    const double sd = std::sqrt(sigma2);
    std::vector<double> y(symbols.size());
    for (size_t i = 0; i < symbols.size(); ++i) y[i] = symbols[i] + sd * rng.normal();
    return y;
}

/// Soft demapper. The channel-plus-prior LLR for level set {0, A} is
/// (A/s2)y - A^2/(2 s2) + log(P(A)/P(0)); positive-favors-bit-0 output
/// means the returned value is its negation. Parity bits carry no prior;
/// punctured bits enter the decoder as 0.
inline std::vector<double> demap(const std::vector<double>& received, const FramePlan& plan,
                                 double sigma2) {
    if (static_cast<int>(received.size()) != plan.n_tx())
        throw std::invalid_argument("demap: received length mismatch");
    if (sigma2 <= 0.0) throw std::domain_error("demap: sigma2 must be positive");
    std::vector<double> llr(static_cast<size_t>(plan.code->n_full()), 0.0);
    // matched prior: the matcher emits exactly n1 pulses per k shaped bits,
    // so the realized fraction n1/k (not the design p1) is the true marginal
    const double p1 = plan.use_matcher
                          ? static_cast<double>(plan.comp.n1) / plan.comp.k
                          : plan.ts.p1;
    const double prior = std::log(p1 / (1.0 - p1));
    for (size_t t = 0; t < received.size(); ++t) {
        const int pos = plan.tx_positions[t];
        const double a = plan.amplitude(pos);
        const double chan = (a / sigma2) * received[t] - a * a / (2.0 * sigma2);
        const bool shaped = plan.role[static_cast<size_t>(pos)] == BitRole::Shaped;
        llr[static_cast<size_t>(pos)] = -(chan + (shaped && plan.use_matcher ? prior : 0.0));
    }
    return llr;
}

struct RxResult {
    std::vector<uint8_t> info_bits;
    FrameStatus status = FrameStatus::Ok;
    int iterations = 0;
    bool bp_converged = false;
};

inline RxResult receive(const std::vector<double>& received, const FramePlan& plan,
                        double sigma2, int max_iter = 100) {
    const std::vector<double> llr = demap(received, plan, sigma2);
    const BpResult bp = bp_decode(*plan.code, llr, max_iter);

    RxResult res;
    res.iterations = bp.iterations;
    res.bp_converged = bp.converged;
    std::vector<uint8_t> u_hat;
    u_hat.reserve(plan.encoder.info_positions.size());
    for (int pos : plan.encoder.info_positions) u_hat.push_back(bp.hard[static_cast<size_t>(pos)]);

    if (!plan.use_matcher) {
        res.info_bits = std::move(u_hat);
        res.status = bp.converged ? FrameStatus::Ok : FrameStatus::DecodeFail;
        return res;
    }
    try {
        res.info_bits = dm_dematch(u_hat, plan.comp);
        res.status = bp.converged ? FrameStatus::Ok : FrameStatus::DecodeFail;
    } catch (const CompositionError&) {
        res.info_bits.assign(static_cast<size_t>(plan.comp.k_prime), 0);
        res.status = FrameStatus::CompositionFail;
    }
    return res;
}

}  // namespace psook
