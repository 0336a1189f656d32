#include <catch2/catch_amalgamated.hpp>

#include "psook/codefile.hpp"
#include "psook/txchain.hpp"

#include <cmath>

using namespace psook;

namespace {
const std::string kData = PSOOK_DATA_DIR;

FramePlan plan_b2(int q, int case_id = 2, double rtx = 0.25, bool matcher = true) {
    static std::map<int, LiftedCode> cache;  // plans keep a pointer to the code
    auto& code = cache[q];
    if (code.q == 0) code = lift(load_base_matrix(kData + "/b2.txt"), q, 3);
    const TsConfig ts = make_ts_config(case_id, rtx, 2.0 / 3.0);
    return make_frame_plan(code, ts, matcher);
}

std::vector<uint8_t> random_bits(Rng& rng, int n) {
    std::vector<uint8_t> bits(static_cast<size_t>(n));
    for (auto& b : bits) b = rng.bit();
    return bits;
}
}  // namespace

TEST_CASE("plan geometry for the rate 2/3 code") {
    const FramePlan plan = plan_b2(9);
    CHECK(plan.n_tx() == 81);
    CHECK(plan.encoder.k() == 54);
    CHECK(plan.comp.k == 54);  // every info bit is shaped at R_C = 2/3
    CHECK(plan.input_length() == plan.comp.k_prime);
    CHECK(plan.rtx_realized() < 0.25);
    CHECK(plan.rtx_realized() > 0.2);
    // transmit order: shaped block first, then the uniform parity block
    const int k = plan.encoder.k();
    for (int i = 0; i < plan.n_tx(); ++i) {
        const BitRole want = i < k ? BitRole::Shaped : BitRole::Uniform;
        REQUIRE(plan.role[static_cast<size_t>(plan.tx_positions[static_cast<size_t>(i)])] == want);
    }
}

TEST_CASE("noiseless round trips") {
    const FramePlan plan = plan_b2(9);
    Rng rng(1);
    for (int trial = 0; trial < 100; ++trial) {
        const auto info = random_bits(rng, plan.input_length());
        const TxFrame tx = transmit(info, plan);
        const RxResult rx = receive(tx.symbols, plan, 1e-10);
        REQUIRE(rx.status == FrameStatus::Ok);
        REQUIRE(rx.info_bits == info);
    }
}

TEST_CASE("all-zero info gives the all-zero frame") {
    // index 0 still carries n1 pulses; uniform signaling is the true zero case
    const FramePlan plan = plan_b2(9, 1, 0.25, false);
    const std::vector<uint8_t> zeros(static_cast<size_t>(plan.input_length()), 0);
    const TxFrame tx = transmit(zeros, plan);
    CHECK(tx.codeword == std::vector<uint8_t>(81, 0));
    for (double s : tx.symbols) CHECK(s == 0.0);
}

TEST_CASE("shaped block has the exact composition, parity is near uniform") {
    const FramePlan plan = plan_b2(16);
    Rng rng(2);
    const int k = plan.comp.k, n1 = plan.comp.n1;
    int parity_ones = 0, parity_bits = 0;
    for (int frame = 0; frame < 100; ++frame) {
        const TxFrame tx = transmit(random_bits(rng, plan.input_length()), plan);
        int shaped_ones = 0;
        for (int i = 0; i < k; ++i)
            shaped_ones += tx.symbols[static_cast<size_t>(i)] != 0.0;
        REQUIRE(shaped_ones == n1);
        for (size_t i = static_cast<size_t>(k); i < tx.symbols.size(); ++i) {
            parity_ones += tx.symbols[i] != 0.0;
            ++parity_bits;
        }
    }
    const double mean = static_cast<double>(parity_ones) / parity_bits;
    const double bound = 3.0 * std::sqrt(0.25 / parity_bits);
    CHECK_THAT(mean, Catch::Matchers::WithinAbs(0.5, bound));
}

TEST_CASE("average frame power honors the unit constraint") {
    const FramePlan plan = plan_b2(64);
    Rng rng(3);
    double acc = 0.0;
    uint64_t syms = 0;
    for (int frame = 0; frame < 1000; ++frame) {
        const TxFrame tx = transmit(random_bits(rng, plan.input_length()), plan);
        for (double s : tx.symbols) acc += s * s;
        syms += tx.symbols.size();
    }
    const double power = acc / static_cast<double>(syms);
    CHECK_THAT(power, Catch::Matchers::WithinRel(1.0, 0.02));
}

TEST_CASE("demapper is exactly calibrated") {
    const FramePlan plan = plan_b2(9);
    const double sigma2 = 0.4;
    Rng rng(4);
    std::vector<double> y(static_cast<size_t>(plan.n_tx()));
    // 200 frames x 81 positions: over 10^4 checked posteriors
    for (int trial = 0; trial < 200; ++trial) {
        for (auto& v : y) v = -2.0 + 5.0 * rng.uniform();
        const auto llr = demap(y, plan, sigma2);
        for (size_t i = 0; i < y.size(); ++i) {
            const int pos = plan.tx_positions[i];
            const double a = plan.amplitude(pos);
            const double p1 =
                plan.role[static_cast<size_t>(pos)] == BitRole::Shaped
                    ? static_cast<double>(plan.comp.n1) / plan.comp.k
                    : 0.5;
            const double w1 = p1 * std::exp(-(y[i] - a) * (y[i] - a) / (2.0 * sigma2));
            const double w0 = (1.0 - p1) * std::exp(-y[i] * y[i] / (2.0 * sigma2));
            const double posterior1 = w1 / (w0 + w1);
            const double from_llr = 1.0 / (1.0 + std::exp(llr[static_cast<size_t>(pos)]));
            REQUIRE_THAT(from_llr, Catch::Matchers::WithinAbs(posterior1, 1e-12));
        }
    }
}

TEST_CASE("demapper sign convention") {
    const FramePlan plan = plan_b2(9, 1, 0.25);  // case 1: common amplitude
    const double a = plan.ts.amp_uniform;
    std::vector<double> y(static_cast<size_t>(plan.n_tx()), a / 2.0);
    const auto llr = demap(y, plan, 1.0);
    const int first_parity = plan.tx_positions[static_cast<size_t>(plan.comp.k)];
    CHECK_THAT(llr[static_cast<size_t>(first_parity)], Catch::Matchers::WithinAbs(0.0, 1e-12));
    // strong pulse observation drives the LLR negative (bit 1); the exact
    // parity-bit value at y = 20a with unit noise is -(20a^2 - a^2/2)
    std::fill(y.begin(), y.end(), 20.0 * a);
    const auto llr2 = demap(y, plan, 1.0);
    CHECK_THAT(llr2[static_cast<size_t>(first_parity)],
               Catch::Matchers::WithinRel(-19.5 * a * a, 1e-12));
}

TEST_CASE("awgn channel statistics") {
    Rng rng(5);
    std::vector<double> x(1000000, 0.7);
    const auto y0 = channel_awgn(x, 1e-300, rng);
    CHECK(y0[0] == 0.7);

    const double sigma2 = 0.31;
    Rng rng2(6);
    const auto y = channel_awgn(x, sigma2, rng2);
    double acc = 0.0, acc2 = 0.0;
    for (size_t i = 0; i < y.size(); ++i) {
        const double n = y[i] - 0.7;
        acc += n;
        acc2 += n * n;
    }
    const double mean = acc / static_cast<double>(y.size());
    const double var = acc2 / static_cast<double>(y.size()) - mean * mean;
    CHECK_THAT(var, Catch::Matchers::WithinRel(sigma2, 0.01));
    CHECK_THAT(mean, Catch::Matchers::WithinAbs(0.0, 3.0 * std::sqrt(sigma2 / 1e6)));

    // distinct sub-seeded streams are uncorrelated
    Rng a(derive_seed(9, 0)), b(derive_seed(9, 1));
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const double u = a.normal(), v = b.normal();
        sxy += u * v;
        sxx += u * u;
        syy += v * v;
    }
    CHECK(std::abs(sxy / std::sqrt(sxx * syy)) < 0.01);
}

TEST_CASE("transmit validates the input length") {
    const FramePlan plan = plan_b2(9);
    CHECK_THROWS(transmit(std::vector<uint8_t>(3, 0), plan));
}

TEST_CASE("composition failure is reported and counted") {
    const FramePlan plan = plan_b2(9);
    // an undecodable all-noise frame ends in DecodeFail or CompositionFail
    std::vector<double> garbage(static_cast<size_t>(plan.n_tx()));
    Rng rng(7);
    for (auto& v : garbage) v = 3.0 * rng.normal();
    const RxResult rx = receive(garbage, plan, 0.05, 30);
    CHECK(rx.status != FrameStatus::Ok);
    CHECK(rx.info_bits.size() == static_cast<size_t>(plan.input_length()));
}

TEST_CASE("waterfall sanity above and below threshold") {
    const FramePlan plan = plan_b2(64);  // n_tx = 576
    const double thr_es = -4.4336;      // frozen regression threshold of B2/TS-2
    Rng rng(8);

    auto cer_at = [&](double es_db, int frames) {
        const double sigma2 = SnrPoint::from_db(es_db).sigma2;
        int errors = 0;
        for (int f = 0; f < frames; ++f) {
            Rng fr(derive_seed(31337, static_cast<uint64_t>(f)));
            const auto info = random_bits(fr, plan.input_length());
            const TxFrame tx = transmit(info, plan);
            const auto y = channel_awgn(tx.symbols, sigma2, fr);
            const RxResult rx = receive(y, plan, sigma2);
            errors += rx.status != FrameStatus::Ok || rx.info_bits != info;
        }
        return static_cast<double>(errors) / frames;
    };

    CHECK(cer_at(thr_es - 1.0, 200) > 0.5);
    // measured finite-length gap at n = 576 is ~2.7 dB at CER 1e-2
    CHECK(cer_at(thr_es + 3.0, 10000) < 1e-2);
}
