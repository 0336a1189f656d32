#include <catch2/catch_amalgamated.hpp>

#include "psook/codefile.hpp"
#include "psook/ldpc.hpp"
#include "psook/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace psook;

namespace {
const std::string kData = PSOOK_DATA_DIR;

// Dense 0/1 matrix helpers, independent of the library's packed BitMatrix.
using Dense = std::vector<std::vector<uint8_t>>;

Dense dense_of(const LiftedCode& code) {
    Dense h(static_cast<size_t>(code.m()), std::vector<uint8_t>(static_cast<size_t>(code.n_full()), 0));
    for (int c = 0; c < code.m(); ++c)
        for (int32_t k = code.chk_off[c]; k < code.chk_off[c + 1]; ++k)
            h[c][static_cast<size_t>(code.edge_var[code.chk_edges[k]])] ^= 1;
    return h;
}

// Solves H_parity * x = H_info * u by plain Gauss-Jordan; the test's own
// elimination, sharing no code with SystematicEncoder.
std::vector<uint8_t> oracle_encode(const Dense& h, const std::vector<int>& info_pos,
                                   const std::vector<int>& par_pos, const std::vector<uint8_t>& u) {
    const size_t m = h.size(), np = par_pos.size();
    REQUIRE(np == m);
    Dense aug(m, std::vector<uint8_t>(np + 1, 0));
    for (size_t r = 0; r < m; ++r) {
        for (size_t c = 0; c < np; ++c) aug[r][c] = h[r][static_cast<size_t>(par_pos[c])];
        uint8_t s = 0;
        for (size_t c = 0; c < u.size(); ++c) s ^= static_cast<uint8_t>(h[r][static_cast<size_t>(info_pos[c])] & u[c]);
        aug[r][np] = s;
    }
    for (size_t col = 0, row = 0; col < np && row < m; ++col) {
        size_t piv = row;
        while (piv < m && !aug[piv][col]) ++piv;
        if (piv == m) continue;
        std::swap(aug[piv], aug[row]);
        for (size_t r = 0; r < m; ++r)
            if (r != row && aug[r][col])
                for (size_t c = col; c <= np; ++c) aug[r][c] ^= aug[row][c];
        ++row;
    }
    std::vector<uint8_t> c(h[0].size(), 0);
    for (size_t i = 0; i < u.size(); ++i) c[static_cast<size_t>(info_pos[i])] = u[i];
    for (size_t r = 0; r < m; ++r) {
        size_t lead = np;
        for (size_t col = 0; col < np; ++col)
            if (aug[r][col]) { lead = col; break; }
        if (lead < np) c[static_cast<size_t>(par_pos[lead])] = aug[r][np];
    }
    return c;
}

bool syndrome_zero(const LiftedCode& code, const std::vector<uint8_t>& c) {
    for (int chk = 0; chk < code.m(); ++chk) {
        int par = 0;
        for (int32_t k = code.chk_off[chk]; k < code.chk_off[chk + 1]; ++k)
            par ^= c[static_cast<size_t>(code.edge_var[code.chk_edges[k]])];
        if (par) return false;
    }
    return true;
}

// A hand-rolled 0/1 base matrix wrapped as a Q=1 "lift" so the BP decoder
// can run on arbitrary small graphs.
LiftedCode toy_code(int m, int n, const std::vector<std::pair<int, int>>& ones) {
    LiftedCode code;
    code.base.rows = m;
    code.base.cols = n;
    code.base.entries.assign(static_cast<size_t>(m) * n, 0);
    for (auto [i, j] : ones) code.base.entries[static_cast<size_t>(i) * n + j] = 1;
    code.q = 1;
    code.cell_shifts.assign(code.base.entries.size(), {});
    for (size_t c = 0; c < code.base.entries.size(); ++c)
        if (code.base.entries[c]) code.cell_shifts[c] = {0};
    code.build_adjacency();
    return code;
}

std::vector<std::vector<uint8_t>> enumerate_codewords(const LiftedCode& code) {
    const int n = code.n_full();
    std::vector<std::vector<uint8_t>> words;
    for (uint64_t v = 0; v < (1ull << n); ++v) {
        std::vector<uint8_t> c(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) c[static_cast<size_t>(i)] = (v >> i) & 1;
        if (syndrome_zero(code, c)) words.push_back(c);
    }
    return words;
}

// Exact bitwise MAP from an LLR vector (l = log p0/p1 per bit).
std::vector<double> map_marginals(const std::vector<std::vector<uint8_t>>& words,
                                  const std::vector<double>& llr) {
    const size_t n = llr.size();
    std::vector<double> p0(n, 0.0), p1(n, 0.0);
    for (const auto& w : words) {
        double logw = 0.0;
        for (size_t i = 0; i < n; ++i)
            if (w[i]) logw -= llr[i];
        const double pw = std::exp(logw);
        for (size_t i = 0; i < n; ++i) (w[i] ? p1[i] : p0[i]) += pw;
    }
    std::vector<double> out(n);
    for (size_t i = 0; i < n; ++i) out[i] = std::log(p0[i] / p1[i]);
    return out;
}
}  // namespace

TEST_CASE("lift degree structure matches the base matrix") {
    const BaseMatrix b2 = load_base_matrix(kData + "/b2.txt");
    const LiftedCode code = lift(b2, 9, 3);
    REQUIRE(code.m() == 27);
    REQUIRE(code.n_full() == 81);
    for (int j = 0; j < code.n_full(); ++j) {
        const int deg = code.var_off[j + 1] - code.var_off[j];
        REQUIRE(deg == b2.col_sum(j / 9));
    }
    for (int i = 0; i < code.m(); ++i) {
        const int deg = code.chk_off[i + 1] - code.chk_off[i];
        REQUIRE(deg == b2.row_sum(i / 9));
    }
}

TEST_CASE("lift dimensions and rate for the punctured matrix") {
    const BaseMatrix b1 = load_base_matrix(kData + "/b1.txt");
    const LiftedCode code = lift(b1, 100, 1);
    CHECK(code.n_full() == 700);
    CHECK(code.m() == 400);
    CHECK(code.n_tx() == 600);
    CHECK_THAT(code.rate_code(), Catch::Matchers::WithinAbs(0.5, 1e-12));
    CHECK(code.punctured_bits.size() == 100);
    CHECK(code.punctured_bits.front() == 0);
    CHECK(code.punctured_bits.back() == 99);
}

TEST_CASE("parallel edges get pairwise distinct shifts") {
    const BaseMatrix b3 = load_base_matrix(kData + "/b3.txt");
    const LiftedCode code = lift(b3, 8, 5);
    for (int i = 0; i < b3.rows; ++i)
        for (int j = 0; j < b3.cols; ++j) {
            auto shifts = code.shifts_at(i, j);
            REQUIRE(static_cast<int>(shifts.size()) == b3.at(i, j));
            std::sort(shifts.begin(), shifts.end());
            REQUIRE(std::adjacent_find(shifts.begin(), shifts.end()) == shifts.end());
        }
}

TEST_CASE("lift rejects undersized factors and is seed-deterministic") {
    const BaseMatrix b2 = load_base_matrix(kData + "/b2.txt");
    CHECK_THROWS(lift(b2, 4, 1));
    const LiftedCode a = lift(b2, 16, 9);
    const LiftedCode b = lift(b2, 16, 9);
    CHECK(a.cell_shifts == b.cell_shifts);
    const LiftedCode c = lift(b2, 16, 10);
    CHECK(a.cell_shifts != c.cell_shifts);
}

TEST_CASE("greedy shifts beat random shifts on 4-cycles") {
    const BaseMatrix b3 = load_base_matrix(kData + "/b3.txt");
    const int q = 512;
    const uint64_t greedy = count_4cycles(lift(b3, q, 2));
    uint64_t worse = 0, total_random = 0;
    for (int seed = 0; seed < 100; ++seed) {
        LiftedCode rnd;
        rnd.base = b3;
        rnd.q = q;
        rnd.cell_shifts.assign(b3.entries.size(), {});
        Rng rng(derive_seed(555, seed));
        for (size_t cidx = 0; cidx < b3.entries.size(); ++cidx) {
            std::vector<int> s;
            while (static_cast<int>(s.size()) < b3.entries[cidx]) {
                const int cand = static_cast<int>(rng.below(static_cast<uint64_t>(q)));
                if (std::find(s.begin(), s.end(), cand) == s.end()) s.push_back(cand);
            }
            rnd.cell_shifts[cidx] = s;
        }
        rnd.build_adjacency();
        const uint64_t cnt = count_4cycles(rnd);
        total_random += cnt;
        if (cnt >= greedy) ++worse;
        REQUIRE(cnt >= greedy);  // greedy is never beaten at this size
    }
    INFO("greedy " << greedy << " mean random " << total_random / 100.0);
    CHECK(static_cast<double>(greedy) < total_random / 100.0);
    CHECK(worse == 100);
}

TEST_CASE("systematic encoder matches an independent GF(2) solve") {
    Rng rng(31);
    LiftedCode code;
    SystematicEncoder enc;
    // random sparse 20x40 toy, column weight 3; retried until full rank
    for (uint64_t attempt = 0;; ++attempt) {
        std::vector<std::pair<int, int>> ones;
        Rng gen(derive_seed(808, attempt));
        for (int j = 0; j < 40; ++j)
            for (int w = 0; w < 3;) {
                const int i = static_cast<int>(gen.below(20));
                if (std::find(ones.begin(), ones.end(), std::pair{i, j}) == ones.end()) {
                    ones.emplace_back(i, j);
                    ++w;
                }
            }
        code = toy_code(20, 40, ones);
        try {
            enc = build_systematic_encoder(code);
            break;
        } catch (const std::exception&) {
            REQUIRE(attempt < 20);  // full-rank draws are overwhelmingly likely
        }
    }
    const Dense h = dense_of(code);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<uint8_t> u(static_cast<size_t>(enc.k()));
        for (auto& bit : u) bit = rng.bit();
        const std::vector<uint8_t> mine = enc.encode(u);
        const std::vector<uint8_t> want =
            oracle_encode(h, enc.info_positions, enc.parity_positions, u);
        REQUIRE(mine == want);
    }
}

TEST_CASE("encoder outputs are codewords; zero maps to zero") {
    const BaseMatrix b2 = load_base_matrix(kData + "/b2.txt");
    const LiftedCode code = lift(b2, 9, 3);
    const SystematicEncoder enc = build_systematic_encoder(code);
    REQUIRE(enc.k() == 54);
    const std::vector<uint8_t> zero(54, 0);
    CHECK(enc.encode(zero) == std::vector<uint8_t>(81, 0));
    Rng rng(17);
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<uint8_t> u(54);
        for (auto& bit : u) bit = rng.bit();
        REQUIRE(syndrome_zero(code, enc.encode(u)));
    }
}

TEST_CASE("bp posteriors equal brute-force MAP on a tree") {
    // v1 joins r0/r1, v3 joins r1/r2: a path, no cycles
    const LiftedCode code =
        toy_code(3, 6, {{0, 0}, {0, 1}, {1, 1}, {1, 2}, {1, 3}, {2, 3}, {2, 4}, {2, 5}});
    const auto words = enumerate_codewords(code);
    REQUIRE(words.size() == 8);
    Rng rng(99);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> llr(6);
        for (auto& l : llr) l = 3.0 * rng.normal();
        const auto want = map_marginals(words, llr);
        const auto got = bp_posteriors(code, llr, 50);
        for (size_t i = 0; i < 6; ++i) REQUIRE_THAT(got[i], Catch::Matchers::WithinAbs(want[i], 1e-6));
    }
}

TEST_CASE("bp agrees with MAP on most draws of a cycle-heavy toy") {
    const LiftedCode code = toy_code(
        4, 8, {{0, 0}, {0, 1}, {0, 4}, {1, 1}, {1, 2}, {1, 5}, {2, 2}, {2, 3}, {2, 6},
               {3, 3}, {3, 0}, {3, 7}});
    const auto words = enumerate_codewords(code);
    REQUIRE(words.size() == 16);
    Rng rng(123);
    int agree = 0;
    const double sigma = 0.6;
    for (int trial = 0; trial < 1000; ++trial) {
        const auto& cw = words[rng.below(words.size())];
        std::vector<double> llr(8);
        for (size_t i = 0; i < 8; ++i) {
            const double x = cw[i] ? 1.0 : -1.0;  // antipodal for the toy
            const double y = x + sigma * rng.normal();
            llr[i] = -2.0 * y / (sigma * sigma);
        }
        const auto map_llr = map_marginals(words, llr);
        const BpResult bp = bp_decode(code, llr, 50);
        bool same = true;
        for (size_t i = 0; i < 8; ++i) same &= bp.hard[i] == (map_llr[i] < 0.0 ? 1 : 0);
        agree += same;
    }
    INFO("agreement " << agree << "/1000");
    CHECK(agree >= 950);
}

TEST_CASE("noiseless saturated input decodes in at most one iteration") {
    const BaseMatrix b2 = load_base_matrix(kData + "/b2.txt");
    const LiftedCode code = lift(b2, 9, 3);
    const SystematicEncoder enc = build_systematic_encoder(code);
    Rng rng(5);
    std::vector<uint8_t> u(54);
    for (auto& bit : u) bit = rng.bit();
    const auto c = enc.encode(u);
    std::vector<double> llr(81);
    for (size_t i = 0; i < 81; ++i) llr[i] = c[i] ? -36.0 : 36.0;
    const BpResult res = bp_decode(code, llr, 100);
    CHECK(res.converged);
    CHECK(res.iterations <= 1);
    CHECK(res.hard == c);
}

TEST_CASE("single flipped bit is corrected on a girth-6 lift") {
    const BaseMatrix b2 = load_base_matrix(kData + "/b2.txt");
    // Q = 64 is the smallest power of two where the greedy assignment clears
    // every 4-cycle for this base (multi-edge cells exclude small Q entirely)
    const LiftedCode code = lift(b2, 64, 3);
    REQUIRE(count_4cycles(code) == 0);
    const SystematicEncoder enc = build_systematic_encoder(code);
    Rng rng(6);
    std::vector<uint8_t> u(static_cast<size_t>(enc.k()));
    for (auto& bit : u) bit = rng.bit();
    const auto c = enc.encode(u);
    for (int flip : {0, 40, 100}) {
        std::vector<double> llr(c.size());
        for (size_t i = 0; i < c.size(); ++i) llr[i] = c[i] ? -4.0 : 4.0;
        llr[static_cast<size_t>(flip)] = -llr[static_cast<size_t>(flip)];
        const BpResult res = bp_decode(code, llr, 100);
        REQUIRE(res.converged);
        REQUIRE(res.hard == c);
    }
}

TEST_CASE("round trip at high SNR is error free") {
    Rng rng(2718);
    for (const char* name : {"/b1.txt", "/b2.txt", "/b3.txt"}) {
        const BaseMatrix b = load_base_matrix(kData + name);
        const LiftedCode code = lift(b, 64, 1);
        const SystematicEncoder enc = build_systematic_encoder(code);
        const double es_db = 15.0, amp = std::sqrt(2.0);
        const double sigma2 = SnrPoint::from_db(es_db).sigma2;
        const double sigma = std::sqrt(sigma2);
        int errors = 0;
        std::vector<uint8_t> u(static_cast<size_t>(enc.k()));
        std::vector<double> llr(static_cast<size_t>(code.n_full()));
        for (int frame = 0; frame < 10000; ++frame) {
            for (auto& bit : u) bit = rng.bit();
            const auto c = enc.encode(u);
            for (size_t i = 0; i < llr.size(); ++i) {
                if (std::binary_search(code.punctured_bits.begin(), code.punctured_bits.end(),
                                       static_cast<int>(i))) {
                    llr[i] = 0.0;
                    continue;
                }
                const double y = (c[i] ? amp : 0.0) + sigma * rng.normal();
                llr[i] = -(amp / sigma2) * y + amp * amp / (2.0 * sigma2);
            }
            const BpResult res = bp_decode(code, llr, 50);
            errors += res.hard != c;
        }
        INFO(name);
        CHECK(errors == 0);
    }
}
