#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "psook/gf2.hpp"
#include "psook/protograph.hpp"
#include "psook/rng.hpp"

// Quasi-cyclic lifting of base matrices, systematic encoding via GF(2)
// elimination, and flooding sum-product decoding.
//
// Lift convention: a base entry b_ij = t expands to t distinct Q x Q
// circulants; variable j*Q+v connects to check i*Q+((v+s) mod Q) for each
// shift s of the cell. Shifts are chosen greedily (seeded candidate order)
// to avoid length-4 cycles where possible.

namespace psook {

struct LiftedCode {
    BaseMatrix base;
    int q = 0;
    uint64_t seed = 0;
    std::vector<std::vector<int>> cell_shifts;  // per base cell, |list| = b_ij
    std::vector<int> punctured_bits;            // sorted bit positions

    // Tanner graph adjacency, built at construction.
    int n_edges = 0;
    std::vector<int32_t> edge_var, edge_chk;
    std::vector<int32_t> var_off, var_edges;
    std::vector<int32_t> chk_off, chk_edges;

    int m() const { return base.rows * q; }
    int n_full() const { return base.cols * q; }
    int n_tx() const { return n_full() - static_cast<int>(punctured_bits.size()); }
    double rate_code() const { return static_cast<double>(n_full() - m()) / n_tx(); }

    const std::vector<int>& shifts_at(int i, int j) const {
        return cell_shifts[static_cast<size_t>(i) * base.cols + j];
    }

    void build_adjacency() {
        const int n = n_full(), mm = m();
        edge_var.clear();
        edge_chk.clear();
        for (int i = 0; i < base.rows; ++i)
            for (int j = 0; j < base.cols; ++j)
                for (int s : shifts_at(i, j))
                    for (int v = 0; v < q; ++v) {
                        edge_var.push_back(j * q + v);
                        edge_chk.push_back(i * q + (v + s) % q);
                    }
        n_edges = static_cast<int>(edge_var.size());

        auto index = [](const std::vector<int32_t>& node_of, int count,
                        std::vector<int32_t>& off, std::vector<int32_t>& adj) {
            off.assign(static_cast<size_t>(count) + 1, 0);
            for (int32_t nd : node_of) ++off[static_cast<size_t>(nd) + 1];
            for (int c = 0; c < count; ++c) off[static_cast<size_t>(c) + 1] += off[static_cast<size_t>(c)];
            adj.resize(node_of.size());
            std::vector<int32_t> cursor(off.begin(), off.end() - 1);
            for (int32_t e = 0; e < static_cast<int32_t>(node_of.size()); ++e)
                adj[static_cast<size_t>(cursor[static_cast<size_t>(node_of[static_cast<size_t>(e)])]++)] = e;
        };
        index(edge_var, n, var_off, var_edges);
        index(edge_chk, mm, chk_off, chk_edges);
    }
};

namespace detail {

// New length-4 cycles created by placing shift s in cell (i,j), counted at
// the protograph level (each hit stands for Q lifted cycles). Enumerates
// placed families (i,j2,sa), (i2,j2,sb), (i2,j,sc) with
// s - sa + sb - sc = 0 (mod Q), plus the parallel-edge rule 2(s - s') = 0.
inline long score_shift(const std::vector<std::vector<int>>& placed, int rows, int cols,
                        int q, int i, int j, int s) {
    auto cell = [&](int r, int c) -> const std::vector<int>& {
        return placed[static_cast<size_t>(r) * cols + c];
    };
    long hits = 0;
    for (int j2 = 0; j2 < cols; ++j2) {
        for (int i2 = 0; i2 < rows; ++i2) {
            for (int sa : cell(i, j2))
                for (int sb : cell(i2, j2))
                    for (int sc : cell(i2, j)) {
                        if (i2 == i && sc == s) continue;     // same check group twice
                        if (j2 == j && sa == s) continue;     // same variable group twice
                        if (((s - sa + sb - sc) % q + q) % q == 0) ++hits;
                    }
        }
    }
    for (int sp : cell(i, j))
        if ((2 * (s - sp)) % q == 0) ++hits;
    return hits;
}

}  // namespace detail

/// Greedy seeded QC lift. Candidate shifts are tried in a per-edge shuffled
/// order; the first shift minimizing newly created 4-cycles wins. Distinct
/// shifts within a cell are mandatory.
inline LiftedCode lift(const BaseMatrix& b, int q, uint64_t seed) {
    b.validate();
    if (q < 8) throw std::invalid_argument("lift: q must be >= 8");
    if (q < b.max_entry()) throw std::invalid_argument("lift: q too small for parallel-edge separation");

    LiftedCode code;
    code.base = b;
    code.q = q;
    code.seed = seed;
    code.cell_shifts.assign(static_cast<size_t>(b.rows) * b.cols, {});

    int edge_ordinal = 0;
    std::vector<int> order(static_cast<size_t>(q));
    for (int i = 0; i < b.rows; ++i) {
        for (int j = 0; j < b.cols; ++j) {
            auto& placed_here = code.cell_shifts[static_cast<size_t>(i) * b.cols + j];
            for (int t = 0; t < b.at(i, j); ++t, ++edge_ordinal) {
                Rng rng(derive_seed(seed, 0x9c00ULL, static_cast<uint64_t>(edge_ordinal)));
                for (int v = 0; v < q; ++v) order[static_cast<size_t>(v)] = v;
                for (int v = q - 1; v > 0; --v)
                    std::swap(order[static_cast<size_t>(v)],
                              order[static_cast<size_t>(rng.below(static_cast<uint64_t>(v) + 1))]);
                long best_score = std::numeric_limits<long>::max();
                int best_shift = -1;
                for (int s : order) {
                    if (std::find(placed_here.begin(), placed_here.end(), s) != placed_here.end())
                        continue;
                    const long sc = detail::score_shift(code.cell_shifts, b.rows, b.cols, q, i, j, s);
                    if (sc < best_score) {
                        best_score = sc;
                        best_shift = s;
                        if (sc == 0) break;
                    }
                }
                placed_here.push_back(best_shift);
            }
            std::sort(placed_here.begin(), placed_here.end());
        }
    }

    for (int j : b.punctured_cols)
        for (int v = 0; v < q; ++v) code.punctured_bits.push_back(j * q + v);
    std::sort(code.punctured_bits.begin(), code.punctured_bits.end());
    code.build_adjacency();
    return code;
}

/// Exact 4-cycle count of the lifted Tanner graph: for every check pair
/// shared by c variables, C(c,2) cycles.
inline uint64_t count_4cycles(const LiftedCode& code) {
    std::vector<uint64_t> keys;
    const auto mm = static_cast<uint64_t>(code.m());
    for (int v = 0; v < code.n_full(); ++v) {
        std::vector<int32_t> checks;
        for (int32_t k = code.var_off[static_cast<size_t>(v)]; k < code.var_off[static_cast<size_t>(v) + 1]; ++k)
            checks.push_back(code.edge_chk[static_cast<size_t>(code.var_edges[static_cast<size_t>(k)])]);
        std::sort(checks.begin(), checks.end());
        for (size_t a = 0; a < checks.size(); ++a)
            for (size_t c = a + 1; c < checks.size(); ++c)
                keys.push_back(static_cast<uint64_t>(checks[a]) * mm + static_cast<uint64_t>(checks[c]));
    }
    std::sort(keys.begin(), keys.end());
    uint64_t cycles = 0;
    for (size_t a = 0; a < keys.size();) {
        size_t c = a;
        while (c < keys.size() && keys[c] == keys[a]) ++c;
        const uint64_t run = c - a;
        cycles += run * (run - 1) / 2;
        a = c;
    }
    return cycles;
}

inline BitMatrix dense_h(const LiftedCode& code) {
    BitMatrix h(code.m(), code.n_full());
    for (int e = 0; e < code.n_edges; ++e)
        h.set(code.edge_chk[static_cast<size_t>(e)], code.edge_var[static_cast<size_t>(e)], true);
    return h;
}

struct SystematicEncoder {
    std::vector<int> info_positions;    // ascending, size k
    std::vector<int> parity_positions;  // one per elimination row, size m
    BitMatrix p;                        // m x k over GF(2): parity_r = <p_r, u>
    int n_full = 0;

    int k() const { return static_cast<int>(info_positions.size()); }

    std::vector<uint8_t> encode(const std::vector<uint8_t>& u) const {
        if (static_cast<int>(u.size()) != k())
            throw std::invalid_argument("encode: info length mismatch");
        std::vector<uint8_t> c(static_cast<size_t>(n_full), 0);
        for (int i = 0; i < k(); ++i) c[static_cast<size_t>(info_positions[static_cast<size_t>(i)])] = u[static_cast<size_t>(i)];
        const auto uw = pack_bits(u);
        for (size_t r = 0; r < parity_positions.size(); ++r)
            c[static_cast<size_t>(parity_positions[r])] = static_cast<uint8_t>(
                dot_parity(p.row(static_cast<int>(r)), uw.data(), p.words_per_row()));
        return c;
    }
};

/// Gaussian elimination to G = (I P) form, up to the recorded column
/// permutation. Pivots prefer punctured columns, then the rightmost
/// transmitted columns, so the info positions land on the leading
/// (shaped) columns whenever the preferred submatrix is invertible.
inline SystematicEncoder build_systematic_encoder(const LiftedCode& code) {
    const int mm = code.m(), n = code.n_full();
    BitMatrix h = dense_h(code);

    std::vector<int> pref;
    pref.reserve(static_cast<size_t>(n));
    for (int bit : code.punctured_bits) pref.push_back(bit);
    for (int c = n - 1; c >= 0; --c) {
        if (!std::binary_search(code.punctured_bits.begin(), code.punctured_bits.end(), c))
            pref.push_back(c);
    }

    std::vector<int> pivot_row_of_col(static_cast<size_t>(n), -1);
    std::vector<int> pivot_col_of_row(static_cast<size_t>(mm), -1);
    std::vector<char> row_used(static_cast<size_t>(mm), 0);
    int rank = 0;
    for (int c : pref) {
        if (rank == mm) break;
        int r = -1;
        for (int i = 0; i < mm; ++i)
            if (!row_used[static_cast<size_t>(i)] && h.get(i, c)) { r = i; break; }
        if (r < 0) continue;
        row_used[static_cast<size_t>(r)] = 1;
        pivot_row_of_col[static_cast<size_t>(c)] = r;
        pivot_col_of_row[static_cast<size_t>(r)] = c;
        for (int i = 0; i < mm; ++i)
            if (i != r && h.get(i, c)) h.xor_rows(i, r);
        ++rank;
    }
    if (rank < mm) {
        throw std::runtime_error("build_systematic_encoder: rank-deficient H (rank " +
                                 std::to_string(rank) + " of " + std::to_string(mm) +
                                 "); retry with another lift seed");
    }

    SystematicEncoder enc;
    enc.n_full = n;
    for (int c = 0; c < n; ++c)
        if (pivot_row_of_col[static_cast<size_t>(c)] < 0) enc.info_positions.push_back(c);
    const int k = static_cast<int>(enc.info_positions.size());
    std::vector<int> info_index(static_cast<size_t>(n), -1);
    for (int i = 0; i < k; ++i) info_index[static_cast<size_t>(enc.info_positions[static_cast<size_t>(i)])] = i;

    enc.parity_positions.resize(static_cast<size_t>(mm));
    enc.p = BitMatrix(mm, k);
    int out_row = 0;
    for (int c = 0; c < n; ++c) {
        const int r = pivot_row_of_col[static_cast<size_t>(c)];
        if (r < 0) continue;
        enc.parity_positions[static_cast<size_t>(out_row)] = c;
        for (int j = 0; j < n; ++j)
            if (j != c && h.get(r, j)) {
                const int idx = info_index[static_cast<size_t>(j)];
                // after full reduction only info columns remain set
                if (idx < 0) throw std::logic_error("build_systematic_encoder: reduction left a pivot column set");
                enc.p.set(out_row, idx, true);
            }
        ++out_row;
    }
    return enc;
}

inline constexpr double kBpMsgClamp = 36.0;  // tanh(18) < 1 in double

struct BpResult {
    std::vector<uint8_t> hard;
    int iterations = 0;
    bool converged = false;
};

/// Flooding sum-product in the log domain (tanh rule, forward/backward
/// partial products), syndrome early stop. Positive LLR favors bit 0.
inline BpResult bp_decode(const LiftedCode& code, const std::vector<double>& llr,
                          int max_iter = 100) {
    const int n = code.n_full(), mm = code.m(), ne = code.n_edges;
    if (static_cast<int>(llr.size()) != n)
        throw std::invalid_argument("bp_decode: llr length mismatch");

    BpResult res;
    res.hard.resize(static_cast<size_t>(n));

    auto harden = [&](const std::vector<double>& post) {
        for (int v = 0; v < n; ++v) res.hard[static_cast<size_t>(v)] = post[static_cast<size_t>(v)] < 0.0 ? 1 : 0;
    };
    auto syndrome_ok = [&] {
        for (int c = 0; c < mm; ++c) {
            int par = 0;
            for (int32_t k = code.chk_off[static_cast<size_t>(c)]; k < code.chk_off[static_cast<size_t>(c) + 1]; ++k)
                par ^= res.hard[static_cast<size_t>(code.edge_var[static_cast<size_t>(code.chk_edges[static_cast<size_t>(k)])])];
            if (par) return false;
        }
        return true;
    };

    std::vector<double> post(llr);
    harden(post);
    if (syndrome_ok()) {
        res.converged = true;
        return res;
    }

    std::vector<double> m_vc(static_cast<size_t>(ne)), m_cv(static_cast<size_t>(ne), 0.0);
    for (int e = 0; e < ne; ++e) m_vc[static_cast<size_t>(e)] = llr[static_cast<size_t>(code.edge_var[static_cast<size_t>(e)])];

    std::vector<double> t(static_cast<size_t>(ne));
    std::vector<double> prefix;
    for (int it = 1; it <= max_iter; ++it) {
        for (int e = 0; e < ne; ++e)
            t[static_cast<size_t>(e)] = std::tanh(0.5 * std::clamp(m_vc[static_cast<size_t>(e)], -kBpMsgClamp, kBpMsgClamp));
        for (int c = 0; c < mm; ++c) {
            const int32_t lo = code.chk_off[static_cast<size_t>(c)], hi = code.chk_off[static_cast<size_t>(c) + 1];
            const int deg = hi - lo;
            prefix.assign(static_cast<size_t>(deg) + 1, 1.0);
            for (int d = 0; d < deg; ++d)
                prefix[static_cast<size_t>(d) + 1] =
                    prefix[static_cast<size_t>(d)] * t[static_cast<size_t>(code.chk_edges[static_cast<size_t>(lo + d)])];
            double suffix = 1.0;
            for (int d = deg - 1; d >= 0; --d) {
                const int32_t e = code.chk_edges[static_cast<size_t>(lo + d)];
                const double ex = prefix[static_cast<size_t>(d)] * suffix;
                m_cv[static_cast<size_t>(e)] = 2.0 * std::atanh(std::clamp(ex, -1.0 + 1e-15, 1.0 - 1e-15));
                suffix *= t[static_cast<size_t>(e)];
            }
        }
        for (int v = 0; v < n; ++v) {
            double sum = llr[static_cast<size_t>(v)];
            for (int32_t k = code.var_off[static_cast<size_t>(v)]; k < code.var_off[static_cast<size_t>(v) + 1]; ++k)
                sum += m_cv[static_cast<size_t>(code.var_edges[static_cast<size_t>(k)])];
            post[static_cast<size_t>(v)] = sum;
            for (int32_t k = code.var_off[static_cast<size_t>(v)]; k < code.var_off[static_cast<size_t>(v) + 1]; ++k) {
                const int32_t e = code.var_edges[static_cast<size_t>(k)];
                m_vc[static_cast<size_t>(e)] = sum - m_cv[static_cast<size_t>(e)];
            }
        }
        harden(post);
        res.iterations = it;
        if (syndrome_ok()) {
            res.converged = true;
            return res;
        }
    }
    return res;
}

/// Posterior LLRs after BP (for oracle comparisons in tests).
inline std::vector<double> bp_posteriors(const LiftedCode& code, const std::vector<double>& llr,
                                         int max_iter = 100) {
    const int n = code.n_full(), ne = code.n_edges;
    std::vector<double> m_vc(static_cast<size_t>(ne)), m_cv(static_cast<size_t>(ne), 0.0);
    for (int e = 0; e < ne; ++e) m_vc[static_cast<size_t>(e)] = llr[static_cast<size_t>(code.edge_var[static_cast<size_t>(e)])];
    std::vector<double> t(static_cast<size_t>(ne)), post(llr), prefix;
    for (int it = 1; it <= max_iter; ++it) {
        for (int e = 0; e < ne; ++e)
            t[static_cast<size_t>(e)] = std::tanh(0.5 * std::clamp(m_vc[static_cast<size_t>(e)], -kBpMsgClamp, kBpMsgClamp));
        for (int c = 0; c < code.m(); ++c) {
            const int32_t lo = code.chk_off[static_cast<size_t>(c)], hi = code.chk_off[static_cast<size_t>(c) + 1];
            const int deg = hi - lo;
            prefix.assign(static_cast<size_t>(deg) + 1, 1.0);
            for (int d = 0; d < deg; ++d)
                prefix[static_cast<size_t>(d) + 1] =
                    prefix[static_cast<size_t>(d)] * t[static_cast<size_t>(code.chk_edges[static_cast<size_t>(lo + d)])];
            double suffix = 1.0;
            for (int d = deg - 1; d >= 0; --d) {
                const int32_t e = code.chk_edges[static_cast<size_t>(lo + d)];
                const double ex = prefix[static_cast<size_t>(d)] * suffix;
                m_cv[static_cast<size_t>(e)] = 2.0 * std::atanh(std::clamp(ex, -1.0 + 1e-15, 1.0 - 1e-15));
                suffix *= t[static_cast<size_t>(e)];
            }
        }
        for (int v = 0; v < n; ++v) {
            double sum = llr[static_cast<size_t>(v)];
            for (int32_t k = code.var_off[static_cast<size_t>(v)]; k < code.var_off[static_cast<size_t>(v) + 1]; ++k)
                sum += m_cv[static_cast<size_t>(code.var_edges[static_cast<size_t>(k)])];
            post[static_cast<size_t>(v)] = sum;
            for (int32_t k = code.var_off[static_cast<size_t>(v)]; k < code.var_off[static_cast<size_t>(v) + 1]; ++k) {
                const int32_t e = code.var_edges[static_cast<size_t>(k)];
                m_vc[static_cast<size_t>(e)] = sum - m_cv[static_cast<size_t>(e)];
            }
        }
    }
    return post;
}

}  // namespace psook
