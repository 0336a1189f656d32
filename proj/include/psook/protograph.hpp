#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "psook/infotheory.hpp"
#include "psook/jfunction.hpp"
#include "psook/surrogate.hpp"

// Protograph base matrices, the shaped/uniform/punctured channel split, and
// P-EXIT threshold analysis. The recursion tracks one MI value per nonzero
// base-matrix cell; parallel edges enter through the multiplicities b_ij.

namespace psook {

struct BaseMatrix {
    int rows = 0, cols = 0;
    std::vector<int> entries;        // row-major, b_ij parallel edge counts
    std::vector<int> punctured_cols; // sorted, unique

    int at(int i, int j) const { return entries[static_cast<size_t>(i) * cols + j]; }
    int& at(int i, int j) { return entries[static_cast<size_t>(i) * cols + j]; }

    int col_sum(int j) const {
        int s = 0;
        for (int i = 0; i < rows; ++i) s += at(i, j);
        return s;
    }
    int row_sum(int i) const {
        int s = 0;
        for (int j = 0; j < cols; ++j) s += at(i, j);
        return s;
    }
    int max_entry() const { return *std::max_element(entries.begin(), entries.end()); }
    bool is_punctured(int j) const {
        return std::binary_search(punctured_cols.begin(), punctured_cols.end(), j);
    }

    void validate(int max_entry_cap = 4) const {
        if (rows <= 0 || cols <= 0 || entries.size() != static_cast<size_t>(rows) * cols)
            throw std::invalid_argument("BaseMatrix: inconsistent dimensions");
        for (int e : entries) {
            if (e < 0) throw std::invalid_argument("BaseMatrix: negative entry");
            if (e > max_entry_cap) throw std::invalid_argument("BaseMatrix: entry exceeds cap");
        }
        for (int j = 0; j < cols; ++j)
            if (col_sum(j) == 0) throw std::invalid_argument("BaseMatrix: zero column");
        for (int j : punctured_cols)
            if (j < 0 || j >= cols) throw std::invalid_argument("BaseMatrix: punctured index out of range");
    }
};

inline double design_rate(const BaseMatrix& b) {
    const int n_tx = b.cols - static_cast<int>(b.punctured_cols.size());
    if (b.cols <= b.rows) throw std::invalid_argument("design_rate: non-positive rate");
    if (n_tx <= b.cols - b.rows) throw std::invalid_argument("design_rate: rate >= 1 after puncturing");
    return static_cast<double>(b.cols - b.rows) / n_tx;
}

// Text format: "M N" / punctured indices on one (possibly empty) line /
// M rows of N entries.
inline BaseMatrix read_base_matrix(std::istream& in) {
    BaseMatrix b;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("base matrix: missing header");
    {
        std::istringstream hs(line);
        if (!(hs >> b.rows >> b.cols)) throw std::runtime_error("base matrix: bad header");
    }
    if (!std::getline(in, line)) throw std::runtime_error("base matrix: missing punctured line");
    {
        std::istringstream ps(line);
        int idx;
        while (ps >> idx) b.punctured_cols.push_back(idx);
        std::sort(b.punctured_cols.begin(), b.punctured_cols.end());
    }
    b.entries.resize(static_cast<size_t>(b.rows) * b.cols);
    for (int i = 0; i < b.rows; ++i)
        for (int j = 0; j < b.cols; ++j)
            if (!(in >> b.at(i, j))) throw std::runtime_error("base matrix: truncated entries");
    b.validate();
    return b;
}

inline void write_base_matrix(std::ostream& out, const BaseMatrix& b) {
    out << b.rows << " " << b.cols << "\n";
    for (size_t t = 0; t < b.punctured_cols.size(); ++t)
        out << (t ? " " : "") << b.punctured_cols[t];
    out << "\n";
    for (int i = 0; i < b.rows; ++i) {
        for (int j = 0; j < b.cols; ++j) out << (j ? " " : "") << b.at(i, j);
        out << "\n";
    }
}

enum class ChannelClass : uint8_t { Shaped, Uniform, Punctured };

struct ChannelAssignment {
    std::vector<ChannelClass> col_class;
    SurrogateChannel shaped;
    double sigma2_uniform = 0.0;  // normalized: 2*sigma^2/A_U^2, levels {0, sqrt(2)}

    /// Channel LLR variance seen by column j's VNs.
    double channel_variance(int j) const {
        switch (col_class[static_cast<size_t>(j)]) {
            case ChannelClass::Shaped: return shaped.llr_variance();
            case ChannelClass::Uniform: return 2.0 / sigma2_uniform;
            default: return 0.0;
        }
    }
};

/// Builds the per-column channel split at a candidate Es/N0: the first
/// R_C*N_tx non-punctured columns are shaped (surrogate), the rest uniform.
/// Noise normalization per subchannel: sigma2_S = sigma^2/(A_S^2 p1) with
/// unit-power pulse level 1/sqrt(p1); sigma2_U = 2 sigma^2/A_U^2.
inline ChannelAssignment make_assignment(const BaseMatrix& b, const TsConfig& ts,
                                         double es_n0_db) {
    const int n_tx = b.cols - static_cast<int>(b.punctured_cols.size());
    const int n_shaped = static_cast<int>(std::lround(ts.rate_code * n_tx));
    const double sigma2 = SnrPoint::from_db(es_n0_db).sigma2;

    ChannelAssignment assign;
    assign.col_class.resize(static_cast<size_t>(b.cols), ChannelClass::Uniform);
    int placed = 0;
    for (int j = 0; j < b.cols; ++j) {
        if (b.is_punctured(j)) {
            assign.col_class[static_cast<size_t>(j)] = ChannelClass::Punctured;
        } else if (placed < n_shaped) {
            assign.col_class[static_cast<size_t>(j)] = ChannelClass::Shaped;
            ++placed;
        }
    }

    const double s2_shaped = sigma2 / (ts.amp_shaped * ts.amp_shaped * ts.p1);
    assign.shaped = match_surrogate(ts.p1, 1.0 / std::sqrt(ts.p1), s2_shaped);
    assign.sigma2_uniform = 2.0 * sigma2 / (ts.amp_uniform * ts.amp_uniform);
    return assign;
}

struct PexitState {
    std::vector<double> i_vc, i_cv;  // per-cell MI, row-major like the base matrix
    std::vector<double> i_ap;        // per-VN a-posteriori MI
    std::vector<double> min_ap_trace;
    int iterations = 0;
    bool converged = false;
};

inline constexpr double kPexitConvergedEps = 1e-6;

/// Flooding P-EXIT recursion (per-cell messages, parallel edges via b_ij).
/// Converged when every VN's a-posteriori MI reaches 1 - 1e-6. A stalled
/// recursion (max cell delta < 1e-12) exits early as non-converged.
inline PexitState pexit_run(const BaseMatrix& b, const ChannelAssignment& assign,
                            int max_iter = 2000) {
    if (assign.col_class.size() != static_cast<size_t>(b.cols))
        throw std::invalid_argument("pexit_run: assignment does not match matrix");
    const int m = b.rows, n = b.cols;
    const size_t cells = static_cast<size_t>(m) * n;

    PexitState st;
    st.i_vc.assign(cells, 0.0);
    st.i_cv.assign(cells, 0.0);
    st.i_ap.assign(static_cast<size_t>(n), 0.0);

    std::vector<double> sig2_ch(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j) sig2_ch[static_cast<size_t>(j)] = assign.channel_variance(j);

    auto cell = [n](int i, int j) { return static_cast<size_t>(i) * n + j; };
    struct Edge { int i, j, mult; size_t c; };
    std::vector<Edge> nz;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j)
            if (b.at(i, j) > 0) nz.push_back({i, j, b.at(i, j), cell(i, j)});

    std::vector<double> sq_cv(cells, 0.0);   // [J^-1(I_cv)]^2 per cell
    std::vector<double> sq_vc(cells, 0.0);   // [J^-1(1 - I_vc)]^2 per cell
    std::vector<double> col_acc(static_cast<size_t>(n));
    std::vector<double> row_acc(static_cast<size_t>(m));

    for (int it = 1; it <= max_iter; ++it) {
        // VN update: exclude one copy of the cell's own incoming message.
        for (int j = 0; j < n; ++j) col_acc[static_cast<size_t>(j)] = sig2_ch[static_cast<size_t>(j)];
        for (const Edge& e : nz) col_acc[static_cast<size_t>(e.j)] += e.mult * sq_cv[e.c];
        double delta = 0.0;
        for (const Edge& e : nz) {
            const double arg = std::max(0.0, col_acc[static_cast<size_t>(e.j)] - sq_cv[e.c]);
            const double v = j_fun(std::sqrt(arg));
            delta = std::max(delta, std::abs(v - st.i_vc[e.c]));
            st.i_vc[e.c] = v;
            const double s = j_inv(std::clamp(1.0 - v, 0.0, 1.0));
            sq_vc[e.c] = s * s;
        }

        // CN update: I_cv = 1 - J(sqrt(arg)), i.e. the complement directly.
        for (int i = 0; i < m; ++i) row_acc[static_cast<size_t>(i)] = 0.0;
        for (const Edge& e : nz) row_acc[static_cast<size_t>(e.i)] += e.mult * sq_vc[e.c];
        for (const Edge& e : nz) {
            const double arg = std::max(0.0, row_acc[static_cast<size_t>(e.i)] - sq_vc[e.c]);
            const double v = j_fun_complement(std::sqrt(arg));
            st.i_cv[e.c] = v;
            const double s = j_inv(std::clamp(v, 0.0, 1.0));
            sq_cv[e.c] = s * s;
        }

        // A-posteriori MI per VN, complement-checked against the epsilon.
        for (int j = 0; j < n; ++j) col_acc[static_cast<size_t>(j)] = sig2_ch[static_cast<size_t>(j)];
        for (const Edge& e : nz) col_acc[static_cast<size_t>(e.j)] += e.mult * sq_cv[e.c];
        bool all_converged = true;
        double min_ap = 1.0;
        for (int j = 0; j < n; ++j) {
            const double d_ap = j_fun_complement(std::sqrt(col_acc[static_cast<size_t>(j)]));
            st.i_ap[static_cast<size_t>(j)] = 1.0 - d_ap;
            if (d_ap > kPexitConvergedEps) all_converged = false;
            min_ap = std::min(min_ap, 1.0 - d_ap);
        }
        st.min_ap_trace.push_back(min_ap);
        st.iterations = it;
        if (all_converged) { st.converged = true; return st; }
        if (delta < 1e-12) return st;  // stalled below threshold
    }
    return st;
}

/// Memo for matched surrogates keyed by milli-dB Es/N0; one threshold
/// bisection from a fixed bracket only ever probes dyadic grid points, so
/// DE runs share nearly all matches.
using SurrogateMemo = std::map<int64_t, SurrogateChannel>;

struct ThresholdOptions {
    double lo_db = -10.0;
    double hi_db = 20.0;
    double tol_db = 0.01;
    int max_iter = 2000;
    SurrogateMemo* memo = nullptr;
};

namespace detail {

inline ChannelAssignment assignment_memoized(const BaseMatrix& b, const TsConfig& ts,
                                             double es_db, SurrogateMemo* memo) {
    if (!memo) return make_assignment(b, ts, es_db);
    const auto key = static_cast<int64_t>(std::llround(es_db * 1000.0));
    auto it = memo->find(key);
    if (it != memo->end()) {
        ChannelAssignment assign = make_assignment(b, ts, es_db);  // classes + uniform part
        assign.shaped = it->second;
        return assign;
    }
    ChannelAssignment assign = make_assignment(b, ts, es_db);
    memo->emplace(key, assign.shaped);
    return assign;
}

}  // namespace detail

/// Iterative decoding threshold: smallest Es/N0 (bisection to tol_db) at
/// which the P-EXIT recursion converges for the TS configuration.
inline double threshold(const BaseMatrix& b, const TsConfig& ts,
                        const ThresholdOptions& opt = {}) {
    if (std::abs(design_rate(b) - ts.rate_code) > 1e-6)
        throw std::invalid_argument("threshold: base matrix design rate does not match config");
    auto converges = [&](double es_db) {
        const ChannelAssignment a = detail::assignment_memoized(b, ts, es_db, opt.memo);
        return pexit_run(b, a, opt.max_iter).converged;
    };
    double lo = opt.lo_db, hi = opt.hi_db;
    if (!converges(hi))
        throw std::runtime_error("threshold: no convergence at bracket top (degenerate protograph)");
    if (converges(lo)) return lo;
    while (hi - lo > opt.tol_db) {
        const double mid = 0.5 * (lo + hi);
        (converges(mid) ? hi : lo) = mid;
    }
    return hi;
}

}  // namespace psook
