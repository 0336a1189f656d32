#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "psook/protograph.hpp"
#include "psook/rng.hpp"

// Differential evolution (rand/1/bin) over base matrices, minimizing the
// P-EXIT threshold. Genomes are real-valued M*N vectors decoded by
// round-and-clamp; a repair pass enforces the structural constraints
// (no zero row/column, bounded degree-2 VN count, capped entries).

namespace psook {

struct DeParams {
    int population_size = 40;
    int generations = 500;
    double scale_f = 0.5;
    double crossover_cr = 0.9;
    int max_entry = 4;
    int max_deg2_vns = -1;  // -1: use rows - 1
    uint64_t rng_seed = 1;
    std::vector<BaseMatrix> seed_candidates;  // injected into the initial population
};

struct Candidate {
    BaseMatrix base;
    double fitness = std::numeric_limits<double>::infinity();  // threshold dB
    bool feasible = false;
};

struct DeStats {
    uint64_t evaluations = 0;
    uint64_t cache_hits = 0;
};

struct DeResult {
    Candidate best;
    DeStats stats;
};

namespace detail {

inline BaseMatrix decode_genome(const std::vector<double>& genome, int rows, int cols,
                                const std::vector<int>& punctured, int max_entry) {
    BaseMatrix b;
    b.rows = rows;
    b.cols = cols;
    b.punctured_cols = punctured;
    b.entries.resize(genome.size());
    for (size_t g = 0; g < genome.size(); ++g) {
        auto v = static_cast<int>(std::lround(genome[g]));
        b.entries[g] = std::clamp(v, 0, max_entry);
    }
    return b;
}

inline void repair(BaseMatrix& b, int max_entry, int max_deg2, Rng& rng) {
    auto col_degree = [&](int j) {
        int d = 0;
        for (int i = 0; i < b.rows; ++i) d += b.at(i, j);
        return d;
    };
    for (int pass = 0; pass < 8; ++pass) {
        bool changed = false;
        for (int j = 0; j < b.cols; ++j) {
            if (col_degree(j) == 0) {
                b.at(static_cast<int>(rng.below(static_cast<uint64_t>(b.rows))), j) = 1;
                changed = true;
            }
        }
        for (int i = 0; i < b.rows; ++i) {
            if (b.row_sum(i) == 0) {
                b.at(i, static_cast<int>(rng.below(static_cast<uint64_t>(b.cols)))) = 1;
                changed = true;
            }
        }
        // A row whose entries are all even lifts to a singular parity-check
        // matrix for every circulant assignment (the GF(2) sum of its Q
        // lifted rows vanishes identically), so force one odd entry per row.
        for (int i = 0; i < b.rows; ++i) {
            bool has_odd = false;
            std::vector<int> positive;
            for (int j = 0; j < b.cols; ++j) {
                const int e = b.at(i, j);
                if (e % 2 == 1) has_odd = true;
                if (e > 0) positive.push_back(j);
            }
            if (!has_odd && !positive.empty()) {
                --b.at(i, positive[rng.below(positive.size())]);
                changed = true;
            }
        }
        std::vector<int> deg2;
        for (int j = 0; j < b.cols; ++j)
            if (col_degree(j) == 2) deg2.push_back(j);
        while (static_cast<int>(deg2.size()) > max_deg2) {
            const auto pick = rng.below(deg2.size());
            const int j = deg2[pick];
            int i = static_cast<int>(rng.below(static_cast<uint64_t>(b.rows)));
            for (int tries = 0; tries < b.rows && b.at(i, j) >= max_entry; ++tries)
                i = (i + 1) % b.rows;
            if (b.at(i, j) < max_entry) {
                ++b.at(i, j);
                changed = true;
            }
            deg2.erase(deg2.begin() + static_cast<ptrdiff_t>(pick));
        }
        if (!changed) break;
    }
}

inline std::string matrix_key(const BaseMatrix& b) {
    std::string key;
    key.reserve(b.entries.size());
    for (int e : b.entries) key.push_back(static_cast<char>('0' + e));
    return key;
}

}  // namespace detail

/// DE/rand/1/bin threshold minimization. Deterministic for a fixed seed:
/// every candidate slot draws from its own (generation, index)-derived RNG
/// stream, so evaluation order is immaterial. Fitness of a decoded matrix
/// is pure, and identical matrices are served from a cache.
inline DeResult de_optimize(int rows, int cols, const std::vector<int>& punctured,
                            const TsConfig& ts, const DeParams& params,
                            const std::function<void(int, double)>& on_generation = {}) {
    if (params.population_size < 4)
        throw std::invalid_argument("de_optimize: population must be >= 4");
    {
        BaseMatrix probe;
        probe.rows = rows;
        probe.cols = cols;
        probe.punctured_cols = punctured;
        probe.entries.assign(static_cast<size_t>(rows) * cols, 1);
        if (std::abs(design_rate(probe) - ts.rate_code) > 1e-6)
            throw std::invalid_argument("de_optimize: dims inconsistent with ts.rate_code");
    }
    const int max_deg2 = params.max_deg2_vns < 0 ? rows - 1 : params.max_deg2_vns;
    const size_t genes = static_cast<size_t>(rows) * cols;
    const int pop_n = params.population_size;
    const double inf = std::numeric_limits<double>::infinity();

    SurrogateMemo memo;
    ThresholdOptions topt;
    topt.memo = &memo;
    std::unordered_map<std::string, double> cache;
    DeStats stats;

    auto fitness_of = [&](const BaseMatrix& b) {
        const std::string key = detail::matrix_key(b);
        if (auto it = cache.find(key); it != cache.end()) {
            ++stats.cache_hits;
            return it->second;
        }
        ++stats.evaluations;
        double f = inf;
        try {
            b.validate(params.max_entry);
            f = threshold(b, ts, topt);
        } catch (const std::exception&) {
            f = inf;  // structural violation or no convergence: penalized, kept in population
        }
        cache.emplace(key, f);
        return f;
    };

    std::vector<std::vector<double>> pop(static_cast<size_t>(pop_n));
    std::vector<double> fit(static_cast<size_t>(pop_n), inf);
    std::vector<BaseMatrix> decoded(static_cast<size_t>(pop_n));

    for (int idx = 0; idx < pop_n; ++idx) {
        Rng rng(derive_seed(params.rng_seed, 0, static_cast<uint64_t>(idx)));
        auto& genome = pop[static_cast<size_t>(idx)];
        genome.resize(genes);
        if (idx < static_cast<int>(params.seed_candidates.size())) {
            const auto& seed = params.seed_candidates[static_cast<size_t>(idx)];
            for (size_t g = 0; g < genes; ++g) genome[g] = seed.entries[g];
        } else {
            for (auto& v : genome) v = rng.uniform() * params.max_entry;
        }
        BaseMatrix b = detail::decode_genome(genome, rows, cols, punctured, params.max_entry);
        detail::repair(b, params.max_entry, max_deg2, rng);
        decoded[static_cast<size_t>(idx)] = b;
        fit[static_cast<size_t>(idx)] = fitness_of(b);
    }

    auto best_index = [&] {
        int bi = 0;
        for (int i = 1; i < pop_n; ++i)
            if (fit[static_cast<size_t>(i)] < fit[static_cast<size_t>(bi)]) bi = i;
        return bi;
    };
    if (on_generation) on_generation(0, fit[static_cast<size_t>(best_index())]);

    // Generational DE: all trials derive from the frozen previous
    // population, so per-slot evaluations are order-independent.
    std::vector<std::vector<double>> trials(static_cast<size_t>(pop_n));
    std::vector<BaseMatrix> trial_decoded(static_cast<size_t>(pop_n));
    for (int gen = 1; gen <= params.generations; ++gen) {
        for (int idx = 0; idx < pop_n; ++idx) {
            Rng rng(derive_seed(params.rng_seed, static_cast<uint64_t>(gen),
                                static_cast<uint64_t>(idx)));
            int r1, r2, r3;
            do { r1 = static_cast<int>(rng.below(static_cast<uint64_t>(pop_n))); } while (r1 == idx);
            do { r2 = static_cast<int>(rng.below(static_cast<uint64_t>(pop_n))); } while (r2 == idx || r2 == r1);
            do { r3 = static_cast<int>(rng.below(static_cast<uint64_t>(pop_n))); } while (r3 == idx || r3 == r1 || r3 == r2);

            const auto jrand = rng.below(genes);
            auto& trial = trials[static_cast<size_t>(idx)];
            trial.resize(genes);
            for (size_t g = 0; g < genes; ++g) {
                const bool cross = rng.uniform() < params.crossover_cr || g == jrand;
                trial[g] = cross ? pop[static_cast<size_t>(r1)][g] +
                                       params.scale_f * (pop[static_cast<size_t>(r2)][g] -
                                                         pop[static_cast<size_t>(r3)][g])
                                 : pop[static_cast<size_t>(idx)][g];
            }
            BaseMatrix b = detail::decode_genome(trial, rows, cols, punctured, params.max_entry);
            detail::repair(b, params.max_entry, max_deg2, rng);
            trial_decoded[static_cast<size_t>(idx)] = std::move(b);
        }
        for (int idx = 0; idx < pop_n; ++idx) {
            const double f = fitness_of(trial_decoded[static_cast<size_t>(idx)]);
            if (f <= fit[static_cast<size_t>(idx)]) {
                pop[static_cast<size_t>(idx)] = std::move(trials[static_cast<size_t>(idx)]);
                fit[static_cast<size_t>(idx)] = f;
                decoded[static_cast<size_t>(idx)] = std::move(trial_decoded[static_cast<size_t>(idx)]);
            }
        }
        if (on_generation) on_generation(gen, fit[static_cast<size_t>(best_index())]);
    }

    const int bi = best_index();
    if (!std::isfinite(fit[static_cast<size_t>(bi)]))
        throw std::runtime_error("de_optimize: no feasible candidate found (best fitness unbounded)");
    Candidate best{decoded[static_cast<size_t>(bi)], fit[static_cast<size_t>(bi)], true};
    return {best, stats};
}

}  // namespace psook
