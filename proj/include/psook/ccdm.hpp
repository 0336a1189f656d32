#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include <gmpxx.h>

#include "psook/infotheory.hpp"

// Constant-composition distribution matcher via exact combinadic indexing:
// the k'-bit input, read MSB-first as an integer, selects the sequence of
// that rank in the lexicographic enumeration (binary-number order, MSB
// first) of all weight-n1 length-k sequences. Bit-exact and invertible by
// construction; no arithmetic-coding approximation.

namespace psook {

struct CompositionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Composition {
    int k = 0;        // output length
    int n1 = 0;       // ones (pulses) per output sequence
    int k_prime = 0;  // input length, floor(log2 C(k, n1))

    double matching_rate() const { return static_cast<double>(k_prime) / k; }
};

inline mpz_class binomial(int n, int r) {
    if (r < 0 || r > n) return 0;
    mpz_class b;
    mpz_bin_uiui(b.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(r));
    return b;
}

/// n1 = round(k*p1), ties toward more pulses; k' from the exact binomial.
inline Composition make_composition(int k, double p1) {
    if (k < 1) throw std::domain_error("make_composition: k must be >= 1");
    if (p1 < 0.0 || p1 > 1.0) throw std::domain_error("make_composition: p1 outside [0,1]");
    Composition comp;
    comp.k = k;
    comp.n1 = static_cast<int>(std::floor(k * p1 + 0.5));
    if (comp.n1 > k) comp.n1 = k;
    const mpz_class c = binomial(k, comp.n1);
    // sizeinbase(c,2) = floor(log2 c) + 1 for c >= 1
    comp.k_prime = static_cast<int>(mpz_sizeinbase(c.get_mpz_t(), 2)) - 1;
    return comp;
}

/// Uniform bits -> shaped sequence of exact composition. Walks positions
/// MSB-first keeping B = C(remaining-1, ones-left) updated incrementally:
/// rank < B selects bit 0, otherwise bit 1 consumes B ranks.
inline std::vector<uint8_t> dm_match(const std::vector<uint8_t>& bits, const Composition& comp) {
    if (static_cast<int>(bits.size()) != comp.k_prime)
        throw std::invalid_argument("dm_match: input length != k_prime");
    mpz_class index = 0;
    for (uint8_t b : bits) {
        index <<= 1;
        if (b) index |= 1;
    }

    std::vector<uint8_t> out(static_cast<size_t>(comp.k), 0);
    int r = comp.n1;
    mpz_class b = binomial(comp.k - 1, r);  // sequences with a 0 in front
    for (int pos = 0; pos < comp.k; ++pos) {
        const int m = comp.k - pos;  // positions remaining including pos
        if (r == 0) break;           // rest stays 0
        if (r == m) {                // forced ones
            for (int t = pos; t < comp.k; ++t) out[static_cast<size_t>(t)] = 1;
            break;
        }
        if (index < b) {
            out[static_cast<size_t>(pos)] = 0;
            // B' = C(m-2, r) = B * (m-1-r)/(m-1)
            b = b * (m - 1 - r) / (m - 1);
        } else {
            out[static_cast<size_t>(pos)] = 1;
            index -= b;
            // B' = C(m-2, r-1) = B * r/(m-1)
            b = b * r / (m - 1);
            --r;
        }
    }
    return out;
}

/// Exact inverse of dm_match; rejects wrong-weight sequences and valid
/// sequences whose rank falls outside the k'-bit input range.
inline std::vector<uint8_t> dm_dematch(const std::vector<uint8_t>& shaped, const Composition& comp) {
    if (static_cast<int>(shaped.size()) != comp.k)
        throw std::invalid_argument("dm_dematch: input length != k");
    int weight = 0;
    for (uint8_t b : shaped) weight += b;
    if (weight != comp.n1)
        throw CompositionError("dm_dematch: sequence weight does not match composition");

    mpz_class index = 0;
    int r = comp.n1;
    mpz_class b = binomial(comp.k - 1, r);
    for (int pos = 0; pos < comp.k && r > 0; ++pos) {
        const int m = comp.k - pos;
        if (r == m) break;  // forced tail of ones contributes rank 0
        if (shaped[static_cast<size_t>(pos)]) {
            index += b;
            b = b * r / (m - 1);
            --r;
        } else {
            b = b * (m - 1 - r) / (m - 1);
        }
    }

    mpz_class limit = 1;
    limit <<= static_cast<unsigned>(comp.k_prime);
    if (index >= limit)
        throw CompositionError("dm_dematch: sequence rank outside the matcher image");

    std::vector<uint8_t> bits(static_cast<size_t>(comp.k_prime), 0);
    for (int i = comp.k_prime - 1; i >= 0; --i) {
        bits[static_cast<size_t>(i)] = static_cast<uint8_t>(mpz_tstbit(index.get_mpz_t(), 0));
        index >>= 1;
    }
    return bits;
}

}  // namespace psook
