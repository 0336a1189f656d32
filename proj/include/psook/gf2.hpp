#pragma once

#include <cstdint>
#include <vector>

// Dense GF(2) matrices as packed 64-bit words; enough for Gaussian
// elimination on desk-scale parity-check matrices.

namespace psook {

class BitMatrix {
public:
    BitMatrix() = default;
    BitMatrix(int rows, int cols)
        : rows_(rows), cols_(cols), wpr_((cols + 63) / 64),
          data_(static_cast<size_t>(rows) * wpr_, 0) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    int words_per_row() const { return wpr_; }

    bool get(int i, int j) const {
        return (word(i, j / 64) >> (j % 64)) & 1ULL;
    }
    void set(int i, int j, bool v) {
        uint64_t& w = word(i, j / 64);
        const uint64_t mask = 1ULL << (j % 64);
        w = v ? (w | mask) : (w & ~mask);
    }

    const uint64_t* row(int i) const { return data_.data() + static_cast<size_t>(i) * wpr_; }
    uint64_t* row(int i) { return data_.data() + static_cast<size_t>(i) * wpr_; }

    void xor_rows(int dst, int src) {
        uint64_t* d = row(dst);
        const uint64_t* s = row(src);
        for (int w = 0; w < wpr_; ++w) d[w] ^= s[w];
    }

private:
    uint64_t& word(int i, int wi) { return data_[static_cast<size_t>(i) * wpr_ + wi]; }
    const uint64_t& word(int i, int wi) const { return data_[static_cast<size_t>(i) * wpr_ + wi]; }

    int rows_ = 0, cols_ = 0, wpr_ = 0;
    std::vector<uint64_t> data_;
};

inline std::vector<uint64_t> pack_bits(const std::vector<uint8_t>& bits) {
    std::vector<uint64_t> words((bits.size() + 63) / 64, 0);
    for (size_t i = 0; i < bits.size(); ++i)
        if (bits[i]) words[i / 64] |= 1ULL << (i % 64);
    return words;
}

/// Parity of <a, b> over GF(2), both packed to the same word count.
inline int dot_parity(const uint64_t* a, const uint64_t* b, int words) {
    uint64_t acc = 0;
    for (int w = 0; w < words; ++w) acc ^= a[w] & b[w];
    return __builtin_parityll(acc);
}

}  // namespace psook
