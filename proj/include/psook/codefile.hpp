#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "psook/ldpc.hpp"
#include "psook/protograph.hpp"

// File-format glue: base-matrix text files and the JSON lift descriptor
// (Q, seed, shift table) that pins a lifted code exactly.

namespace psook {

inline BaseMatrix load_base_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_base_matrix: cannot open " + path);
    return read_base_matrix(in);
}

inline void save_base_matrix(const std::string& path, const BaseMatrix& b) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_base_matrix: cannot open " + path);
    write_base_matrix(out, b);
}

inline nlohmann::ordered_json lift_descriptor(const LiftedCode& code) {
    nlohmann::ordered_json j;
    j["q"] = code.q;
    j["seed"] = code.seed;
    j["base"]["rows"] = code.base.rows;
    j["base"]["cols"] = code.base.cols;
    j["base"]["punctured_cols"] = code.base.punctured_cols;
    j["base"]["entries"] = code.base.entries;
    j["shifts"] = code.cell_shifts;
    return j;
}

inline LiftedCode code_from_descriptor(const nlohmann::json& j) {
    LiftedCode code;
    code.q = j.at("q").get<int>();
    code.seed = j.at("seed").get<uint64_t>();
    const auto& jb = j.at("base");
    code.base.rows = jb.at("rows").get<int>();
    code.base.cols = jb.at("cols").get<int>();
    code.base.punctured_cols = jb.at("punctured_cols").get<std::vector<int>>();
    code.base.entries = jb.at("entries").get<std::vector<int>>();
    code.base.validate();
    code.cell_shifts = j.at("shifts").get<std::vector<std::vector<int>>>();
    if (code.cell_shifts.size() != code.base.entries.size())
        throw std::runtime_error("code_from_descriptor: shift table shape mismatch");
    for (size_t c = 0; c < code.cell_shifts.size(); ++c) {
        if (static_cast<int>(code.cell_shifts[c].size()) != code.base.entries[c])
            throw std::runtime_error("code_from_descriptor: shift count does not match entry");
        for (int s : code.cell_shifts[c])
            if (s < 0 || s >= code.q)
                throw std::runtime_error("code_from_descriptor: shift out of range");
    }
    for (int j2 : code.base.punctured_cols)
        for (int v = 0; v < code.q; ++v) code.punctured_bits.push_back(j2 * code.q + v);
    std::sort(code.punctured_bits.begin(), code.punctured_bits.end());
    code.build_adjacency();
    return code;
}

inline void save_lift_descriptor(const std::string& path, const LiftedCode& code) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_lift_descriptor: cannot open " + path);
    out << lift_descriptor(code).dump(2) << "\n";
}

inline LiftedCode load_lift_descriptor(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_lift_descriptor: cannot open " + path);
    nlohmann::json j;
    in >> j;
    return code_from_descriptor(j);
}

}  // namespace psook
