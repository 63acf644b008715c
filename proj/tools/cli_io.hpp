#ifndef PRCLAB_CLI_IO_HPP
#define PRCLAB_CLI_IO_HPP

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "prclab/types.hpp"

namespace prclab::cli {

using nlohmann::json;

/// 17 significant digits: round-trip exact for 64-bit doubles.
inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Writes content to path atomically (temp file + rename).
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open output file " + tmp.string());
        out << content;
    }
    std::filesystem::rename(tmp, path);
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    std::string to_string() const {
        std::ostringstream out;
        for (size_t c = 0; c < header.size(); ++c)
            out << header[c] << (c + 1 < header.size() ? "," : "");
        out << "\n";
        for (const auto& row : rows) {
            for (size_t c = 0; c < row.size(); ++c)
                out << fmt17(row[c]) << (c + 1 < row.size() ? "," : "");
            out << "\n";
        }
        return out.str();
    }
};

inline void write_csv(const std::filesystem::path& path, const CsvTable& table) {
    write_atomic(path, table.to_string());
}

inline void write_json(const std::filesystem::path& path, const json& j) {
    write_atomic(path, j.dump(2) + "\n");
}

/// Reads a CSV of numeric columns with a header line.
inline CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    CsvTable t;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty CSV " + path.string());
    std::istringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) t.header.push_back(cell);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::vector<double> row;
        while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
        if (row.size() != t.header.size())
            throw std::runtime_error("ragged CSV row in " + path.string());
        t.rows.push_back(std::move(row));
    }
    return t;
}

/// Loads a PRC signal from a (theta, q) CSV on a uniform grid.
inline PhaseSignal read_prc_csv(const std::filesystem::path& path) {
    const CsvTable t = read_csv(path);
    if (t.header.size() < 2 || t.header[0] != "theta")
        throw std::runtime_error(path.string() + ": expected columns theta,q");
    const int N = static_cast<int>(t.rows.size());
    if (N < 4) throw std::runtime_error(path.string() + ": too few samples");
    PhaseSignal q(N);
    for (int i = 0; i < N; ++i) {
        if (std::abs(t.rows[static_cast<size_t>(i)][0] - two_pi * i / N) > 1e-9)
            throw std::runtime_error(path.string() + ": theta grid is not uniform");
        q[i] = t.rows[static_cast<size_t>(i)][1];
    }
    return q;
}

inline json vec_to_json(const Vec& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

}  // namespace prclab::cli

#endif
