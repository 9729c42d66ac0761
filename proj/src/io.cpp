#include "sparcode/io.hpp"

#include "sparcode/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <system_error>
#include <utility>
#include <vector>

namespace sparcode::io {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

bool parse_number(std::string_view text, double& out) {
    text = trim(text);
    if (text.empty()) return false;
    if (text.front() == '+') text.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc() && ptr == text.data() + text.size() && std::isfinite(out);
}

std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        cells.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                          : comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return cells;
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open input file '" + path.string() + "'");
    return in;
}

// Reads a numeric CSV; returns rows and, if requested, the header cells.
std::vector<std::vector<double>> read_numeric_csv(const std::filesystem::path& path, bool header,
                                                  std::vector<std::string>* names) {
    auto in = open_input(path);
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    std::size_t width = 0;
    bool header_pending = header;
    while (std::getline(in, line)) {
        ++line_no;
        const auto body = trim(line);
        if (body.empty()) continue;
        const auto cells = split_csv(body);
        if (header_pending) {
            header_pending = false;
            if (names)
                for (auto c : cells) names->emplace_back(trim(c));
            width = cells.size();
            continue;
        }
        if (width == 0) width = cells.size();
        if (cells.size() != width)
            throw ParseError(line_no, "expected " + std::to_string(width) + " cells, found " +
                                          std::to_string(cells.size()));
        std::vector<double> row(cells.size());
        for (std::size_t c = 0; c < cells.size(); ++c)
            if (!parse_number(cells[c], row[c]))
                throw ParseError(line_no, "cell " + std::to_string(c + 1) + " is not a finite number");
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

DataMatrix load_features(const std::filesystem::path& path, const FeatureCsvOptions& options) {
    std::vector<std::string> names;
    const auto rows = read_numeric_csv(path, options.header, &names);
    if (rows.empty()) throw DimensionMismatch("feature file '" + path.string() + "' has no data rows");
    const auto r = static_cast<Index>(rows.size());
    const auto c = static_cast<Index>(rows.front().size());
    DataMatrix data;
    if (options.observations_in_rows) {
        data.values.resize(c, r);
        for (Index i = 0; i < r; ++i)
            for (Index j = 0; j < c; ++j) data.values(j, i) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    } else {
        data.values.resize(r, c);
        for (Index i = 0; i < r; ++i)
            for (Index j = 0; j < c; ++j) data.values(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        data.column_ids = std::move(names);
    }
    data.validate();
    return data;
}

AdjacencyFormat parse_adjacency_format(std::string_view name) {
    if (name == "edges" || name == "edge_list") return AdjacencyFormat::edge_list;
    if (name == "matrix" || name == "dense_matrix") return AdjacencyFormat::dense_matrix;
    throw InvalidArgument("unknown adjacency format '" + std::string(name) + "'");
}

namespace {

AdjacencyLoad load_edge_list(const std::filesystem::path& path, const AdjacencyOptions& options) {
    auto in = open_input(path);
    std::map<std::pair<Index, Index>, double> edges;  // directed, as given
    std::size_t self_loops = 0;
    Index max_index = -1;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto body = trim(line);
        if (body.empty() || body.front() == '#' || body.front() == '%') continue;
        std::istringstream fields{std::string(body)};
        std::string a, b, w;
        if (!(fields >> a >> b)) throw ParseError(line_no, "expected 'src dst [weight]'");
        fields >> w;
        std::string extra;
        if (fields >> extra) throw ParseError(line_no, "too many fields");
        double src = 0.0, dst = 0.0, weight = 1.0;
        if (!parse_number(a, src) || !parse_number(b, dst) || src != std::floor(src) || dst != std::floor(dst))
            throw ParseError(line_no, "vertex ids must be integers");
        if (!w.empty() && !parse_number(w, weight)) throw ParseError(line_no, "weight is not a finite number");
        const auto offset = options.one_based ? 1 : 0;
        const auto i = static_cast<Index>(src) - offset;
        const auto j = static_cast<Index>(dst) - offset;
        if (i < 0 || j < 0) throw ParseError(line_no, "vertex id below the index base");
        if (options.nodes > 0 && (i >= options.nodes || j >= options.nodes))
            throw ParseError(line_no, "vertex id exceeds the declared node count");
        max_index = std::max({max_index, i, j});
        if (i == j) {
            ++self_loops;
            continue;
        }
        edges[{i, j}] = weight;
    }
    const Index n = options.nodes > 0 ? options.nodes : max_index + 1;
    if (n < 2) throw DimensionMismatch("edge list '" + path.string() + "' describes fewer than two vertices");
    Matrix w = Matrix::Zero(n, n);
    for (const auto& [key, weight] : edges) {
        const auto [i, j] = key;
        const auto reverse = edges.find({j, i});
        if (reverse != edges.end() && std::abs(reverse->second - weight) > options.asymmetry_tolerance)
            throw AsymmetryError("edge (" + std::to_string(i) + "," + std::to_string(j) +
                                 ") disagrees with its reverse");
        w(i, j) = weight;
        w(j, i) = weight;
    }
    // Agreeing pairs may still differ below the tolerance; keep the upper value.
    return {AffinityMatrix::from_upper(w), self_loops};
}

AdjacencyLoad load_dense(const std::filesystem::path& path, const AdjacencyOptions& options) {
    const auto rows = read_numeric_csv(path, false, nullptr);
    const auto n = static_cast<Index>(rows.size());
    if (n < 2) throw DimensionMismatch("dense matrix '" + path.string() + "' has fewer than two rows");
    if (static_cast<Index>(rows.front().size()) != n)
        throw DimensionMismatch("dense matrix '" + path.string() + "' is not square");
    Matrix w(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) w(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    std::size_t self_loops = 0;
    for (Index i = 0; i < n; ++i) {
        if (w(i, i) != 0.0) ++self_loops;
        for (Index j = i + 1; j < n; ++j)
            if (std::abs(w(i, j) - w(j, i)) > options.asymmetry_tolerance)
                throw AsymmetryError("dense matrix is asymmetric at (" + std::to_string(i + 1) + "," +
                                     std::to_string(j + 1) + ")");
    }
    return {AffinityMatrix::from_upper(w), self_loops};
}

}  // namespace

AdjacencyLoad load_adjacency(const std::filesystem::path& path, const AdjacencyOptions& options) {
    return options.format == AdjacencyFormat::edge_list ? load_edge_list(path, options)
                                                        : load_dense(path, options);
}

std::string format_double(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc()) throw Error("format_double: conversion failed");
    return std::string(buf, ptr);
}

std::string dense_csv(const Matrix& m) {
    std::string out;
    out.reserve(static_cast<std::size_t>(m.size()) * 8);
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            if (j) out += ',';
            out += format_double(m(i, j));
        }
        out += '\n';
    }
    return out;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw InputError("cannot write '" + tmp.string() + "'");
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!out) throw InputError("failed writing '" + tmp.string() + "'");
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace sparcode::io
