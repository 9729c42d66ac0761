#pragma once

#include "sparcode/types.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace sparcode::io {

struct FeatureCsvOptions {
    bool header = false;               // first line holds column names
    bool observations_in_rows = true;  // each CSV row is one observation
};

// Throws ParseError(line) on ragged rows or non-numeric cells and
// DimensionMismatch on empty or undersized input.
DataMatrix load_features(const std::filesystem::path& path, const FeatureCsvOptions& options = {});

enum class AdjacencyFormat { edge_list, dense_matrix };

AdjacencyFormat parse_adjacency_format(std::string_view name);

struct AdjacencyOptions {
    AdjacencyFormat format = AdjacencyFormat::edge_list;
    bool one_based = true;  // edge lists only
    Index nodes = 0;        // edge lists only; 0 means 1 + largest index seen
    double asymmetry_tolerance = 1e-12;
};

struct AdjacencyLoad {
    AffinityMatrix affinity;
    std::size_t self_loops_dropped = 0;
};

// Edge lists are whitespace separated `src dst [weight]` lines (weight 1 when
// absent, '#' and '%' start comments); a missing reverse edge is mirrored,
// while both directions present must agree. Dense matrices are square CSV.
// Self-loops are dropped and counted. Throws ParseError, AsymmetryError,
// DimensionMismatch.
AdjacencyLoad load_adjacency(const std::filesystem::path& path, const AdjacencyOptions& options = {});

// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

// Dense CSV writer; format_double per cell so reading it back is bit-exact.
std::string dense_csv(const Matrix& m);

// Writes to a sibling temporary file and renames it over the target.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace sparcode::io
