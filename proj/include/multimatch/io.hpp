#pragma once

// On-disk formats:
//   edges    CSV  source_a,entity_a,source_b,entity_b,score
//   truth    CSV  source_a,entity_a,source_b,entity_b,label   (label 1|0, entity_b may be __NULL__)
//   matching JSON lines, one clique per line:
//            {"members":[{"source":"..","entity":".."},...],"weight":<number>}

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "multimatch/graph.hpp"

namespace multimatch {

inline constexpr std::string_view kEdgeHeader = "source_a,entity_a,source_b,entity_b,score";
inline constexpr std::string_view kTruthHeader = "source_a,entity_a,source_b,entity_b,label";
inline constexpr std::string_view kNullToken = "__NULL__";

// Splits one CSV record. Double-quoted fields may contain commas and "" escapes.
std::vector<std::string> split_csv_line(std::string_view line);
std::string csv_field(std::string_view value);

// Shortest round-trip decimal form.
std::string format_number(double value);

struct LoadedGraph {
  MultipartiteGraph graph;
  std::size_t duplicate_count = 0;
};

LoadedGraph load_graph(std::istream& in);
LoadedGraph load_graph_file(const std::filesystem::path& path);
void write_edges_csv(std::ostream& out, const MultipartiteGraph& g);

TruthSet load_truth(std::istream& in, const MultipartiteGraph& g);
TruthSet load_truth_file(const std::filesystem::path& path, const MultipartiteGraph& g);
void write_truth_csv(std::ostream& out, const MultipartiteGraph& g, const TruthSet& truth);

// Weights are computed against `g`. Cliques in `extra_singletons` are written
// after the matching as one-member lines of weight 0.
void write_matching_jsonl(std::ostream& out, const MultipartiteGraph& g, const Matching& m,
                          const std::vector<EntityRef>& extra_singletons = {});
Matching read_matching_jsonl(std::istream& in, const MultipartiteGraph& g);

// Writes to a sibling temporary and renames over `path`.
void write_file_atomically(const std::filesystem::path& path, std::string_view contents);

}  // namespace multimatch
