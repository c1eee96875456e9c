#include "multimatch/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "multimatch/errors.hpp"

namespace multimatch {

namespace {

void strip_line_end(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

void strip_bom(std::string& line) {
  if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF &&
      static_cast<unsigned char>(line[1]) == 0xBB && static_cast<unsigned char>(line[2]) == 0xBF)
    line.erase(0, 3);
}

bool is_blank(std::string_view line) {
  return std::all_of(line.begin(), line.end(), [](char c) { return c == ' ' || c == '\t'; });
}

double parse_number(std::string_view text, std::size_t line_no, const char* what) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw ParseError(line_no, std::string("malformed ") + what + " '" + std::string(text) + "'");
  return value;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return in;
}

// Reads the header line (if any). Returns false on an empty stream.
bool expect_header(std::istream& in, std::string_view header, std::size_t& line_no) {
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    strip_line_end(line);
    if (line_no == 1) strip_bom(line);
    if (is_blank(line)) continue;
    if (line != header) throw ParseError(line_no, "expected header '" + std::string(header) + "'");
    return true;
  }
  return false;
}

EntityRef resolve(const MultipartiteGraph& g, const std::string& source, const std::string& entity,
                  std::size_t line_no) {
  auto s = g.find_source(source);
  if (!s) throw DataError("line " + std::to_string(line_no) + ": unknown source '" + source + "'");
  auto e = g.find_entity(*s, entity);
  if (!e) throw DataError("line " + std::to_string(line_no) + ": unknown entity '" + entity + "' in source '" + source + "'");
  return *e;
}

std::pair<EntityRef, EntityRef> oriented(EntityRef a, EntityRef b) {
  if (b.source < a.source) std::swap(a, b);
  return {a, b};
}

}  // namespace

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        current.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  fields.push_back(std::move(current));
  return fields;
}

std::string csv_field(std::string_view value) {
  if (value.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(value);
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string format_number(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

LoadedGraph load_graph(std::istream& in) {
  std::size_t line_no = 0;
  GraphBuilder builder;
  if (!expect_header(in, kEdgeHeader, line_no)) return {std::move(builder).build(), 0};
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    strip_line_end(line);
    if (is_blank(line)) continue;
    auto f = split_csv_line(line);
    if (f.size() != 5) throw ParseError(line_no, "expected 5 fields, got " + std::to_string(f.size()));
    const double score = parse_number(f[4], line_no, "score");
    if (!std::isfinite(score)) throw ParseError(line_no, "score is not finite");
    if (score < 0.0) throw DataError("line " + std::to_string(line_no) + ": negative score " + f[4]);
    if (f[0] == f[2]) throw DataError("line " + std::to_string(line_no) + ": same-source pair in source '" + f[0] + "'");
    const SourceIndex sa = builder.add_source(f[0]);
    const EntityRef a = builder.add_entity(sa, f[1]);
    const SourceIndex sb = builder.add_source(f[2]);
    const EntityRef b = builder.add_entity(sb, f[3]);
    builder.add_edge(a, b, score);
  }
  const std::size_t dups = builder.duplicate_count();
  return {std::move(builder).build(), dups};
}

LoadedGraph load_graph_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  return load_graph(in);
}

void write_edges_csv(std::ostream& out, const MultipartiteGraph& g) {
  out << kEdgeHeader << '\n';
  for (const Edge& e : g.edges()) {
    out << csv_field(g.source_name(e.a.source)) << ',' << csv_field(g.entity_name(e.a)) << ','
        << csv_field(g.source_name(e.b.source)) << ',' << csv_field(g.entity_name(e.b)) << ','
        << format_number(e.score) << '\n';
  }
}

TruthSet load_truth(std::istream& in, const MultipartiteGraph& g) {
  std::size_t line_no = 0;
  TruthSet truth;
  if (!expect_header(in, kTruthHeader, line_no)) return truth;
  std::set<std::pair<EntityRef, EntityRef>> pos, neg;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    strip_line_end(line);
    if (is_blank(line)) continue;
    auto f = split_csv_line(line);
    if (f.size() != 5) throw ParseError(line_no, "expected 5 fields, got " + std::to_string(f.size()));
    if (f[4] != "1" && f[4] != "0") throw ParseError(line_no, "label must be 1 or 0");
    const bool positive = f[4] == "1";
    const EntityRef a = resolve(g, f[0], f[1], line_no);
    EntityRef b;
    if (f[3] == kNullToken) {
      if (positive) throw DataError("line " + std::to_string(line_no) + ": a null counterpart cannot be a positive");
      auto s = g.find_source(f[2]);
      if (!s) throw DataError("line " + std::to_string(line_no) + ": unknown source '" + f[2] + "'");
      b = EntityRef::null(*s);
    } else {
      b = resolve(g, f[2], f[3], line_no);
    }
    if (a.source == b.source) throw DataError("line " + std::to_string(line_no) + ": same-source truth pair");
    // Null counterparts keep their (sampled entity, null) orientation.
    auto key = b.is_null() ? std::make_pair(a, b) : oriented(a, b);
    if (positive ? neg.contains(key) : pos.contains(key))
      throw DataError("line " + std::to_string(line_no) + ": pair labeled both matching and non-matching");
    if ((positive ? pos : neg).insert(key).second)
      (positive ? truth.positives : truth.negatives).push_back(key);
  }
  return truth;
}

TruthSet load_truth_file(const std::filesystem::path& path, const MultipartiteGraph& g) {
  auto in = open_input(path);
  return load_truth(in, g);
}

void write_truth_csv(std::ostream& out, const MultipartiteGraph& g, const TruthSet& truth) {
  out << kTruthHeader << '\n';
  auto row = [&](const std::pair<EntityRef, EntityRef>& p, char label) {
    out << csv_field(g.source_name(p.first.source)) << ',' << csv_field(g.entity_name(p.first)) << ','
        << csv_field(g.source_name(p.second.source)) << ','
        << (p.second.is_null() ? std::string(kNullToken) : csv_field(g.entity_name(p.second))) << ',' << label
        << '\n';
  };
  for (const auto& p : truth.positives) row(p, '1');
  for (const auto& p : truth.negatives) row(p, '0');
}

void write_matching_jsonl(std::ostream& out, const MultipartiteGraph& g, const Matching& m,
                          const std::vector<EntityRef>& extra_singletons) {
  auto emit = [&](const Clique& c) {
    nlohmann::json members = nlohmann::json::array();
    for (EntityRef r : c.members) {
      if (r.is_null()) continue;
      members.push_back({{"source", g.source_name(r.source)}, {"entity", g.entity_name(r)}});
    }
    nlohmann::json line = {{"members", std::move(members)}, {"weight", clique_weight(g, c)}};
    out << line.dump() << '\n';
  };
  for (const Clique& c : m.cliques) emit(c);
  for (EntityRef r : extra_singletons) emit(Clique{{r}});
}

Matching read_matching_jsonl(std::istream& in, const MultipartiteGraph& g) {
  Matching m;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    strip_line_end(line);
    if (is_blank(line)) continue;
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(line_no, e.what());
    }
    if (!doc.is_object() || !doc.contains("members") || !doc["members"].is_array())
      throw ParseError(line_no, "expected an object with a 'members' array");
    Clique c;
    for (const auto& mem : doc["members"]) {
      if (!mem.is_object() || !mem.contains("source") || !mem.contains("entity"))
        throw ParseError(line_no, "member needs 'source' and 'entity'");
      c.members.push_back(resolve(g, mem["source"].get<std::string>(), mem["entity"].get<std::string>(), line_no));
    }
    if (c.non_null_size() >= 2) m.cliques.push_back(std::move(c));
  }
  return m;
}

void write_file_atomically(const std::filesystem::path& path, std::string_view contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw DataError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace multimatch
