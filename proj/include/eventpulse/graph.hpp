#pragma once

#include <algorithm>
#include <charconv>
#include <compare>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "eventpulse/analytics.hpp"
#include "eventpulse/tweet.hpp"

namespace eventpulse {

enum class InteractionKind { retweet, reply };

inline std::string_view to_string(InteractionKind k) { return k == InteractionKind::retweet ? "retweet" : "reply"; }

inline std::optional<InteractionKind> parse_kind(std::string_view s) {
  if (s == "retweet") return InteractionKind::retweet;
  if (s == "reply") return InteractionKind::reply;
  return std::nullopt;
}

/// Directed link from the acting user to the author of the content acted upon.
struct InteractionEdge {
  std::string source;
  std::string target;
  InteractionKind kind = InteractionKind::retweet;
  TweetId tweet_id = 0;

  bool self_loop() const { return source == target; }

  friend bool operator==(const InteractionEdge&, const InteractionEdge&) = default;
};

/// One retweet edge per retweet and one reply edge per reply, in input order.
inline std::vector<InteractionEdge> extract_interactions(std::span<const Tweet> tweets) {
  std::vector<InteractionEdge> edges;
  for (const auto& t : tweets) {
    if (t.retweet_of) edges.push_back({t.author, t.retweet_of->author, InteractionKind::retweet, t.id});
    if (t.reply_to) edges.push_back({t.author, *t.reply_to, InteractionKind::reply, t.id});
  }
  return edges;
}

struct EdgeKey {
  std::string source;
  std::string target;
  std::optional<InteractionKind> kind;  // empty when kinds are merged

  friend auto operator<=>(const EdgeKey&, const EdgeKey&) = default;
};

struct WeightedGraph {
  std::set<std::string> nodes;
  std::map<EdgeKey, std::uint64_t> edges;
  bool merged_kinds = false;

  void add(EdgeKey key, std::uint64_t weight = 1) {
    nodes.insert(key.source);
    nodes.insert(key.target);
    edges[std::move(key)] += weight;
  }

  std::uint64_t total_weight() const {
    std::uint64_t sum = 0;
    for (const auto& [k, w] : edges) sum += w;
    return sum;
  }

  friend bool operator==(const WeightedGraph&, const WeightedGraph&) = default;
};

inline WeightedGraph aggregate(std::span<const InteractionEdge> edges, bool merge_kinds) {
  WeightedGraph g;
  g.merged_kinds = merge_kinds;
  for (const auto& e : edges)
    g.add({e.source, e.target, merge_kinds ? std::nullopt : std::optional<InteractionKind>(e.kind)});
  return g;
}

/// In+out weight sum per node.
inline std::map<std::string, std::uint64_t> weighted_degrees(const WeightedGraph& g) {
  std::map<std::string, std::uint64_t> degree;
  for (const auto& n : g.nodes) degree[n] = 0;
  for (const auto& [k, w] : g.edges) {
    degree[k.source] += w;
    degree[k.target] += w;
  }
  return degree;
}

/// Keeps the top_n nodes by weighted degree (ties by ascending name) and the edges among them.
inline WeightedGraph notable_subgraph(const WeightedGraph& g, std::size_t top_n) {
  if (top_n == 0) throw std::invalid_argument("top_n must be at least 1");
  auto ranked = rank_top_k<std::string>(weighted_degrees(g), top_n);
  WeightedGraph out;
  out.merged_kinds = g.merged_kinds;
  for (const auto& r : ranked) out.nodes.insert(r.key);
  for (const auto& [k, w] : g.edges)
    if (out.nodes.count(k.source) && out.nodes.count(k.target)) out.edges.emplace(k, w);
  return out;
}

using CommunityAssignment = std::map<std::string, std::uint32_t>;

namespace detail {

// Fisher-Yates over a 64-bit Mersenne Twister with an explicit bounded draw, so the visiting
// order depends only on the seed and not on the standard library's distribution code.
inline void seeded_shuffle(std::vector<std::uint32_t>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::uint64_t bound = i;
    std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t r;
    do r = rng();
    while (r >= limit);
    std::swap(v[i - 1], v[static_cast<std::size_t>(r % bound)]);
  }
}

}  // namespace detail

/// Undirected weighted adjacency over the graph's nodes in name order (index = rank in `nodes`).
/// Parallel edges in either direction and of either kind sum; self-loops are dropped.
struct UndirectedAdjacency {
  std::vector<std::string> names;
  std::vector<std::vector<std::pair<std::uint32_t, std::uint64_t>>> neighbors;

  explicit UndirectedAdjacency(const WeightedGraph& g) : names(g.nodes.begin(), g.nodes.end()) {
    std::unordered_map<std::string_view, std::uint32_t> index;
    for (std::uint32_t i = 0; i < names.size(); ++i) index.emplace(names[i], i);
    std::vector<std::map<std::uint32_t, std::uint64_t>> acc(names.size());
    for (const auto& [k, w] : g.edges) {
      auto a = index.at(k.source), b = index.at(k.target);
      if (a == b) continue;
      acc[a][b] += w;
      acc[b][a] += w;
    }
    neighbors.resize(names.size());
    for (std::size_t i = 0; i < acc.size(); ++i) neighbors[i].assign(acc[i].begin(), acc[i].end());
  }
};

/// Asynchronous weighted label propagation.
///
/// Every node starts with its own index as label. Each sweep visits the nodes in an order
/// shuffled by a generator seeded with `seed`; a visited node takes the neighbouring label of
/// largest summed edge weight, ties going to the smallest label. Sweeps stop when one changes
/// nothing or after max_iters. Labels are renumbered 0..C-1 in order of first appearance over
/// the name-ordered nodes.
inline CommunityAssignment label_propagation(const WeightedGraph& g, std::uint64_t seed = 42,
                                             std::size_t max_iters = 100) {
  if (max_iters == 0) throw std::invalid_argument("max_iters must be at least 1");
  UndirectedAdjacency adj(g);
  const auto n = static_cast<std::uint32_t>(adj.names.size());
  std::vector<std::uint32_t> label(n);
  std::vector<std::uint32_t> order(n);
  for (std::uint32_t i = 0; i < n; ++i) label[i] = order[i] = i;

  std::mt19937_64 rng(seed);
  std::unordered_map<std::uint32_t, std::uint64_t> weight_by_label;
  for (std::size_t iter = 0; iter < max_iters; ++iter) {
    detail::seeded_shuffle(order, rng);
    bool changed = false;
    for (auto v : order) {
      const auto& nbrs = adj.neighbors[v];
      if (nbrs.empty()) continue;
      weight_by_label.clear();
      for (const auto& [u, w] : nbrs) weight_by_label[label[u]] += w;
      std::uint32_t best = label[v];
      std::uint64_t best_w = 0;
      for (const auto& [l, w] : weight_by_label)
        if (w > best_w || (w == best_w && l < best)) {
          best = l;
          best_w = w;
        }
      if (best != label[v]) {
        label[v] = best;
        changed = true;
      }
    }
    if (!changed) break;
  }

  CommunityAssignment out;
  std::unordered_map<std::uint32_t, std::uint32_t> renumber;
  for (std::uint32_t i = 0; i < n; ++i) {
    auto [it, inserted] = renumber.emplace(label[i], static_cast<std::uint32_t>(renumber.size()));
    out.emplace(adj.names[i], it->second);
  }
  return out;
}

// ---------------------------------------------------------------------------------------------
// Export / import

class GraphIoError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

inline std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  if (quoted) throw GraphIoError("unterminated quoted CSV field");
  return fields;
}

inline std::string xml_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default:
        // XML 1.0 forbids most control characters outright.
        if (static_cast<unsigned char>(c) < 0x20 && c != '\t' && c != '\n' && c != '\r') continue;
        out += c;
    }
  }
  return out;
}

}  // namespace detail

/// "Source,Target,Weight[,Kind]" with one row per aggregated edge in key order.
inline void write_edges_csv(std::ostream& out, const WeightedGraph& g) {
  out << (g.merged_kinds ? "Source,Target,Weight\n" : "Source,Target,Weight,Kind\n");
  for (const auto& [k, w] : g.edges) {
    out << detail::csv_field(k.source) << ',' << detail::csv_field(k.target) << ',' << w;
    if (!g.merged_kinds) out << ',' << (k.kind ? to_string(*k.kind) : std::string_view{});
    out << '\n';
  }
}

/// Inverse of write_edges_csv. Node set = edge endpoints.
inline WeightedGraph read_edges_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw GraphIoError("empty edge CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  WeightedGraph g;
  if (line == "Source,Target,Weight") {
    g.merged_kinds = true;
  } else if (line != "Source,Target,Weight,Kind") {
    throw GraphIoError("unexpected edge CSV header: " + line);
  }
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto f = detail::split_csv_line(line);
    if (f.size() != (g.merged_kinds ? 3u : 4u)) throw GraphIoError("wrong field count on row " + std::to_string(row));
    std::uint64_t w = 0;
    auto [p, ec] = std::from_chars(f[2].data(), f[2].data() + f[2].size(), w);
    if (ec != std::errc{} || p != f[2].data() + f[2].size() || w == 0)
      throw GraphIoError("bad weight on row " + std::to_string(row));
    std::optional<InteractionKind> kind;
    if (!g.merged_kinds) {
      kind = parse_kind(f[3]);
      if (!kind) throw GraphIoError("bad kind on row " + std::to_string(row));
    }
    g.add({f[0], f[1], kind}, w);
  }
  return g;
}

inline void export_edges_csv(const WeightedGraph& g, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw GraphIoError("cannot write " + path.string());
  write_edges_csv(out, g);
  if (!out.flush()) throw GraphIoError("write failed on " + path.string());
}

inline WeightedGraph import_edges_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw GraphIoError("cannot read " + path.string());
  return read_edges_csv(in);
}

/// GEXF 1.2 document: directed edges with native weights, a "kind" edge attribute when kinds
/// are kept apart, and an integer "community" node attribute.
inline void write_gexf(std::ostream& out, const WeightedGraph& g, const CommunityAssignment& communities) {
  using detail::xml_escape;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
         "<gexf xmlns=\"http://www.gexf.net/1.2draft\" "
         "xmlns:xsi=\"http://www.w3.org/2001/XMLSchema-instance\" "
         "xsi:schemaLocation=\"http://www.gexf.net/1.2draft http://www.gexf.net/1.2draft/gexf.xsd\" "
         "version=\"1.2\">\n"
         "  <meta>\n"
         "    <creator>eventpulse</creator>\n"
         "    <description>user interaction graph</description>\n"
         "  </meta>\n"
         "  <graph mode=\"static\" defaultedgetype=\"directed\">\n"
         "    <attributes class=\"node\">\n"
         "      <attribute id=\"community\" title=\"community\" type=\"integer\"/>\n"
         "    </attributes>\n";
  if (!g.merged_kinds)
    out << "    <attributes class=\"edge\">\n"
           "      <attribute id=\"kind\" title=\"kind\" type=\"string\"/>\n"
           "    </attributes>\n";
  out << "    <nodes>\n";
  for (const auto& n : g.nodes) {
    auto name = xml_escape(n);
    out << "      <node id=\"" << name << "\" label=\"" << name << "\"";
    auto it = communities.find(n);
    if (it == communities.end()) {
      out << "/>\n";
      continue;
    }
    out << ">\n        <attvalues>\n          <attvalue for=\"community\" value=\"" << it->second
        << "\"/>\n        </attvalues>\n      </node>\n";
  }
  out << "    </nodes>\n    <edges>\n";
  std::size_t id = 0;
  for (const auto& [k, w] : g.edges) {
    out << "      <edge id=\"e" << id++ << "\" source=\"" << xml_escape(k.source) << "\" target=\""
        << xml_escape(k.target) << "\" weight=\"" << w << "\"";
    if (g.merged_kinds || !k.kind) {
      out << "/>\n";
      continue;
    }
    out << ">\n        <attvalues>\n          <attvalue for=\"kind\" value=\"" << to_string(*k.kind)
        << "\"/>\n        </attvalues>\n      </edge>\n";
  }
  out << "    </edges>\n  </graph>\n</gexf>\n";
}

inline void export_gexf(const WeightedGraph& g, const CommunityAssignment& communities,
                        const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw GraphIoError("cannot write " + path.string());
  write_gexf(out, g, communities);
  if (!out.flush()) throw GraphIoError("write failed on " + path.string());
}

}  // namespace eventpulse
