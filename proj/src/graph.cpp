#include "tad/graph.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <tuple>

#include "tad/csv.hpp"
#include "tad/errors.hpp"

namespace tad {

void LayerGraph::add_raw(NodeId a, NodeId b, double raw) {
    nodes_.insert(a);
    nodes_.insert(b);
    EdgeData& e = edges_[make_edge(a, b)];
    e.raw += raw;
    e.weight = e.raw;
}

void LayerGraph::set_edge(NodeId a, NodeId b, double weight, double raw) {
    nodes_.insert(a);
    nodes_.insert(b);
    edges_[make_edge(a, b)] = EdgeData{weight, raw};
}

double LayerGraph::max_raw() const {
    double m = 0.0;
    for (const auto& [key, e] : edges_) m = std::max(m, e.raw);
    return m;
}

const std::string& TemporalMultilayerGraph::node_name(NodeId id) const {
    return node_names.at(static_cast<std::size_t>(id));
}

std::optional<std::size_t> TemporalMultilayerGraph::layer_index(const std::string& name) const {
    auto it = std::find(layer_names.begin(), layer_names.end(), name);
    if (it == layer_names.end()) return std::nullopt;
    return static_cast<std::size_t>(it - layer_names.begin());
}

namespace {

std::int64_t parse_time(const std::string& s, std::size_t lineno) {
    std::int64_t value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size() || value < 0) {
        throw DataError("line " + std::to_string(lineno) + ": invalid time index '" + s + "'");
    }
    return value;
}

double parse_weight(const std::string& s, std::size_t lineno) {
    if (s.empty()) throw DataError("line " + std::to_string(lineno) + ": empty weight field");
    errno = 0;
    char* end = nullptr;
    double value = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(value)) {
        throw DataError("line " + std::to_string(lineno) + ": non-numeric weight '" + s + "'");
    }
    if (value < 0) throw DataError("line " + std::to_string(lineno) + ": negative weight '" + s + "'");
    if (value == 0) throw DataError("line " + std::to_string(lineno) + ": non-positive weight '" + s + "'");
    return value;
}

double transform_one(TransformKind kind, double raw, double scope_max) {
    switch (kind) {
        case TransformKind::identity: return raw;
        case TransformKind::reciprocal_of_normalized: return scope_max / raw;
        case TransformKind::one_minus_normalized: return 1.0 - raw / (scope_max + 1.0);
        case TransformKind::unweighted: return 1.0;
    }
    throw UsageError("unknown weight transform");
}

}  // namespace

TemporalMultilayerGraph ingest_edge_list(std::istream& in, const WeightTransform& transform,
                                         IngestStats* stats) {
    std::string line;
    if (!std::getline(in, line)) throw DataError("no records: empty input");
    {
        const std::vector<std::string> want = {"t", "layer", "src", "dst", "weight"};
        if (split_csv(line) != want) {
            throw DataError("line 1: expected header `t,layer,src,dst,weight`");
        }
    }

    // (t, layer) -> {u,v} by name -> summed raw weight
    std::map<std::int64_t, std::map<std::string, std::map<std::pair<std::string, std::string>, double>>> acc;
    std::set<std::string> node_set;
    std::set<std::string> layer_set;
    IngestStats st;

    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        auto f = split_csv(line);
        if (f.size() != 5) {
            throw DataError("line " + std::to_string(lineno) + ": expected 5 fields, got " +
                            std::to_string(f.size()));
        }
        const std::int64_t t = parse_time(f[0], lineno);
        const std::string& layer = f[1];
        const std::string& src = f[2];
        const std::string& dst = f[3];
        if (layer.empty() || src.empty() || dst.empty()) {
            throw DataError("line " + std::to_string(lineno) + ": empty identifier field");
        }
        const double w = parse_weight(f[4], lineno);
        ++st.data_rows;
        if (src == dst) {
            ++st.self_loops_dropped;
            continue;
        }
        auto key = std::minmax(src, dst);
        acc[t][layer][{key.first, key.second}] += w;
        node_set.insert(src);
        node_set.insert(dst);
        layer_set.insert(layer);
    }
    if (acc.empty()) throw DataError("no records");

    TemporalMultilayerGraph g;
    g.layer_names.assign(layer_set.begin(), layer_set.end());
    g.node_names.assign(node_set.begin(), node_set.end());
    std::map<std::string, NodeId> id_of;
    for (std::size_t i = 0; i < g.node_names.size(); ++i) {
        id_of[g.node_names[i]] = static_cast<NodeId>(i);
    }

    for (const auto& [t, per_layer] : acc) {
        MultilayerSnapshot snap;
        snap.time = t;
        snap.layers.resize(g.layer_names.size());
        for (std::size_t li = 0; li < g.layer_names.size(); ++li) {
            auto it = per_layer.find(g.layer_names[li]);
            if (it == per_layer.end()) continue;
            for (const auto& [uv, raw] : it->second) {
                snap.layers[li].set_edge(id_of[uv.first], id_of[uv.second], raw, raw);
                ++st.aggregated_records;
            }
        }
        g.snapshots.push_back(std::move(snap));
    }

    apply_transform(g, transform);
    if (stats) *stats = st;
    return g;
}

void write_edge_csv(const TemporalMultilayerGraph& g, std::ostream& out) {
    out << "t,layer,src,dst,weight\n";
    for (const auto& snap : g.snapshots) {
        for (std::size_t li = 0; li < g.layer_names.size(); ++li) {
            for (const auto& [key, e] : snap.layers[li].edges()) {
                out << snap.time << ',' << g.layer_names[li] << ',' << g.node_name(key.u) << ','
                    << g.node_name(key.v) << ',' << format_double(e.raw) << '\n';
            }
        }
    }
}

LayerGraph apply_weight_transform(const LayerGraph& raw, const WeightTransform& transform,
                                  std::optional<double> scope_max) {
    double m = scope_max.value_or(raw.max_raw());
    LayerGraph out = raw;
    for (auto& [key, e] : out.edges()) {
        if (!(e.raw > 0)) {
            throw DataError("apply_weight_transform: zero or negative count on edge");
        }
        e.weight = transform_one(transform.kind, e.raw, m);
    }
    return out;
}

void apply_transform(TemporalMultilayerGraph& g, const WeightTransform& transform) {
    std::vector<double> global_max(g.layer_names.size(), 0.0);
    if (transform.scope == NormScope::global_per_layer) {
        for (const auto& snap : g.snapshots) {
            for (std::size_t li = 0; li < snap.layers.size(); ++li) {
                global_max[li] = std::max(global_max[li], snap.layers[li].max_raw());
            }
        }
    }
    for (auto& snap : g.snapshots) {
        for (std::size_t li = 0; li < snap.layers.size(); ++li) {
            std::optional<double> scope_max;
            if (transform.scope == NormScope::global_per_layer) scope_max = global_max[li];
            snap.layers[li] = apply_weight_transform(snap.layers[li], transform, scope_max);
        }
    }
}

namespace {

// Edges by decreasing raw activity, ties by (u,v) id order.
std::vector<std::pair<EdgeKey, EdgeData>> edges_by_activity(const LayerGraph& layer) {
    std::vector<std::pair<EdgeKey, EdgeData>> es(layer.edges().begin(), layer.edges().end());
    std::sort(es.begin(), es.end(), [](const auto& a, const auto& b) {
        if (a.second.raw != b.second.raw) return a.second.raw > b.second.raw;
        return a.first < b.first;
    });
    return es;
}

LayerGraph induce(const LayerGraph& layer, const std::set<NodeId>& keep) {
    LayerGraph out;
    for (NodeId n : keep) out.add_node(n);
    for (const auto& [key, e] : layer.edges()) {
        if (keep.count(key.u) && keep.count(key.v)) out.set_edge(key.u, key.v, e.weight, e.raw);
    }
    return out;
}

}  // namespace

LayerGraph sample_top_edges(const LayerGraph& layer, int p) {
    if (p < 1) throw UsageError("sample_top_edges: p must be >= 1");
    if (layer.edge_count() <= static_cast<std::size_t>(p)) return layer;
    auto es = edges_by_activity(layer);
    std::set<NodeId> keep;
    for (int i = 0; i < p; ++i) {
        keep.insert(es[static_cast<std::size_t>(i)].first.u);
        keep.insert(es[static_cast<std::size_t>(i)].first.v);
    }
    return induce(layer, keep);
}

LayerGraph sample_node_budget(const LayerGraph& layer, int budget) {
    if (budget < 1) throw UsageError("sample_node_budget: budget must be >= 1");
    auto es = edges_by_activity(layer);
    std::set<NodeId> keep;
    for (const auto& [key, e] : es) {
        std::size_t extra = (keep.count(key.u) ? 0u : 1u) + (keep.count(key.v) ? 0u : 1u);
        if (keep.size() + extra > static_cast<std::size_t>(budget)) break;
        keep.insert(key.u);
        keep.insert(key.v);
    }
    return induce(layer, keep);
}

}  // namespace tad
