#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace tad {

using NodeId = std::int32_t;

struct EdgeKey {
    NodeId u{};
    NodeId v{};
    auto operator<=>(const EdgeKey&) const = default;
};

// Canonical undirected key, smaller id first.
inline EdgeKey make_edge(NodeId a, NodeId b) {
    return a < b ? EdgeKey{a, b} : EdgeKey{b, a};
}

struct EdgeData {
    double weight{};  // filtration/distance value after the transform
    double raw{};     // aggregated raw activity count
};

// Weighted undirected simple graph for one layer at one time.
// No self-loops; every endpoint is in the node set; weights positive.
class LayerGraph {
public:
    // Aggregates raw activity onto an edge (weight tracks raw until a
    // transform recomputes it).
    void add_raw(NodeId a, NodeId b, double raw);
    void set_edge(NodeId a, NodeId b, double weight, double raw);
    void add_node(NodeId n) { nodes_.insert(n); }

    bool has_edge(NodeId a, NodeId b) const { return edges_.count(make_edge(a, b)) != 0; }
    const std::set<NodeId>& nodes() const { return nodes_; }
    const std::map<EdgeKey, EdgeData>& edges() const { return edges_; }
    std::map<EdgeKey, EdgeData>& edges() { return edges_; }
    std::size_t edge_count() const { return edges_.size(); }
    bool empty() const { return nodes_.empty(); }
    double max_raw() const;  // 0 when edgeless

    bool operator==(const LayerGraph&) const = default;

private:
    std::set<NodeId> nodes_;
    std::map<EdgeKey, EdgeData> edges_;
};

enum class TransformKind { identity, reciprocal_of_normalized, one_minus_normalized, unweighted };
enum class NormScope { per_snapshot_layer, global_per_layer };

struct WeightTransform {
    TransformKind kind = TransformKind::reciprocal_of_normalized;
    NormScope scope = NormScope::per_snapshot_layer;
};

struct MultilayerSnapshot {
    std::int64_t time{};
    std::vector<LayerGraph> layers;  // canonical layer order, one per layer name
};

// Ordered sequence of multilayer snapshots with strictly increasing times.
// Node names map to dense ids in lexicographic order; layer names are the
// canonical sorted list applied to every snapshot.
struct TemporalMultilayerGraph {
    std::vector<std::string> layer_names;
    std::vector<std::string> node_names;  // NodeId -> name
    std::vector<MultilayerSnapshot> snapshots;

    std::size_t layer_count() const { return layer_names.size(); }
    const std::string& node_name(NodeId id) const;
    std::optional<std::size_t> layer_index(const std::string& name) const;

    bool operator==(const TemporalMultilayerGraph&) const = default;
};

struct IngestStats {
    std::size_t data_rows = 0;
    std::size_t self_loops_dropped = 0;
    std::size_t aggregated_records = 0;
};

// Reads CSV with header `t,layer,src,dst,weight`. Records with identical
// (t, layer, {src,dst}) are aggregated by summing raw weights before the
// transform; self-loops are dropped and counted. Malformed rows raise a
// DataError naming the line number; empty input raises "no records".
TemporalMultilayerGraph ingest_edge_list(std::istream& in, const WeightTransform& transform,
                                         IngestStats* stats = nullptr);

// Serializes the raw counts back to edge CSV (weight column carries raw
// activity), so ingest(write(g)) round-trips under the same transform.
void write_edge_csv(const TemporalMultilayerGraph& g, std::ostream& out);

// Recomputes every edge weight from its raw count.
void apply_transform(TemporalMultilayerGraph& g, const WeightTransform& transform);

// Single-layer transform. `scope_max` is the normalization maximum; defaults
// to the layer's own max raw count (per-snapshot-layer scope).
LayerGraph apply_weight_transform(const LayerGraph& raw, const WeightTransform& transform,
                                  std::optional<double> scope_max = std::nullopt);

// Induced subgraph on the endpoints of the p most active edges (raw count
// descending, ties by (u,v) id order). Layers with <= p edges are returned
// unchanged.
LayerGraph sample_top_edges(const LayerGraph& layer, int p);

// Greedy node-budget variant: add edges by decreasing activity until the
// next edge would exceed `budget` distinct nodes, then induce.
LayerGraph sample_node_budget(const LayerGraph& layer, int budget);

}  // namespace tad
