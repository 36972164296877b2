#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tad/geodesic.hpp"
#include "tad/graph.hpp"

namespace tad {

// Sorted distinct edge-weight values of one layer.
struct FiltrationGrid {
    std::vector<double> thresholds;
};

struct KClique {
    std::vector<NodeId> vertices;  // sorted, pairwise adjacent
    double filtration_value{};     // max weight over internal pairs; 0 for k=1
};

// Members ordered so the default comparison gives the canonical point order
// (k, birth, death, essential).
struct PdPoint {
    std::int32_t k{};
    double birth{};
    double death{};  // +inf while essential and uncapped
    bool essential = false;

    auto operator<=>(const PdPoint&) const = default;
};

struct PersistenceDiagram {
    std::vector<PdPoint> points;   // canonically sorted
    double essential_cap = 0.0;    // layer max filtration value once capped
    bool capped = false;

    std::size_t size() const { return points.size(); }
    void sort_canonical();

    bool operator==(const PersistenceDiagram&) const = default;
};

struct CliqueOptions {
    std::int32_t k_max = 4;
    // Per-layer ceiling on enumerated cliques across all sizes.
    std::uint64_t clique_ceiling = 4'000'000;
};

// Plain weighted-graph view shared by raw-layer and geodesic inputs.
struct WeightedGraph {
    std::string name;
    std::vector<NodeId> nodes;  // sorted
    struct Edge {
        NodeId u{}, v{};  // u < v
        double w{};
    };
    std::vector<Edge> edges;

    static WeightedGraph from(const LayerGraph& g, std::string name = {});
    static WeightedGraph from(const GeodesicLayer& g);
};

FiltrationGrid filtration_grid(const WeightedGraph& g);

// Every clique of size 1..k_max with its filtration value, lexicographic
// vertex order within each size.
std::vector<KClique> enumerate_k_cliques(const WeightedGraph& g, std::int32_t k_max,
                                         std::uint64_t clique_ceiling = CliqueOptions{}.clique_ceiling);

// Zero-dimensional persistence of k-clique communities over the sublevel
// weight filtration: two k-cliques are adjacent iff they share k-1 vertices
// (for k=1: iff joined by an edge), communities merge by the elder rule at
// the max of the participating filtration values. Essential deaths are left
// at +inf here.
PersistenceDiagram clique_community_pd(const WeightedGraph& g, std::int32_t k,
                                       std::uint64_t clique_ceiling = CliqueOptions{}.clique_ceiling);

// Union of clique_community_pd over k = 1..k_max with essential deaths
// finitized at the layer's max filtration value.
PersistenceDiagram layer_pd(const WeightedGraph& g, const CliqueOptions& opt = {});

inline PersistenceDiagram layer_pd(const GeodesicLayer& g, const CliqueOptions& opt = {}) {
    return layer_pd(WeightedGraph::from(g), opt);
}

// Diagram CSV: `k,birth,death,essential` with the cap value in the death
// column when essential=1.
void write_diagram_csv(const PersistenceDiagram& pd, std::ostream& out);

}  // namespace tad
