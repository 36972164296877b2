#pragma once

#include <map>
#include <string>
#include <vector>

#include "tad/graph.hpp"

namespace tad {

// Weighted geodesic distance matrix of one layer: complete on each connected
// component, no entries for disconnected pairs, dist(u,u) never stored.
struct GeodesicLayer {
    std::string source_layer;
    std::vector<NodeId> nodes;        // sorted, includes isolated nodes
    std::map<EdgeKey, double> dist;   // u < v, minimum total edge weight

    bool operator==(const GeodesicLayer&) const = default;
};

// Serial reference: Dijkstra from every source node.
GeodesicLayer densify(const LayerGraph& layer, std::string source_layer = {});

// OpenMP kernel parallel over source nodes; output identical to densify()
// for any job count.
GeodesicLayer densify_parallel(const LayerGraph& layer, int jobs, std::string source_layer = {});

// One GeodesicLayer per layer, order preserved; empty layers map to empty
// GeodesicLayers.
std::vector<GeodesicLayer> densify_snapshot(const MultilayerSnapshot& snapshot,
                                            const std::vector<std::string>& layer_names);

// Debug dump: CSV `u,v,dist` with node names resolved through `g`.
void write_geodesic_csv(const GeodesicLayer& layer, const TemporalMultilayerGraph& g,
                        std::ostream& out);

}  // namespace tad
