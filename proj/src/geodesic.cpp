#include "tad/geodesic.hpp"

#include <algorithm>
#include <limits>
#include <ostream>
#include <queue>

#include "tad/csv.hpp"

namespace tad {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Adjacency {
    std::vector<NodeId> ids;  // local -> global, sorted
    std::vector<std::vector<std::pair<int, double>>> nbr;
};

Adjacency build_adjacency(const LayerGraph& layer) {
    Adjacency a;
    a.ids.assign(layer.nodes().begin(), layer.nodes().end());
    a.nbr.resize(a.ids.size());
    auto local = [&](NodeId id) {
        return static_cast<int>(std::lower_bound(a.ids.begin(), a.ids.end(), id) - a.ids.begin());
    };
    for (const auto& [key, e] : layer.edges()) {
        int u = local(key.u);
        int v = local(key.v);
        a.nbr[static_cast<std::size_t>(u)].push_back({v, e.weight});
        a.nbr[static_cast<std::size_t>(v)].push_back({u, e.weight});
    }
    return a;
}

// Distances from source s to every local node with index > s; the lower
// half is recovered by symmetry at merge time.
std::vector<std::pair<int, double>> dijkstra_upper(const Adjacency& a, int s) {
    const int n = static_cast<int>(a.ids.size());
    std::vector<double> dist(static_cast<std::size_t>(n), kInf);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
    dist[static_cast<std::size_t>(s)] = 0.0;
    pq.push({0.0, s});
    while (!pq.empty()) {
        auto [d, u] = pq.top();
        pq.pop();
        if (d > dist[static_cast<std::size_t>(u)]) continue;
        for (auto [v, w] : a.nbr[static_cast<std::size_t>(u)]) {
            double nd = d + w;
            if (nd < dist[static_cast<std::size_t>(v)]) {
                dist[static_cast<std::size_t>(v)] = nd;
                pq.push({nd, v});
            }
        }
    }
    std::vector<std::pair<int, double>> out;
    for (int v = s + 1; v < n; ++v) {
        if (dist[static_cast<std::size_t>(v)] < kInf) out.push_back({v, dist[static_cast<std::size_t>(v)]});
    }
    return out;
}

GeodesicLayer merge_rows(const Adjacency& a, const std::vector<std::vector<std::pair<int, double>>>& rows,
                         std::string source_layer) {
    GeodesicLayer out;
    out.source_layer = std::move(source_layer);
    out.nodes = a.ids;
    for (std::size_t s = 0; s < rows.size(); ++s) {
        for (auto [v, d] : rows[s]) {
            out.dist.emplace(EdgeKey{a.ids[s], a.ids[static_cast<std::size_t>(v)]}, d);
        }
    }
    return out;
}

}  // namespace

GeodesicLayer densify(const LayerGraph& layer, std::string source_layer) {
    Adjacency a = build_adjacency(layer);
    const int n = static_cast<int>(a.ids.size());
    std::vector<std::vector<std::pair<int, double>>> rows(static_cast<std::size_t>(n));
    for (int s = 0; s < n; ++s) rows[static_cast<std::size_t>(s)] = dijkstra_upper(a, s);
    return merge_rows(a, rows, std::move(source_layer));
}

GeodesicLayer densify_parallel(const LayerGraph& layer, int jobs, std::string source_layer) {
    if (jobs < 1) jobs = 1;
    Adjacency a = build_adjacency(layer);
    const int n = static_cast<int>(a.ids.size());
    std::vector<std::vector<std::pair<int, double>>> rows(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(dynamic, 8) num_threads(jobs)
    for (int s = 0; s < n; ++s) {
        rows[static_cast<std::size_t>(s)] = dijkstra_upper(a, s);
    }
    return merge_rows(a, rows, std::move(source_layer));
}

std::vector<GeodesicLayer> densify_snapshot(const MultilayerSnapshot& snapshot,
                                            const std::vector<std::string>& layer_names) {
    std::vector<GeodesicLayer> out;
    out.reserve(snapshot.layers.size());
    for (std::size_t li = 0; li < snapshot.layers.size(); ++li) {
        std::string name = li < layer_names.size() ? layer_names[li] : std::string{};
        out.push_back(densify(snapshot.layers[li], name));
    }
    return out;
}

void write_geodesic_csv(const GeodesicLayer& layer, const TemporalMultilayerGraph& g,
                        std::ostream& out) {
    out << "u,v,dist\n";
    for (const auto& [key, d] : layer.dist) {
        out << g.node_name(key.u) << ',' << g.node_name(key.v) << ',' << format_double(d) << '\n';
    }
}

}  // namespace tad
