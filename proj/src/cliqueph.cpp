#include "tad/cliqueph.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <limits>
#include <ostream>
#include <unordered_map>

#include "tad/csv.hpp"
#include "tad/errors.hpp"

namespace tad {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Dense local form of one layer. Clique work is bounded to 4096 nodes per
// layer; beyond that the enumeration is infeasible anyway and the caller is
// expected to sample first.
constexpr int kMaxLocalNodes = 4096;

struct LocalLayer {
    std::string name;
    int n = 0;
    int words = 0;
    std::vector<NodeId> ids;          // local -> global
    std::vector<double> grid;         // sorted distinct weights
    std::vector<std::int32_t> widx;   // n*n value-index matrix, -1 absent
    std::vector<std::uint64_t> adj;   // n rows x words bitset

    bool adjacent(int a, int b) const {
        return adj[static_cast<std::size_t>(a) * static_cast<std::size_t>(words) +
                   static_cast<std::size_t>(b >> 6)] >>
                   (b & 63) &
               1u;
    }
    std::int32_t value_index(int a, int b) const {
        return widx[static_cast<std::size_t>(a) * static_cast<std::size_t>(n) +
                    static_cast<std::size_t>(b)];
    }
};

LocalLayer build_local(const WeightedGraph& g, bool need_matrix) {
    LocalLayer L;
    L.name = g.name;
    L.ids = g.nodes;
    L.n = static_cast<int>(L.ids.size());

    L.grid.reserve(g.edges.size());
    for (const auto& e : g.edges) L.grid.push_back(e.w);
    std::sort(L.grid.begin(), L.grid.end());
    L.grid.erase(std::unique(L.grid.begin(), L.grid.end()), L.grid.end());

    if (!need_matrix) return L;
    if (L.n > kMaxLocalNodes) {
        throw ResourceError("layer '" + L.name + "': " + std::to_string(L.n) +
                            " nodes exceed the clique enumeration limit of " +
                            std::to_string(kMaxLocalNodes) + "; sample the layer first");
    }
    L.words = (L.n + 63) / 64;
    L.adj.assign(static_cast<std::size_t>(L.n) * static_cast<std::size_t>(L.words), 0);
    L.widx.assign(static_cast<std::size_t>(L.n) * static_cast<std::size_t>(L.n), -1);
    auto local = [&](NodeId id) {
        return static_cast<int>(std::lower_bound(L.ids.begin(), L.ids.end(), id) - L.ids.begin());
    };
    for (const auto& e : g.edges) {
        int u = local(e.u);
        int v = local(e.v);
        auto vi = static_cast<std::int32_t>(
            std::lower_bound(L.grid.begin(), L.grid.end(), e.w) - L.grid.begin());
        L.widx[static_cast<std::size_t>(u) * static_cast<std::size_t>(L.n) + static_cast<std::size_t>(v)] = vi;
        L.widx[static_cast<std::size_t>(v) * static_cast<std::size_t>(L.n) + static_cast<std::size_t>(u)] = vi;
        L.adj[static_cast<std::size_t>(u) * static_cast<std::size_t>(L.words) + static_cast<std::size_t>(v >> 6)] |=
            1ull << (v & 63);
        L.adj[static_cast<std::size_t>(v) * static_cast<std::size_t>(L.words) + static_cast<std::size_t>(u >> 6)] |=
            1ull << (u & 63);
    }
    return L;
}

// All cliques of exactly size k, lexicographic order, values as grid indices.
struct CliqueArena {
    int k = 0;
    std::vector<std::uint32_t> verts;      // count*k local ids
    std::vector<std::int32_t> value_idx;   // per clique
    std::size_t count() const { return value_idx.size(); }
};

void check_ceiling(std::uint64_t used, std::uint64_t ceiling, const std::string& layer) {
    if (used > ceiling) {
        throw ResourceError("layer '" + layer + "': clique count " + std::to_string(used) +
                            " exceeds ceiling " + std::to_string(ceiling));
    }
}

// DFS over ordered vertices; candidates at each depth are the intersection
// of the neighborhoods of the current prefix, restricted to larger ids.
CliqueArena enumerate_size_k(const LocalLayer& L, int k, std::uint64_t& budget_used,
                             std::uint64_t ceiling) {
    CliqueArena arena;
    arena.k = k;
    if (L.n == 0) return arena;

    const int words = L.words;
    std::vector<std::uint64_t> cand(static_cast<std::size_t>(words) * static_cast<std::size_t>(k > 1 ? k - 1 : 1));
    std::vector<int> cur(static_cast<std::size_t>(k));
    std::vector<std::int32_t> curval(static_cast<std::size_t>(k));

    // max value index between x and the prefix cur[0..depth-1]
    auto pair_max = [&](int depth, int x) {
        std::int32_t m = -1;
        for (int i = 0; i < depth; ++i) {
            m = std::max(m, L.value_index(cur[static_cast<std::size_t>(i)], x));
        }
        return m;
    };

    auto emit = [&](int depth_k) {
        ++budget_used;
        check_ceiling(budget_used, ceiling, L.name);
        for (int i = 0; i < depth_k; ++i) {
            arena.verts.push_back(static_cast<std::uint32_t>(cur[static_cast<std::size_t>(i)]));
        }
        arena.value_idx.push_back(curval[static_cast<std::size_t>(depth_k - 1)]);
    };

    // depth = number of vertices already chosen
    auto dfs = [&](auto&& self, int depth) -> void {
        const std::uint64_t* c =
            cand.data() + static_cast<std::size_t>(depth - 1) * static_cast<std::size_t>(words);
        for (int w = 0; w < words; ++w) {
            std::uint64_t bits = c[w];
            while (bits) {
                int b = std::countr_zero(bits);
                bits &= bits - 1;
                int x = (w << 6) | b;
                std::int32_t val = std::max(curval[static_cast<std::size_t>(depth - 1)], pair_max(depth, x));
                cur[static_cast<std::size_t>(depth)] = x;
                curval[static_cast<std::size_t>(depth)] = val;
                if (depth + 1 == k) {
                    emit(k);
                    continue;
                }
                // next candidates: current ∩ adj[x] ∩ {> x}
                std::uint64_t* nc =
                    cand.data() + static_cast<std::size_t>(depth) * static_cast<std::size_t>(words);
                const std::uint64_t* ax = L.adj.data() + static_cast<std::size_t>(x) * static_cast<std::size_t>(words);
                bool any = false;
                for (int ww = 0; ww < words; ++ww) {
                    std::uint64_t m = c[ww] & ax[ww];
                    if (ww == (x >> 6)) m &= ~((2ull << (x & 63)) - 1);
                    if (ww < (x >> 6)) m = 0;
                    nc[ww] = m;
                    any |= m != 0;
                }
                if (any) self(self, depth + 1);
            }
        }
    };

    if (k == 1) {
        for (int x = 0; x < L.n; ++x) {
            cur[0] = x;
            curval[0] = -1;  // value 0.0
            emit(1);
        }
        return arena;
    }

    for (int x = 0; x < L.n; ++x) {
        cur[0] = x;
        curval[0] = -1;
        std::uint64_t* nc = cand.data();
        const std::uint64_t* ax = L.adj.data() + static_cast<std::size_t>(x) * static_cast<std::size_t>(words);
        bool any = false;
        for (int ww = 0; ww < words; ++ww) {
            std::uint64_t m = ax[ww];
            if (ww == (x >> 6)) m &= ~((2ull << (x & 63)) - 1);
            if (ww < (x >> 6)) m = 0;
            nc[ww] = m;
            any |= m != 0;
        }
        if (any) dfs(dfs, 1);
    }
    return arena;
}

double birth_value(const LocalLayer& L, std::int32_t idx) {
    return idx < 0 ? 0.0 : L.grid[static_cast<std::size_t>(idx)];
}

// Union-find with elder rule; births stored as grid indices (-1 = 0.0).
struct PersistenceForest {
    std::vector<std::int32_t> parent;
    std::vector<std::int32_t> size;
    std::vector<std::int32_t> birth;
    std::vector<std::uint32_t> senior;  // creation order, breaks birth ties

    explicit PersistenceForest(std::size_t n, std::int32_t birth_idx) {
        parent.resize(n);
        size.assign(n, 1);
        birth.assign(n, birth_idx);
        senior.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            parent[i] = static_cast<std::int32_t>(i);
            senior[i] = static_cast<std::uint32_t>(i);
        }
    }

    std::int32_t find(std::int32_t x) {
        std::int32_t root = x;
        while (parent[static_cast<std::size_t>(root)] != root) root = parent[static_cast<std::size_t>(root)];
        while (parent[static_cast<std::size_t>(x)] != root) {
            std::int32_t next = parent[static_cast<std::size_t>(x)];
            parent[static_cast<std::size_t>(x)] = root;
            x = next;
        }
        return root;
    }

    // Merge at grid index vi; records the younger class's point when its
    // persistence is nonzero.
    void merge(std::int32_t a, std::int32_t b, std::int32_t vi, std::int32_t k, const LocalLayer& L,
               std::vector<PdPoint>& out) {
        std::int32_t ra = find(a);
        std::int32_t rb = find(b);
        if (ra == rb) return;
        auto rank = [&](std::int32_t r) {
            return std::pair<std::int32_t, std::uint32_t>(birth[static_cast<std::size_t>(r)],
                                                          senior[static_cast<std::size_t>(r)]);
        };
        std::int32_t elder = rank(ra) <= rank(rb) ? ra : rb;
        std::int32_t younger = elder == ra ? rb : ra;
        if (birth[static_cast<std::size_t>(younger)] < vi) {
            out.push_back(PdPoint{k, birth_value(L, birth[static_cast<std::size_t>(younger)]),
                                  L.grid[static_cast<std::size_t>(vi)], false});
        }
        // attach smaller tree; root metadata comes from the elder
        std::int32_t big = size[static_cast<std::size_t>(ra)] >= size[static_cast<std::size_t>(rb)] ? ra : rb;
        std::int32_t small = big == ra ? rb : ra;
        parent[static_cast<std::size_t>(small)] = big;
        size[static_cast<std::size_t>(big)] += size[static_cast<std::size_t>(small)];
        birth[static_cast<std::size_t>(big)] = birth[static_cast<std::size_t>(elder)];
        senior[static_cast<std::size_t>(big)] = senior[static_cast<std::size_t>(elder)];
    }
};

// Stable counting sort of clique indices by value index.
std::vector<std::uint32_t> order_by_value(const CliqueArena& arena, std::size_t grid_size) {
    std::vector<std::uint32_t> bucket_start(grid_size + 2, 0);
    for (std::int32_t vi : arena.value_idx) {
        ++bucket_start[static_cast<std::size_t>(vi + 1) + 1];
    }
    for (std::size_t i = 1; i < bucket_start.size(); ++i) bucket_start[i] += bucket_start[i - 1];
    std::vector<std::uint32_t> order(arena.count());
    std::vector<std::uint32_t> cursor(bucket_start.begin(), bucket_start.end() - 1);
    for (std::size_t c = 0; c < arena.count(); ++c) {
        order[cursor[static_cast<std::size_t>(arena.value_idx[c] + 1)]++] = static_cast<std::uint32_t>(c);
    }
    return order;
}

// k=1: communities are the graph's connected components; vertices are born
// at 0 and merge along edges in increasing weight order.
PersistenceDiagram vertex_community_pd(const LocalLayer& L, const WeightedGraph& g) {
    PersistenceDiagram pd;
    PersistenceForest uf(static_cast<std::size_t>(L.n), -1);
    auto local = [&](NodeId id) {
        return static_cast<std::int32_t>(std::lower_bound(L.ids.begin(), L.ids.end(), id) - L.ids.begin());
    };
    struct Ev {
        std::int32_t vi, u, v;
    };
    std::vector<Ev> events;
    events.reserve(g.edges.size());
    for (const auto& e : g.edges) {
        auto vi = static_cast<std::int32_t>(
            std::lower_bound(L.grid.begin(), L.grid.end(), e.w) - L.grid.begin());
        events.push_back({vi, local(e.u), local(e.v)});
    }
    std::sort(events.begin(), events.end(), [](const Ev& a, const Ev& b) {
        if (a.vi != b.vi) return a.vi < b.vi;
        if (a.u != b.u) return a.u < b.u;
        return a.v < b.v;
    });
    for (const Ev& e : events) uf.merge(e.u, e.v, e.vi, 1, L, pd.points);
    for (std::int32_t i = 0; i < L.n; ++i) {
        if (uf.find(i) == i) pd.points.push_back(PdPoint{1, 0.0, kInf, true});
    }
    pd.sort_canonical();
    return pd;
}

// Subset keys: k-1 local ids, 12 bits each (n <= 4096). Values of k-1 up to
// 5 pack into a u64; larger sub-tuples use a fixed array key.
struct WideKey {
    std::array<std::uint16_t, 20> v{};
    bool operator==(const WideKey&) const = default;
};

struct WideKeyHash {
    std::size_t operator()(const WideKey& k) const {
        std::uint64_t h = 1469598103934665603ull;
        for (std::uint16_t x : k.v) {
            h ^= x;
            h *= 1099511628211ull;
        }
        return static_cast<std::size_t>(h);
    }
};

template <class Map, class MakeKey>
void run_uf_pass(const LocalLayer& L, const CliqueArena& arena, std::int32_t k, Map& rep,
                 MakeKey&& make_key, std::vector<PdPoint>& out_points, PersistenceForest& uf) {
    const auto order = order_by_value(arena, L.grid.size());
    const int kk = arena.k;
    for (std::uint32_t ci : order) {
        const std::uint32_t* verts = arena.verts.data() + static_cast<std::size_t>(ci) * static_cast<std::size_t>(kk);
        const std::int32_t vi = arena.value_idx[ci];
        for (int drop = 0; drop < kk; ++drop) {
            auto key = make_key(verts, kk, drop);
            auto [it, inserted] = rep.try_emplace(key, static_cast<std::int32_t>(ci));
            if (!inserted) {
                uf.merge(static_cast<std::int32_t>(ci), it->second, vi, k, L, out_points);
            }
        }
    }
}

PersistenceDiagram clique_community_pd_local(const LocalLayer& L, const WeightedGraph& g,
                                             std::int32_t k, std::uint64_t& budget_used,
                                             std::uint64_t ceiling) {
    if (k == 1) {
        budget_used += static_cast<std::uint64_t>(L.n);
        check_ceiling(budget_used, ceiling, L.name);
        return vertex_community_pd(L, g);
    }

    CliqueArena arena = enumerate_size_k(L, k, budget_used, ceiling);
    PersistenceDiagram pd;
    if (arena.count() == 0) return pd;

    PersistenceForest uf(arena.count(), 0);
    // births are the clique values, not a shared index
    for (std::size_t c = 0; c < arena.count(); ++c) {
        uf.birth[c] = arena.value_idx[c];
    }

    if (k - 1 <= 5) {
        std::unordered_map<std::uint64_t, std::int32_t> rep;
        rep.reserve(arena.count() * 2);
        auto make_key = [](const std::uint32_t* verts, int kk, int drop) {
            std::uint64_t key = 0;
            for (int i = 0; i < kk; ++i) {
                if (i == drop) continue;
                key = (key << 12) | verts[i];
            }
            return key;
        };
        run_uf_pass(L, arena, k, rep, make_key, pd.points, uf);
    } else {
        std::unordered_map<WideKey, std::int32_t, WideKeyHash> rep;
        rep.reserve(arena.count() * 2);
        auto make_key = [](const std::uint32_t* verts, int kk, int drop) {
            WideKey key;
            int at = 0;
            for (int i = 0; i < kk; ++i) {
                if (i == drop) continue;
                key.v[static_cast<std::size_t>(at++)] = static_cast<std::uint16_t>(verts[i]);
            }
            return key;
        };
        run_uf_pass(L, arena, k, rep, make_key, pd.points, uf);
    }

    for (std::size_t c = 0; c < arena.count(); ++c) {
        auto ci = static_cast<std::int32_t>(c);
        if (uf.find(ci) == ci) {
            pd.points.push_back(PdPoint{k, birth_value(L, uf.birth[c]), kInf, true});
        }
    }
    pd.sort_canonical();
    return pd;
}

}  // namespace

void PersistenceDiagram::sort_canonical() { std::sort(points.begin(), points.end()); }

WeightedGraph WeightedGraph::from(const LayerGraph& g, std::string name) {
    WeightedGraph out;
    out.name = std::move(name);
    out.nodes.assign(g.nodes().begin(), g.nodes().end());
    out.edges.reserve(g.edge_count());
    for (const auto& [key, e] : g.edges()) out.edges.push_back({key.u, key.v, e.weight});
    return out;
}

WeightedGraph WeightedGraph::from(const GeodesicLayer& g) {
    WeightedGraph out;
    out.name = g.source_layer;
    out.nodes = g.nodes;
    out.edges.reserve(g.dist.size());
    for (const auto& [key, d] : g.dist) out.edges.push_back({key.u, key.v, d});
    return out;
}

FiltrationGrid filtration_grid(const WeightedGraph& g) {
    FiltrationGrid grid;
    grid.thresholds.reserve(g.edges.size());
    for (const auto& e : g.edges) grid.thresholds.push_back(e.w);
    std::sort(grid.thresholds.begin(), grid.thresholds.end());
    grid.thresholds.erase(std::unique(grid.thresholds.begin(), grid.thresholds.end()),
                          grid.thresholds.end());
    return grid;
}

std::vector<KClique> enumerate_k_cliques(const WeightedGraph& g, std::int32_t k_max,
                                         std::uint64_t clique_ceiling) {
    if (k_max < 1) throw UsageError("enumerate_k_cliques: k_max must be >= 1");
    LocalLayer L = build_local(g, true);
    std::vector<KClique> out;
    std::uint64_t used = 0;
    for (std::int32_t k = 1; k <= k_max; ++k) {
        CliqueArena arena = enumerate_size_k(L, k, used, clique_ceiling);
        for (std::size_t c = 0; c < arena.count(); ++c) {
            KClique q;
            q.vertices.reserve(static_cast<std::size_t>(k));
            for (std::int32_t i = 0; i < k; ++i) {
                q.vertices.push_back(
                    L.ids[arena.verts[static_cast<std::size_t>(c) * static_cast<std::size_t>(k) +
                                      static_cast<std::size_t>(i)]]);
            }
            q.filtration_value = birth_value(L, arena.value_idx[c]);
            out.push_back(std::move(q));
        }
    }
    return out;
}

PersistenceDiagram clique_community_pd(const WeightedGraph& g, std::int32_t k,
                                       std::uint64_t clique_ceiling) {
    if (k < 1) throw UsageError("clique_community_pd: k must be >= 1");
    LocalLayer L = build_local(g, k > 1);
    std::uint64_t used = 0;
    return clique_community_pd_local(L, g, k, used, clique_ceiling);
}

PersistenceDiagram layer_pd(const WeightedGraph& g, const CliqueOptions& opt) {
    if (opt.k_max < 1) throw UsageError("layer_pd: k_max must be >= 1");
    LocalLayer L = build_local(g, opt.k_max > 1);
    PersistenceDiagram pd;
    std::uint64_t used = 0;
    for (std::int32_t k = 1; k <= opt.k_max; ++k) {
        PersistenceDiagram part = clique_community_pd_local(L, g, k, used, opt.clique_ceiling);
        pd.points.insert(pd.points.end(), part.points.begin(), part.points.end());
    }
    pd.essential_cap = L.grid.empty() ? 0.0 : L.grid.back();
    pd.capped = true;
    for (PdPoint& p : pd.points) {
        if (p.essential) p.death = pd.essential_cap;
    }
    pd.sort_canonical();
    return pd;
}

void write_diagram_csv(const PersistenceDiagram& pd, std::ostream& out) {
    out << "k,birth,death,essential\n";
    for (const PdPoint& p : pd.points) {
        out << p.k << ',' << format_double(p.birth) << ',' << format_double(p.death) << ','
            << (p.essential ? 1 : 0) << '\n';
    }
}

}  // namespace tad
