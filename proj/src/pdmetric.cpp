#include "tad/pdmetric.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iostream>
#include <limits>
#include <map>
#include <set>

#include "tad/errors.hpp"

namespace tad {

namespace {

std::atomic<std::size_t> g_cap_mismatches{0};

void note_cap_mismatch() {
    if (g_cap_mismatches.fetch_add(1) == 0) {
        std::cerr << "warning: comparing diagrams with different essential caps\n";
    }
}

double linf(const PdPoint& a, const PdPoint& b) {
    return std::max(std::abs(a.birth - b.birth), std::abs(a.death - b.death));
}

// L-inf distance from a point to the diagonal.
double diag_gap(const PdPoint& p) { return (p.death - p.birth) / 2.0; }

void require_finite(const PersistenceDiagram& pd) {
    for (const PdPoint& p : pd.points) {
        if (!std::isfinite(p.birth) || !std::isfinite(p.death)) {
            throw UsageError("diagram_distance: diagram has uncapped essential points");
        }
    }
}

// Exact min-cost perfect assignment on a square matrix (Jonker-style
// shortest augmenting paths with potentials), O(n^3).
double hungarian_min_cost(const std::vector<std::vector<double>>& a) {
    const int n = static_cast<int>(a.size());
    if (n == 0) return 0.0;
    const double kInf = std::numeric_limits<double>::infinity();
    std::vector<double> u(static_cast<std::size_t>(n) + 1, 0.0), v(static_cast<std::size_t>(n) + 1, 0.0);
    std::vector<int> p(static_cast<std::size_t>(n) + 1, 0), way(static_cast<std::size_t>(n) + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(static_cast<std::size_t>(n) + 1, kInf);
        std::vector<char> used(static_cast<std::size_t>(n) + 1, 0);
        do {
            used[static_cast<std::size_t>(j0)] = 1;
            int i0 = p[static_cast<std::size_t>(j0)];
            int j1 = -1;
            double delta = kInf;
            for (int j = 1; j <= n; ++j) {
                if (used[static_cast<std::size_t>(j)]) continue;
                double cur = a[static_cast<std::size_t>(i0 - 1)][static_cast<std::size_t>(j - 1)] -
                             u[static_cast<std::size_t>(i0)] - v[static_cast<std::size_t>(j)];
                if (cur < minv[static_cast<std::size_t>(j)]) {
                    minv[static_cast<std::size_t>(j)] = cur;
                    way[static_cast<std::size_t>(j)] = j0;
                }
                if (minv[static_cast<std::size_t>(j)] < delta) {
                    delta = minv[static_cast<std::size_t>(j)];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[static_cast<std::size_t>(j)]) {
                    u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
                    v[static_cast<std::size_t>(j)] -= delta;
                } else {
                    minv[static_cast<std::size_t>(j)] -= delta;
                }
            }
            j0 = j1;
        } while (p[static_cast<std::size_t>(j0)] != 0);
        do {
            int j1 = way[static_cast<std::size_t>(j0)];
            p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
            j0 = j1;
        } while (j0);
    }
    double sum = 0.0;
    for (int j = 1; j <= n; ++j) {
        sum += a[static_cast<std::size_t>(p[static_cast<std::size_t>(j)] - 1)][static_cast<std::size_t>(j - 1)];
    }
    return sum;
}

// Augmented cost for the (n+m)x(n+m) matrix: real-vs-real pays the ground
// distance, real-vs-diagonal pays the diagonal gap, diagonal-vs-diagonal is
// free so the assignment is always feasible.
double augmented_cost(const std::vector<PdPoint>& A, const std::vector<PdPoint>& B, int i, int j) {
    const int n = static_cast<int>(A.size());
    const int m = static_cast<int>(B.size());
    if (i < n && j < m) return linf(A[static_cast<std::size_t>(i)], B[static_cast<std::size_t>(j)]);
    if (i < n) return diag_gap(A[static_cast<std::size_t>(i)]);
    if (j < m) return diag_gap(B[static_cast<std::size_t>(j)]);
    return 0.0;
}

double wasserstein_pair(const std::vector<PdPoint>& A, const std::vector<PdPoint>& B, double r) {
    const int N = static_cast<int>(A.size() + B.size());
    if (N == 0) return 0.0;
    std::vector<std::vector<double>> cost(static_cast<std::size_t>(N),
                                          std::vector<double>(static_cast<std::size_t>(N)));
    for (int i = 0; i < N; ++i) {
        for (int j = 0; j < N; ++j) {
            double c = augmented_cost(A, B, i, j);
            cost[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = r == 1.0 ? c : std::pow(c, r);
        }
    }
    double total = hungarian_min_cost(cost);
    return r == 1.0 ? total : std::pow(total, 1.0 / r);
}

// Perfect matching feasibility at threshold tau (Kuhn's augmenting paths).
bool feasible_at(const std::vector<PdPoint>& A, const std::vector<PdPoint>& B, double tau) {
    const int N = static_cast<int>(A.size() + B.size());
    std::vector<int> match_col(static_cast<std::size_t>(N), -1);
    std::vector<char> visited(static_cast<std::size_t>(N), 0);
    auto augment = [&](auto&& self, int i) -> bool {
        for (int j = 0; j < N; ++j) {
            if (visited[static_cast<std::size_t>(j)]) continue;
            if (augmented_cost(A, B, i, j) > tau) continue;
            visited[static_cast<std::size_t>(j)] = 1;
            if (match_col[static_cast<std::size_t>(j)] < 0 || self(self, match_col[static_cast<std::size_t>(j)])) {
                match_col[static_cast<std::size_t>(j)] = i;
                return true;
            }
        }
        return false;
    };
    for (int i = 0; i < N; ++i) {
        std::fill(visited.begin(), visited.end(), 0);
        if (!augment(augment, i)) return false;
    }
    return true;
}

double bottleneck_pair(const std::vector<PdPoint>& A, const std::vector<PdPoint>& B) {
    if (A.empty() && B.empty()) return 0.0;
    std::vector<double> cands;
    cands.push_back(0.0);
    for (const PdPoint& p : A) cands.push_back(diag_gap(p));
    for (const PdPoint& p : B) cands.push_back(diag_gap(p));
    for (const PdPoint& a : A) {
        for (const PdPoint& b : B) cands.push_back(linf(a, b));
    }
    std::sort(cands.begin(), cands.end());
    cands.erase(std::unique(cands.begin(), cands.end()), cands.end());
    std::size_t lo = 0, hi = cands.size() - 1;
    while (lo < hi) {
        std::size_t mid = (lo + hi) / 2;
        if (feasible_at(A, B, cands[mid])) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    return cands[lo];
}

double group_distance(const std::vector<PdPoint>& A, const std::vector<PdPoint>& B,
                      const DiagramDistance& d) {
    if (d.kind == DistanceKind::bottleneck) return bottleneck_pair(A, B);
    return wasserstein_pair(A, B, d.r);
}

}  // namespace

std::size_t cap_mismatch_count() { return g_cap_mismatches.load(); }
void reset_cap_mismatch_count() { g_cap_mismatches.store(0); }

StackedPersistenceDiagram stack(std::vector<std::pair<std::string, PersistenceDiagram>> blocks,
                                std::int64_t time) {
    std::set<std::string> names;
    for (const auto& [name, pd] : blocks) {
        if (!names.insert(name).second) throw UsageError("stack: duplicate layer name '" + name + "'");
    }
    return StackedPersistenceDiagram{time, std::move(blocks)};
}

double diagram_distance(const PersistenceDiagram& a, const PersistenceDiagram& b,
                        const DiagramDistance& d) {
    if (d.kind == DistanceKind::wasserstein && d.r < 1.0) {
        throw UsageError("diagram_distance: wasserstein order must be >= 1");
    }
    require_finite(a);
    require_finite(b);
    if (a.capped && b.capped && a.essential_cap != b.essential_cap) note_cap_mismatch();

    if (d.match_across_k) return group_distance(a.points, b.points, d);

    std::map<std::int32_t, std::pair<std::vector<PdPoint>, std::vector<PdPoint>>> groups;
    for (const PdPoint& p : a.points) groups[p.k].first.push_back(p);
    for (const PdPoint& p : b.points) groups[p.k].second.push_back(p);
    if (d.kind == DistanceKind::bottleneck) {
        double worst = 0.0;
        for (const auto& [k, ab] : groups) worst = std::max(worst, group_distance(ab.first, ab.second, d));
        return worst;
    }
    double accum = 0.0;
    for (const auto& [k, ab] : groups) accum += std::pow(group_distance(ab.first, ab.second, d), d.r);
    return d.r == 1.0 ? accum : std::pow(accum, 1.0 / d.r);
}

double spd_distance(const StackedPersistenceDiagram& a, const StackedPersistenceDiagram& b,
                    const DiagramDistance& d, bool pooled) {
    if (a.blocks.size() != b.blocks.size()) throw DataError("spd_distance: layer-name mismatch");
    for (std::size_t i = 0; i < a.blocks.size(); ++i) {
        if (a.blocks[i].first != b.blocks[i].first) {
            throw DataError("spd_distance: layer-name mismatch at block " + std::to_string(i));
        }
    }
    if (pooled) {
        PersistenceDiagram pa, pb;
        for (const auto& [name, pd] : a.blocks) {
            pa.points.insert(pa.points.end(), pd.points.begin(), pd.points.end());
            pa.capped = pa.capped || pd.capped;
            pa.essential_cap = std::max(pa.essential_cap, pd.essential_cap);
        }
        for (const auto& [name, pd] : b.blocks) {
            pb.points.insert(pb.points.end(), pd.points.begin(), pd.points.end());
            pb.capped = pb.capped || pd.capped;
            pb.essential_cap = std::max(pb.essential_cap, pd.essential_cap);
        }
        return diagram_distance(pa, pb, d);
    }
    if (d.kind == DistanceKind::bottleneck) {
        double worst = 0.0;
        for (std::size_t i = 0; i < a.blocks.size(); ++i) {
            worst = std::max(worst, diagram_distance(a.blocks[i].second, b.blocks[i].second, d));
        }
        return worst;
    }
    double accum = 0.0;
    for (std::size_t i = 0; i < a.blocks.size(); ++i) {
        accum += std::pow(diagram_distance(a.blocks[i].second, b.blocks[i].second, d), d.r);
    }
    return d.r == 1.0 ? accum : std::pow(accum, 1.0 / d.r);
}

}  // namespace tad
