#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "tad/cliqueph.hpp"

namespace tad {

enum class DistanceKind { bottleneck, wasserstein };

struct DiagramDistance {
    DistanceKind kind = DistanceKind::wasserstein;
    double r = 1.0;               // wasserstein order, >= 1
    bool match_across_k = false;  // default: points match only within equal k
};

// Layer-tagged direct sum of per-layer diagrams for one snapshot.
struct StackedPersistenceDiagram {
    std::int64_t time{};
    std::vector<std::pair<std::string, PersistenceDiagram>> blocks;  // canonical layer order
};

StackedPersistenceDiagram stack(std::vector<std::pair<std::string, PersistenceDiagram>> blocks,
                                std::int64_t time);

// Exact optimal partial-matching distance with L-inf ground metric and
// diagonal projections. Requires finite coordinates (essentials capped).
double diagram_distance(const PersistenceDiagram& a, const PersistenceDiagram& b,
                        const DiagramDistance& d);

// Blockwise distance between SPDs: per-layer diagram distances aggregated by
// max (bottleneck) or an l_r sum (wasserstein). `pooled` collapses all blocks
// into one diagram first (ablation path).
double spd_distance(const StackedPersistenceDiagram& a, const StackedPersistenceDiagram& b,
                    const DiagramDistance& d, bool pooled = false);

// Diagrams compared with different essential caps increment this process-wide
// counter; the first occurrence logs a warning to stderr.
std::size_t cap_mismatch_count();
void reset_cap_mismatch_count();

}  // namespace tad
