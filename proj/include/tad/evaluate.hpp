#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tad/synth.hpp"

namespace tad {

// Per-time-index confusion counts over all T snapshots; a matched
// event/prediction pair occupies one slot.
struct ConfusionMatrix {
    std::int64_t tp = 0;
    std::int64_t fp = 0;
    std::int64_t tn = 0;
    std::int64_t fn = 0;
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;

    static ConfusionMatrix from_counts(std::int64_t tp, std::int64_t fp, std::int64_t tn,
                                       std::int64_t fn);
};

// Greedy chronological one-to-one matching: each event consumes the nearest
// unconsumed prediction within +/- window (ties go to the earlier
// prediction). Matched -> TP, unmatched predictions -> FP, unmatched
// events -> FN, everything else -> TN.
ConfusionMatrix evaluate(std::span<const std::int64_t> predictions, const GroundTruth& truth,
                         std::int64_t total_snapshots);

}  // namespace tad
