#include "tad/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "tad/errors.hpp"

namespace tad {

ConfusionMatrix ConfusionMatrix::from_counts(std::int64_t tp, std::int64_t fp, std::int64_t tn,
                                             std::int64_t fn) {
    ConfusionMatrix m;
    m.tp = tp;
    m.fp = fp;
    m.tn = tn;
    m.fn = fn;
    const std::int64_t total = tp + fp + tn + fn;
    m.accuracy = total > 0 ? static_cast<double>(tp + tn) / static_cast<double>(total) : 0.0;
    m.precision = (tp + fp) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    m.recall = (tp + fn) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
    m.f1 = (m.precision + m.recall) > 0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
                                        : 0.0;
    return m;
}

ConfusionMatrix evaluate(std::span<const std::int64_t> predictions, const GroundTruth& truth,
                         std::int64_t total_snapshots) {
    if (truth.window < 0) throw UsageError("evaluate: window must be >= 0");
    for (std::int64_t e : truth.events) {
        if (e < 1 || e > total_snapshots) {
            throw DataError("evaluate: event time " + std::to_string(e) + " outside [1, T]");
        }
    }
    std::vector<std::int64_t> preds(predictions.begin(), predictions.end());
    std::sort(preds.begin(), preds.end());
    for (std::int64_t p : preds) {
        if (p < 1 || p > total_snapshots) {
            throw DataError("evaluate: prediction time " + std::to_string(p) + " outside [1, T]");
        }
    }

    std::vector<char> consumed(preds.size(), 0);
    std::int64_t tp = 0;
    std::vector<std::int64_t> events = truth.events;
    std::sort(events.begin(), events.end());
    for (std::int64_t e : events) {
        std::ptrdiff_t best = -1;
        std::int64_t best_gap = truth.window + 1;
        for (std::size_t i = 0; i < preds.size(); ++i) {
            if (consumed[i]) continue;
            std::int64_t gap = std::llabs(preds[i] - e);
            if (gap > truth.window) continue;
            // ties go to the earlier prediction; preds is sorted so strict <
            if (gap < best_gap) {
                best_gap = gap;
                best = static_cast<std::ptrdiff_t>(i);
            }
        }
        if (best >= 0) {
            consumed[static_cast<std::size_t>(best)] = 1;
            ++tp;
        }
    }
    const std::int64_t fp = static_cast<std::int64_t>(preds.size()) - tp;
    const std::int64_t fn = static_cast<std::int64_t>(events.size()) - tp;
    const std::int64_t tn = total_snapshots - tp - fp - fn;
    return ConfusionMatrix::from_counts(tp, fp, tn, fn);
}

}  // namespace tad
