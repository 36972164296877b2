#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tad/graph.hpp"

namespace tad {

enum class AnomalyKind { shock, regime_change, clique_plant };

struct GroundTruth {
    std::vector<std::int64_t> events;  // sorted snapshot times
    int window = 2;                    // matching window m
};

// Chung-Lu style generator with a uniform expected-degree sequence, redrawn
// per snapshot with persistent node identities. `seed` fully determines the
// output (mt19937_64, recorded as rng "mt19937_64/v1").
struct SyntheticSpec {
    int layers = 3;
    int T = 100;
    int nodes = 60;
    double degree = 1.5;                    // expected degree per node
    std::optional<double> edge_prob;        // overrides degree when set
    AnomalyKind anomaly = AnomalyKind::shock;
    int at = 50;                            // anomaly time t*
    std::vector<int> affected_layers;       // empty = all layers
    double magnitude = 3.0;
    std::uint64_t seed = 42;
};

inline const char* kSyntheticRngName = "mt19937_64/v1";

// Raw counts are positive integers; weights are left at the identity
// transform (re-apply apply_transform for other semantics).
std::pair<TemporalMultilayerGraph, GroundTruth> simulate(const SyntheticSpec& spec);

const char* anomaly_kind_name(AnomalyKind k);

// Events CSV `t,label`.
void write_events_csv(const GroundTruth& truth, const std::string& label, std::ostream& out);
GroundTruth read_events_csv(std::istream& in, int window);

// Predictions CSV with a single `t` column.
std::vector<std::int64_t> read_predictions_csv(std::istream& in);

}  // namespace tad
