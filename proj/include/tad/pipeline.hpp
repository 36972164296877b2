#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tad/cliqueph.hpp"
#include "tad/graph.hpp"
#include "tad/pdmetric.hpp"
#include "tad/sesd.hpp"

namespace tad {

enum class PipelineMode { tad, stad_union, stad_intersect };

struct SamplingConfig {
    std::optional<int> top_edges;
    std::optional<int> node_budget;
};

struct PipelineConfig {
    DiagramDistance distance{};
    std::int32_t k_max = 4;
    WeightTransform transform{};
    SamplingConfig sampling{};
    SesdConfig sesd{};
    PipelineMode mode = PipelineMode::tad;
    double alpha = 0.05;
    bool bonferroni = true;      // per-layer alpha/L in stad-union mode
    bool spd_pooled = false;
    std::uint64_t clique_ceiling = 4'000'000;
    int jobs = 1;
    std::string workspace;       // SPD cache directory; empty disables caching
};

struct DistancePoint {
    std::int64_t t;  // later snapshot of the consecutive pair
    double distance;
};

struct LayerAnomalySets {
    // canonical layer order; values are snapshot times
    std::vector<std::pair<std::string, std::vector<std::int64_t>>> per_layer;
};

struct PipelineTimings {
    double t_step_seconds = 0.0;
    double ad_step_seconds = 0.0;
    double total_seconds = 0.0;
};

struct DetectionReport {
    std::vector<DistancePoint> distance_series;  // consecutive-SPD distances
    std::vector<std::int64_t> anomalies;         // flagged snapshot times
    std::map<std::string, std::vector<std::int64_t>> per_layer_anomalies;  // stad modes
    std::map<std::string, std::vector<DistancePoint>> per_layer_series;    // stad modes
    Decomposition decomposition;  // of the series fed to S-ESD (tad modes)
    PipelineTimings timings;
    bool cache_hit = false;
    std::string cache_key;
};

// T-step: sample -> densify -> layer_pd per (t, layer), stacked per
// snapshot. Parallel over (t, layer) with `cfg.jobs` workers; output is
// identical for any job count. Uses the workspace SPD cache when configured.
std::vector<StackedPersistenceDiagram> compute_spds(const TemporalMultilayerGraph& g,
                                                    const PipelineConfig& cfg,
                                                    DetectionReport* meta = nullptr);

// Full multilayer detector: T-step, consecutive SPD distances, S-ESD.
DetectionReport run_tad(const TemporalMultilayerGraph& g, const PipelineConfig& cfg);

// Single-layer variant: per-layer diagram distance series, each fed to S-ESD
// independently at the Bonferroni-corrected level when the mode requires it.
LayerAnomalySets run_stad(const TemporalMultilayerGraph& g, const PipelineConfig& cfg,
                          DetectionReport* report = nullptr);

// Union / intersection combination of per-layer anomaly sets.
std::vector<std::int64_t> combine(const LayerAnomalySets& sets, PipelineMode mode);

// Family-wise error rate 1 - (1 - alpha_c)^L.
double fwer(double alpha_c, int layers);

// Mode dispatch producing the full report.
DetectionReport run_pipeline(const TemporalMultilayerGraph& g, const PipelineConfig& cfg);

// Distance-series CSV `t,distance`.
void write_series_csv(const std::vector<DistancePoint>& series, std::ostream& out);

// Decomposition dump CSV `i,observed,seasonal,trend,residual`.
void write_decomposition_csv(const std::vector<double>& observed, const Decomposition& d,
                             std::ostream& out);

}  // namespace tad
