#include "tad/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "tad/csv.hpp"
#include "tad/errors.hpp"
#include "tad/geodesic.hpp"

namespace tad {

namespace {

using nlohmann::json;

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::uint64_t fnv64(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

const char* transform_name(TransformKind k) {
    switch (k) {
        case TransformKind::identity: return "identity";
        case TransformKind::reciprocal_of_normalized: return "reciprocal";
        case TransformKind::one_minus_normalized: return "one-minus";
        case TransformKind::unweighted: return "unweighted";
    }
    return "?";
}

// Tokens covering everything the T-step output depends on.
std::string tstep_config_token(const PipelineConfig& cfg) {
    std::ostringstream os;
    os << "v1;transform=" << transform_name(cfg.transform.kind)
       << ";scope=" << (cfg.transform.scope == NormScope::per_snapshot_layer ? "snapshot" : "global")
       << ";kmax=" << cfg.k_max << ";ceiling=" << cfg.clique_ceiling << ";top="
       << (cfg.sampling.top_edges ? std::to_string(*cfg.sampling.top_edges) : "-") << ";budget="
       << (cfg.sampling.node_budget ? std::to_string(*cfg.sampling.node_budget) : "-");
    return os.str();
}

std::string cache_key_for(const TemporalMultilayerGraph& g, const PipelineConfig& cfg) {
    std::ostringstream data;
    write_edge_csv(g, data);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv64(data.str() + "|" + tstep_config_token(cfg))));
    return buf;
}

json diagram_to_json(const PersistenceDiagram& pd) {
    json points = json::array();
    for (const PdPoint& p : pd.points) {
        points.push_back({p.k, p.birth, p.death, p.essential ? 1 : 0});
    }
    return json{{"cap", pd.essential_cap}, {"capped", pd.capped}, {"points", std::move(points)}};
}

PersistenceDiagram diagram_from_json(const json& j) {
    PersistenceDiagram pd;
    pd.essential_cap = j.at("cap").get<double>();
    pd.capped = j.at("capped").get<bool>();
    for (const auto& p : j.at("points")) {
        pd.points.push_back(PdPoint{p.at(0).get<std::int32_t>(), p.at(1).get<double>(),
                                    p.at(2).get<double>(), p.at(3).get<int>() != 0});
    }
    return pd;
}

std::optional<std::vector<StackedPersistenceDiagram>> load_spd_cache(
    const std::filesystem::path& file, const std::string& config_token) {
    std::ifstream in(file);
    if (!in) return std::nullopt;
    json j;
    try {
        in >> j;
        if (j.at("version").get<int>() != 1) return std::nullopt;
        if (j.at("config").get<std::string>() != config_token) return std::nullopt;
        std::vector<StackedPersistenceDiagram> spds;
        for (const auto& snap : j.at("snapshots")) {
            StackedPersistenceDiagram spd;
            spd.time = snap.at("time").get<std::int64_t>();
            for (const auto& block : snap.at("blocks")) {
                spd.blocks.emplace_back(block.at("layer").get<std::string>(),
                                        diagram_from_json(block.at("pd")));
            }
            spds.push_back(std::move(spd));
        }
        return spds;
    } catch (const json::exception&) {
        return std::nullopt;
    }
}

void save_spd_cache(const std::filesystem::path& file, const std::string& config_token,
                    const std::vector<StackedPersistenceDiagram>& spds) {
    json snaps = json::array();
    for (const auto& spd : spds) {
        json blocks = json::array();
        for (const auto& [name, pd] : spd.blocks) {
            blocks.push_back({{"layer", name}, {"pd", diagram_to_json(pd)}});
        }
        snaps.push_back({{"time", spd.time}, {"blocks", std::move(blocks)}});
    }
    json j{{"version", 1}, {"config", config_token}, {"snapshots", std::move(snaps)}};
    std::ofstream out(file);
    out << j.dump();
}

LayerGraph sample_layer(const LayerGraph& layer, const SamplingConfig& sampling) {
    if (sampling.top_edges && sampling.node_budget) {
        throw UsageError("sampling: top_edges and node_budget are mutually exclusive");
    }
    if (sampling.top_edges) return sample_top_edges(layer, *sampling.top_edges);
    if (sampling.node_budget) return sample_node_budget(layer, *sampling.node_budget);
    return layer;
}

std::vector<double> series_values(const std::vector<DistancePoint>& series) {
    std::vector<double> v;
    v.reserve(series.size());
    for (const auto& p : series) v.push_back(p.distance);
    return v;
}

std::vector<std::int64_t> indices_to_times(const std::vector<std::size_t>& indices,
                                           const TemporalMultilayerGraph& g) {
    std::vector<std::int64_t> times;
    times.reserve(indices.size());
    // series index i covers the pair (snapshot i, snapshot i+1); the flag
    // maps to the later member
    for (std::size_t i : indices) times.push_back(g.snapshots[i + 1].time);
    return times;
}

void check_series_length(const TemporalMultilayerGraph& g, const PipelineConfig& cfg) {
    const std::size_t T = g.snapshots.size();
    if (T < 2 * static_cast<std::size_t>(cfg.sesd.period) + 1) {
        throw DataError("too few snapshots: need T >= 2*period+1 = " +
                        std::to_string(2 * cfg.sesd.period + 1) + ", got " + std::to_string(T));
    }
}

}  // namespace

std::vector<StackedPersistenceDiagram> compute_spds(const TemporalMultilayerGraph& g,
                                                    const PipelineConfig& cfg,
                                                    DetectionReport* meta) {
    const std::size_t T = g.snapshots.size();
    const std::size_t L = g.layer_names.size();

    std::filesystem::path cache_file;
    std::string config_token = tstep_config_token(cfg);
    if (!cfg.workspace.empty()) {
        std::string key = cache_key_for(g, cfg);
        if (meta) meta->cache_key = key;
        std::filesystem::create_directories(cfg.workspace);
        cache_file = std::filesystem::path(cfg.workspace) / ("spd-" + key + ".json");
        if (auto cached = load_spd_cache(cache_file, config_token)) {
            if (meta) meta->cache_hit = true;
            return *cached;
        }
    }

    std::vector<PersistenceDiagram> diagrams(T * L);
    const int tasks = static_cast<int>(T * L);
    std::exception_ptr first_error = nullptr;
    int jobs = std::max(1, cfg.jobs);
#pragma omp parallel for schedule(dynamic) num_threads(jobs)
    for (int idx = 0; idx < tasks; ++idx) {
        bool skip = false;
#pragma omp critical(tad_tstep_error)
        {
            if (first_error) skip = true;
        }
        if (skip) continue;
        try {
            const auto t = static_cast<std::size_t>(idx) / L;
            const auto l = static_cast<std::size_t>(idx) % L;
            LayerGraph sampled = sample_layer(g.snapshots[t].layers[l], cfg.sampling);
            GeodesicLayer geo = densify(sampled, g.layer_names[l]);
            diagrams[static_cast<std::size_t>(idx)] =
                layer_pd(geo, CliqueOptions{cfg.k_max, cfg.clique_ceiling});
        } catch (...) {
#pragma omp critical(tad_tstep_error)
            {
                if (!first_error) first_error = std::current_exception();
            }
        }
    }
    if (first_error) std::rethrow_exception(first_error);

    std::vector<StackedPersistenceDiagram> spds;
    spds.reserve(T);
    for (std::size_t t = 0; t < T; ++t) {
        std::vector<std::pair<std::string, PersistenceDiagram>> blocks;
        blocks.reserve(L);
        for (std::size_t l = 0; l < L; ++l) {
            blocks.emplace_back(g.layer_names[l], std::move(diagrams[t * L + l]));
        }
        spds.push_back(stack(std::move(blocks), g.snapshots[t].time));
    }

    if (!cache_file.empty()) save_spd_cache(cache_file, config_token, spds);
    return spds;
}

DetectionReport run_tad(const TemporalMultilayerGraph& g, const PipelineConfig& cfg) {
    check_series_length(g, cfg);
    DetectionReport report;
    const auto start = std::chrono::steady_clock::now();
    auto spds = compute_spds(g, cfg, &report);
    for (std::size_t i = 1; i < spds.size(); ++i) {
        report.distance_series.push_back(
            {spds[i].time, spd_distance(spds[i - 1], spds[i], cfg.distance, cfg.spd_pooled)});
    }
    report.timings.t_step_seconds = seconds_since(start);

    const auto ad_start = std::chrono::steady_clock::now();
    SesdConfig sesd_cfg = cfg.sesd;
    sesd_cfg.alpha = cfg.alpha;
    AnomalySet flags = detect(series_values(report.distance_series), sesd_cfg);
    report.anomalies = indices_to_times(flags.indices, g);
    report.decomposition = std::move(flags.decomposition);
    report.timings.ad_step_seconds = seconds_since(ad_start);
    report.timings.total_seconds = seconds_since(start);
    return report;
}

namespace {

LayerAnomalySets stad_from_spds(const std::vector<StackedPersistenceDiagram>& spds,
                                const TemporalMultilayerGraph& g, const PipelineConfig& cfg,
                                DetectionReport* report) {
    const std::size_t L = g.layer_names.size();
    double alpha_layer = cfg.alpha;
    if (cfg.mode == PipelineMode::stad_union && cfg.bonferroni) {
        alpha_layer = cfg.alpha / static_cast<double>(L);
    }

    LayerAnomalySets sets;
    for (std::size_t l = 0; l < L; ++l) {
        std::vector<DistancePoint> series;
        for (std::size_t i = 1; i < spds.size(); ++i) {
            series.push_back({spds[i].time, diagram_distance(spds[i - 1].blocks[l].second,
                                                             spds[i].blocks[l].second, cfg.distance)});
        }
        SesdConfig sesd_cfg = cfg.sesd;
        sesd_cfg.alpha = alpha_layer;
        AnomalySet flags = detect(series_values(series), sesd_cfg);
        sets.per_layer.emplace_back(g.layer_names[l], indices_to_times(flags.indices, g));
        if (report) report->per_layer_series[g.layer_names[l]] = std::move(series);
    }
    if (report) {
        for (const auto& [name, flagged] : sets.per_layer) {
            report->per_layer_anomalies[name] = flagged;
        }
    }
    return sets;
}

}  // namespace

LayerAnomalySets run_stad(const TemporalMultilayerGraph& g, const PipelineConfig& cfg,
                          DetectionReport* report) {
    check_series_length(g, cfg);
    const auto start = std::chrono::steady_clock::now();
    auto spds = compute_spds(g, cfg, report);
    if (report) report->timings.t_step_seconds = seconds_since(start);
    return stad_from_spds(spds, g, cfg, report);
}

std::vector<std::int64_t> combine(const LayerAnomalySets& sets, PipelineMode mode) {
    if (sets.per_layer.empty()) return {};
    if (mode == PipelineMode::stad_union) {
        std::vector<std::int64_t> out;
        for (const auto& [name, flagged] : sets.per_layer) {
            out.insert(out.end(), flagged.begin(), flagged.end());
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }
    if (mode == PipelineMode::stad_intersect) {
        std::vector<std::int64_t> out = sets.per_layer.front().second;
        std::sort(out.begin(), out.end());
        for (std::size_t l = 1; l < sets.per_layer.size(); ++l) {
            std::vector<std::int64_t> other = sets.per_layer[l].second;
            std::sort(other.begin(), other.end());
            std::vector<std::int64_t> kept;
            std::set_intersection(out.begin(), out.end(), other.begin(), other.end(),
                                  std::back_inserter(kept));
            out = std::move(kept);
        }
        return out;
    }
    throw UsageError("combine: mode must be stad-union or stad-intersect");
}

double fwer(double alpha_c, int layers) {
    if (!(alpha_c > 0.0 && alpha_c < 1.0)) throw UsageError("fwer: alpha_c must be in (0,1)");
    if (layers < 1) throw UsageError("fwer: layers must be >= 1");
    return 1.0 - std::pow(1.0 - alpha_c, layers);
}

DetectionReport run_pipeline(const TemporalMultilayerGraph& g, const PipelineConfig& cfg) {
    if (cfg.mode == PipelineMode::tad) return run_tad(g, cfg);

    check_series_length(g, cfg);
    DetectionReport report;
    const auto start = std::chrono::steady_clock::now();
    auto spds = compute_spds(g, cfg, &report);
    report.timings.t_step_seconds = seconds_since(start);

    const auto ad_start = std::chrono::steady_clock::now();
    LayerAnomalySets sets = stad_from_spds(spds, g, cfg, &report);
    report.anomalies = combine(sets, cfg.mode);

    // informational SPD series alongside the per-layer ones
    for (std::size_t i = 1; i < spds.size(); ++i) {
        report.distance_series.push_back(
            {spds[i].time, spd_distance(spds[i - 1], spds[i], cfg.distance, cfg.spd_pooled)});
    }
    report.timings.ad_step_seconds = seconds_since(ad_start);
    report.timings.total_seconds = seconds_since(start);
    return report;
}

void write_series_csv(const std::vector<DistancePoint>& series, std::ostream& out) {
    out << "t,distance\n";
    for (const auto& p : series) out << p.t << ',' << format_double(p.distance) << '\n';
}

void write_decomposition_csv(const std::vector<double>& observed, const Decomposition& d,
                             std::ostream& out) {
    out << "i,observed,seasonal,trend,residual\n";
    for (std::size_t i = 0; i < observed.size(); ++i) {
        out << i << ',' << format_double(observed[i]) << ',' << format_double(d.seasonal[i]) << ','
            << format_double(d.trend[i]) << ',' << format_double(d.residual[i]) << '\n';
    }
}

}  // namespace tad
