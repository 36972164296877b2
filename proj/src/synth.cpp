#include "tad/synth.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <set>

#include "tad/csv.hpp"
#include "tad/errors.hpp"

namespace tad {

namespace {

void validate_spec(const SyntheticSpec& spec) {
    if (spec.layers < 1) throw UsageError("simulate: layers must be >= 1");
    if (spec.T < 1) throw UsageError("simulate: T must be >= 1");
    if (spec.nodes < 2) throw UsageError("simulate: nodes must be >= 2");
    if (spec.at < 1 || spec.at > spec.T) throw UsageError("simulate: anomaly time outside [1, T]");
    if (spec.magnitude < 0) throw UsageError("simulate: magnitude must be >= 0");
    if (!spec.edge_prob && spec.degree <= 0) throw UsageError("simulate: degree must be > 0");
    if (spec.edge_prob && !(*spec.edge_prob >= 0 && *spec.edge_prob <= 1)) {
        throw UsageError("simulate: edge probability must be in [0, 1]");
    }
    for (int l : spec.affected_layers) {
        if (l < 0 || l >= spec.layers) throw UsageError("simulate: affected layer index out of range");
    }
}

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::string padded_name(const char* prefix, int i, int total) {
    int width = 1;
    for (int v = total - 1; v >= 10; v /= 10) ++width;
    std::string digits = std::to_string(i);
    std::string out = prefix;
    out.append(static_cast<std::size_t>(width) - digits.size(), '0');
    out += digits;
    return out;
}

}  // namespace

const char* anomaly_kind_name(AnomalyKind k) {
    switch (k) {
        case AnomalyKind::shock: return "shock";
        case AnomalyKind::regime_change: return "regime-change";
        case AnomalyKind::clique_plant: return "clique-plant";
    }
    return "unknown";
}

std::pair<TemporalMultilayerGraph, GroundTruth> simulate(const SyntheticSpec& spec) {
    validate_spec(spec);
    const int n = spec.nodes;
    std::set<int> affected(spec.affected_layers.begin(), spec.affected_layers.end());
    if (affected.empty()) {
        for (int l = 0; l < spec.layers; ++l) affected.insert(l);
    }

    TemporalMultilayerGraph g;
    for (int l = 0; l < spec.layers; ++l) g.layer_names.push_back(padded_name("L", l, spec.layers));
    for (int i = 0; i < n; ++i) g.node_names.push_back(padded_name("n", i, n));

    const double base_p =
        spec.edge_prob ? *spec.edge_prob : std::min(1.0, spec.degree / static_cast<double>(n));

    std::mt19937_64 rng(spec.seed);
    for (int t = 1; t <= spec.T; ++t) {
        MultilayerSnapshot snap;
        snap.time = t;
        snap.layers.resize(static_cast<std::size_t>(spec.layers));
        for (int l = 0; l < spec.layers; ++l) {
            LayerGraph& layer = snap.layers[static_cast<std::size_t>(l)];
            double p = base_p;
            const bool hit = affected.count(l) != 0;
            if (hit && spec.anomaly == AnomalyKind::shock && t == spec.at) p = std::min(1.0, p * spec.magnitude);
            if (hit && spec.anomaly == AnomalyKind::regime_change && t >= spec.at) {
                p = std::min(1.0, p * spec.magnitude);
            }
            for (int u = 0; u < n; ++u) {
                for (int v = u + 1; v < n; ++v) {
                    if (uniform01(rng) < p) {
                        double count = 1.0 + static_cast<double>(rng() % 5);
                        layer.add_raw(u, v, count);
                    }
                }
            }
            if (hit && spec.anomaly == AnomalyKind::clique_plant && t == spec.at) {
                auto size = static_cast<int>(std::ceil(spec.magnitude));
                size = std::min(size, n);
                std::set<int> members;
                while (static_cast<int>(members.size()) < size) {
                    members.insert(static_cast<int>(rng() % static_cast<std::uint64_t>(n)));
                }
                for (auto it = members.begin(); it != members.end(); ++it) {
                    for (auto jt = std::next(it); jt != members.end(); ++jt) {
                        double count = 1.0 + static_cast<double>(rng() % 5);
                        layer.add_raw(*it, *jt, count);
                    }
                }
            }
        }
        g.snapshots.push_back(std::move(snap));
    }

    GroundTruth truth;
    truth.events.push_back(spec.at);
    return {std::move(g), std::move(truth)};
}

void write_events_csv(const GroundTruth& truth, const std::string& label, std::ostream& out) {
    out << "t,label\n";
    for (std::int64_t t : truth.events) out << t << ',' << label << '\n';
}

namespace {

std::int64_t parse_int_field(const std::string& s, std::size_t lineno, const char* what) {
    std::int64_t value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw DataError("line " + std::to_string(lineno) + ": invalid " + what + " '" + s + "'");
    }
    return value;
}

}  // namespace

GroundTruth read_events_csv(std::istream& in, int window) {
    std::string line;
    if (!std::getline(in, line) || split_csv(line) != std::vector<std::string>{"t", "label"}) {
        throw DataError("events CSV: expected header `t,label`");
    }
    GroundTruth truth;
    truth.window = window;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        auto f = split_csv(line);
        if (f.size() != 2) throw DataError("line " + std::to_string(lineno) + ": expected 2 fields");
        truth.events.push_back(parse_int_field(f[0], lineno, "event time"));
    }
    std::sort(truth.events.begin(), truth.events.end());
    truth.events.erase(std::unique(truth.events.begin(), truth.events.end()), truth.events.end());
    return truth;
}

std::vector<std::int64_t> read_predictions_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || split_csv(line) != std::vector<std::string>{"t"}) {
        throw DataError("predictions CSV: expected header `t`");
    }
    std::vector<std::int64_t> out;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        auto f = split_csv(line);
        if (f.size() != 1) throw DataError("line " + std::to_string(lineno) + ": expected 1 field");
        out.push_back(parse_int_field(f[0], lineno, "prediction time"));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace tad
