#include "tad/sesd.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include "tad/errors.hpp"

namespace tad {

namespace {

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    if (n == 0) return 0.0;
    if (n % 2 == 1) return v[n / 2];
    return (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

void validate_config(const SesdConfig& cfg) {
    if (cfg.period < 1) throw UsageError("sesd: period must be >= 1");
    if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) throw UsageError("sesd: alpha must be in (0,1)");
    if (!(cfg.max_anoms_fraction > 0.0 && cfg.max_anoms_fraction < 0.5)) {
        throw UsageError("sesd: max_anoms_fraction must be in (0, 0.5)");
    }
    if (cfg.trend_window < 1) throw UsageError("sesd: trend_window must be >= 1");
}

// Regularized incomplete beta via Lentz's continued fraction.
double betacf(double a, double b, double x) {
    const int kMaxIter = 400;
    const double kEps = 3e-16;
    const double kTiny = 1e-300;
    double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    return h;
}

double ibeta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                      b * std::log1p(-x);
    double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
    return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double student_t_cdf(double t, double dof) {
    if (t == 0.0) return 0.5;
    double x = dof / (dof + t * t);
    double tail = 0.5 * ibeta(dof / 2.0, 0.5, x);
    return t > 0.0 ? 1.0 - tail : tail;
}

}  // namespace

double student_t_quantile(double p, double dof) {
    if (!(p > 0.0 && p < 1.0)) throw UsageError("student_t_quantile: p must be in (0,1)");
    if (!(dof > 0.0)) throw UsageError("student_t_quantile: dof must be > 0");
    if (p == 0.5) return 0.0;
    if (p < 0.5) return -student_t_quantile(1.0 - p, dof);
    double hi = 1.0;
    while (student_t_cdf(hi, dof) < p && hi < 1e12) hi *= 2.0;
    double lo = 0.0;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (student_t_cdf(mid, dof) < p) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

Decomposition decompose(std::span<const double> series, const SesdConfig& cfg) {
    validate_config(cfg);
    const std::size_t n = series.size();
    const auto period = static_cast<std::size_t>(cfg.period);
    if (n < 2 * period) {
        throw DataError("decompose: series length " + std::to_string(n) + " < 2 x period " +
                        std::to_string(period));
    }

    std::vector<double> phase_median(period);
    {
        std::vector<std::vector<double>> by_phase(period);
        for (std::size_t i = 0; i < n; ++i) by_phase[i % period].push_back(series[i]);
        for (std::size_t p = 0; p < period; ++p) phase_median[p] = median_of(by_phase[p]);
    }
    const double center = median_of(phase_median);

    Decomposition d;
    d.seasonal.resize(n);
    d.trend.resize(n);
    d.residual.resize(n);
    std::vector<double> deseason(n);
    for (std::size_t i = 0; i < n; ++i) {
        d.seasonal[i] = phase_median[i % period] - center;
        deseason[i] = series[i] - d.seasonal[i];
    }

    const std::size_t w = static_cast<std::size_t>(cfg.trend_window) * period;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t lo = i >= (w - 1) / 2 ? i - (w - 1) / 2 : 0;
        std::size_t hi = std::min(n - 1, i + w / 2);
        d.trend[i] = median_of(std::vector<double>(deseason.begin() + static_cast<std::ptrdiff_t>(lo),
                                                   deseason.begin() + static_cast<std::ptrdiff_t>(hi) + 1));
    }
    for (std::size_t i = 0; i < n; ++i) d.residual[i] = series[i] - d.seasonal[i] - d.trend[i];
    return d;
}

AnomalySet esd_test(std::span<const double> residual, const SesdConfig& cfg) {
    validate_config(cfg);
    const std::size_t n = residual.size();
    if (n < 3) throw DataError("esd_test: need at least 3 observations");

    const auto k_max = static_cast<std::size_t>(
        std::ceil(cfg.max_anoms_fraction * static_cast<double>(n)));

    std::vector<char> removed(n, 0);
    struct Step {
        std::size_t index;
        double r;
        double lambda;
    };
    std::vector<Step> steps;
    bool use_fallback = !cfg.robust;
    bool warned = false;

    for (std::size_t i = 1; i <= k_max; ++i) {
        std::vector<double> alive;
        alive.reserve(n);
        for (std::size_t j = 0; j < n; ++j) {
            if (!removed[j]) alive.push_back(residual[j]);
        }
        if (alive.size() < 2) break;
        bool all_equal = std::all_of(alive.begin(), alive.end(),
                                     [&](double x) { return x == alive.front(); });
        if (all_equal) break;

        double center = 0.0, scale = 0.0;
        if (!use_fallback) {
            center = median_of(alive);
            std::vector<double> dev;
            dev.reserve(alive.size());
            for (double x : alive) dev.push_back(std::abs(x - center));
            scale = median_of(dev) * 1.4826;
            if (scale == 0.0) {
                use_fallback = true;
                if (!warned) {
                    std::cerr << "warning: esd_test MAD is zero on non-equal values; "
                                 "falling back to mean/stdev\n";
                    warned = true;
                }
            }
        }
        if (use_fallback) {
            double mean = 0.0;
            for (double x : alive) mean += x;
            mean /= static_cast<double>(alive.size());
            double ss = 0.0;
            for (double x : alive) ss += (x - mean) * (x - mean);
            double sd = std::sqrt(ss / static_cast<double>(alive.size() - 1));
            if (sd == 0.0) break;
            center = mean;
            scale = sd;
        }

        double best = -1.0;
        std::size_t best_idx = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (removed[j]) continue;
            double r = std::abs(residual[j] - center) / scale;
            if (r > best) {
                best = r;
                best_idx = j;
            }
        }

        const double ni = static_cast<double>(n) - static_cast<double>(i);
        const double df = ni - 1.0;
        if (df < 1.0) break;
        const double p = 1.0 - cfg.alpha / (2.0 * (ni + 1.0));
        const double tq = student_t_quantile(p, df);
        const double lambda = (ni * tq) / std::sqrt((df + tq * tq) * (ni + 1.0));

        steps.push_back({best_idx, best, lambda});
        removed[best_idx] = 1;
    }

    std::size_t flag_count = 0;
    for (std::size_t i = 0; i < steps.size(); ++i) {
        if (steps[i].r > steps[i].lambda) flag_count = i + 1;
    }

    AnomalySet out;
    for (std::size_t i = 0; i < flag_count; ++i) {
        out.indices.push_back(steps[i].index);
        out.scores[steps[i].index] = steps[i].r;
    }
    std::sort(out.indices.begin(), out.indices.end());
    return out;
}

AnomalySet detect(std::span<const double> series, const SesdConfig& cfg) {
    Decomposition d = decompose(series, cfg);
    AnomalySet out = esd_test(d.residual, cfg);
    out.decomposition = std::move(d);
    return out;
}

}  // namespace tad
