#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <vector>

namespace tad {

struct SesdConfig {
    int period = 7;                     // observations per season
    double alpha = 0.05;                // significance level
    double max_anoms_fraction = 0.10;   // cap on flagged fraction
    bool robust = true;                 // median/MAD statistics
    int trend_window = 2;               // sliding trend window, in periods
};

struct Decomposition {
    std::vector<double> seasonal;
    std::vector<double> trend;
    std::vector<double> residual;
};

struct AnomalySet {
    std::vector<std::size_t> indices;        // flagged positions, ascending
    std::map<std::size_t, double> scores;    // index -> test statistic R_i
    Decomposition decomposition;
};

// Median-based seasonal decomposition: per-phase medians centered to median
// zero, then a sliding-window median trend over the deseasonalized series
// (window = trend_window * period observations, shrunk at the boundaries).
Decomposition decompose(std::span<const double> series, const SesdConfig& cfg);

// Generalized ESD with robust center/scale. Falls back to mean/stdev with a
// warning when MAD is zero on non-equal values; all-equal input flags
// nothing.
AnomalySet esd_test(std::span<const double> residual, const SesdConfig& cfg);

// decompose + esd_test on the residual; indices refer to the input series.
AnomalySet detect(std::span<const double> series, const SesdConfig& cfg);

// Student-t upper quantile via the inverse regularized incomplete beta.
double student_t_quantile(double p, double dof);

}  // namespace tad
