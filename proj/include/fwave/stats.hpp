#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fwave {

/// Feature values split by outcome. Positives are RelapsedAF patients.
struct GroupedFeature {
    std::vector<double> positives;
    std::vector<double> negatives;
    std::string feature_name;
};

enum class PValueMethod { Exact, NormalApprox };

struct MannWhitneyResult {
    double u = 0.0;  // U of the positive group, midranks for ties
    double p = 1.0;  // two-sided
    PValueMethod method = PValueMethod::NormalApprox;
};

/// Exact when n1 + n2 <= 12 and there are no ties, otherwise the
/// tie-corrected normal approximation with continuity correction.
MannWhitneyResult mann_whitney_u(const GroupedFeature& g);

/// Exact two-sided p for an integer U under the no-ties null, by counting
/// rank-sum arrangements: min(1, 2 * min(P[U <= u], P[U >= u])).
double mann_whitney_exact_p(std::size_t n1, std::size_t n2, double u);

/// Number of the C(n1+n2, n1) rank assignments giving each U = 0..n1*n2.
std::vector<std::uint64_t> mann_whitney_u_counts(std::size_t n1, std::size_t n2);

double mann_whitney_normal_p(const GroupedFeature& g, double u);

enum class RocDirection { HigherIsPositive, LowerIsPositive, Auto };

struct ConfusionMetrics {
    double se = 0.0;
    double sp = 0.0;
    double acc = 0.0;
    std::optional<double> ppv;  // absent when nothing is called positive
    std::optional<double> npv;  // absent when nothing is called negative
};

/// Throws InvalidCounts unless tp+fn > 0 and tn+fp > 0.
ConfusionMetrics confusion_metrics(std::int64_t tp, std::int64_t fp, std::int64_t tn, std::int64_t fn);

struct RocPoint {
    double threshold = 0.0;
    double se = 0.0;
    double sp = 0.0;
};

struct OptimalPoint {
    double threshold = 0.0;
    ConfusionMetrics metrics;
};

struct RocResult {
    std::vector<RocPoint> points;  // ascending threshold, +-inf at the ends
    double auroc = 0.5;
    RocDirection direction = RocDirection::HigherIsPositive;
    OptimalPoint optimal;
};

/// Thresholds are the midpoints between consecutive distinct pooled values
/// plus -inf and +inf. HigherIsPositive calls value > threshold positive;
/// LowerIsPositive calls value < threshold positive. The optimal point
/// maximises accuracy, then sensitivity, then prefers the lower threshold.
RocResult roc_curve(const GroupedFeature& g, RocDirection direction = RocDirection::Auto);

/// Mean and sample standard deviation.
struct GroupStats {
    double mean = 0.0;
    double sd = 0.0;
    std::size_t n = 0;
};
GroupStats group_stats(std::span<const double> values);

}  // namespace fwave
