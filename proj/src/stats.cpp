#include "fwave/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "fwave/error.hpp"

namespace fwave {

namespace {

constexpr std::size_t kExactLimit = 12;

void require_groups(const GroupedFeature& g) {
    if (g.positives.empty() || g.negatives.empty()) {
        throw Error(ErrorCode::EmptyGroup, "feature '" + g.feature_name + "' has an empty group");
    }
    const auto finite = [](double v) { return std::isfinite(v); };
    if (!std::all_of(g.positives.begin(), g.positives.end(), finite) ||
        !std::all_of(g.negatives.begin(), g.negatives.end(), finite)) {
        throw Error(ErrorCode::InvalidConfig, "feature '" + g.feature_name + "' has non-finite values");
    }
}

struct Ranked {
    double positive_rank_sum = 0.0;
    double tie_term = 0.0;  // sum of t^3 - t over tie groups
    bool has_ties = false;
};

Ranked rank_pooled(const GroupedFeature& g) {
    struct Item {
        double value;
        bool positive;
    };
    std::vector<Item> pooled;
    for (double v : g.positives) pooled.push_back({v, true});
    for (double v : g.negatives) pooled.push_back({v, false});
    std::sort(pooled.begin(), pooled.end(), [](const Item& a, const Item& b) { return a.value < b.value; });

    Ranked out;
    std::size_t i = 0;
    while (i < pooled.size()) {
        std::size_t j = i;
        while (j + 1 < pooled.size() && pooled[j + 1].value == pooled[i].value) ++j;
        const double t = static_cast<double>(j - i + 1);
        const double midrank = 0.5 * static_cast<double>(i + 1 + j + 1);
        for (std::size_t k = i; k <= j; ++k) {
            if (pooled[k].positive) out.positive_rank_sum += midrank;
        }
        if (t > 1.0) {
            out.has_ties = true;
            out.tie_term += t * t * t - t;
        }
        i = j + 1;
    }
    return out;
}

// Counts at a threshold for the given orientation.
struct Counts {
    std::int64_t tp = 0;
    std::int64_t fp = 0;
};

Counts count_at(const GroupedFeature& g, double threshold, RocDirection dir) {
    const auto called = [&](double v) { return dir == RocDirection::LowerIsPositive ? v < threshold : v > threshold; };
    Counts c;
    for (double v : g.positives) c.tp += called(v) ? 1 : 0;
    for (double v : g.negatives) c.fp += called(v) ? 1 : 0;
    return c;
}

RocResult roc_oriented(const GroupedFeature& g, RocDirection dir) {
    std::vector<double> pooled(g.positives);
    pooled.insert(pooled.end(), g.negatives.begin(), g.negatives.end());
    std::sort(pooled.begin(), pooled.end());
    pooled.erase(std::unique(pooled.begin(), pooled.end()), pooled.end());

    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> thresholds{-inf};
    for (std::size_t i = 0; i + 1 < pooled.size(); ++i) thresholds.push_back(0.5 * (pooled[i] + pooled[i + 1]));
    thresholds.push_back(inf);

    const auto n1 = static_cast<std::int64_t>(g.positives.size());
    const auto n2 = static_cast<std::int64_t>(g.negatives.size());

    RocResult out;
    out.direction = dir;
    std::vector<Counts> counts;
    counts.reserve(thresholds.size());
    std::int64_t best_correct = -1;
    std::int64_t best_tp = -1;
    for (double t : thresholds) {
        const Counts c = count_at(g, t, dir);
        counts.push_back(c);
        const std::int64_t tn = n2 - c.fp;
        const std::int64_t fn = n1 - c.tp;
        out.points.push_back({t, static_cast<double>(c.tp) / n1, static_cast<double>(tn) / n2});
        const std::int64_t correct = c.tp + tn;
        if (correct > best_correct || (correct == best_correct && c.tp > best_tp)) {
            best_correct = correct;
            best_tp = c.tp;
            out.optimal.threshold = t;
            out.optimal.metrics = confusion_metrics(c.tp, c.fp, tn, fn);
        }
    }

    // Trapezoids in integer units of 1/(2*n1*n2) keep ties worth exactly 1/2.
    std::int64_t twice_area = 0;
    for (std::size_t i = 0; i + 1 < counts.size(); ++i) {
        const std::int64_t dfp = std::abs(counts[i].fp - counts[i + 1].fp);
        twice_area += dfp * (counts[i].tp + counts[i + 1].tp);
    }
    out.auroc = static_cast<double>(twice_area) / static_cast<double>(2 * n1 * n2);
    return out;
}

}  // namespace

std::vector<std::uint64_t> mann_whitney_u_counts(std::size_t n1, std::size_t n2) {
    // table[m][u] for the current n: arrangements of m positives among m+n
    // items with U = u. Built column by column over n.
    const std::size_t max_u = n1 * n2;
    std::vector<std::vector<std::uint64_t>> prev(n1 + 1, std::vector<std::uint64_t>(max_u + 1, 0));
    for (std::size_t m = 0; m <= n1; ++m) prev[m][0] = 1;  // n = 0
    for (std::size_t n = 1; n <= n2; ++n) {
        std::vector<std::vector<std::uint64_t>> cur(n1 + 1, std::vector<std::uint64_t>(max_u + 1, 0));
        cur[0][0] = 1;
        for (std::size_t m = 1; m <= n1; ++m) {
            for (std::size_t u = 0; u <= m * n; ++u) {
                // largest item is a positive (beats all n negatives) or a negative
                const std::uint64_t pos_last = u >= n ? cur[m - 1][u - n] : 0;
                cur[m][u] = pos_last + prev[m][u];
            }
        }
        prev.swap(cur);
    }
    return prev[n1];
}

double mann_whitney_exact_p(std::size_t n1, std::size_t n2, double u) {
    if (n1 == 0 || n2 == 0) throw Error(ErrorCode::EmptyGroup, "exact test needs both groups");
    const std::vector<std::uint64_t> counts = mann_whitney_u_counts(n1, n2);
    const auto lo = static_cast<std::ptrdiff_t>(std::floor(u));
    const auto hi = static_cast<std::ptrdiff_t>(std::ceil(u));
    std::uint64_t total = 0, le = 0, ge = 0;
    for (std::size_t k = 0; k < counts.size(); ++k) {
        total += counts[k];
        if (static_cast<std::ptrdiff_t>(k) <= lo) le += counts[k];
        if (static_cast<std::ptrdiff_t>(k) >= hi) ge += counts[k];
    }
    const double tail = 2.0 * static_cast<double>(std::min(le, ge)) / static_cast<double>(total);
    return std::min(1.0, tail);
}

double mann_whitney_normal_p(const GroupedFeature& g, double u) {
    require_groups(g);
    const double n1 = static_cast<double>(g.positives.size());
    const double n2 = static_cast<double>(g.negatives.size());
    const double n = n1 + n2;
    const Ranked ranked = rank_pooled(g);
    const double var = n1 * n2 / 12.0 * ((n + 1.0) - ranked.tie_term / (n * (n - 1.0)));
    if (!(var > 0.0)) return 1.0;
    const double z = std::max(0.0, std::abs(u - n1 * n2 / 2.0) - 0.5) / std::sqrt(var);
    return std::min(1.0, std::erfc(z / std::sqrt(2.0)));
}

MannWhitneyResult mann_whitney_u(const GroupedFeature& g) {
    require_groups(g);
    const std::size_t n1 = g.positives.size();
    const std::size_t n2 = g.negatives.size();
    const Ranked ranked = rank_pooled(g);

    MannWhitneyResult out;
    out.u = ranked.positive_rank_sum - static_cast<double>(n1 * (n1 + 1)) / 2.0;
    if (n1 + n2 <= kExactLimit && !ranked.has_ties) {
        out.method = PValueMethod::Exact;
        out.p = mann_whitney_exact_p(n1, n2, out.u);
    } else {
        out.method = PValueMethod::NormalApprox;
        out.p = mann_whitney_normal_p(g, out.u);
    }
    return out;
}

ConfusionMetrics confusion_metrics(std::int64_t tp, std::int64_t fp, std::int64_t tn, std::int64_t fn) {
    if (tp < 0 || fp < 0 || tn < 0 || fn < 0 || tp + fn == 0 || tn + fp == 0) {
        throw Error(ErrorCode::InvalidCounts, "counts must be non-negative with both classes present");
    }
    ConfusionMetrics m;
    m.se = static_cast<double>(tp) / static_cast<double>(tp + fn);
    m.sp = static_cast<double>(tn) / static_cast<double>(tn + fp);
    m.acc = static_cast<double>(tp + tn) / static_cast<double>(tp + fp + tn + fn);
    if (tp + fp > 0) m.ppv = static_cast<double>(tp) / static_cast<double>(tp + fp);
    if (tn + fn > 0) m.npv = static_cast<double>(tn) / static_cast<double>(tn + fn);
    return m;
}

RocResult roc_curve(const GroupedFeature& g, RocDirection direction) {
    require_groups(g);
    if (direction != RocDirection::Auto) return roc_oriented(g, direction);
    RocResult higher = roc_oriented(g, RocDirection::HigherIsPositive);
    if (higher.auroc >= 0.5) return higher;
    return roc_oriented(g, RocDirection::LowerIsPositive);
}

GroupStats group_stats(std::span<const double> values) {
    GroupStats s;
    s.n = values.size();
    if (values.empty()) return s;
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(s.n);
    if (s.n > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - s.mean) * (v - s.mean);
        s.sd = std::sqrt(ss / static_cast<double>(s.n - 1));
    }
    return s;
}

}  // namespace fwave
