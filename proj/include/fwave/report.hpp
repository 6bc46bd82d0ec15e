#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "fwave/features.hpp"
#include "fwave/ingest.hpp"
#include "fwave/stats.hpp"

namespace fwave {

struct FeatureReport {
    std::string name;
    GroupStats sr;
    GroupStats af;
    MannWhitneyResult mann_whitney;
    RocResult roc;
};

struct SkippedRecord {
    std::string record_id;
    std::string reason;
};

struct CohortReport {
    std::vector<FeatureReport> features;  // cv_rwe7, daf_hz, fwa_uv
    std::vector<SkippedRecord> skipped;
};

/// Names of the per-record predictors, in report order.
const std::vector<std::string>& feature_names();

/// Two-group statistics for each predictor. Throws UnlabeledRecord when a
/// feature set has no label and SingleClassCohort when either outcome has
/// fewer than two records.
CohortReport cohort_report(const std::vector<FeatureSet>& features, const CohortLabels& labels);

/// Round to six significant digits so serialised floats are stable.
double round_sig6(double v);

nlohmann::json to_json(const FeatureSet& fs);
nlohmann::json to_json(const CohortReport& report);

/// "threshold,se,sp" rows for one feature; infinite thresholds as -inf/inf.
std::string roc_csv(const FeatureReport& feature);

/// One CSV row: record_id,cv_rwe7,daf_hz,fwa_uv,n_segments
std::string feature_csv_header();
std::string feature_csv_row(const FeatureSet& fs);

}  // namespace fwave
