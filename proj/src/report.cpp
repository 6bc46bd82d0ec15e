#include "fwave/report.hpp"

#include <charconv>
#include <cmath>
#include <string>

#include "fwave/error.hpp"

namespace fwave {

namespace {

using nlohmann::json;

double feature_value(const FeatureSet& fs, const std::string& name) {
    if (name == "cv_rwe7") return fs.cv_rwe7;
    if (name == "daf_hz") return fs.daf_hz;
    return fs.fwa_uv;
}

std::string format_sig6(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, round_sig6(v));
    return std::string(buf, res.ptr);
}

json number(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return round_sig6(v);
}

json optional_number(const std::optional<double>& v) { return v ? number(*v) : json(nullptr); }

json group_json(const GroupStats& g) {
    return json{{"mean", number(g.mean)}, {"sd", number(g.sd)}, {"n", g.n}};
}

}  // namespace

const std::vector<std::string>& feature_names() {
    static const std::vector<std::string> names{"cv_rwe7", "daf_hz", "fwa_uv"};
    return names;
}

double round_sig6(double v) {
    if (!std::isfinite(v) || v == 0.0) return v == 0.0 ? 0.0 : v;
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific, 5);
    double out = 0.0;
    std::from_chars(buf, res.ptr, out);
    return out;
}

CohortReport cohort_report(const std::vector<FeatureSet>& features, const CohortLabels& labels) {
    std::vector<const FeatureSet*> sr;
    std::vector<const FeatureSet*> af;
    for (const FeatureSet& fs : features) {
        const auto it = labels.find(fs.record_id);
        if (it == labels.end()) throw Error(ErrorCode::UnlabeledRecord, "'" + fs.record_id + "'");
        (it->second == Outcome::RelapsedAF ? af : sr).push_back(&fs);
    }
    if (sr.size() < 2 || af.size() < 2) {
        throw Error(ErrorCode::SingleClassCohort, "need at least two records per outcome, got " +
                                                      std::to_string(sr.size()) + " SR and " +
                                                      std::to_string(af.size()) + " AF");
    }

    CohortReport report;
    for (const std::string& name : feature_names()) {
        GroupedFeature g;
        g.feature_name = name;
        for (const FeatureSet* fs : af) g.positives.push_back(feature_value(*fs, name));
        for (const FeatureSet* fs : sr) g.negatives.push_back(feature_value(*fs, name));

        FeatureReport fr;
        fr.name = name;
        fr.af = group_stats(g.positives);
        fr.sr = group_stats(g.negatives);
        fr.mann_whitney = mann_whitney_u(g);
        fr.roc = roc_curve(g, RocDirection::Auto);
        report.features.push_back(std::move(fr));
    }
    return report;
}

json to_json(const FeatureSet& fs) {
    json series = json::array();
    for (double v : fs.rwe7_series) series.push_back(number(v));
    return json{{"record_id", fs.record_id},
                {"cv_rwe7", number(fs.cv_rwe7)},
                {"daf_hz", number(fs.daf_hz)},
                {"fwa_uv", number(fs.fwa_uv)},
                {"n_segments", fs.n_segments},
                {"rwe7_series", std::move(series)}};
}

json to_json(const CohortReport& report) {
    json out = json::object();
    for (const FeatureReport& f : report.features) {
        json points = json::array();
        for (const RocPoint& p : f.roc.points) {
            points.push_back(json::array({number(p.threshold), number(p.se), number(p.sp)}));
        }
        const ConfusionMetrics& m = f.roc.optimal.metrics;
        out[f.name] = json{
            {"group_stats", {{"sr", group_json(f.sr)}, {"af", group_json(f.af)}}},
            {"p_value", number(f.mann_whitney.p)},
            {"auroc", number(f.roc.auroc)},
            {"optimal",
             {{"threshold", number(f.roc.optimal.threshold)},
              {"se", number(m.se)},
              {"sp", number(m.sp)},
              {"acc", number(m.acc)},
              {"ppv", optional_number(m.ppv)},
              {"npv", optional_number(m.npv)}}},
            {"roc_points", std::move(points)},
        };
    }
    json skipped = json::array();
    for (const SkippedRecord& s : report.skipped) {
        skipped.push_back(json{{"record_id", s.record_id}, {"reason", s.reason}});
    }
    out["skipped"] = std::move(skipped);
    return out;
}

std::string roc_csv(const FeatureReport& feature) {
    std::string out = "threshold,se,sp\n";
    for (const RocPoint& p : feature.roc.points) {
        out += format_sig6(p.threshold) + "," + format_sig6(p.se) + "," + format_sig6(p.sp) + "\n";
    }
    return out;
}

std::string feature_csv_header() { return "record_id,cv_rwe7,daf_hz,fwa_uv,n_segments"; }

std::string feature_csv_row(const FeatureSet& fs) {
    return fs.record_id + "," + format_sig6(fs.cv_rwe7) + "," + format_sig6(fs.daf_hz) + "," +
           format_sig6(fs.fwa_uv) + "," + std::to_string(fs.n_segments);
}

}  // namespace fwave
