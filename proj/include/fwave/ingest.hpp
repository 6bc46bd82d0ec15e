#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace fwave {

inline constexpr int kDefaultFs = 1000;
inline constexpr double kDefaultLsbUv = 0.4;

/// Single-lead ECG, samples in microvolts.
struct EcgRecord {
    std::string record_id;
    int fs = kDefaultFs;
    double amplitude_lsb = kDefaultLsbUv;
    std::string lead_name = "V1";
    std::vector<double> samples;

    double duration_seconds() const {
        return static_cast<double>(samples.size()) / static_cast<double>(fs);
    }
};

enum class Outcome { MaintainedSR, RelapsedAF };

using CohortLabels = std::map<std::string, Outcome>;

/// Text record: optional "# key=value" header lines (fs, lsb_uV, lead, id),
/// then one sample per line. Parsing ignores the process locale.
EcgRecord read_record(const std::filesystem::path& path);

/// Samples are written with six decimals, so round-trips are exact only to
/// 5e-7 uV.
void write_record(const EcgRecord& record, const std::filesystem::path& path);

/// Throws EmptyRecord / NonFiniteSample / InvalidConfig for records that
/// break the EcgRecord invariants.
void validate_record(const EcgRecord& record);

CohortLabels read_labels(const std::filesystem::path& path);
void write_labels(const CohortLabels& labels, const std::filesystem::path& path);

std::string outcome_token(Outcome outcome);

}  // namespace fwave
