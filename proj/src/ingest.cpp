#include "fwave/ingest.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <string_view>

#include "fwave/error.hpp"

namespace fwave {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::string line_ref(const std::filesystem::path& path, std::size_t line_no) {
    return path.string() + ":" + std::to_string(line_no);
}

bool parse_double(std::string_view text, double& out) {
    // from_chars rejects a leading '+', which some writers emit.
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, out);
    return ec == std::errc() && ptr == end;
}

bool parse_int(std::string_view text, int& out) {
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, out);
    return ec == std::errc() && ptr == end;
}

bool looks_non_finite(std::string_view text) {
    std::string lower;
    for (char c : text) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (!lower.empty() && (lower.front() == '-' || lower.front() == '+')) lower.erase(0, 1);
    return lower == "nan" || lower == "inf" || lower == "infinity";
}

void parse_header_line(std::string_view body, EcgRecord& record, const std::filesystem::path& path,
                       std::size_t line_no) {
    std::size_t pos = 0;
    while (pos < body.size()) {
        while (pos < body.size() && (body[pos] == ' ' || body[pos] == '\t')) ++pos;
        if (pos >= body.size()) break;
        std::size_t end = pos;
        while (end < body.size() && body[end] != ' ' && body[end] != '\t') ++end;
        const std::string_view token = body.substr(pos, end - pos);
        pos = end;

        const auto eq = token.find('=');
        if (eq == std::string_view::npos || eq == 0) {
            throw Error(ErrorCode::MalformedHeader,
                        line_ref(path, line_no) + ": expected key=value, got '" + std::string(token) + "'");
        }
        const std::string_view key = token.substr(0, eq);
        const std::string_view value = token.substr(eq + 1);
        if (key == "fs") {
            int fs = 0;
            if (!parse_int(value, fs) || fs <= 0) {
                throw Error(ErrorCode::MalformedHeader,
                            line_ref(path, line_no) + ": fs must be a positive integer");
            }
            record.fs = fs;
        } else if (key == "lsb_uV") {
            double lsb = 0.0;
            if (!parse_double(value, lsb) || !std::isfinite(lsb) || lsb <= 0.0) {
                throw Error(ErrorCode::MalformedHeader,
                            line_ref(path, line_no) + ": lsb_uV must be a positive number");
            }
            record.amplitude_lsb = lsb;
        } else if (key == "lead") {
            record.lead_name = std::string(value);
        } else if (key == "id") {
            record.record_id = std::string(value);
        } else {
            throw Error(ErrorCode::MalformedHeader,
                        line_ref(path, line_no) + ": unknown header key '" + std::string(key) + "'");
        }
    }
}

}  // namespace

EcgRecord read_record(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());

    EcgRecord record;
    record.record_id = path.stem().string();

    std::string line;
    std::size_t line_no = 0;
    bool in_header = true;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view text = trim(line);
        if (text.empty()) continue;
        if (text.front() == '#') {
            if (!in_header) {
                throw Error(ErrorCode::MalformedHeader,
                            line_ref(path, line_no) + ": header line after sample data");
            }
            parse_header_line(text.substr(1), record, path, line_no);
            continue;
        }
        in_header = false;
        double value = 0.0;
        if (!parse_double(text, value)) {
            if (looks_non_finite(text)) {
                throw Error(ErrorCode::NonFiniteSample, line_ref(path, line_no));
            }
            throw Error(ErrorCode::MalformedSample,
                        line_ref(path, line_no) + ": '" + std::string(text) + "'");
        }
        if (!std::isfinite(value)) throw Error(ErrorCode::NonFiniteSample, line_ref(path, line_no));
        record.samples.push_back(value);
    }
    if (in.bad()) throw Error(ErrorCode::IoFailure, "read error on " + path.string());
    if (record.samples.empty()) {
        throw Error(ErrorCode::EmptyRecord, path.string() + " has no samples (" +
                                                std::to_string(line_no) + " lines read)");
    }
    return record;
}

void validate_record(const EcgRecord& record) {
    if (record.fs <= 0) throw Error(ErrorCode::InvalidConfig, "fs must be positive");
    if (!(record.amplitude_lsb > 0.0)) throw Error(ErrorCode::InvalidConfig, "lsb must be positive");
    if (record.samples.empty()) throw Error(ErrorCode::EmptyRecord, record.record_id);
    for (std::size_t i = 0; i < record.samples.size(); ++i) {
        if (!std::isfinite(record.samples[i])) {
            throw Error(ErrorCode::NonFiniteSample, record.record_id + " sample " + std::to_string(i));
        }
    }
}

void write_record(const EcgRecord& record, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot open " + path.string() + " for writing");

    out << "# id=" << record.record_id << " lead=" << record.lead_name << '\n';
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, record.amplitude_lsb);
    out << "# fs=" << record.fs << " lsb_uV=" << std::string_view(buf, res.ptr - buf) << '\n';

    std::string chunk;
    chunk.reserve(1 << 16);
    for (double v : record.samples) {
        res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 6);
        // small negatives round to "-0.000000"; store them as plain zero
        if (std::string_view(buf, res.ptr - buf) == "-0.000000") {
            chunk += "0.000000";
        } else {
            chunk.append(buf, res.ptr);
        }
        chunk.push_back('\n');
        if (chunk.size() > (1 << 16) - 64) {
            out << chunk;
            chunk.clear();
        }
    }
    out << chunk;
    out.flush();
    if (!out) throw Error(ErrorCode::IoFailure, "write failed on " + path.string());
}

std::string outcome_token(Outcome outcome) {
    return outcome == Outcome::RelapsedAF ? "AF" : "SR";
}

CohortLabels read_labels(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());

    CohortLabels labels;
    std::string line;
    std::size_t line_no = 0;
    bool saw_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view text = trim(line);
        if (text.empty()) continue;
        if (!saw_header) {
            if (text != "record_id,outcome") {
                throw Error(ErrorCode::MalformedLabels,
                            line_ref(path, line_no) + ": expected header 'record_id,outcome'");
            }
            saw_header = true;
            continue;
        }
        const auto comma = text.find(',');
        if (comma == std::string_view::npos || text.find(',', comma + 1) != std::string_view::npos) {
            throw Error(ErrorCode::MalformedLabels, line_ref(path, line_no) + ": expected two columns");
        }
        const std::string id(trim(text.substr(0, comma)));
        const std::string_view token = trim(text.substr(comma + 1));
        if (id.empty()) throw Error(ErrorCode::MalformedLabels, line_ref(path, line_no) + ": empty record_id");

        Outcome outcome;
        if (token == "SR") {
            outcome = Outcome::MaintainedSR;
        } else if (token == "AF") {
            outcome = Outcome::RelapsedAF;
        } else {
            throw Error(ErrorCode::UnknownOutcomeToken,
                        line_ref(path, line_no) + ": '" + std::string(token) + "'");
        }
        if (!labels.emplace(id, outcome).second) {
            throw Error(ErrorCode::DuplicateRecordId, line_ref(path, line_no) + ": '" + id + "'");
        }
    }
    if (!saw_header) throw Error(ErrorCode::MalformedLabels, path.string() + " is empty");
    return labels;
}

void write_labels(const CohortLabels& labels, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot open " + path.string() + " for writing");
    out << "record_id,outcome\n";
    for (const auto& [id, outcome] : labels) out << id << ',' << outcome_token(outcome) << '\n';
    out.flush();
    if (!out) throw Error(ErrorCode::IoFailure, "write failed on " + path.string());
}

}  // namespace fwave
