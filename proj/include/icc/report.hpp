#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace icc {

struct ImageRecord {
    std::string test_id;
    std::string gold;
    std::string predicted;
    std::vector<std::string> ice_ids;
    bool correct = false;
    // Per-strategy score vectors in catalog order; ENS runs keep both passes.
    std::map<std::string, std::vector<double>> scores;
    std::optional<std::string> error;

    bool operator==(const ImageRecord&) const = default;
};

struct RunResult {
    std::string strategy;
    std::size_t shots = 0;
    std::size_t correct = 0;
    std::size_t total = 0;
    std::size_t errors = 0;
    double accuracy = 0.0;
    std::vector<ImageRecord> records; // ascending test id

    bool operator==(const RunResult&) const = default;
};

struct EvalReport {
    std::string dataset;
    std::string selector;
    std::string backend_fingerprint;
    std::map<std::string, std::string> config;
    std::vector<std::string> classes;
    std::vector<RunResult> runs;
    std::optional<double> wall_clock_seconds;

    const RunResult* find_run(const std::string& strategy, std::size_t shots) const;
    bool operator==(const EvalReport&) const = default;
};

// accuracy = correct / total, 0 when nothing was scored.
double accuracy_of(std::size_t correct, std::size_t total);

std::string report_to_json(const EvalReport& report);
EvalReport report_from_json(const std::string& text);

// Rows are strategies, columns shot counts, cells percent with two decimals.
std::string render_table(const EvalReport& report);

// Companion table path: "<path minus .json>.txt".
std::filesystem::path table_path_for(const std::filesystem::path& report_path);

// Writes the JSON report and the companion table next to it.
void write_report(const EvalReport& report, const std::filesystem::path& path);
EvalReport read_report(const std::filesystem::path& path);

} // namespace icc
