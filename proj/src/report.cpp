#include "icc/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "icc/error.hpp"

namespace icc {

using OJson = nlohmann::ordered_json;

const RunResult* EvalReport::find_run(const std::string& strategy, std::size_t shots) const {
    for (const auto& run : runs) {
        if (run.strategy == strategy && run.shots == shots) {
            return &run;
        }
    }
    return nullptr;
}

double accuracy_of(std::size_t correct, std::size_t total) {
    return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
}

std::string report_to_json(const EvalReport& report) {
    OJson j;
    j["dataset"] = report.dataset;
    j["selector"] = report.selector;
    j["backend_fingerprint"] = report.backend_fingerprint;
    j["config"] = report.config;
    j["classes"] = report.classes;
    if (report.wall_clock_seconds) {
        j["wall_clock_seconds"] = *report.wall_clock_seconds;
    }
    j["runs"] = OJson::array();
    for (const auto& run : report.runs) {
        OJson r;
        r["strategy"] = run.strategy;
        r["shots"] = run.shots;
        r["correct"] = run.correct;
        r["total"] = run.total;
        r["errors"] = run.errors;
        r["accuracy"] = run.accuracy;
        r["records"] = OJson::array();
        for (const auto& rec : run.records) {
            OJson x;
            x["test_id"] = rec.test_id;
            x["gold"] = rec.gold;
            x["predicted"] = rec.predicted;
            x["correct"] = rec.correct;
            x["ice_ids"] = rec.ice_ids;
            x["scores"] = rec.scores;
            if (rec.error) {
                x["error"] = *rec.error;
            }
            r["records"].push_back(std::move(x));
        }
        j["runs"].push_back(std::move(r));
    }
    return j.dump(2) + "\n";
}

EvalReport report_from_json(const std::string& text) {
    OJson j;
    try {
        j = OJson::parse(text);
        EvalReport report;
        report.dataset = j.at("dataset").get<std::string>();
        report.selector = j.at("selector").get<std::string>();
        report.backend_fingerprint = j.at("backend_fingerprint").get<std::string>();
        report.config = j.at("config").get<std::map<std::string, std::string>>();
        report.classes = j.at("classes").get<std::vector<std::string>>();
        if (j.contains("wall_clock_seconds")) {
            report.wall_clock_seconds = j["wall_clock_seconds"].get<double>();
        }
        for (const auto& r : j.at("runs")) {
            RunResult run;
            run.strategy = r.at("strategy").get<std::string>();
            run.shots = r.at("shots").get<std::size_t>();
            run.correct = r.at("correct").get<std::size_t>();
            run.total = r.at("total").get<std::size_t>();
            run.errors = r.at("errors").get<std::size_t>();
            run.accuracy = r.at("accuracy").get<double>();
            for (const auto& x : r.at("records")) {
                ImageRecord rec;
                rec.test_id = x.at("test_id").get<std::string>();
                rec.gold = x.at("gold").get<std::string>();
                rec.predicted = x.at("predicted").get<std::string>();
                rec.correct = x.at("correct").get<bool>();
                rec.ice_ids = x.at("ice_ids").get<std::vector<std::string>>();
                rec.scores = x.at("scores").get<std::map<std::string, std::vector<double>>>();
                if (x.contains("error")) {
                    rec.error = x["error"].get<std::string>();
                }
                run.records.push_back(std::move(rec));
            }
            report.runs.push_back(std::move(run));
        }
        return report;
    } catch (const nlohmann::json::exception& e) {
        raise(ErrorCode::IoError, std::string("malformed report: ") + e.what());
    }
}

std::string render_table(const EvalReport& report) {
    std::vector<std::string> strategies;
    std::vector<std::size_t> shots;
    for (const auto& run : report.runs) {
        if (std::find(strategies.begin(), strategies.end(), run.strategy) == strategies.end()) {
            strategies.push_back(run.strategy);
        }
        if (std::find(shots.begin(), shots.end(), run.shots) == shots.end()) {
            shots.push_back(run.shots);
        }
    }
    std::sort(shots.begin(), shots.end());

    std::ostringstream out;
    out << "dataset: " << report.dataset << "  selector: " << report.selector << "\n";
    char cell[32];
    std::snprintf(cell, sizeof cell, "%-10s", "strategy");
    out << cell;
    for (auto n : shots) {
        std::snprintf(cell, sizeof cell, " %8s", (std::to_string(n) + "-shot").c_str());
        out << cell;
    }
    out << "\n";
    for (const auto& s : strategies) {
        std::snprintf(cell, sizeof cell, "%-10s", s.c_str());
        out << cell;
        for (auto n : shots) {
            const auto* run = report.find_run(s, n);
            if (run) {
                std::snprintf(cell, sizeof cell, " %8.2f", run->accuracy * 100.0);
            } else {
                std::snprintf(cell, sizeof cell, " %8s", "-");
            }
            out << cell;
        }
        out << "\n";
    }
    return out.str();
}

std::filesystem::path table_path_for(const std::filesystem::path& report_path) {
    auto p = report_path;
    if (p.extension() == ".json") {
        p.replace_extension(".txt");
    } else {
        p += ".txt";
    }
    return p;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        raise(ErrorCode::IoError, "cannot write " + path.string());
    }
    out << body;
    if (!out) {
        raise(ErrorCode::IoError, "short write to " + path.string());
    }
}

} // namespace

void write_report(const EvalReport& report, const std::filesystem::path& path) {
    const auto parent = path.parent_path();
    if (!parent.empty() && !std::filesystem::is_directory(parent)) {
        raise(ErrorCode::IoError, "directory " + parent.string() + " does not exist");
    }
    write_file(path, report_to_json(report));
    write_file(table_path_for(path), render_table(report));
}

EvalReport read_report(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        raise(ErrorCode::IoError, "cannot open " + path.string());
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return report_from_json(ss.str());
}

} // namespace icc
