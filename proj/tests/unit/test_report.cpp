#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "icc/error.hpp"
#include "icc/report.hpp"

namespace {

icc::EvalReport sample_report() {
    icc::EvalReport r;
    r.dataset = "toy";
    r.selector = "RICES";
    r.backend_fingerprint = "synthetic(beta0=-5,beta1=0.5)";
    r.config = {{"shots", "1,2"}, {"strategy", "SL,LDE-DD"}};
    r.classes = {"bull", "ox"};
    for (const char* strategy : {"SL", "LDE-DD"}) {
        for (std::size_t shots : {1u, 2u}) {
            icc::RunResult run;
            run.strategy = strategy;
            run.shots = shots;
            run.total = 4;
            run.correct = shots == 1 ? 3 : 2;
            run.accuracy = icc::accuracy_of(run.correct, run.total);
            for (int i = 0; i < 4; ++i) {
                icc::ImageRecord rec;
                rec.test_id = "t" + std::to_string(i);
                rec.gold = "bull";
                rec.predicted = i < static_cast<int>(run.correct) ? "bull" : "ox";
                rec.correct = rec.predicted == rec.gold;
                rec.ice_ids = {"i1"};
                rec.scores[strategy] = {-4.0 - 0.1 * i, -4.5};
                run.records.push_back(rec);
            }
            r.runs.push_back(run);
        }
    }
    icc::ImageRecord failed;
    failed.test_id = "t9";
    failed.gold = "ox";
    failed.error = "BackendUnavailable";
    r.runs[0].records.push_back(failed);
    r.runs[0].errors = 1;
    return r;
}

} // namespace

TEST(Report, AccuracyCellFormatting) {
    const auto r = sample_report();
    const auto table = icc::render_table(r);
    EXPECT_NE(table.find("75.00"), std::string::npos) << table;
    EXPECT_NE(table.find("50.00"), std::string::npos) << table;
    EXPECT_EQ(icc::accuracy_of(3, 4), 0.75);
    EXPECT_EQ(icc::accuracy_of(0, 0), 0.0);
}

TEST(Report, TableShapeIsStrategiesByShots) {
    const auto table = icc::render_table(sample_report());
    std::vector<std::string> lines;
    std::istringstream in(table);
    for (std::string l; std::getline(in, l);) {
        lines.push_back(l);
    }
    // title, header, one row per strategy
    ASSERT_EQ(lines.size(), 4u) << table;
    EXPECT_NE(lines[1].find("1-shot"), std::string::npos);
    EXPECT_NE(lines[1].find("2-shot"), std::string::npos);
    EXPECT_EQ(lines[2].rfind("SL", 0), 0u);
    EXPECT_EQ(lines[3].rfind("LDE-DD", 0), 0u);
}

TEST(Report, JsonRoundTrip) {
    const auto r = sample_report();
    EXPECT_EQ(icc::report_from_json(icc::report_to_json(r)), r);
    auto timed = r;
    timed.wall_clock_seconds = 1.25;
    EXPECT_EQ(icc::report_from_json(icc::report_to_json(timed)), timed);
    EXPECT_EQ(icc::report_to_json(r).find("wall_clock"), std::string::npos);
}

TEST(Report, WritesReportAndCompanionTable) {
    icc::fixtures::TempDir dir;
    const auto r = sample_report();
    icc::write_report(r, dir / "out.json");
    EXPECT_EQ(icc::read_report(dir / "out.json"), r);
    EXPECT_EQ(icc::table_path_for(dir / "out.json"), dir / "out.txt");
    EXPECT_EQ(icc::fixtures::read_text(dir / "out.txt"), icc::render_table(r));
    EXPECT_THROW(icc::write_report(r, dir / "missing" / "out.json"), icc::Error);
    EXPECT_EQ(r.find_run("LDE-DD", 2)->correct, 2u);
    EXPECT_EQ(r.find_run("VDE", 2), nullptr);
}
