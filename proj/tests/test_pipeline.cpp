#include "aftershock/pipeline.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace aftershock;
namespace fs = std::filesystem;

namespace {

const fs::path kGolden = fs::path(AFTERSHOCK_GOLDEN_DIR) / "synthetic_report.json";
const fs::path kFixture = fs::path(AFTERSHOCK_DATA_DIR) / "minute_bars.csv";

RunConfig synthetic_config() {
    RunConfig cfg;
    cfg.bootstrap_resamples = 100;
    cfg.seed = 11;
    return cfg;
}

RunConfig fixture_config() {
    RunConfig cfg;
    cfg.input = kFixture.string();
    cfg.crash = "2014-12-15 20:17";
    cfg.bootstrap_resamples = 100;
    return cfg;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("aftershock_test_" + name);
    fs::remove_all(dir);
    return dir;
}

}  // namespace

TEST(Pipeline, SimulateOnlyHasSynthAndFitsButNoSigma) {
    const auto out = run_analysis(synthetic_config());
    const auto& r = out.report;
    EXPECT_TRUE(r.contains("synthetic"));
    EXPECT_FALSE(r.contains("sigma"));
    EXPECT_FALSE(r.contains("input"));
    ASSERT_EQ(r["analyses"].size(), 1u);
    const auto& a = r["analyses"][0];
    for (const char* key : {"omori", "omori_mle", "waiting", "bootstrap", "markov", "correlation"}) {
        EXPECT_TRUE(a.contains(key)) << key;
    }
}

TEST(Pipeline, SeededOmoriCatalogRecoversP) {
    auto cfg = synthetic_config();
    cfg.synth.horizon = 40000.0;  // about 2000 events
    cfg.bootstrap_resamples = 0;
    const auto out = run_analysis(cfg);
    EXPECT_GE(out.report["synthetic"]["events"].get<int>(), 1500);
    EXPECT_NEAR(out.report["analyses"][0]["omori"]["p"].get<double>(), 0.5, 0.05);
}

TEST(Pipeline, NonPositiveMuIsNotedNotFatal) {
    // Waits of a p = 0.5 catalog are close to log-uniform: the histogram slope
    // is flatter than -1 over a long horizon.
    auto cfg = synthetic_config();
    cfg.synth.horizon = 40000.0;
    cfg.bootstrap_resamples = 0;
    const auto out = run_analysis(cfg);
    const auto& a = out.report["analyses"][0];
    ASSERT_FALSE(a["waiting"].contains("lsq"));
    EXPECT_TRUE(a["waiting"].contains("mle"));
    EXPECT_FALSE(a.contains("markov"));
    EXPECT_TRUE(a.contains("correlation"));
    bool noted = false;
    for (const auto& n : out.report["notes"]) noted = noted || n.get<std::string>().find("mu =") != std::string::npos;
    EXPECT_TRUE(noted);
}

TEST(Pipeline, TwoRunsByteIdenticalTrees) {
    auto cfg = synthetic_config();
    cfg.svg = true;
    const auto dir_a = scratch("det_a"), dir_b = scratch("det_b");
    cfg.output_dir = dir_a;
    run_pipeline(cfg);
    cfg.output_dir = dir_b;
    run_pipeline(cfg);
    std::size_t files = 0;
    for (const auto& entry : fs::directory_iterator(dir_a)) {
        const auto other = dir_b / entry.path().filename();
        ASSERT_TRUE(fs::exists(other)) << other;
        EXPECT_EQ(slurp(entry.path()), slurp(other)) << entry.path().filename();
        ++files;
    }
    EXPECT_GT(files, 5u);
}

TEST(Pipeline, ManifestListsEveryFile) {
    auto cfg = fixture_config();
    cfg.svg = true;
    const auto out = run_analysis(cfg);
    std::vector<std::string> manifest = out.report["manifest"];
    std::vector<std::string> names;
    for (const auto& [name, content] : out.files) names.push_back(name);
    EXPECT_EQ(manifest, names);
    for (const auto& a : out.report["analyses"]) {
        for (const auto& f : a["files"]) EXPECT_TRUE(out.files.count(f.get<std::string>())) << f;
    }
}

TEST(Pipeline, GoldenSyntheticReport) {
    const auto out = run_analysis(synthetic_config());
    const auto& text = out.files.at("report.json");
    if (std::getenv("AFTERSHOCK_UPDATE_GOLDEN")) {
        std::ofstream(kGolden, std::ios::binary) << text;
        GTEST_SKIP() << "golden file rewritten";
    }
    ASSERT_TRUE(fs::exists(kGolden)) << "run with AFTERSHOCK_UPDATE_GOLDEN=1 to create " << kGolden;
    EXPECT_EQ(text, slurp(kGolden));
}

TEST(Pipeline, MinuteBarInput) {
    const auto out = run_analysis(fixture_config());
    const auto& r = out.report;
    ASSERT_TRUE(r.contains("sigma"));
    EXPECT_GT(r["sigma"]["sigma"].get<double>(), 0.0);
    EXPECT_TRUE(r["sigma"]["clamped_to_data"].get<bool>());
    EXPECT_EQ(r["input"]["crash_origin"], "2014-12-15 20:17");
    EXPECT_FALSE(r.contains("synthetic"));
    ASSERT_EQ(r["analyses"].size(), 2u);
    EXPECT_EQ(r["analyses"][0]["label"], "2sigma");
    EXPECT_EQ(r["analyses"][1]["label"], "3sigma");
    EXPECT_GT(r["analyses"][0]["events"].get<int>(), r["analyses"][1]["events"].get<int>());
    EXPECT_NEAR(r["analyses"][0]["threshold"]["value"].get<double>(), 2.0 * r["sigma"]["sigma"].get<double>(),
                1e-15);
    EXPECT_TRUE(out.files.count("returns.csv"));
    EXPECT_TRUE(out.files.count("events_3sigma.csv"));
}

TEST(Pipeline, CrashInGapSnapsAndIsNoted) {
    auto cfg = fixture_config();
    cfg.crash = "2014-12-16 03:00";
    cfg.bootstrap_resamples = 0;
    const auto out = run_analysis(cfg);
    EXPECT_TRUE(out.report["input"]["origin_snapped"].get<bool>());
    EXPECT_EQ(out.report["input"]["crash_origin"], "2014-12-16 10:00");
    bool noted = false;
    for (const auto& n : out.report["notes"]) noted = noted || n.get<std::string>().find("snapped") != std::string::npos;
    EXPECT_TRUE(noted);
}

TEST(Pipeline, ErrorsNameTheStage) {
    auto cfg = fixture_config();
    cfg.n_w_list = {0, 400};
    cfg.bootstrap_resamples = 0;
    try {
        run_analysis(cfg);
        FAIL() << "expected a data error";
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("correlation [3sigma]"), std::string::npos) << e.what();
    }
    cfg = fixture_config();
    cfg.input = "/nonexistent/bars.csv";
    try {
        run_analysis(cfg);
        FAIL() << "expected a data error";
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("ingest"), std::string::npos) << e.what();
    }
}

TEST(Pipeline, ConfigValidation) {
    auto bad = synthetic_config();
    bad.threshold_multiples = {2.0, -1.0};
    EXPECT_THROW(validate(bad), std::invalid_argument);
    bad = synthetic_config();
    bad.window_days = 0.0;
    EXPECT_THROW(validate(bad), std::invalid_argument);
    bad = synthetic_config();
    bad.collapse_reference = 7;
    EXPECT_THROW(validate(bad), std::invalid_argument);
    bad = synthetic_config();
    bad.crash = "yesterday";
    EXPECT_THROW(validate(bad), std::invalid_argument);
    bad = synthetic_config();
    bad.bootstrap_resamples = 50;
    EXPECT_THROW(validate(bad), std::invalid_argument);
    EXPECT_NO_THROW(validate(RunConfig{}));
}

TEST(Pipeline, DefaultsMatchReferenceAnalysis) {
    const RunConfig cfg;
    EXPECT_EQ(cfg.window_days, 100.0);
    EXPECT_EQ(cfg.threshold_multiples, (std::vector<double>{2.0, 3.0}));
    EXPECT_EQ(cfg.n_w_list, (std::vector<std::size_t>{0, 10, 20, 30, 40, 50}));
    EXPECT_EQ(cfg.n_max, 60u);
}

TEST(Pipeline, InputNotModified) {
    const auto before = slurp(kFixture);
    auto cfg = fixture_config();
    cfg.bootstrap_resamples = 0;
    cfg.output_dir = scratch("input_untouched");
    run_pipeline(cfg);
    EXPECT_EQ(slurp(kFixture), before);
}
