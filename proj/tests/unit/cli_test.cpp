#include "commands.hpp"
#include "config.hpp"

#include "roving/error.hpp"
#include "roving/model.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace roving {
namespace {

namespace fs = std::filesystem;

std::string config_path(const std::string& name) { return std::string(ROVING_CONFIG_DIR) + "/" + name + ".json"; }

std::string slurp(const fs::path& p)
{
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override
    {
        dir_ = fs::temp_directory_path() /
               ("roving-cli-" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    int run(std::vector<std::string> args, const std::string& sub = "out")
    {
        args.push_back("--out");
        args.push_back((dir_ / sub).string());
        out_.str("");
        err_.str("");
        return cli::run(args, out_, err_);
    }

    fs::path dir_;
    std::ostringstream out_;
    std::ostringstream err_;
};

std::vector<std::vector<std::string>> parse_csv(const std::string& text)
{
    std::vector<std::vector<std::string>> rows;
    std::stringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        std::vector<std::string> cells;
        std::stringstream cs(line);
        std::string cell;
        while (std::getline(cs, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

TEST_F(CliTest, AnalyzeTakacsTable)
{
    ASSERT_EQ(run({"analyze", config_path("takacs"), "--param", "M=1", "--jet-order", "3"}), 0) << err_.str();
    const auto rows = parse_csv(slurp(dir_ / "out" / "moments.csv"));
    ASSERT_GE(rows.size(), 2u);
    const std::vector<std::string> header = {"queue", "class", "mean", "sd", "m2", "m3"};
    EXPECT_EQ(rows[0], header);
    bool saw1 = false;
    bool saw2 = false;
    for (const auto& r : rows) {
        if (r.size() < 6 || r[1] != "arbitrary") continue;
        if (r[0] == "1") {
            saw1 = true;
            EXPECT_NEAR(std::stod(r[2]), 1.0, 1e-10);
            EXPECT_NEAR(std::stod(r[4]), 2.0 * 36.0 / 27.0, 1e-9);
        } else if (r[0] == "2") {
            saw2 = true;
            EXPECT_NEAR(std::stod(r[2]), 4.0 / 3.0, 1e-10);
            EXPECT_NEAR(std::stod(r[5]), 2.0 * 3.0 * 256.0 / 108.0, 1e-8);
        }
    }
    EXPECT_TRUE(saw1 && saw2);
    EXPECT_TRUE(fs::exists(dir_ / "out" / "lst.csv"));
    EXPECT_TRUE(fs::exists(dir_ / "out" / "report.json"));
    EXPECT_EQ(out_.str(), slurp(dir_ / "out" / "moments.csv"));
}

TEST_F(CliTest, UnstableExitsTwo)
{
    EXPECT_EQ(run({"analyze", config_path("katayama"), "--rho", "1.2"}), 2);
    EXPECT_NE(err_.str().find("rho"), std::string::npos);
    EXPECT_NE(err_.str().find("1.2"), std::string::npos);
}

TEST_F(CliTest, MalformedRoutingExitsOne)
{
    fs::create_directories(dir_);
    const fs::path bad = dir_ / "bad.json";
    std::ofstream(bad) << R"({"queues": [{"lambda": 0.5, "service": {"type": "exp", "rate": 1},
                             "switchover": {"type": "det", "value": 1}}],
                             "routing": [[0.5, 0.4]]})";
    EXPECT_EQ(run({"analyze", bad.string()}), 1);
    EXPECT_NE(err_.str().find("RowSumError"), std::string::npos) << err_.str();
}

TEST_F(CliTest, ConfigErrorsExitOne)
{
    EXPECT_EQ(run({"analyze", config_path("takacs"), "--param", "nope=3"}), 1);
    EXPECT_EQ(run({"analyze", config_path("takacs"), "--param", "M=1.5"}), 1);
    EXPECT_EQ(run({"analyze", (dir_ / "missing.json").string()}), 1);
    EXPECT_EQ(run({"analyze", config_path("takacs"), "--omega-grid", "log:1:0"}), 1);
    EXPECT_EQ(run({"frobnicate"}), 1);
}

TEST_F(CliTest, CompareKatayamaPasses)
{
    EXPECT_EQ(run({"compare", config_path("katayama"), "--rho", "0.6", "--cycles", "20000"}), 0) << out_.str();
    const auto rows = parse_csv(slurp(dir_ / "out" / "compare.csv"));
    ASSERT_GE(rows.size(), 2u);
    const std::vector<std::string> head(rows[0].begin(), rows[0].begin() + 9);
    EXPECT_EQ(head, (std::vector<std::string>{"queue", "class", "mean", "sd", "m2", "m3", "sim_mean", "ci_half", "z"}));
}

TEST_F(CliTest, NegativeControlFails)
{
    EXPECT_EQ(run({"compare", config_path("vacation"), "--cycles", "5000", "--perturb-sigmas", "10"}), 3);
}

TEST_F(CliTest, SimulateIsDeterministic)
{
    const std::vector<std::string> args = {"simulate", config_path("takacs"), "--seed", "7", "--cycles", "2000",
                                           "--reps", "3"};
    ASSERT_EQ(run(args, "a"), 0);
    ASSERT_EQ(run(args, "b"), 0);
    EXPECT_EQ(slurp(dir_ / "a" / "sim.csv"), slurp(dir_ / "b" / "sim.csv"));
    auto a = nlohmann::json::parse(slurp(dir_ / "a" / "report.json"));
    auto b = nlohmann::json::parse(slurp(dir_ / "b" / "report.json"));
    EXPECT_EQ(a["metadata"]["seed"], 7);
    EXPECT_EQ(a["simulation"], b["simulation"]);
}

TEST_F(CliTest, ArtifactRoundTripKeepsTheHash)
{
    ASSERT_EQ(run({"analyze", config_path("katayama"), "--rho", "0.37", "--omega-grid", "none"}, "first"), 0);
    const fs::path artifact = dir_ / "first" / "report.json";
    const auto first = nlohmann::json::parse(slurp(artifact));
    ASSERT_EQ(run({"analyze", artifact.string(), "--omega-grid", "none"}, "second"), 0) << err_.str();
    const auto second = nlohmann::json::parse(slurp(dir_ / "second" / "report.json"));
    EXPECT_EQ(first["model_hash"], second["model_hash"]);
    EXPECT_EQ(slurp(dir_ / "first" / "moments.csv"), slurp(dir_ / "second" / "moments.csv"));
    EXPECT_FALSE(fs::exists(dir_ / "first" / "lst.csv"));
}

TEST(OmegaGrid, Forms)
{
    EXPECT_EQ(cli::parse_omega_grid("default").size(), 32u);
    EXPECT_TRUE(cli::parse_omega_grid("none").empty());
    const auto lin = cli::parse_omega_grid("lin:0:1:5");
    ASSERT_EQ(lin.size(), 5u);
    EXPECT_DOUBLE_EQ(lin[2], 0.5);
    const auto log = cli::parse_omega_grid("log:0.01:100:5");
    ASSERT_EQ(log.size(), 5u);
    EXPECT_NEAR(log[2], 1.0, 1e-12);
    EXPECT_EQ(cli::parse_omega_grid("0.5,1,2"), (std::vector<double>{0.5, 1.0, 2.0}));
    EXPECT_THROW((void)cli::parse_omega_grid("lin:1:0:x"), Error);
    EXPECT_THROW((void)cli::parse_omega_grid("-1,2"), Error);
}

TEST(ConfigParsing, ParamsAndDefaults)
{
    const auto doc = nlohmann::json::parse(R"({
        "params": {"a": 0.25},
        "queues": [{"lambda": "a", "service": {"type": "gamma", "shape": 2, "rate": 4}}],
        "routing": [[1, 0]]})");
    const NetworkSpec s = cli::parse_network(doc);
    EXPECT_DOUBLE_EQ(s.queues[0].arrival_rate, 0.25);
    EXPECT_EQ(s.queues[0].discipline, Discipline::Gated);
    ASSERT_TRUE(std::holds_alternative<Deterministic>(s.queues[0].switchover));
    cli::Overrides o;
    cli::add_override(o, "a=0.5");
    EXPECT_DOUBLE_EQ(cli::parse_network(doc, o).queues[0].arrival_rate, 0.5);
    EXPECT_THROW(cli::add_override(o, "novalue"), Error);

    const NetworkSpec echoed = cli::parse_network(cli::network_to_json(s));
    EXPECT_EQ(model_hash(validate(echoed)), model_hash(validate(s)));
}

}  // namespace
}  // namespace roving
