#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
};

Run run(const std::string& args, const std::string& env = "")
{
    fs::path log = fs::temp_directory_path() / ("gp_cli_" + std::to_string(::getpid()) + ".log");
    std::string cmd = env + " \"" GP_CLI_PATH "\" " + args + " > \"" + log.string() + "\" 2>&1";
    int st = std::system(cmd.c_str());
    std::ifstream in(log);
    std::stringstream ss;
    ss << in.rdbuf();
    fs::remove(log);
    return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, ss.str()};
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p)
{
    std::ifstream in(p);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string c;
        while (std::getline(ls, c, ',')) cells.push_back(c);
        rows.push_back(cells);
    }
    return rows;
}

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
        dir = fs::temp_directory_path() /
              ("gp_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    void TearDown() override { fs::remove_all(dir); }

    fs::path write_config(const std::string& body)
    {
        fs::path p = dir / "run.toml";
        std::ofstream(p) << body;
        return p;
    }

    fs::path dir;
};

const char* kSmall = R"(
[grid]
meshes = [[100, 50]]
[binomial]
steps = 200
[run]
S = [40, 50, 60]
)";

}  // namespace

TEST_F(CliTest, VersionAndHelp)
{
    auto r = run("--version");
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("1.0.0"), std::string::npos);
    EXPECT_EQ(run("--help").code, 0);
}

TEST_F(CliTest, ConfigErrorsExitTwo)
{
    EXPECT_EQ(run("").code, 2);  // no subcommand
    EXPECT_EQ(run("price --side sideways").code, 2);
    EXPECT_EQ(run("price " + (dir / "missing.toml").string()).code, 2);
    EXPECT_EQ(run("price " + write_config("[market]\nsigmaa = 0.3\n").string()).code, 2);
    EXPECT_EQ(run("price " + write_config("[grid]\nmeshes = [[0, 10]]\n").string()).code, 2);
    EXPECT_EQ(run("price " + write_config("[costs]\nmodel = \"quadratic\"\n").string()).code, 2);
    EXPECT_EQ(run("price " + write_config("[market\n").string()).code, 2);
    auto r = run("price " + write_config("[market]\nsigma = -0.3\n").string());
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.out.find("sigma"), std::string::npos);
}

TEST_F(CliTest, SolverFailureExitsOne)
{
    auto cfg = write_config(std::string(kSmall) + "[costs]\nmodel = \"constant\"\nc0 = 0.025\n");
    auto r = run("price " + cfg.string() + " --side bid");
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.out.find("parabolicity"), std::string::npos);
    EXPECT_EQ(run("validate " + cfg.string()).code, 1);
}

TEST_F(CliTest, PricePrintsOneRowPerSpot)
{
    auto r = run("price " + write_config(kSmall).string() + " --side ask");
    ASSERT_EQ(r.code, 0) << r.out;
    std::stringstream ss(r.out);
    std::string line;
    std::getline(ss, line);
    EXPECT_EQ(line, "side,mesh,S,V_model");
    int rows = 0;
    while (std::getline(ss, line))
        if (!line.empty()) {
            EXPECT_EQ(line.rfind("ask,100x50,", 0), 0u) << line;
            ++rows;
        }
    EXPECT_EQ(rows, 3);
}

TEST_F(CliTest, TableSchemaAndSandwich)
{
    auto r = run("table " + write_config(kSmall).string() + " --out " + dir.string());
    ASSERT_EQ(r.code, 0) << r.out;
    for (const char* side : {"bid", "ask"}) {
        auto rows = read_csv(dir / (std::string("table_") + side + "_100x50.csv"));
        ASSERT_EQ(rows.size(), 4u);
        EXPECT_EQ(rows[0], (std::vector<std::string>{"S", "V_bin_min", "V_model", "V_bin_max", "side", "mesh"}));
        for (std::size_t i = 1; i < rows.size(); ++i) {
            ASSERT_EQ(rows[i].size(), 6u);
            double lo = std::stod(rows[i][1]), v = std::stod(rows[i][2]), hi = std::stod(rows[i][3]);
            EXPECT_LE(lo, v + 0.1);
            EXPECT_LE(v, hi + 0.1);
            EXPECT_EQ(rows[i][4], side);
            EXPECT_EQ(rows[i][5], "100x50");
        }
    }
}

TEST_F(CliTest, BoundaryAndCurvesSchemas)
{
    auto cfg = write_config(kSmall);
    ASSERT_EQ(run("boundary " + cfg.string() + " --side bid --out " + dir.string()).code, 0);
    auto b = read_csv(dir / "boundary_bid_100x50.csv");
    ASSERT_GT(b.size(), 2u);
    EXPECT_EQ(b[0], (std::vector<std::string>{"t", "S_f_model", "S_f_bin_sigma_min", "S_f_bin_sigma_max"}));
    for (std::size_t i = 1; i < b.size(); ++i) EXPECT_EQ(b[i].size(), 4u);

    ASSERT_EQ(run("curves " + cfg.string() + " --out " + dir.string()).code, 0);
    auto c = read_csv(dir / "cost.csv");
    EXPECT_EQ(c[0], (std::vector<std::string>{"xi", "C", "C_tilde"}));
    ASSERT_EQ(c.size(), 202u);
    for (std::size_t i = 1; i < c.size(); ++i) {
        double C = std::stod(c[i][1]);
        EXPECT_GE(C, 0.005 - 1e-12);
        EXPECT_LE(C, 0.02 + 1e-12);
    }
    for (const char* side : {"bid", "ask"}) {
        auto beta = read_csv(dir / (std::string("beta_") + side + ".csv"));
        EXPECT_EQ(beta[0], (std::vector<std::string>{"H", "beta"}));
        EXPECT_EQ(beta.size(), 202u);
        auto p = read_csv(dir / (std::string("prices_") + side + "_100x50.csv"));
        EXPECT_EQ(p[0], (std::vector<std::string>{"S", "V_model", "V_bin_min", "V_bin_max"}));
        EXPECT_EQ(p.size(), 42u);  // 40..60 step 0.5
    }
}

TEST_F(CliTest, OutputIsDeterministicAcrossThreadCounts)
{
    auto cfg = write_config(kSmall);
    fs::path a = dir / "a", b = dir / "b";
    ASSERT_EQ(run("table " + cfg.string() + " --out " + a.string(), "GAMMA_PRICER_THREADS=1").code, 0);
    ASSERT_EQ(run("table " + cfg.string() + " --out " + b.string(), "GAMMA_PRICER_THREADS=4").code, 0);
    for (const char* f : {"table_bid_100x50.csv", "table_ask_100x50.csv"}) EXPECT_EQ(slurp(a / f), slurp(b / f));
    EXPECT_EQ(run("price " + cfg.string(), "GAMMA_PRICER_THREADS=zero").code, 2);
}

TEST_F(CliTest, MeshOverrideNamesFiles)
{
    ASSERT_EQ(run("table " + write_config(kSmall).string() + " --n 60 --m 30 --side bid --out " + dir.string()).code, 0);
    EXPECT_TRUE(fs::exists(dir / "table_bid_60x30.csv"));
    EXPECT_FALSE(fs::exists(dir / "table_ask_60x30.csv"));
}
