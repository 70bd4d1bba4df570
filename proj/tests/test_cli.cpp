#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "cli.hpp"
#include "randutv/matrix_market.hpp"

using namespace randutv;
namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test {
protected:
    void SetUp() override
    {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir = fs::temp_directory_path() / (std::string("randutv_cli_") + info->name());
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    void TearDown() override { fs::remove_all(dir); }

    int run(std::vector<std::string> args)
    {
        args.insert(args.begin(), "randutv_cli");
        std::vector<const char*> argv;
        for (const auto& a : args)
            argv.push_back(a.c_str());
        out.str("");
        err.str("");
        return cli::run(int(argv.size()), argv.data(), out, err);
    }

    std::string path(const std::string& name) const { return (dir / name).string(); }

    void save(const std::string& name, const Matrix& a) const
    {
        std::ofstream os(path(name), std::ios::binary);
        os << mm::to_string(a);
    }

    static std::string slurp(const std::string& p)
    {
        std::ifstream is(p, std::ios::binary);
        std::stringstream ss;
        ss << is.rdbuf();
        return ss.str();
    }

    nlohmann::json metadata(const std::string& sub) const
    {
        return nlohmann::json::parse(slurp((dir / sub / "factorization.json").string()));
    }

    fs::path dir;
    std::ostringstream out, err;
};

} // namespace

TEST_F(Cli, IdentityFactorizationReportsResidual)
{
    save("I.mtx", Matrix::identity(8));
    ASSERT_EQ(run({"factorize", "--in", path("I.mtx"), "--b", "4", "--out-dir", path("o"), "--check"}), 0) << err.str();
    const nlohmann::json meta = metadata("o");
    EXPECT_LE(meta["reconstruction_residual"].get<double>(), 1e-12);
    EXPECT_EQ(meta["m"], 8);
    EXPECT_EQ(meta["b"], 4);
    EXPECT_TRUE(fs::exists(path("o/U.mtx")));
    EXPECT_TRUE(fs::exists(path("o/V.mtx")));
    const Matrix t = mm::read_file(path("o/T.mtx"));
    EXPECT_EQ(t.rows(), 8u);
}

TEST_F(Cli, SameSeedIsByteIdentical)
{
    const std::vector<std::string> common{"factorize", "--gen", "fast-decay:n=60,seed=3", "--b", "10", "--q", "1",
                                          "--seed", "0x2a"};
    auto a = common, b = common;
    a.insert(a.end(), {"--out-dir", path("a")});
    b.insert(b.end(), {"--out-dir", path("b")});
    ASSERT_EQ(run(a), 0);
    ASSERT_EQ(run(b), 0);
    EXPECT_EQ(slurp(path("a/T.mtx")), slurp(path("b/T.mtx")));
    EXPECT_EQ(slurp(path("a/U.mtx")), slurp(path("b/U.mtx")));
    EXPECT_EQ(slurp(path("a/factorization.json")), slurp(path("b/factorization.json")));
    EXPECT_EQ(metadata("a")["seed"], 42);
}

TEST_F(Cli, GapSpectrumInMetadata)
{
    ASSERT_EQ(run({"factorize", "--gen", "gap:n=400", "--b", "50", "--q", "2", "--no-ortho", "--out-dir", path("g")}),
              0);
    const nlohmann::json meta = metadata("g");
    const auto diag = meta["diag_head"].get<std::vector<double>>();
    const auto sigma = meta["known_sigma_head"].get<std::vector<double>>();
    for (std::size_t i : {149u, 150u})
        EXPECT_NEAR(diag[i] / sigma[i], 1.0, 0.05) << i;
    EXPECT_TRUE(meta["reconstruction_residual"].is_null());
    EXPECT_FALSE(fs::exists(path("g/U.mtx")));
}

TEST_F(Cli, FlopsRatio)
{
    ASSERT_EQ(run({"flops", "--m", "400", "--q", "0", "--check"}), 0);
    EXPECT_NE(out.str().find("3.00"), std::string::npos) << out.str();
    ASSERT_EQ(run({"flops", "--m", "400", "--q", "2"}), 0);
    EXPECT_NE(out.str().find("5.00"), std::string::npos) << out.str();
}

TEST_F(Cli, TheoremCheckPasses)
{
    std::mt19937 rng(5);
    std::normal_distribution<double> nd;
    Matrix a(50, 40);
    for (std::size_t j = 0; j < 40; ++j)
        for (std::size_t i = 0; i < 50; ++i)
            a(i, j) = nd(rng);
    save("A.mtx", a);
    EXPECT_EQ(run({"theorem-check", "--in", path("A.mtx"), "--b", "10", "--check"}), 0) << err.str() << out.str();
}

TEST_F(Cli, ErrorsRowCount)
{
    ASSERT_EQ(run({"errors", "--gen", "fast-decay:n=200", "--b", "25", "--q", "2", "--seed", "0,1", "--out-dir",
                   path("e"), "--check"}),
              0)
        << err.str();
    const std::string csv = slurp(path("e/errors.csv"));
    // 4 methods, 7 ranks, 2 seeds, one header line
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 4 * 7 * 2);
    const std::string summary = slurp(path("e/errors_summary.jsonl"));
    EXPECT_EQ(std::count(summary.begin(), summary.end(), '\n'), 4 * 7);
}

TEST_F(Cli, SingvalsAndGen)
{
    ASSERT_EQ(run({"gen", "--gen", "s-shaped:n=40,seed=2", "--out-dir", path("m")}), 0);
    EXPECT_EQ(mm::read_file(path("m/A.mtx")), gen_s_shaped(40, 2).a);
    ASSERT_EQ(run({"singvals", "--gen", "s-shaped:n=40,seed=2", "--b", "8", "--out-dir", path("s"), "--check"}), 0)
        << err.str();
    EXPECT_TRUE(fs::exists(path("s/singvals.csv")));
}

TEST_F(Cli, UsageAndIoExitCodes)
{
    EXPECT_EQ(run({}), 2);
    EXPECT_EQ(run({"factorize", "--b", "4"}), 2);
    EXPECT_EQ(run({"factorize", "--gen", "gap:n=40", "--in", path("x.mtx")}), 2);
    EXPECT_EQ(run({"factorize", "--gen", "nonsense"}), 2);
    EXPECT_EQ(run({"factorize", "--gen", "gap:n=40,gap_index=10", "--b", "0"}), 2);
    EXPECT_EQ(run({"factorize", "--in", path("missing.mtx"), "--out-dir", path("o")}), 3);
    EXPECT_EQ(run({"frobnicate"}), 2);
}

TEST_F(Cli, MalformedInputLeavesNoFiles)
{
    {
        std::ofstream os(path("bad.mtx"));
        os << "%%MatrixMarket matrix array real general\n3 3\n1\n2\nnot-a-number\n";
    }
    EXPECT_EQ(run({"factorize", "--in", path("bad.mtx"), "--out-dir", path("o")}), 3);
    EXPECT_FALSE(fs::exists(path("o")) && !fs::is_empty(path("o")));
}
