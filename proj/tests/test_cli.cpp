#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const fs::path scratch = fs::temp_directory_path() / "curvres_cli_test";

int run(const std::string& args)
{
    const std::string cmd = std::string(CURVRES_CLI) + " " + args + " > " + (scratch / "stdout.txt").string() +
                            " 2> " + (scratch / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string config(const std::string& name) { return std::string(CURVRES_CONFIGS) + "/" + name; }

class Cli : public ::testing::Test {
protected:
    void SetUp() override
    {
        fs::remove_all(scratch);
        fs::create_directories(scratch);
    }
};

}  // namespace

TEST_F(Cli, ResonanceOfTheSquareWell)
{
    ASSERT_EQ(run("resonance --config " + config("square_well.yaml") + " --out " + (scratch / "r").string()), 0);
    const auto csv = slurp(scratch / "r" / "resonance.csv");
    EXPECT_EQ(csv.rfind("kind,alpha,resonant,theta,defect,mu1\nprofile,1,1,-1,", 0), 0u);
    EXPECT_NE(slurp(scratch / "r" / "transmission.csv").find("s,kappa,mu0,mu,upsilon"), std::string::npos);
}

TEST_F(Cli, SolveOscillatorAndDisk)
{
    ASSERT_EQ(run("solve --config " + config("oscillator.yaml") + " --out " + (scratch / "o").string()), 0);
    std::istringstream in(slurp(scratch / "o" / "eigenvalues.csv"));
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "index,eigenvalue,residual");
    std::getline(in, line);
    EXPECT_NEAR(std::stod(line.substr(line.find(',') + 1)), 2.0, 0.02);
    ASSERT_EQ(run("solve --config " + config("disk_dirichlet.yaml") + " --out " + (scratch / "d").string()), 0);
    EXPECT_NEAR(std::stod(slurp(scratch / "stdout.txt")), 5.783185962946784, 0.03);
}

TEST_F(Cli, EmptyRequestWritesHeaderOnly)
{
    std::ofstream(scratch / "k0.yaml") << "solver: {k: 0}\n";
    ASSERT_EQ(run("solve --config " + (scratch / "k0.yaml").string() + " --out " + (scratch / "k").string()), 0);
    EXPECT_EQ(slurp(scratch / "k" / "eigenvalues.csv"), "index,eigenvalue,residual\n");
}

TEST_F(Cli, ConfigErrorsExitWithTwo)
{
    std::ofstream(scratch / "bad.yaml") << "profile:\n  V: \"sin(n\"\n";
    EXPECT_EQ(run("resonance --config " + (scratch / "bad.yaml").string() + " --out " + scratch.string()), 2);
    EXPECT_NE(slurp(scratch / "stderr.txt").find("bad.yaml:2:6"), std::string::npos);
    std::ofstream(scratch / "big.yaml") << "eps: 0.7\n";
    EXPECT_EQ(run("solve --config " + (scratch / "big.yaml").string() + " --out " + scratch.string()), 2);
    EXPECT_EQ(run("frobnicate"), 2);
    std::ofstream(scratch / "nonres.yaml") << "profile: {V: \"1\"}\nsolver: {operator: limit}\n";
    EXPECT_EQ(run("solve --config " + (scratch / "nonres.yaml").string() + " --out " + scratch.string()), 2);
}

TEST_F(Cli, OutputsAreDeterministic)
{
    const auto a = scratch / "a", b = scratch / "b";
    ASSERT_EQ(run("distcheck --config " + config("distcheck_sin.yaml") + " --out " + a.string()), 0);
    ASSERT_EQ(run("distcheck --config " + config("distcheck_sin.yaml") + " --out " + b.string() + " --threads 2"), 0);
    EXPECT_EQ(slurp(a / "distcheck.csv"), slurp(b / "distcheck.csv"));
    EXPECT_FALSE(slurp(a / "distcheck.csv").empty());
}

TEST_F(Cli, QuasimodeAndMeshDump)
{
    ASSERT_EQ(run("quasimode --config " + config("quasimode_circle.yaml") + " --out " + (scratch / "q").string()), 0);
    EXPECT_NE(slurp(scratch / "q" / "quasimode.json").find("\"all_within_residual\": true"), std::string::npos);
    ASSERT_EQ(run("mesh-dump --config " + config("circle_resonant.yaml") + " --out " + (scratch / "m").string()), 0);
    EXPECT_EQ(slurp(scratch / "m" / "mesh.txt").rfind("# nodes", 0), 0u);
}
