#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string err;
};

Result cli(const std::string& args) {
    const fs::path err = fs::temp_directory_path() /
                         ("cc4oc_cli_stderr_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    const std::string cmd = std::string(CC4OC_CLI_PATH) + " " + args + " >/dev/null 2>" + err.string();
    const int status = std::system(cmd.c_str());
    std::ifstream in(err);
    std::stringstream ss;
    ss << in.rdbuf();
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
}

std::string first_line(const fs::path& p) {
    std::ifstream in(p);
    std::string line;
    std::getline(in, line);
    return line;
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir = fs::temp_directory_path() / ("cc4oc_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::create_directories(dir);
    }
    void TearDown() override { fs::remove_all(dir); }
    fs::path dir;
};

}  // namespace

TEST_F(Cli, RunTaylorWritesErrorsAndFields) {
    const auto out = dir / "taylor.csv";
    const auto r = cli("run --case taylor --nx 11 --ny 11 --dt 0.01 --iota 0.5 --t-end 0.25 --out " + out.string());
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(first_line(out), "case,nx,ny,dt,iota,t,l1,l2,linf,order");
    EXPECT_EQ(first_line(dir / "taylor_fields.csv"), "x,y,phi,exact");
}

TEST_F(Cli, ConvergenceAndTemporal) {
    const auto conv = dir / "conv.csv";
    ASSERT_EQ(cli("convergence --case taylor --grids 5,9 --dt-rule h2 --out " + conv.string()).code, 0);
    EXPECT_EQ(first_line(conv), "case,nx,ny,dt,iota,t,l1,l2,linf,order");
    const auto temp = dir / "temp.csv";
    ASSERT_EQ(cli("temporal --case taylor --nx 9 --dts 0.05,0.025 --out " + temp.string()).code, 0);
    EXPECT_EQ(first_line(temp), "case,nx,ny,dt,iota,t,l1,l2,linf,order");
}

TEST_F(Cli, WavenumberAndStability) {
    const auto w = dir / "w.csv";
    ASSERT_EQ(cli("wavenumber --pe 0.1,100 --samples 10 --out " + w.string()).code, 0);
    EXPECT_EQ(first_line(w), "pe,kappa_h,scheme,re_nd,im_nd");
    const auto s = dir / "s.csv";
    ASSERT_EQ(cli("stability --iota 0.5 --samples 8 --out " + s.string()).code, 0);
    EXPECT_EQ(first_line(s), "iota,theta_x,theta_y,A,B,abs_g");
}

TEST_F(Cli, ErrorsExitNonZeroWithOneLine) {
    auto r = cli("run --case taylor --nx 11 --dt 0.03 --t-end 0.25 --out " + (dir / "x.csv").string());
    EXPECT_NE(r.code, 0);
    EXPECT_NE(r.err.find("cc4oc: error:"), std::string::npos);
    EXPECT_EQ(r.err.find('\n'), r.err.size() - 1);

    r = cli("run --case nowhere --out " + (dir / "x.csv").string());
    EXPECT_NE(r.code, 0);
    r = cli("cavity --re 1234 --out " + (dir / "x.csv").string());
    EXPECT_NE(r.code, 0);
    r = cli("run --case taylor --nx 11 --dt 0.01 --out /nonexistent_dir/x.csv");
    EXPECT_NE(r.code, 0);
    EXPECT_NE(r.err.find("cannot open"), std::string::npos);
}

TEST_F(Cli, DeterministicOutput) {
    const auto a = dir / "a.csv", b = dir / "b.csv";
    ASSERT_EQ(cli("run --case gauss --nx 21 --dt 0.01 --t-end 0.1 --out " + a.string()).code, 0);
    ASSERT_EQ(cli("run --case gauss --nx 21 --dt 0.01 --t-end 0.1 --out " + b.string()).code, 0);
    std::ifstream fa(dir / "a_fields.csv"), fb(dir / "b_fields.csv");
    std::stringstream sa, sb;
    sa << fa.rdbuf();
    sb << fb.rdbuf();
    EXPECT_EQ(sa.str(), sb.str());
    EXPECT_FALSE(sa.str().empty());
}
