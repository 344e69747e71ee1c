// End-to-end exercises of the command-line tool at small scale: every
// subcommand, the pipeline driver, and the error/exit-code contract.

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dcart/io.hpp"

#ifndef DCART_CLI_PATH
#error "DCART_CLI_PATH must point at the built CLI binary"
#endif

namespace {

namespace fs = std::filesystem;

struct CliRun {
    int exit_code;
    std::string output;  // stdout + stderr
};

CliRun run_cli(const std::string& args) {
    const std::string out_file = fs::temp_directory_path() / "dcart_cli_out.txt";
    const std::string cmd = std::string(DCART_CLI_PATH) + " " + args + " > " + out_file + " 2>&1";
    const int rc = std::system(cmd.c_str());
    std::ifstream is(out_file);
    std::stringstream ss;
    ss << is.rdbuf();
    return {WEXITSTATUS(rc), ss.str()};
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("dcart_cli_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST(Cli, FullChainSmallScale) {
    TempDir tmp;
    // phantom
    auto r = run_cli("phantom --kind bars --n 48 --center 120,0 --out " + tmp.file("t.dcim"));
    ASSERT_EQ(r.exit_code, 0) << r.output;
    EXPECT_NE(r.output.find("config: grid_n=48"), std::string::npos);

    // project with Q
    r = run_cli("project --image " + tmp.file("t.dcim") +
                " --R 64 --rho-max 400 --q 2 --n-phi 64 --out " + tmp.file("s.dcsg"));
    ASSERT_EQ(r.exit_code, 0) << r.output;
    // N_rho = round(2*48^2/64) = 72
    EXPECT_NE(r.output.find("n_rho=72"), std::string::npos) << r.output;

    // add-noise determinism
    r = run_cli("add-noise --sinogram " + tmp.file("s.dcsg") + " --snr-db 20 --seed 7 --out " +
                tmp.file("n1.dcsg"));
    ASSERT_EQ(r.exit_code, 0) << r.output;
    r = run_cli("add-noise --sinogram " + tmp.file("s.dcsg") + " --snr-db 20 --seed 7 --out " +
                tmp.file("n2.dcsg"));
    ASSERT_EQ(r.exit_code, 0) << r.output;
    const auto n1 = dcart::read_sinogram(tmp.file("n1.dcsg"));
    const auto n2 = dcart::read_sinogram(tmp.file("n2.dcsg"));
    EXPECT_EQ(n1.values, n2.values);

    // reconstruct
    r = run_cli("reconstruct --sinogram " + tmp.file("n1.dcsg") +
                " --grid-n 48 --center 120,0 --epsilon 1 --out " + tmp.file("r.dcim") + " --pgm " +
                tmp.file("r.pgm"));
    ASSERT_EQ(r.exit_code, 0) << r.output;
    EXPECT_TRUE(fs::exists(tmp.file("r.pgm")));

    // metrics
    r = run_cli("metrics --recon " + tmp.file("r.dcim") + " --truth " + tmp.file("t.dcim") +
                " --out " + tmp.file("m.txt"));
    ASSERT_EQ(r.exit_code, 0) << r.output;
    EXPECT_NE(r.output.find("nmse="), std::string::npos);
    EXPECT_NE(r.output.find("nmae="), std::string::npos);

    // consistency
    r = run_cli("consistency --sinogram " + tmp.file("s.dcsg") + " --n-max 3 --out " +
                tmp.file("c.txt"));
    ASSERT_EQ(r.exit_code, 0) << r.output;
    EXPECT_NE(r.output.find("n=2 k=2 residual="), std::string::npos);
}

TEST(Cli, ReconstructZeroSinogramGivesZeroImage) {
    TempDir tmp;
    dcart::SystemGeometry g{.R = 32.0, .rho_max = 160.0, .n_rho = 12, .n_phi = 16};
    dcart::Sinogram zero(g);
    dcart::write_sinogram(zero, tmp.file("z.dcsg"));
    const auto r = run_cli("reconstruct --sinogram " + tmp.file("z.dcsg") +
                           " --grid-n 24 --center 80,0 --epsilon 1 --out " + tmp.file("z.dcim"));
    ASSERT_EQ(r.exit_code, 0) << r.output;
    const auto img = dcart::read_image(tmp.file("z.dcim"));
    for (double v : img.values)
        EXPECT_DOUBLE_EQ(v, 0.0);
}

TEST(Cli, PipelineFromConfig) {
    TempDir tmp;
    {
        std::ofstream os(tmp.file("cfg.json"));
        os << R"({"geometry":{"R":32,"rho_max":300,"q":2,"n_phi":48,"epsilon":1.0},
                 "grid":{"n":40},
                 "phantom":"shepp-logan","snr_db":25,"seed":3,
                 "output_dir":")"
           << tmp.file("out") << R"("})";
    }
    const auto r = run_cli("pipeline --config " + tmp.file("cfg.json"));
    ASSERT_EQ(r.exit_code, 0) << r.output;
    EXPECT_NE(r.output.find("nmse="), std::string::npos);
    EXPECT_NE(r.output.find("nmae="), std::string::npos);
    EXPECT_TRUE(fs::exists(tmp.file("out") + "/truth.dcim"));
    EXPECT_TRUE(fs::exists(tmp.file("out") + "/sinogram.dcsg"));
    EXPECT_TRUE(fs::exists(tmp.file("out") + "/noisy.dcsg"));
    EXPECT_TRUE(fs::exists(tmp.file("out") + "/recon.dcim"));
    EXPECT_TRUE(fs::exists(tmp.file("out") + "/metrics.txt"));
    EXPECT_TRUE(fs::exists(tmp.file("out") + "/resolved_config.json"));
    // metrics report carries the keys of the canonical schema
    std::ifstream is(tmp.file("out") + "/metrics.txt");
    std::stringstream ss;
    ss << is.rdbuf();
    EXPECT_NE(ss.str().find("nmse="), std::string::npos);
    EXPECT_NE(ss.str().find("snr_db=25"), std::string::npos);
    EXPECT_NE(ss.str().find("seed=3"), std::string::npos);
}

TEST(Cli, ErrorContract) {
    TempDir tmp;
    // support violation: phantom centered on the origin overlaps the disc
    auto r = run_cli("phantom --kind bars --n 32 --center 0,0 --out " + tmp.file("bad.dcim"));
    ASSERT_EQ(r.exit_code, 0);
    r = run_cli("project --image " + tmp.file("bad.dcim") +
                " --R 32 --rho-max 200 --n-rho 8 --n-phi 8 --out " + tmp.file("x.dcsg"));
    EXPECT_EQ(r.exit_code, 3);
    EXPECT_NE(r.output.find("error: support:"), std::string::npos) << r.output;
    // ... and the unsafe override accepts it
    r = run_cli("project --image " + tmp.file("bad.dcim") +
                " --R 32 --rho-max 200 --n-rho 8 --n-phi 8 --allow-support-violation --out " +
                tmp.file("x.dcsg"));
    EXPECT_EQ(r.exit_code, 0) << r.output;

    // missing file -> io error
    r = run_cli("reconstruct --sinogram " + tmp.file("nope.dcsg") +
                " --grid-n 8 --center 50,0 --out " + tmp.file("y.dcim"));
    EXPECT_EQ(r.exit_code, 4);
    EXPECT_NE(r.output.find("error: io:"), std::string::npos) << r.output;

    // config validation names the offending key
    {
        std::ofstream os(tmp.file("bad.json"));
        os << R"({"geometry":{"R":10,"rho_max":5,"q":1},"grid":{"n":16},"phantom":"bars"})";
    }
    r = run_cli("pipeline --config " + tmp.file("bad.json"));
    EXPECT_EQ(r.exit_code, 2);
    EXPECT_NE(r.output.find("error: config:"), std::string::npos) << r.output;
    EXPECT_NE(r.output.find("rho_max"), std::string::npos) << r.output;
}
