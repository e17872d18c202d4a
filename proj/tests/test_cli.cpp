#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "ethdr/image_io.hpp"
#include "ethdr/model.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

namespace fs = std::filesystem;
using namespace ethdr;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

const char* cli_path() {
    const char* bin = std::getenv("ETHDR_BIN");
    REQUIRE_MESSAGE(bin != nullptr, "ETHDR_BIN must point at the ethdr binary");
    return bin;
}

RunResult run_cli(const std::string& args) {
    const fs::path dir = fs::temp_directory_path();
    const fs::path out = dir / "ethdr_cli_stdout.txt";
    const fs::path err = dir / "ethdr_cli_stderr.txt";
    const std::string cmd = std::string("\"") + cli_path() + "\" " + args + " >" + out.string() +
                            " 2>" + err.string();
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

fs::path make_stack_images(std::size_t h, std::size_t w) {
    const fs::path dir = fs::temp_directory_path() / "ethdr_cli_test";
    fs::create_directories(dir);
    std::mt19937 rng(401);
    std::uniform_real_distribution<float> dist(0.0f, 1.0f);
    for (const char* name : {"under", "normal", "over"}) {
        Tensor img({1, 3, h, w});
        for (std::size_t i = 0; i < img.size(); ++i) img.data()[i] = dist(rng);
        write_ppm((dir / (std::string(name) + ".ppm")).string(), img);
    }
    return dir;
}

std::string config_args(const fs::path& dir) {
    const fs::path cfg = dir / "tiny.cfg";
    std::ofstream f(cfg);
    f << "variant=main\nbase_channels=4\nembed_dim=8\nnum_blocks=2\nheads=2\n";
    return " --config " + cfg.string();
}

}  // namespace

TEST_CASE("fuse produces a constant 0.5 PFM with the zero-initialized head") {
    const fs::path dir = make_stack_images(24, 24);
    const std::string out = (dir / "fused.pfm").string();
    const RunResult r = run_cli("fuse --under " + (dir / "under.ppm").string() + " --normal " +
                                (dir / "normal.ppm").string() + " --over " +
                                (dir / "over.ppm").string() + " --seed 42 --out " + out +
                                config_args(dir));
    REQUIRE(r.exit_code == 0);
    CHECK(r.err.find("[fuse] forward") != std::string::npos);  // timing goes to stderr
    CHECK(r.out.empty());                                      // stdout stays machine-readable

    Tensor fused = read_pfm(out);
    REQUIRE(fused.shape() == std::vector<std::size_t>{1, 3, 24, 24});
    for (std::size_t i = 0; i < fused.size(); ++i) {
        CHECK(fused.data()[i] == doctest::Approx(0.5f));
    }
}

TEST_CASE("fuse is byte-identical across runs with the same seed") {
    const fs::path dir = make_stack_images(20, 20);
    const std::string base = "fuse --under " + (dir / "under.ppm").string() + " --normal " +
                             (dir / "normal.ppm").string() + " --over " + (dir / "over.ppm").string() +
                             " --seed 7" + config_args(dir) + " --out ";
    const std::string out1 = (dir / "a.pfm").string();
    const std::string out2 = (dir / "b.pfm").string();
    REQUIRE(run_cli(base + out1).exit_code == 0);
    REQUIRE(run_cli(base + out2).exit_code == 0);
    CHECK(slurp(out1) == slurp(out2));
    CHECK(!slurp(out1).empty());
}

TEST_CASE("fuse exit codes: missing file 2, shape mismatch 3, bad weights 4") {
    const fs::path dir = make_stack_images(16, 16);
    const std::string tail = " --normal " + (dir / "normal.ppm").string() + " --over " +
                             (dir / "over.ppm").string() + config_args(dir) + " --out " +
                             (dir / "x.pfm").string();

    CHECK(run_cli("fuse --under /no/such/file.ppm" + tail).exit_code == 2);

    {
        Tensor small({1, 3, 8, 16});
        write_ppm((dir / "small.ppm").string(), small);
        const RunResult r = run_cli("fuse --under " + (dir / "small.ppm").string() + tail);
        CHECK(r.exit_code == 3);
        CHECK(r.err.find("1x3x8x16") != std::string::npos);
        CHECK(r.err.find("1x3x16x16") != std::string::npos);
    }

    {
        std::ofstream f(dir / "bad.ehdrw", std::ios::binary);
        f << "garbage bytes";
        const RunResult r = run_cli("fuse --under " + (dir / "under.ppm").string() + tail +
                                    " --weights " + (dir / "bad.ehdrw").string());
        CHECK(r.exit_code == 4);
    }
}

TEST_CASE("analyze: both variants, negative deltas, tsv matches text totals") {
    const fs::path dir = fs::temp_directory_path() / "ethdr_cli_test";
    fs::create_directories(dir);
    const RunResult text = run_cli("analyze --variant both --height 64 --width 64" + config_args(dir));
    REQUIRE(text.exit_code == 0);
    CHECK(text.out.find("variant comparison") != std::string::npos);
    CHECK(text.out.find("-") != std::string::npos);  // lite rows show negative deltas

    const RunResult tsv = run_cli("analyze --variant both --height 64 --width 64 --format tsv" +
                                  config_args(dir));
    REQUIRE(tsv.exit_code == 0);

    // totals in the tsv reappear verbatim in the text rendering
    std::istringstream lines(tsv.out);
    std::string line;
    std::vector<std::string> totals;
    while (std::getline(lines, line)) {
        if (line.rfind("TOTAL\t", 0) == 0) totals.push_back(line.substr(6, line.find('\t', 6) - 6));
    }
    REQUIRE(totals.size() == 2);
    CHECK(text.out.find(totals[0]) != std::string::npos);
    CHECK(text.out.find(totals[1]) != std::string::npos);

    CHECK(run_cli("analyze --config /no/such.cfg").exit_code == 2);

    const fs::path bad_cfg = dir / "bad.cfg";
    std::ofstream f(bad_cfg);
    f << "unknown_key=1\n";
    f.close();
    CHECK(run_cli("analyze --config " + bad_cfg.string()).exit_code == 2);
}

TEST_CASE("metrics: identity scores and noise ordering") {
    const fs::path dir = fs::temp_directory_path() / "ethdr_cli_test";
    fs::create_directories(dir);
    std::mt19937 rng(421);
    std::uniform_real_distribution<float> dist(0.2f, 0.8f);
    Tensor ref({1, 3, 16, 16});
    for (std::size_t i = 0; i < ref.size(); ++i) ref.data()[i] = dist(rng);
    const std::string ref_path = (dir / "ref.pfm").string();
    write_pfm(ref_path, ref);

    const RunResult self = run_cli("metrics --fused " + ref_path + " --reference " + ref_path +
                                   " --format tsv");
    REQUIRE(self.exit_code == 0);
    double psnr_l, ssim_l, psnr_mu, ssim_mu;
    {
        std::istringstream is(self.out);
        is >> psnr_l >> ssim_l >> psnr_mu >> ssim_mu;
        CHECK(psnr_l == 99.0);
        CHECK(ssim_l == doctest::Approx(1.0));
        CHECK(psnr_mu == 99.0);
        CHECK(ssim_mu == doctest::Approx(1.0));
    }

    double prev_psnr = 1e9;
    for (int level = 1; level <= 3; ++level) {
        Tensor noisy = ref;
        std::mt19937 nrng(1000 + level);
        std::uniform_real_distribution<float> ndist(-0.02f * level, 0.02f * level);
        for (std::size_t i = 0; i < noisy.size(); ++i) noisy.data()[i] += ndist(nrng);
        const std::string noisy_path = (dir / "noisy.pfm").string();
        write_pfm(noisy_path, noisy);
        const RunResult r = run_cli("metrics --fused " + noisy_path + " --reference " + ref_path +
                                    " --format tsv");
        REQUIRE(r.exit_code == 0);
        std::istringstream is(r.out);
        is >> psnr_l;
        CHECK(psnr_l < prev_psnr);
        prev_psnr = psnr_l;
    }

    // mismatched sizes exit 3
    Tensor other({1, 3, 8, 16});
    write_pfm((dir / "other.pfm").string(), other);
    CHECK(run_cli("metrics --fused " + (dir / "other.pfm").string() + " --reference " + ref_path)
              .exit_code == 3);
}

TEST_CASE("selftest passes, is reproducible, and honors the fault hook") {
    const RunResult a = run_cli("selftest");
    REQUIRE(a.exit_code == 0);
    for (const char* suite : {"conv-oracle", "msa-count", "iaaf-algebra", "dyt-contract",
                              "ycbcr-roundtrip", "weights-roundtrip"}) {
        CHECK(a.out.find(std::string(suite) + ": PASS") != std::string::npos);
    }
    const RunResult b = run_cli("selftest");
    CHECK(a.out == b.out);  // identical transcript

    const RunResult faulty = run_cli("selftest --inject-conv-fault");
    CHECK(faulty.exit_code == 1);
    CHECK(faulty.out.find("conv-oracle: FAIL") != std::string::npos);
}

TEST_CASE("convert round trips between ppm and pfm") {
    const fs::path dir = fs::temp_directory_path() / "ethdr_cli_test";
    fs::create_directories(dir);
    std::mt19937 rng(431);
    std::uniform_real_distribution<float> dist(0.0f, 1.0f);
    Tensor img({1, 3, 8, 8});
    for (std::size_t i = 0; i < img.size(); ++i) img.data()[i] = dist(rng);
    const std::string ppm = (dir / "c.ppm").string();
    const std::string pfm = (dir / "c.pfm").string();
    const std::string ppm2 = (dir / "c2.ppm").string();
    write_ppm(ppm, img);

    REQUIRE(run_cli("convert --in " + ppm + " --out " + pfm).exit_code == 0);
    REQUIRE(run_cli("convert --in " + pfm + " --out " + ppm2).exit_code == 0);
    CHECK(slurp(ppm) == slurp(ppm2));  // both pass through the same 8-bit grid

    CHECK(run_cli("convert --in " + pfm + " --out " + (dir / "c.xyz").string()).exit_code == 2);
}
