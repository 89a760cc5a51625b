// Drives the built command-line tool and checks exit codes and artifacts.
#include <sys/wait.h>

#include <cstdlib>

#include "doctest.h"
#include "muxillum/illumination.hpp"
#include "muxillum/noise.hpp"
#include "muxillum/text_io.hpp"
#include "../oracles.hpp"

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
    const std::string cmd = std::string(MUXILLUM_CLI) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

}  // namespace

TEST_CASE("cli generate, calibrate and exit codes") {
    const auto dir = oracle::scratch_dir("cli_basic");
    CHECK(run("--help") == 0);
    CHECK(run("") != 0);
    CHECK(run("generate --out " + q(dir / "fam") + " --classes 2 --poses 4 --illuminants 3 --side 40 --discriminant 3") == 0);
    int lines = 0;
    for (const auto& l : muxillum::split(muxillum::read_text_file(dir / "fam" / "dataset.tsv"), '\n')) lines += !l.empty();
    CHECK(lines == 8);

    // bad values and unknown flags are configuration errors
    CHECK(run("generate --out " + q(dir / "x") + " --classes 0") == 2);
    CHECK(run("generate --out " + q(dir / "x") + " --bogus 1") == 2);
    CHECK(run("optimize --dataset " + q(dir / "nope.tsv") + " --noise " + q(dir / "n.txt") + " --out " + q(dir / "o") +
              " --setting s:1:1") == 2);

    // a single calibration level is a numerical failure
    CHECK(run("generate --kind stacks --out " + q(dir / "one") + " --levels 100 --frames 5 --stack-side 8") == 0);
    CHECK(run("calibrate --stacks " + q(dir / "one") + " --out " + q(dir / "n1.txt")) == 3);

    CHECK(run("generate --kind stacks --out " + q(dir / "stk") + " --frames 40 --stack-side 32") == 0);
    CHECK(run("calibrate --stacks " + q(dir / "stk") + " --out " + q(dir / "n.txt")) == 0);
    const auto m = muxillum::load_noise_model(dir / "n.txt");
    CHECK(std::abs(m.sigma_p2 / 0.7 - 1.0) < 0.1);
}

TEST_CASE("cli optimize via config file with flag override") {
    const auto dir = oracle::scratch_dir("cli_config");
    REQUIRE(run("generate --out " + q(dir / "fam") + " --classes 2 --poses 4 --illuminants 3 --side 60 --discriminant 3") == 0);
    REQUIRE(run("generate --kind stacks --out " + q(dir / "stk") + " --frames 20 --stack-side 16") == 0);
    REQUIRE(run("calibrate --stacks " + q(dir / "stk") + " --out " + q(dir / "n.txt")) == 0);
    muxillum::write_text_file(dir / "run.toml", "dataset = \"" + (dir / "fam" / "dataset.tsv").string() +
                                                   "\"\nnoise = \"" + (dir / "n.txt").string() +
                                                   "\"\nout = \"" + (dir / "out").string() +
                                                   "\"\nsetting = \"s3:17.5:22.5\"\n"
                                                   "method = \"naive-all-on\"\n"
                                                   "repeats = 2\nfeature_side = 60\nhog_cell = 6\n");
    CHECK(run("optimize --config " + q(dir / "run.toml")) == 0);
    CHECK(fs::exists(dir / "out" / "naive-all-on" / "s3" / "matrix.csv"));
    CHECK(run("evaluate --config " + q(dir / "run.toml")) == 0);
    CHECK(fs::exists(dir / "out" / "accuracy_vs_count.csv"));

    // command-line flags win over the file
    CHECK(run("optimize --config " + q(dir / "run.toml") + " --method snr --iterations 200 --max-columns 3") == 0);
    const auto w = muxillum::load_matrix_csv(dir / "out" / "snr" / "s3" / "matrix.csv");
    CHECK(w.num_acquisitions() == 3);

    muxillum::write_text_file(dir / "bad.toml", "dataset = \"x\"\nno_such_key = 1\n");
    CHECK(run("optimize --config " + q(dir / "bad.toml")) == 2);
}

TEST_CASE("cli render and demux") {
    const auto dir = oracle::scratch_dir("cli_render");
    REQUIRE(run("generate --out " + q(dir / "fam") + " --classes 2 --poses 2 --illuminants 3 --side 40") == 0);
    fs::path model;
    for (const auto& e : fs::directory_iterator(dir / "fam" / "models")) model = e.path();
    muxillum::write_text_file(dir / "w.csv", "# N=3 M=3 binary=1\n1,1,0\n0,1,1\n1,0,1\n");
    CHECK(run("render --model " + q(model) + " --matrix " + q(dir / "w.csv") + " --out " + q(dir / "fr")) == 0);
    CHECK(fs::exists(dir / "fr" / "frame_3.pgm"));
    muxillum::save_noise_model(muxillum::NoiseModel{0.7, 66.0, {15.0, 30.0}}, dir / "n.txt");
    CHECK(run("demux --coded " + q(dir / "fr" / "frame_1.pgm") + " " + q(dir / "fr" / "frame_2.pgm") + " " +
              q(dir / "fr" / "frame_3.pgm") + " --matrix " + q(dir / "w.csv") + " --noise " + q(dir / "n.txt") +
              " --out " + q(dir / "est")) == 0);
    CHECK(fs::exists(dir / "est" / "illum_3.pgm"));

    // singular matrix: conditioning error
    muxillum::write_text_file(dir / "sing.csv", "# N=3 M=3 binary=1\n1,1,0\n1,1,0\n0,0,1\n");
    CHECK(run("demux --coded " + q(dir / "fr" / "frame_1.pgm") + " " + q(dir / "fr" / "frame_2.pgm") + " " +
              q(dir / "fr" / "frame_3.pgm") + " --matrix " + q(dir / "sing.csv") + " --noise " + q(dir / "n.txt") +
              " --out " + q(dir / "est2")) == 3);
}
