#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "rcbind/datasets.hpp"
#include "rcbind/render.hpp"

using namespace rcbind;
namespace fs = std::filesystem;

namespace {

const std::string kBin = RCBIND_CLI_BIN;

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("rcbind_cli_" + std::to_string(std::rand()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

int run(const std::string& args) {
    const std::string cmd = kBin + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

int count_files(const fs::path& dir, const std::string& needle) {
    int n = 0;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.path().filename().string().find(needle) != std::string::npos) ++n;
    return n;
}

}  // namespace

TEST_CASE("generate writes a loadable, reproducible dataset") {
    TempDir dir;
    const std::string out = dir.file("shapes.rcds");
    const std::string log = dir.file("log.jsonl");
    REQUIRE(run("--log " + log + " generate --name shapes --split test_multi --count 20 --seed 4"
                " --out " + out) == 0);
    const Dataset ds = load_dataset(out);
    CHECK(ds.examples.size() == 20);
    CHECK(ds.width == 28);
    for (const auto& ex : ds.examples) CHECK(ex.truth.object_masks.size() == 3);

    const std::string out2 = dir.file("shapes2.rcds");
    REQUIRE(run("--log " + log + " generate --name shapes --split test_multi --count 20 --seed 4"
                " --out " + out2) == 0);
    CHECK(slurp(out) == slurp(out2));

    // the run log echoes the configuration before execution
    const std::string logged = slurp(log);
    CHECK(logged.find("\"event\":\"start\"") != std::string::npos);
    CHECK(logged.find("\"config\"") != std::string::npos);
    CHECK(logged.find("\"count\":20") != std::string::npos);
}

TEST_CASE("usage errors exit nonzero") {
    CHECK(run("generate --name not_a_dataset --out /tmp/x.rcds") != 0);
    CHECK(run("definitely-not-a-subcommand") != 0);
    CHECK(run("bind --model /nonexistent.rcm --data /nonexistent.rcds") != 0);
}

TEST_CASE("train smoke run and byte-identical reruns") {
    TempDir dir;
    const std::string train = dir.file("train.rcds");
    const std::string val = dir.file("val.rcds");
    REQUIRE(run("generate --name simple_superposition --split train_single --count 60 --seed 1"
                " --out " + train) == 0);
    REQUIRE(run("generate --name simple_superposition --split validation --count 20 --seed 2"
                " --out " + val) == 0);

    const std::string model = dir.file("model.rcm");
    const std::string args = "train --data " + train + " --val " + val + " --lr 0 --hidden 8"
                             " --batch 20 --patience 2 --max-epochs 5 --seed 3 --out ";
    REQUIRE(run(args + model) == 0);
    const std::string model2 = dir.file("model2.rcm");
    REQUIRE(run(args + model2) == 0);
    const std::string bytes = slurp(model);
    CHECK(!bytes.empty());
    CHECK(bytes == slurp(model2));
}

TEST_CASE("config files feed defaults and flags override them") {
    TempDir dir;
    const std::string cfg = dir.file("gen.cfg");
    {
        std::ofstream out(cfg);
        out << "name=bars\nsplit=train_single\ncount=15\nseed=9\n";
    }
    const std::string out1 = dir.file("a.rcds");
    REQUIRE(run("generate --config " + cfg + " --out " + out1) == 0);
    CHECK(load_dataset(out1).examples.size() == 15);

    // the command line wins over the file
    const std::string out2 = dir.file("b.rcds");
    REQUIRE(run("generate --config " + cfg + " --count 7 --out " + out2) == 0);
    CHECK(load_dataset(out2).examples.size() == 7);
}

TEST_CASE("bind, eval, render and generalize on a tiny pipeline") {
    TempDir dir;
    const std::string train = dir.file("train.rcds");
    const std::string val = dir.file("val.rcds");
    const std::string test = dir.file("test.rcds");
    REQUIRE(run("generate --name simple_superposition --split train_single --count 80 --seed 11"
                " --out " + train) == 0);
    REQUIRE(run("generate --name simple_superposition --split validation --count 30 --seed 12"
                " --out " + val) == 0);
    REQUIRE(run("generate --name simple_superposition --split test_multi --count 10 --seed 13"
                " --out " + test) == 0);

    const std::string model = dir.file("model.rcm");
    REQUIRE(run("train --data " + train + " --val " + val + " --lr 0.4 --hidden 16 --noise 0.1"
                " --batch 20 --patience 3 --max-epochs 10 --seed 14 --out " + model) == 0);

    SUBCASE("bind produces a trace and bounded iteration renders") {
        const std::string trace = dir.file("trace.jsonl");
        const std::string frames = dir.file("frames");
        REQUIRE(run("bind --model " + model + " --data " + test + " --k 2 --limit 3 --seed 15"
                    " --render " + frames + " --out " + trace) == 0);
        const std::string text = slurp(trace);
        CHECK(text.find("\"example\":0") != std::string::npos);
        CHECK(text.find("\"log_likelihood\"") != std::string::npos);
        CHECK(count_files(frames, "ex0000_iter") <= 15);
        CHECK(count_files(frames, "ex0000_iter") >= 1);
        CHECK(count_files(frames, "_input.pgm") == 3);

        // reruns are identical
        const std::string trace2 = dir.file("trace2.jsonl");
        REQUIRE(run("bind --model " + model + " --data " + test + " --k 2 --limit 3 --seed 15"
                    " --out " + trace2) == 0);
        CHECK(slurp(trace2) == text);
    }

    SUBCASE("eval writes a one-row table for a single K") {
        const std::string out = dir.file("eval");
        REQUIRE(run("eval --model " + model + " --data " + test + " --k 2 --seed 16 --out " +
                    out) == 0);
        CHECK(fs::exists(out + "/scores_k2.csv"));
        const std::string summary = slurp(out + "/eval_summary.json");
        CHECK(summary.find("\"mean_ami\"") != std::string::npos);
        CHECK(summary.find("\"k\": 2") != std::string::npos);
    }

    SUBCASE("eval over several K values") {
        const std::string out = dir.file("evalk");
        REQUIRE(run("eval --model " + model + " --data " + test + " --k 1,2,3 --seed 17 --out " +
                    out) == 0);
        CHECK(fs::exists(out + "/scores_k1.csv"));
        CHECK(fs::exists(out + "/scores_k2.csv"));
        CHECK(fs::exists(out + "/scores_k3.csv"));
    }

    SUBCASE("render emits the input and ground truth images") {
        const std::string out = dir.file("render");
        REQUIRE(run("render --data " + test + " --index 1 --out " + out) == 0);
        CHECK(count_files(out, "_input.pgm") == 1);
        CHECK(count_files(out, "_truth.ppm") == 1);
        CHECK(run("render --data " + test + " --index 99 --out " + out) != 0);
    }

    SUBCASE("generalize binds a user-supplied image") {
        // hand the model one of its own test images as an external PGM
        const Dataset ds = load_dataset(test);
        const std::string pgm = dir.file("input.pgm");
        render_image(ds.examples[0].image, pgm);
        const std::string out = dir.file("gen");
        REQUIRE(run("generalize --model " + model + " --k 2 --seed 18 --out " + out + " " +
                    pgm) == 0);
        CHECK(count_files(out, "_input.pgm") == 1);
        CHECK(count_files(out, "iter") >= 1);

        // geometry mismatch is an error
        const std::string bad = dir.file("bad.pgm");
        BinaryImage wrong(5, 5);
        render_image(wrong, bad);
        CHECK(run("generalize --model " + model + " --k 2 --out " + out + " " + bad) != 0);
    }
}
