#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "sic/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Captured {
    int code = 0;
    std::string out;
};

Captured run(std::vector<std::string> args) {
    args.insert(args.begin(), "sic");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    auto* old_out = std::cout.rdbuf(out.rdbuf());
    auto* old_err = std::cerr.rdbuf(err.rdbuf());
    const int code = sic::cli_main(static_cast<int>(argv.size()), argv.data());
    std::cout.rdbuf(old_out);
    std::cerr.rdbuf(old_err);
    return {code, out.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("sic_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST_CASE("complexity-table prints the cost ratios") {
    const auto r = run({"complexity-table", "--K", "59", "--N", "60", "--L", "1,5,10,20,30,50"});
    CHECK(r.code == 0);
    for (const char* needle : {"0.52", "0.55", "0.59", "0.68", "0.76", "0.93", "8.47e-03", "417779"})
        CHECK(r.out.find(needle) != std::string::npos);
}

TEST_CASE("usage and configuration errors exit with 2") {
    CHECK(run({}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({"train", "--bogus"}).code == 2);
    CHECK(run({"complexity-table", "--K", "0"}).code == 2);
    CHECK(run({"train", "--config", "/nonexistent/file.cfg"}).code == 2);

    const auto dir = scratch("errors");
    write(dir / "bad.cfg", "epochz = 3\n");
    CHECK(run({"train", "--config", (dir / "bad.cfg").string(), "--out", dir.string()}).code == 2);
    CHECK(run({"train", "--method", "sgd", "--out", dir.string()}).code == 2);
    CHECK(run({"train", "--dataset", (dir / "missing.sicd").string(), "--out", dir.string()}).code == 2);
}

TEST_CASE("numerical abort exits with 3") {
    const auto dir = scratch("abort");
    write(dir / "blowup.cfg",
          "source = hammerstein\ninput = probe\nn_samples = 600\nepochs = 1\nmethod = adam\nadam_mu0 = 1e308\n");
    CHECK(run({"train", "--config", (dir / "blowup.cfg").string(), "--out", dir.string()}).code == 3);
}

TEST_CASE("gen-data and train are reproducible") {
    const auto dir = scratch("repro");
    write(dir / "small.cfg", "n_samples = 1200\nepochs = 1\nmethod = cg\nL = 10\n");
    const std::string cfg = (dir / "small.cfg").string();
    for (const char* run_dir : {"a", "b"}) {
        const auto out = (dir / run_dir).string();
        REQUIRE(run({"gen-data", "--config", cfg, "--seed", "5", "--out", out}).code == 0);
        REQUIRE(run({"train", "--config", cfg, "--seed", "5", "--out", out, "--dataset",
                     (dir / run_dir / "dataset.sicd").string()})
                    .code == 0);
    }
    // run_meta.json records the dataset path, which differs between a/ and b/.
    CHECK(fs::exists(dir / "a" / "run_meta.json"));
    for (const char* f : {"dataset.sicd", "curve.csv", "summary.txt", "summary.csv", "model.txt"}) {
        CAPTURE(f);
        CHECK(fs::exists(dir / "a" / f));
        CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
    }
    CHECK(slurp(dir / "a" / "curve.csv").rfind("update,epoch,nmse_db,cum_cost\n", 0) == 0);
}

TEST_CASE("compare writes one curve per method") {
    const auto dir = scratch("compare");
    write(dir / "cmp.cfg", "source = hammerstein\ninput = probe\nn_samples = 1200\nepochs = 1\ncompare_L = 20, 5\n");
    REQUIRE(run({"compare", "--config", (dir / "cmp.cfg").string(), "--out", dir.string()}).code == 0);
    for (const char* f : {"curve_mnm.csv", "curve_cg_L20.csv", "curve_cg_L5.csv", "curve_adam.csv", "compare.txt",
                          "compare.csv", "run_meta.json"})
        CHECK(fs::exists(dir / f));
    const std::string table = slurp(dir / "compare.csv");
    CHECK(table.find("MNM,") != std::string::npos);
    CHECK(table.find("CG L=20,") != std::string::npos);
    CHECK(table.find("BGD Adam,") != std::string::npos);
}

TEST_CASE("compare keeps going past an aborted method and exits with 3") {
    const auto dir = scratch("compare_abort");
    write(dir / "cmp.cfg",
          "source = hammerstein\ninput = probe\nn_samples = 1200\nepochs = 1\ncompare_L = 5\nadam_mu0 = 1e308\n");
    CHECK(run({"compare", "--config", (dir / "cmp.cfg").string(), "--out", dir.string()}).code == 3);
    const std::string table = slurp(dir / "compare.txt");
    CHECK(table.find("aborted@") != std::string::npos);
    CHECK(table.find("MNM") != std::string::npos);
    CHECK(fs::exists(dir / "curve_adam.csv"));
}
