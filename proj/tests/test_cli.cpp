#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

#include "chaingraph/manifest.hpp"
#include "helpers.hpp"

using namespace chaingraph;
using namespace testutil;

namespace {

struct RunResult {
    int exit_code;
    std::string stdout_text;
};

RunResult run_cli(const std::string& args, const std::filesystem::path& capture_dir) {
    std::filesystem::path out_file = capture_dir / "stdout.txt";
    std::string cmd = std::string(CHAINGRAPH_CLI_PATH) + " " + args + " > " + out_file.string() +
                      " 2> " + (capture_dir / "stderr.txt").string();
    int rc = std::system(cmd.c_str());
    int exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    return {exit_code, slurp(out_file)};
}

}  // namespace

TEST_CASE("config dump prints every key with defaults and overrides") {
    TempDir tmp("cli-config");
    RunResult r = run_cli("config dump -D range.hi=123", tmp.path());
    CHECK(r.exit_code == 0);
    CHECK(r.stdout_text.find("range.hi = 123") != std::string::npos);
    CHECK(r.stdout_text.find("out.batch_size = 100") != std::string::npos);
    CHECK(r.stdout_text.find("build.transfer_mode = as_printed") != std::string::npos);
    CHECK(r.stdout_text.find("sampler.method = forest_fire") != std::string::npos);
}

TEST_CASE("config file values load with flag overrides winning") {
    TempDir tmp("cli-configfile");
    std::ofstream(tmp.path() / "run.conf") << "# comment\nrange.lo = 5\nrange.hi = 9\n"
                                           << "out.batch_size = 7\n";
    RunResult r = run_cli("config dump -c " + (tmp.path() / "run.conf").string() +
                              " -D range.hi=11",
                          tmp.path());
    CHECK(r.exit_code == 0);
    CHECK(r.stdout_text.find("range.lo = 5") != std::string::npos);
    CHECK(r.stdout_text.find("range.hi = 11") != std::string::npos);
    CHECK(r.stdout_text.find("out.batch_size = 7") != std::string::npos);
}

TEST_CASE("build then profile then sample over a fixture chain") {
    TempDir tmp("cli-pipeline");
    std::mt19937_64 rng(31);
    auto chain = random_chain(rng, {.first_height = 0, .blocks = 20, .max_txs = 3});
    write_fixture_chain(tmp.path() / "fixtures", chain);

    std::string common = "-D source.fixture_dir=" + (tmp.path() / "fixtures").string() +
                         " -D out.dir=" + (tmp.path() / "out").string() +
                         " -D range.lo=0 -D range.hi=19 -D out.batch_size=8";

    RunResult build = run_cli("build " + common, tmp.path());
    REQUIRE(build.exit_code == 0);
    CHECK(build.stdout_text.find("manifest.json") != std::string::npos);
    Manifest m = load_manifest(tmp.path() / "out");
    CHECK(m.height_max == 19);
    CHECK(m.dedup.has_value());

    // rebuild into a second directory: identical content digests
    RunResult build2 = run_cli("build " + common + " -D out.dir=" + (tmp.path() / "out2").string(),
                               tmp.path());
    REQUIRE(build2.exit_code == 0);
    Manifest m2 = load_manifest(tmp.path() / "out2");
    REQUIRE(m.batches.size() == m2.batches.size());
    for (std::size_t i = 0; i < m.batches.size(); ++i) {
        for (std::size_t f = 0; f < m.batches[i].files.size(); ++f) {
            CHECK(m.batches[i].files[f].sha256 == m2.batches[i].files[f].sha256);
        }
    }

    RunResult profile = run_cli("profile " + common +
                                    " -D profile.out_dir=" + (tmp.path() / "prof").string(),
                                tmp.path());
    REQUIRE(profile.exit_code == 0);
    std::string stats = slurp(tmp.path() / "prof" / "block_stats.tsv");
    CHECK(std::count(stats.begin(), stats.end(), '\n') == 21);  // header + 20 rows
    CHECK(std::filesystem::exists(tmp.path() / "prof" / "summary.json"));
    CHECK(std::filesystem::exists(tmp.path() / "prof" / "degree_script.tsv"));

    RunResult sample = run_cli("sample -D sampler.store=" + (tmp.path() / "out").string() +
                                   " -D sampler.out_dir=" + (tmp.path() / "samples").string() +
                                   " -D sampler.num_samples=5 -D sampler.seed=7",
                               tmp.path());
    REQUIRE(sample.exit_code == 0);
    std::string labels = slurp(tmp.path() / "samples" / "labels.tsv");
    CHECK(std::count(labels.begin(), labels.end(), '\n') >= 2);
    CHECK(std::filesystem::exists(tmp.path() / "samples" / "sample-000000.nodes.tsv"));
}

TEST_CASE("append continues a build and rejects wrong start heights") {
    TempDir tmp("cli-append");
    std::mt19937_64 rng(32);
    auto chain = random_chain(rng, {.first_height = 0, .blocks = 12, .max_txs = 2});
    write_fixture_chain(tmp.path() / "fixtures", chain);

    std::string common = "-D source.fixture_dir=" + (tmp.path() / "fixtures").string() +
                         " -D out.dir=" + (tmp.path() / "out").string() + " -D out.batch_size=5";

    REQUIRE(run_cli("build " + common + " -D range.lo=0 -D range.hi=7", tmp.path()).exit_code == 0);

    // wrong start height: sequencing error, exit 3
    RunResult bad = run_cli("append " + common + " -D range.lo=10 -D range.hi=11", tmp.path());
    CHECK(bad.exit_code == 3);

    RunResult good = run_cli("append " + common + " -D range.hi=11", tmp.path());
    REQUIRE(good.exit_code == 0);
    Manifest m = load_manifest(tmp.path() / "out");
    CHECK(m.height_max == 11);
}

TEST_CASE("transport failures exit with code 2") {
    TempDir tmp("cli-transport");
    RunResult r = run_cli(
        "build -D source.endpoint=http://127.0.0.1:1 -D out.dir=" + (tmp.path() / "o").string() +
            " -D range.lo=0 -D range.hi=1 -D rest.timeout_seconds=1",
        tmp.path());
    CHECK(r.exit_code == 2);
}

TEST_CASE("invalid blocks exit with code 4") {
    TempDir tmp("cli-invalid");
    std::mt19937_64 rng(33);
    auto chain = random_chain(rng, {.first_height = 0, .blocks = 1, .max_txs = 1});
    // corrupt: claim more than subsidy + fees
    chain[0].txs[0].vout[0].value += 5;
    write_fixture_chain(tmp.path() / "fixtures", chain);
    RunResult r = run_cli("build -D source.fixture_dir=" + (tmp.path() / "fixtures").string() +
                              " -D out.dir=" + (tmp.path() / "out").string() +
                              " -D range.lo=0 -D range.hi=0",
                          tmp.path());
    CHECK(r.exit_code == 4);
}

TEST_CASE("sampler reports bad roots without failing the run") {
    TempDir tmp("cli-badroot");
    std::mt19937_64 rng(34);
    auto chain = random_chain(rng, {.first_height = 0, .blocks = 4, .max_txs = 2});
    write_fixture_chain(tmp.path() / "fixtures", chain);
    REQUIRE(run_cli("build -D source.fixture_dir=" + (tmp.path() / "fixtures").string() +
                        " -D out.dir=" + (tmp.path() / "out").string() +
                        " -D range.lo=0 -D range.hi=3",
                    tmp.path())
                .exit_code == 0);

    std::ofstream(tmp.path() / "roots.txt") << "script:does-not-exist\nblock:0\n";
    RunResult r = run_cli("sample -D sampler.store=" + (tmp.path() / "out").string() +
                              " -D sampler.out_dir=" + (tmp.path() / "samples").string() +
                              " -D sampler.roots_file=" + (tmp.path() / "roots.txt").string(),
                          tmp.path());
    CHECK(r.exit_code == 0);
    std::string report = slurp(tmp.path() / "samples" / "report.tsv");
    CHECK(report.find("error") != std::string::npos);
    CHECK(report.find("ok") != std::string::npos);
}

TEST_CASE("environment variables override config files") {
    TempDir tmp("cli-env");
    std::ofstream(tmp.path() / "run.conf") << "range.hi = 5\n";
    std::string cmd = "CHAINGRAPH_RANGE_HI=99 " + std::string(CHAINGRAPH_CLI_PATH) +
                      " config dump -c " + (tmp.path() / "run.conf").string() + " > " +
                      (tmp.path() / "stdout.txt").string() + " 2>/dev/null";
    int rc = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(rc));
    CHECK(WEXITSTATUS(rc) == 0);
    CHECK(slurp(tmp.path() / "stdout.txt").find("range.hi = 99") != std::string::npos);
}
