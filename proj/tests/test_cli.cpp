#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <unistd.h>

#include "core/stream_io.hpp"
#include "core/synth.hpp"
#include "support/helpers.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::string cli_bin() {
    const char* bin = std::getenv("NSAQA_CLI_BIN");
    return bin ? bin : "";
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("nsaqa_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

int run(const std::string& cmd, const fs::path& out, const fs::path& err) {
    const std::string full = cmd + " > " + out.string() + " 2> " + err.string();
    const int status = std::system(full.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace

TEST_CASE("CLI end-to-end: synth, build-ref, analyze, recognize, segment, eval") {
    REQUIRE_MESSAGE(!cli_bin().empty(), "NSAQA_CLI_BIN must point at the nsaqa binary");
    TempDir tmp;
    const fs::path out = tmp.path / "stdout.txt";
    const fs::path err = tmp.path / "stderr.txt";
    const fs::path corpus = tmp.path / "corpus";

    // synth writes n stream/ground-truth pairs
    REQUIRE(run(cli_bin() + " synth --n 12 --seed 5 --out-dir " + corpus.string(), out,
                err) == 0);
    size_t streams = 0, gts = 0;
    for (const auto& entry : fs::directory_iterator(corpus)) {
        if (entry.path().extension() == ".jsonl") ++streams;
        else ++gts;
    }
    CHECK(streams == 12);
    CHECK(gts == 12);

    SUBCASE("synth rejects n=0") {
        CHECK(run(cli_bin() + " synth --n 0 --out-dir " + (tmp.path / "x").string(), out,
                  err) == 1);
    }

    // build-ref twice: identical bytes
    const fs::path ref = tmp.path / "ref.json";
    const fs::path ref2 = tmp.path / "ref2.json";
    REQUIRE(run(cli_bin() + " build-ref " + corpus.string() + " --out " + ref.string(), out,
                err) == 0);
    REQUIRE(run(cli_bin() + " build-ref " + corpus.string() + " --out " + ref2.string() +
                    " --threads 4",
                out, err) == 0);
    CHECK(slurp(ref) == slurp(ref2));

    const fs::path stream = corpus / "synth-5-00000.jsonl";
    REQUIRE(fs::exists(stream));

    SUBCASE("analyze writes the report pair and prints the overall score") {
        const fs::path html = tmp.path / "report.html";
        REQUIRE(run(cli_bin() + " analyze " + stream.string() + " --reference " +
                        ref.string() + " --out " + html.string(),
                    out, err) == 0);
        CHECK(fs::exists(html));
        CHECK(fs::exists(tmp.path / "report.json"));
        const std::string score_line = slurp(out);
        CHECK(!score_line.empty());
        const double overall = std::strtod(score_line.c_str(), nullptr);
        CHECK(overall >= 0.0);
        CHECK(overall <= 10.0);
        const json jr = json::parse(slurp(tmp.path / "report.json"));
        CHECK(jr.at("overall").get<double>() == doctest::Approx(overall));
    }

    SUBCASE("recognize and segment print machine-readable JSON") {
        REQUIRE(run(cli_bin() + " recognize " + stream.string(), out, err) == 0);
        const json jd = json::parse(slurp(out));
        CHECK(jd.contains("armstand"));
        CHECK(jd.contains("rotation_type"));
        CHECK(jd.contains("half_somersaults"));
        CHECK(jd.contains("half_twists"));
        CHECK(jd.contains("position"));

        REQUIRE(run(cli_bin() + " segment " + stream.string(), out, err) == 0);
        const json js = json::parse(slurp(out));
        CHECK(js.contains("takeoff"));
        CHECK(js.contains("twist"));
        CHECK(js.contains("somersault"));
        CHECK(js.contains("entry"));
    }

    SUBCASE("eval prints the accuracy and AIoU table") {
        REQUIRE(run(cli_bin() + " eval " + corpus.string(), out, err) == 0);
        const json j = json::parse(slurp(out));
        CHECK(j.at("n").get<int>() == 12);
        CHECK(j.at("accuracy").at("rotation_type").get<double>() == 1.0);
        CHECK(j.at("aiou").at("overall").at("0.75").get<double>() >= 0.9);
    }

    SUBCASE("eval handles a corpus of one") {
        const fs::path solo = tmp.path / "solo";
        REQUIRE(run(cli_bin() + " synth --n 1 --seed 9 --out-dir " + solo.string(), out,
                    err) == 0);
        REQUIRE(run(cli_bin() + " eval " + solo.string(), out, err) == 0);
        CHECK(json::parse(slurp(out)).at("n").get<int>() == 1);
    }

    SUBCASE("input errors exit with code 1") {
        CHECK(run(cli_bin() + " analyze " + stream.string() +
                      " --reference /nonexistent.json --out " +
                      (tmp.path / "r.html").string(),
                  out, err) == 1);
        CHECK(run(cli_bin() + " recognize " + (tmp.path / "missing.jsonl").string(), out,
                  err) == 1);
        CHECK(run(cli_bin() + " recognize " + stream.string() + " --set bogus_key=3", out,
                  err) == 1);
        CHECK(run(cli_bin() + " eval " + tmp.path.string(), out, err) == 1);
    }

    SUBCASE("analysis failures exit with code 2 and a named rule") {
        using namespace nsaqa;
        SymbolStream st = testing::blank_stream(20);
        for (auto& f : st.frames) f.pose = testing::standing_pose({310, 250});
        const fs::path bad = tmp.path / "stationary.jsonl";
        std::ofstream(bad) << serialize_stream(st);
        CHECK(run(cli_bin() + " recognize " + bad.string(), out, err) == 2);
        CHECK(slurp(err).find("platform") != std::string::npos);
    }
}

TEST_CASE("CLI honors NSAQA_CONFIG with flag overrides") {
    REQUIRE(!cli_bin().empty());
    TempDir tmp;
    const fs::path out = tmp.path / "stdout.txt";
    const fs::path err = tmp.path / "stderr.txt";

    const auto [stream, gt] = nsaqa::synth::sample_one(31, 0);
    const fs::path stream_path = tmp.path / "dive.jsonl";
    std::ofstream(stream_path) << nsaqa::serialize_stream(stream);

    const fs::path cfg_file = tmp.path / "nsaqa.cfg";
    std::ofstream(cfg_file) << "# tightened takeoff threshold\n"
                            << "takeoff_distance_threshold=0.5\n";

    const std::string env = "NSAQA_CONFIG=" + cfg_file.string() + " ";
    CHECK(run(env + cli_bin() + " recognize " + stream_path.string(), out, err) == 0);

    // a bad config file is an input error
    std::ofstream(cfg_file, std::ios::trunc) << "not an assignment\n";
    CHECK(run(env + cli_bin() + " recognize " + stream_path.string(), out, err) == 1);
}
