#include <doctest.h>

#include <cstdlib>
#include <string>

#include "sdcor/dataset.hpp"
#include "test_util.hpp"

using testutil::TempDir;

namespace {

std::string binary() {
    const char* bin = std::getenv("SDCOR_BIN");
    REQUIRE_MESSAGE(bin != nullptr, "SDCOR_BIN must point at the sdcor executable");
    return bin;
}

int run_cmd(const std::string& args) {
    const std::string cmd = binary() + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string q(const std::string& s) { return "'" + s + "'"; }

}  // namespace

TEST_CASE("gen + run + eval round trip with perfect detection on easy data") {
    TempDir tmp("cli-roundtrip");
    REQUIRE(run_cmd("gen --out " + q(tmp.file("d.csv")) + " --clusters 3 --dims 4 --n 8000"
                    " --outliers 0.01 --outer 15 --seed 5") == 0);
    CHECK(testutil::read_text(tmp.file("d.csv.manifest")).find("rows=8000") !=
          std::string::npos);

    REQUIRE(run_cmd("run --data " + q(tmp.file("d.csv")) +
                    " --label-column --eta 0.01 --chunks 10 --seed 2"
                    " --scores-out " + q(tmp.file("s.csv")) +
                    " --model-out " + q(tmp.file("m.json")) +
                    " --report " + q(tmp.file("run.txt")) +
                    " --chunk-log " + q(tmp.file("chunks.csv")) +
                    " --sample-indices-out " + q(tmp.file("sample.txt"))) == 0);

    const std::string run_report = testutil::read_text(tmp.file("run.txt"));
    CHECK(run_report.find("membership_violations=0") != std::string::npos);
    CHECK(run_report.find("determinant_violations=0") != std::string::npos);
    CHECK(run_report.find("t_initial=3") != std::string::npos);

    const std::string chunk_log = testutil::read_text(tmp.file("chunks.csv"));
    CHECK(chunk_log.find("chunk,rows,absorbed") != std::string::npos);

    REQUIRE(run_cmd("eval --scores " + q(tmp.file("s.csv")) + " --report " +
                    q(tmp.file("eval.txt"))) == 0);
    const std::string eval_report = testutil::read_text(tmp.file("eval.txt"));
    CHECK(eval_report.find("auroc=1") != std::string::npos);
    CHECK(eval_report.find("auprc=1") != std::string::npos);
}

TEST_CASE("run is deterministic for a fixed seed") {
    TempDir tmp("cli-deterministic");
    REQUIRE(run_cmd("gen --out " + q(tmp.file("d.csv")) + " --clusters 2 --dims 3 --n 4000"
                    " --outliers 0.02 --outer 12 --seed 8") == 0);
    for (const char* name : {"a", "b"}) {
        REQUIRE(run_cmd("run --data " + q(tmp.file("d.csv")) +
                        " --label-column --eta 0.02 --chunks 5 --seed 11"
                        " --scores-out " + q(tmp.file(std::string(name) + ".csv")) +
                        " --model-out " + q(tmp.file(std::string(name) + ".json")) +
                        " --report " + q(tmp.file(std::string(name) + ".txt"))) == 0);
    }
    CHECK(testutil::read_text(tmp.file("a.csv")) == testutil::read_text(tmp.file("b.csv")));
}

TEST_CASE("score-only reuses a saved model and reproduces the scores") {
    TempDir tmp("cli-scoreonly");
    REQUIRE(run_cmd("gen --out " + q(tmp.file("d.csv")) + " --clusters 2 --dims 3 --n 3000"
                    " --outliers 0.01 --outer 12 --seed 4") == 0);
    REQUIRE(run_cmd("run --data " + q(tmp.file("d.csv")) +
                    " --label-column --eta 0.02 --chunks 4 --seed 6"
                    " --scores-out " + q(tmp.file("full.csv")) +
                    " --model-out " + q(tmp.file("m.json")) +
                    " --report " + q(tmp.file("r.txt"))) == 0);
    REQUIRE(run_cmd("run --data " + q(tmp.file("d.csv")) +
                    " --label-column --score-only --model " + q(tmp.file("m.json")) +
                    " --scores-out " + q(tmp.file("again.csv"))) == 0);

    const sdcor::ScoreTable full = sdcor::read_scores(tmp.file("full.csv"));
    const sdcor::ScoreTable again = sdcor::read_scores(tmp.file("again.csv"));
    REQUIRE(full.entries.size() == again.entries.size());
    for (std::size_t i = 0; i < full.entries.size(); ++i) {
        CHECK(full.entries[i].score == again.entries[i].score);
        CHECK(full.entries[i].cluster_id == again.entries[i].cluster_id);
    }
}

TEST_CASE("tune --mode pso is reproducible and writes the half-eps rule") {
    TempDir tmp("cli-tune");
    REQUIRE(run_cmd("gen --out " + q(tmp.file("d.csv")) + " --clusters 2 --dims 2 --n 2500"
                    " --outliers 0.02 --seed 12") == 0);
    for (const char* name : {"t1.txt", "t2.txt"}) {
        REQUIRE(run_cmd("tune --data " + q(tmp.file("d.csv")) +
                        " --label-column --mode pso --rate 0.1 --seed 1"
                        " --minpts-upper 30 --report " + q(tmp.file(name)) +
                        " --kdist-csv " + q(tmp.file("kd.csv"))) == 0);
    }
    const std::string t1 = testutil::read_text(tmp.file("t1.txt"));
    CHECK(t1 == testutil::read_text(tmp.file("t2.txt")));
    CHECK(t1.find("mode=pso") != std::string::npos);
    CHECK(testutil::read_text(tmp.file("kd.csv")).rfind("rank,distance", 0) == 0);

    // eps_original is exactly half of eps_sample.
    double eps_sample = 0.0, eps_original = 0.0;
    std::sscanf(t1.c_str() + t1.find("eps_sample="), "eps_sample=%lf", &eps_sample);
    std::sscanf(t1.c_str() + t1.find("eps_original="), "eps_original=%lf", &eps_original);
    CHECK(eps_original == doctest::Approx(eps_sample / 2.0).epsilon(1e-12));
}

TEST_CASE("kdist subcommand writes the sorted graph") {
    TempDir tmp("cli-kdist");
    REQUIRE(run_cmd("gen --out " + q(tmp.file("d.csv")) + " --clusters 1 --dims 2 --n 500"
                    " --outliers 0.0 --seed 3") == 0);
    REQUIRE(run_cmd("kdist --data " + q(tmp.file("d.csv")) + " --label-column --k 4"
                    " --out " + q(tmp.file("kd.csv"))) == 0);
    const std::string graph = testutil::read_text(tmp.file("kd.csv"));
    CHECK(graph.rfind("rank,distance", 0) == 0);
    CHECK(std::count(graph.begin(), graph.end(), '\n') == 501);
}

TEST_CASE("a flat key=value config file seeds defaults that flags override") {
    TempDir tmp("cli-config");
    testutil::write_text(tmp.file("gen.cfg"),
                         "clusters=2\ndims=3\nn=1500\noutliers=0.02\nouter=12\nseed=21\n");
    REQUIRE(run_cmd("gen --config " + q(tmp.file("gen.cfg")) + " --out " +
                    q(tmp.file("a.csv"))) == 0);
    // Same settings spelled out produce the identical file.
    REQUIRE(run_cmd("gen --out " + q(tmp.file("b.csv")) +
                    " --clusters 2 --dims 3 --n 1500 --outliers 0.02 --outer 12"
                    " --seed 21") == 0);
    CHECK(testutil::read_text(tmp.file("a.csv")) == testutil::read_text(tmp.file("b.csv")));
    // A flag wins over the config value.
    REQUIRE(run_cmd("gen --config " + q(tmp.file("gen.cfg")) + " --seed 22 --out " +
                    q(tmp.file("c.csv"))) == 0);
    CHECK(testutil::read_text(tmp.file("a.csv")) != testutil::read_text(tmp.file("c.csv")));
}

TEST_CASE("SDCOR_SEED provides the default seed") {
    TempDir tmp("cli-envseed");
    const std::string base = "gen --clusters 2 --dims 2 --n 1200 --outliers 0.01 --out ";
    const std::string env = "SDCOR_SEED=77 " + binary() + " ";
    REQUIRE(std::system((env + base + q(tmp.file("env.csv")) + " >/dev/null 2>&1").c_str()) == 0);
    REQUIRE(run_cmd(base + q(tmp.file("flag.csv")) + " --seed 77") == 0);
    CHECK(testutil::read_text(tmp.file("env.csv")) == testutil::read_text(tmp.file("flag.csv")));
}

TEST_CASE("eval emits ROC and PR point series on request") {
    TempDir tmp("cli-curves");
    testutil::write_text(tmp.file("s.csv"),
                         "index,score,cluster,label\n0,0.9,1,1\n1,0.7,1,0\n2,0.5,1,1\n"
                         "3,0.3,1,0\n");
    REQUIRE(run_cmd("eval --scores " + q(tmp.file("s.csv")) + " --report " +
                    q(tmp.file("e.txt")) + " --roc-csv " + q(tmp.file("roc.csv")) +
                    " --pr-csv " + q(tmp.file("pr.csv"))) == 0);
    CHECK(testutil::read_text(tmp.file("roc.csv")).rfind("fpr,tpr", 0) == 0);
    CHECK(testutil::read_text(tmp.file("pr.csv")).rfind("recall,precision", 0) == 0);
}

TEST_CASE("exit codes distinguish input errors, infeasibility and success") {
    TempDir tmp("cli-exits");

    SUBCASE("unreadable data file is an input error") {
        CHECK(run_cmd("tune --data /nonexistent/nope.csv") == 2);
        CHECK(run_cmd("run --data /nonexistent/nope.csv") == 2);
    }
    SUBCASE("bad flags are an input error") {
        CHECK(run_cmd("run") == 2);
        CHECK(run_cmd("definitely-not-a-subcommand") == 2);
    }
    SUBCASE("scores without labels cannot be evaluated") {
        testutil::write_text(tmp.file("s.csv"),
                             "index,score,cluster,label\n0,1.5,1,\n1,0.5,1,\n");
        CHECK(run_cmd("eval --scores " + q(tmp.file("s.csv"))) == 2);
    }
    SUBCASE("a singular initial cluster reports infeasibility") {
        std::string body;
        for (int i = 0; i < 200; ++i)
            body += std::to_string(0.01 * i) + "," + std::to_string(0.02 * i) + "\n";
        testutil::write_text(tmp.file("line.csv"), body);
        CHECK(run_cmd("run --data " + q(tmp.file("line.csv")) +
                      " --eta 0.5 --eps 0.5 --min-pts 4 --chunks 2"
                      " --scores-out " + q(tmp.file("s.csv")) +
                      " --model-out " + q(tmp.file("m.json")) +
                      " --report " + q(tmp.file("r.txt"))) == 3);
    }
}
