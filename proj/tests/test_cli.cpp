#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

// End-to-end runs of the command line binary. The binary path and the data
// directory come from compile definitions set in CMake.

#include "grchase/textio.hpp"

#include <cstdio>
#include <cstdlib>
#include <string>

using namespace grchase;

namespace {

std::string data(const std::string& name) { return std::string(GRCHASE_TEST_DATA) + "/" + name; }

struct RunResult {
    int code = -1;
    std::string out;
};

RunResult run(const std::string& args) {
    std::string cmd = std::string(GRCHASE_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult res;
    char buffer[4096];
    size_t got;
    while ((got = fread(buffer, 1, sizeof buffer, pipe)) > 0) res.out.append(buffer, got);
    int status = pclose(pipe);
    res.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return res;
}

} // namespace

TEST_CASE("determinacy verdict exit codes") {
    auto self = run("determinacy --instance " + data("selfdet.cq") + " --budget 100");
    CHECK(self.code == 0);
    CHECK(self.out.find("\"Determined\"") != std::string::npos);
    CHECK(self.out.find("\"step\":1") != std::string::npos);

    auto noviews = run("determinacy --instance " + data("noviews.cq") + " --budget 100");
    CHECK(noviews.code == 1);
    CHECK(noviews.out.find("NotDetermined") != std::string::npos);
}

TEST_CASE("parse errors exit above two") {
    auto bad = run("determinacy --instance " + data("fixture.thue") + " --budget 1");
    CHECK(bad.code > 2);
}

TEST_CASE("identical runs produce identical bytes") {
    std::string cmd = "swarm --ruleset " + data("qeta.rules") +
                      " --budget 25 --scheduler random --seed 9 --check";
    auto first = run(cmd);
    auto second = run(cmd);
    CHECK(first.code == second.code);
    CHECK(first.out == second.out);
    CHECK(first.out.find("\"violations\":[]") != std::string::npos);
}

TEST_CASE("compile then swarm finds the full red edge") {
    std::string rules = std::string(GRCHASE_TEST_TMP) + "/fixture.rules";
    auto compiled = run("compile --kind thue --input " + data("fixture.thue") + " --out " + rules);
    REQUIRE(compiled.code == 0);
    {
        std::string body = read_file(rules);
        size_t rule_lines = 0, pos = 0;
        while ((pos = body.find("rule ", pos)) != std::string::npos) {
            ++rule_lines;
            pos += 5;
        }
        CHECK(rule_lines == 9);
    }

    auto hunted = run("swarm --ruleset " + rules + " --budget 100000 --goal-label R");
    CHECK(hunted.code == 0);
    CHECK(hunted.out.find("GoalReached") != std::string::npos);

    auto unfriendly = run("compile --kind thue --input " + data("unfriendly.thue"));
    CHECK(unfriendly.code == 4);
}

TEST_CASE("compile a graph and decide reachability as determinacy") {
    std::string rules = std::string(GRCHASE_TEST_TMP) + "/edge.rules";
    auto compiled = run("compile --kind reach --input " + data("edge.graph") + " --out " + rules);
    REQUIRE(compiled.code == 0);
    {
        std::string body = read_file(rules);
        size_t rule_lines = 0, pos = 0;
        while ((pos = body.find("rule ", pos)) != std::string::npos) {
            ++rule_lines;
            pos += 5;
        }
        CHECK(rule_lines == 4);
    }
    auto verdict = run("determinacy --ruleset " + rules + " --budget 10000");
    CHECK(verdict.code == 0);
    CHECK(verdict.out.find("Determined") != std::string::npos);
}

TEST_CASE("swarm traces round-trip through their own exports") {
    std::string trace = std::string(GRCHASE_TEST_TMP) + "/qeta.jsonl";
    auto ran = run("swarm --ruleset " + data("qeta.rules") + " --budget 7 --out " + trace);
    REQUIRE(ran.code == 0);
    std::string body = read_file(trace);
    CHECK(std::count(body.begin(), body.end(), '\n') == 7);
    CHECK(body.find("\"rule\":\"q1A\"") != std::string::npos);

    auto words =
        run("words --swarm " + data("rows2.swarm") + " --max-len 2");
    CHECK(words.code == 0);
    CHECK(words.out.find("10.13") != std::string::npos);

    auto malformed = run("swarm --ruleset " + data("qeta.rules") + " --swarm " +
                         data("bad.swarm") + " --budget 5");
    CHECK(malformed.code > 2);
}
