#include <catch2/catch_amalgamated.hpp>

#include <qbcast/scenario_io.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

using namespace qbcast;

namespace {

struct CommandResult {
    int exit_code = -1;
    std::string output; // stdout and stderr combined
};

CommandResult run_cli(const std::string& args) {
    const std::string out_path = std::string(std::getenv("TMPDIR") ? std::getenv("TMPDIR")
                                                                   : "/tmp") +
                                 "/qbcast_cli_out.txt";
    const std::string cmd =
        std::string(QBCAST_CLI_PATH) + " " + args + " > " + out_path + " 2>&1";
    const int raw = std::system(cmd.c_str());
    CommandResult res;
    res.exit_code = WEXITSTATUS(raw);
    std::ifstream in(out_path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    res.output = ss.str();
    return res;
}

std::string scenario_path(const std::string& name) {
    return std::string(QBCAST_SCENARIO_DIR) + "/" + name;
}

std::string write_temp(const std::string& name, const std::string& content) {
    const std::string path = std::string("/tmp/") + name;
    std::ofstream out(path, std::ios::binary);
    out << content;
    return path;
}

} // namespace

TEST_CASE("cli validate") {
    SECTION("a shipped scenario file validates") {
        const auto res = run_cli("validate " + scenario_path("antidiscrimination_n3.json"));
        REQUIRE(res.exit_code == 0);
        REQUIRE(res.output.find("valid") != std::string::npos);
    }
    SECTION("a non-positive effect is reported with its eigenvalue") {
        // a measurement containing sigma_x itself
        const std::string path = write_temp("qbcast_bad_effect.json", R"({
  "schema_version": "1",
  "dim": 2,
  "states": [[[[0.5,0],[0,0]],[[0,0],[0.5,0]]]],
  "measurements_a": [[
    [[[0,0],[1,0]],[[1,0],[0,0]]],
    [[[1,0],[-1,0]],[[-1,0],[1,0]]]
  ]],
  "measurements_b": [[
    [[[1,0],[0,0]],[[0,0],[0,0]]],
    [[[0,0],[0,0]],[[0,0],[1,0]]]
  ]]
})");
        const auto res = run_cli("validate " + path);
        REQUIRE(res.exit_code == 1);
        REQUIRE(res.output.find("not PSD") != std::string::npos);
    }
    SECTION("malformed JSON reports the byte position") {
        const std::string path = write_temp("qbcast_broken.json", "{\"schema_version\": \"1\",");
        const auto res = run_cli("validate " + path);
        REQUIRE(res.exit_code == 2);
        REQUIRE(res.output.find("byte") != std::string::npos);
    }
    SECTION("unknown fields are rejected") {
        const std::string path = write_temp("qbcast_unknown.json",
                                            R"({"schema_version":"1","dim":2,"extra":1})");
        const auto res = run_cli("validate " + path);
        REQUIRE(res.exit_code == 2);
        REQUIRE(res.output.find("unknown field") != std::string::npos);
    }
    SECTION("malformed complex entries are rejected") {
        const std::string path = write_temp(
            "qbcast_badentry.json",
            R"({"schema_version":"1","dim":2,"states":[[[[0.5,0],[0,0]],[[0,0],0.5]]]})");
        const auto res = run_cli("validate " + path);
        REQUIRE(res.exit_code == 2);
    }
}

TEST_CASE("cli decide") {
    SECTION("n = 2 antidiscrimination is feasible with a witness digest") {
        const auto res = run_cli("decide " + scenario_path("antidiscrimination_n2.json") +
                                 " --mode broadcast --json");
        REQUIRE(res.exit_code == 0);
        REQUIRE(res.output.find("\"status\": \"Feasible\"") != std::string::npos);
        REQUIRE(res.output.find("frobenius_norm") != std::string::npos);
    }
    SECTION("n = 3 antidiscrimination exits with the infeasible code") {
        const auto res = run_cli("decide " + scenario_path("antidiscrimination_n3.json") +
                                 " --mode broadcast");
        REQUIRE(res.exit_code == 3);
        REQUIRE(res.output.find("NumericallyInfeasible") != std::string::npos);
    }
    SECTION("the depolarizing pair is compatible but not broadcastable") {
        const auto compat = run_cli("decide " + scenario_path("depolarizing_third_pair.json") +
                                    " --mode compat");
        REQUIRE(compat.exit_code == 0);
        const auto bcast = run_cli("decide " + scenario_path("depolarizing_third_pair.json") +
                                   " --mode channel-broadcast");
        REQUIRE(bcast.exit_code == 3);
    }
    SECTION("the identity pair is not even compatible") {
        const auto res = run_cli("decide " + scenario_path("identity_pair.json") +
                                 " --mode compat");
        REQUIRE(res.exit_code == 3);
    }
    SECTION("surrogate mode on the diagonal-states scenario") {
        const auto res = run_cli("decide " + scenario_path("diagonal_states_x.json") +
                                 " --mode surrogate");
        REQUIRE(res.exit_code == 0);
    }
    SECTION("mode/file mismatch exits with the parse code") {
        const auto res = run_cli("decide " + scenario_path("diagonal_states_x.json") +
                                 " --mode compat");
        REQUIRE(res.exit_code == 2);
    }
    SECTION("unknown mode exits with the parse code") {
        const auto res = run_cli("decide " + scenario_path("diagonal_states_x.json") +
                                 " --mode nonsense");
        REQUIRE(res.exit_code == 2);
    }
}

TEST_CASE("cli analyze") {
    const auto res = run_cli("analyze " + scenario_path("bloch_xyz.json") + " --json");
    REQUIRE(res.exit_code == 0);
    REQUIRE(res.output.find("\"info_complete_a\": true") != std::string::npos);
    REQUIRE(res.output.find("\"states_classical\": false") != std::string::npos);
    const auto diag = run_cli("analyze " + scenario_path("diagonal_states_x.json"));
    REQUIRE(diag.exit_code == 0);
    REQUIRE(diag.output.find("states classical: yes") != std::string::npos);
}

TEST_CASE("cli corpus") {
    SECTION("a filter narrows the run") {
        const auto res = run_cli("corpus --filter antidiscrimination --json");
        REQUIRE(res.exit_code == 0);
        int lines = 0;
        for (char c : res.output)
            if (c == '\n') ++lines;
        REQUIRE(lines == 3);
    }
    SECTION("an unmatched filter fails") {
        const auto res = run_cli("corpus --filter no_such_entry");
        REQUIRE(res.exit_code == 1);
    }
    SECTION("json output is deterministic across runs and worker counts") {
        const auto first = run_cli("corpus --filter pair_ --json --seed 5");
        const auto second = run_cli("corpus --filter pair_ --json --seed 5");
        const auto parallel = run_cli("corpus --filter pair_ --json --seed 5 --parallel 4");
        REQUIRE(first.exit_code == 0);
        REQUIRE(first.output == second.output);
        REQUIRE(first.output == parallel.output);
    }
}

TEST_CASE("scenario file round trip") {
    for (const char* name :
         {"antidiscrimination_n3.json", "depolarizing_third_pair.json", "bloch_xyz.json"}) {
        const ScenarioFile f = load_scenario_file(scenario_path(name));
        const std::string text = write_scenario_text(f);
        const ScenarioFile g = parse_scenario_text(text);
        REQUIRE(f.dim == g.dim);
        REQUIRE(f.states.size() == g.states.size());
        for (std::size_t i = 0; i < f.states.size(); ++i)
            REQUIRE(frobenius_distance(f.states[i], g.states[i]) <= 1e-15);
        REQUIRE(f.measurements_a.size() == g.measurements_a.size());
        for (std::size_t i = 0; i < f.measurements_a.size(); ++i)
            for (std::size_t e = 0; e < f.measurements_a[i].size(); ++e)
                REQUIRE(frobenius_distance(f.measurements_a[i][e], g.measurements_a[i][e]) <=
                        1e-15);
        REQUIRE(f.channels.size() == g.channels.size());
        for (const auto& [nm, rc] : f.channels)
            REQUIRE(frobenius_distance(rc.choi, g.channels.at(nm).choi) <= 1e-15);
    }
}
