#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

#include <json.hpp>

using nlohmann::json;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
};

// Runs the binary with stderr folded in; callers split on it only when a test
// needs the alarm text.
RunResult run(const std::string& args, bool merge_stderr = false) {
    std::string cmd = std::string(ZEROSUM_BIN) + " " + args;
    cmd += merge_stderr ? " 2>&1" : " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult r;
    char buf[4096];
    size_t got;
    while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
    int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

json run_json(const std::string& args, int expect_exit = 0) {
    RunResult r = run(args + " --json");
    CHECK(r.exit_code == expect_exit);
    return json::parse(r.out);
}

std::string temp_path(const std::string& name) {
    return std::string("/tmp/zerosum_cli_test_") + name;
}

}  // namespace

TEST_CASE("davenport on the order-6 group") {
    json d = run_json("davenport metacyclic:p=2,m=3,r=2");
    CHECK(d.at("constant") == "d");
    CHECK(d.at("value") == 3);
    CHECK(d.at("status") == "exact");
    CHECK(d.at("group") == "metacyclic:p=2,m=3,r=2");
    CHECK(d.at("audit").at("violations") == 0);
    CHECK(d.at("audit").at("checked").get<long>() > 0);
    CHECK(d.at("witness").at("kind") == "product_one_free");
    CHECK(d.at("witness").at("length") == 3);
    CHECK(d.at("elapsed_ms").is_null());
    CHECK(d.at("nodes").get<long>() > 0);
}

TEST_CASE("egz reports the d + order identity") {
    json e = run_json("egz cyclic:4 --exact");
    CHECK(e.at("constant") == "E");
    CHECK(e.at("value") == 7);
    CHECK(e.at("status") == "exact");
    CHECK(e.at("d_value") == 3);
    CHECK(e.at("group_order") == 4);
    CHECK(e.at("witness").at("kind") == "no_product_one_of_group_length");
    CHECK(e.at("witness").at("length") == 6);
    CHECK(e.at("witness").at("required_length") == 4);
}

TEST_CASE("exit codes by failure class") {
    CHECK(run("davenport metacyclic:p=4,m=3,r=2").exit_code == 2);
    CHECK(run("davenport nonsense:5").exit_code == 2);
    CHECK(run("egz").exit_code == 2);  // missing group argument
    CHECK(run("davenport cyclic:9 --budget-nodes 5").exit_code == 3);
    CHECK(run("extract --group cyclic:6 --sequence g1^9").exit_code == 2);
}

TEST_CASE("budget exhaustion still reports the partial result") {
    RunResult r = run("davenport cyclic:9 --budget-nodes 5 --json");
    CHECK(r.exit_code == 3);
    json d = json::parse(r.out);
    CHECK(d.at("status") == "lower-bound-only");
    CHECK(d.at("value").get<int>() >= 1);
}

TEST_CASE("extract single sequence trace") {
    json t = run_json(
        "extract --group metacyclic:p=2,m=3,r=2 --sequence \"g1^2 * g3^2 * g0^4 * g5\"");
    CHECK(t.at("case") == "1");
    CHECK(t.at("verified") == true);
    CHECK(t.at("witness").at("kind") == "ordered_product_one");
    CHECK(t.at("witness").at("terms").size() == 6);
    CHECK(t.at("witness").at("product") == "1");
    CHECK(t.at("witness").at("required_length") == 6);
    CHECK(t.at("blocks").is_array());
    CHECK(t.at("selection").is_array());
}

TEST_CASE("extract random trials all verify") {
    json t = run_json("extract --group metacyclic:p=3,m=7,r=2 --random 25 --seed 1");
    CHECK(t.at("samples") == 25);
    CHECK(t.at("verified") == 25);
    CHECK(t.at("sequence_length") == 29);
    CHECK(t.at("cases").is_object());
}

TEST_CASE("kneser instances all hold") {
    json k = run_json("kneser --group abelian:4x2 --random 50 --seed 7");
    CHECK(k.at("instances") == 50);
    CHECK(k.at("holds") == 50);
    CHECK(k.at("results").size() == 50);
    const json& first = k.at("results").at(0);
    CHECK(first.contains("subsets"));
    CHECK(first.contains("m"));
    CHECK(first.contains("exact"));
    CHECK(first.contains("stab_order"));
    CHECK(first.contains("bound"));
    CHECK(first.contains("holds"));
    CHECK(first.contains("tight"));

    CHECK(run("kneser --group metacyclic:p=2,m=3,r=2 --random 5").exit_code == 2);
}

TEST_CASE("verification campaigns run clean") {
    json remark = run_json("verify remark-m --pm-max 60");
    CHECK(remark.at("failures") == 0);
    CHECK(remark.at("instances").get<long>() > 0);

    json basic = run_json("verify lemma-basic --pm-max 30");
    CHECK(basic.at("failures") == 0);

    json c1 = run_json("verify lemma-conj1 --samples 50 --seed 3");
    CHECK(c1.at("failures") == 0);

    json c2 = run_json("verify lemma-conj2 --samples 20 --seed 3");
    CHECK(c2.at("failures") == 0);

    json zf = run_json("verify lemma-zerofree");
    CHECK(zf.at("failures") == 0);

    json kn = run_json("verify kneser --samples 100 --seed 5");
    CHECK(kn.at("failures") == 0);

    json th = run_json("verify theorem --samples 40 --seed 5");
    CHECK(th.at("failures") == 0);

    CHECK(run("verify lemma-unknown").exit_code == 2);
}

TEST_CASE("witness files round-trip through verify-witness") {
    json d = run_json("davenport metacyclic:p=2,m=3,r=2");
    std::string path = temp_path("w1.json");
    {
        std::ofstream f(path);
        f << d.at("witness").dump();
    }
    CHECK(run("verify-witness " + path).exit_code == 0);

    // The whole result works too; the checker descends into .witness.
    std::string full = temp_path("w2.json");
    {
        std::ofstream f(full);
        f << d.dump();
    }
    CHECK(run("verify-witness " + full).exit_code == 0);

    json t = run_json(
        "extract --group metacyclic:p=3,m=7,r=2 --sequence \"g7 * g8 * g14 * g15 * g1^25\"");
    std::string ow = temp_path("w3.json");
    {
        std::ofstream f(ow);
        f << t.at("witness").dump();
    }
    CHECK(run("verify-witness " + ow).exit_code == 0);

    // Tampering flips the verdict to 4.
    json bad = t.at("witness");
    bad["terms"][0] = "y";
    std::string badp = temp_path("w4.json");
    {
        std::ofstream f(badp);
        f << bad.dump();
    }
    RunResult r = run("verify-witness " + badp, true);
    CHECK(r.exit_code == 4);
    CHECK(r.out.find("INVALID") != std::string::npos);
}

TEST_CASE("identical seeds produce byte-identical JSON") {
    const char* cmds[] = {
        "davenport metacyclic:p=3,m=7,r=2 --json",
        "egz metacyclic:p=2,m=3,r=2 --json",
        "extract --group metacyclic:p=3,m=7,r=2 --random 10 --seed 9 --json",
        "kneser --group cyclic:12 --random 20 --seed 4 --json",
        "verify kneser --samples 50 --seed 2 --json",
        "sweep --pm-max 15 --json",
    };
    for (const char* cmd : cmds) {
        RunResult a = run(cmd);
        RunResult b = run(cmd);
        CHECK(a.exit_code == 0);
        CHECK(a.out == b.out);
    }
    // Thread count must not change the bytes either.
    RunResult one = run("extract --group metacyclic:p=3,m=7,r=2 --random 10 --seed 9 --jobs 1 --json");
    RunResult four = run("extract --group metacyclic:p=3,m=7,r=2 --random 10 --seed 9 --jobs 4 --json");
    CHECK(one.out == four.out);
}

TEST_CASE("sweep emits the same data as CSV and JSON") {
    json s = run_json("sweep --pm-max 21 --budget-nodes 1000000");
    RunResult csv = run("sweep --pm-max 21 --budget-nodes 1000000 --csv");
    CHECK(csv.exit_code == 0);

    // Header plus one line per row.
    std::vector<std::string> lines;
    std::string cur;
    for (char c : csv.out) {
        if (c == '\n') {
            if (!cur.empty()) lines.push_back(cur);
            cur.clear();
        } else
            cur += c;
    }
    REQUIRE(!lines.empty());
    CHECK(lines[0] == "p,m,r,order,d_formula,d_value,d_status,d_nodes,e_formula,e_witness_length");
    REQUIRE(lines.size() == s.at("rows").size() + 1);
    for (size_t i = 0; i < s.at("rows").size(); ++i) {
        const json& row = s.at("rows").at(i);
        std::string expect = std::to_string(row.at("p").get<long>()) + "," +
                             std::to_string(row.at("m").get<long>()) + "," +
                             std::to_string(row.at("r").get<long>()) + "," +
                             std::to_string(row.at("order").get<long>()) + "," +
                             std::to_string(row.at("d_formula").get<long>()) + "," +
                             std::to_string(row.at("d_value").get<long>()) + "," +
                             row.at("d_status").get<std::string>() + "," +
                             std::to_string(row.at("d_nodes").get<long>()) + "," +
                             std::to_string(row.at("e_formula").get<long>()) + "," +
                             std::to_string(row.at("e_witness_length").get<long>());
        CHECK(lines[i + 1] == expect);
        // The formula d = m+p-2 is exact on every exhaustively solved row.
        if (row.at("d_status") == "exact") CHECK(row.at("d_value") == row.at("d_formula"));
    }
}

TEST_CASE("output redirection via --out") {
    std::string path = temp_path("out.json");
    std::remove(path.c_str());
    RunResult r = run("davenport cyclic:5 --json --out " + path);
    CHECK(r.exit_code == 0);
    CHECK(r.out.empty());
    std::ifstream f(path);
    REQUIRE(f.good());
    json d = json::parse(f);
    CHECK(d.at("value") == 4);
}

TEST_CASE("timings flag is the only source of wall-clock output") {
    json with = run_json("davenport cyclic:5 --timings");
    CHECK(with.at("elapsed_ms").is_number());
    json without = run_json("davenport cyclic:5");
    CHECK(without.at("elapsed_ms").is_null());
}

TEST_CASE("help and unknown flags") {
    CHECK(run("--help", true).exit_code == 0);
    CHECK(run("davenport --frobnicate cyclic:5", true).exit_code == 2);
    CHECK(run("", true).exit_code == 2);  // a subcommand is required
}
