#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include <catch2/catch_amalgamated.hpp>
#include <json.hpp>

#ifndef APFREE_CLI_PATH
#error "APFREE_CLI_PATH must point at the CLI binary"
#endif

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
};

RunResult run_cli(const std::string& args, const std::string& stdin_file = "") {
    std::string cmd = std::string("\"") + APFREE_CLI_PATH + "\" " + args;
    if (!stdin_file.empty()) cmd += " < \"" + stdin_file + "\"";
    cmd += " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult res;
    char buf[4096];
    std::size_t got = 0;
    while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) res.out.append(buf, got);
    const int status = pclose(pipe);
    res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return res;
}

// Environment assignments ride in front of the binary (popen uses sh -c).
RunResult run_cli_env(const std::string& env, const std::string& args) {
    std::string cmd = env + " \"" + APFREE_CLI_PATH + "\" " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult res;
    char buf[4096];
    std::size_t got = 0;
    while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) res.out.append(buf, got);
    const int status = pclose(pipe);
    res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return res;
}

json parse_envelope(const std::string& text, const char* command) {
    const json env = json::parse(text);
    REQUIRE(env.at("schema_version").get<int>() == 1);
    REQUIRE(env.at("command").get<std::string>() == command);
    REQUIRE(env.contains("parameters"));
    REQUIRE(env.contains("elapsed_ms"));
    return env.at("result");
}

std::string strip_elapsed(const std::string& text) {
    std::string out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line))
        if (line.find("\"elapsed_ms\"") == std::string::npos) out += line + "\n";
    return out;
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("apfree_cli_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    static inline int counter = 0;
};

fs::path write_file(const TempDir& dir, const char* name, const std::string& text) {
    const fs::path p = dir.path / name;
    std::ofstream(p) << text;
    return p;
}

}  // namespace

TEST_CASE("count envelopes", "[cli]") {
    {
        const auto r = run_cli("count --n 4");
        CHECK(r.exit_code == 0);
        const json result = parse_envelope(r.out, "count");
        CHECK(result.at("count").get<std::string>() == "10");
        CHECK(result.at("n").get<int>() == 4);
        CHECK(result.at("cache_hit").get<bool>() == false);
    }
    {
        const auto r = run_cli("count --n 1");
        CHECK(r.exit_code == 0);
        CHECK(parse_envelope(r.out, "count").at("count").get<std::string>() == "1");
    }
    {
        const auto r = run_cli("count --n 11 --prefix 2,1 --parity odd");
        CHECK(r.exit_code == 0);
        const json result = parse_envelope(r.out, "count");
        CHECK(result.at("count").get<std::string>() == "0");
        CHECK(result.at("prefix") == json::array({2, 1}));
        CHECK(result.at("parity").get<std::string>() == "odd");
    }
    {
        const auto r = run_cli("count --n 4 --format csv");
        CHECK(r.exit_code == 0);
        CHECK(r.out.find("n,k,parity,prefix,count,node_count,cache_hit\n") == 0);
        CHECK(r.out.find("4,3,any,,10,") != std::string::npos);
    }
    {
        const auto r = run_cli("count --n 4 --format text");
        CHECK(r.exit_code == 0);
        CHECK(r.out.find("= 10") != std::string::npos);
    }
}

TEST_CASE("count exit codes", "[cli]") {
    CHECK(run_cli("count --n 25").exit_code == 3);          // beyond default ceiling
    CHECK(run_cli("count --n 33 --max-n 40").exit_code == 3);  // beyond the engine
    CHECK(run_cli("count").exit_code == 2);                 // missing --n
    CHECK(run_cli("count --n 4 --parity sideways").exit_code == 2);
    CHECK(run_cli("count --n 4 --format yaml").exit_code == 2);
    CHECK(run_cli("count --n 4 --prefix 2,x").exit_code == 2);
    CHECK(run_cli("frobnicate").exit_code == 2);
    CHECK(run_cli("--help").exit_code == 0);
}

TEST_CASE("check verdicts and witnesses", "[cli]") {
    TempDir dir;
    {
        const auto in = write_file(dir, "free.txt", "2 4 1 3\n");
        const auto r = run_cli("check --input \"" + in.string() + "\"");
        CHECK(r.exit_code == 0);
        CHECK(parse_envelope(r.out, "check").at("status").get<std::string>() == "none");
    }
    {
        const auto in = write_file(dir, "ap.txt", "1 2 3\n");
        const auto r = run_cli("check --input \"" + in.string() + "\"");
        CHECK(r.exit_code == 1);
        const json result = parse_envelope(r.out, "check");
        CHECK(result.at("status").get<std::string>() == "found");
        CHECK(result.at("witness").at("diff").get<long long>() == 1);
    }
    {
        const auto in = write_file(dir, "ap2.txt", "1 2 4 3\n");
        const auto r = run_cli("check --input \"" + in.string() + "\"");
        CHECK(r.exit_code == 1);
        const json w = parse_envelope(r.out, "check").at("witness");
        CHECK(w.at("positions") == json::array({1, 2, 4}));
        CHECK(w.at("values") == json::array({1, 2, 3}));
    }
    {
        const auto in = write_file(dir, "odd.txt", "8 11 9 10\n");
        const auto r = run_cli("check --input \"" + in.string() + "\" --parity odd");
        CHECK(r.exit_code == 1);
        CHECK(parse_envelope(r.out, "check").at("witness").at("values") ==
              json::array({8, 9, 10}));
    }
    {
        const auto in = write_file(dir, "stdin.txt", "2 4 1 3\n");
        const auto r = run_cli("check --input -", in.string());
        CHECK(r.exit_code == 0);
    }
    {
        const auto in = write_file(dir, "bad.txt", "1 two 3\n");
        CHECK(run_cli("check --input \"" + in.string() + "\"").exit_code == 2);
    }
    CHECK(run_cli("check --input /nonexistent/path").exit_code == 2);
}

TEST_CASE("construct dumps and envelopes", "[cli]") {
    {
        const auto r = run_cli("construct --stream theorem2 --limit 3");
        CHECK(r.exit_code == 0);
        CHECK(r.out == "2\n4\n1\n");
    }
    {
        const auto r = run_cli("construct --stream threefree --limit 4");
        CHECK(r.out == "1\n2\n4\n5\n");
    }
    {
        const auto r = run_cli("construct --stream fourfree --a 3 --limit 1");
        CHECK(r.out == "1\n");
    }
    {
        const auto r = run_cli("construct --stream theorem2 --limit 3 --annotate-blocks");
        CHECK(r.exit_code == 0);
        CHECK(r.out ==
              "# sigma_1 start=2 step=2 count=2\n"
              "2\n"
              "4\n"
              "# pi_1 start=1 step=2 count=1\n"
              "1\n");
    }
    {
        const auto r = run_cli("construct --stream theorem2 --limit 3 --format json "
                               "--annotate-blocks");
        CHECK(r.exit_code == 0);
        const json result = parse_envelope(r.out, "construct");
        CHECK(result.at("values") == json::array({2, 4, 1}));
        REQUIRE(result.at("blocks").size() == 2);
        CHECK(result.at("blocks")[0].at("label").get<std::string>() == "sigma_1");
        CHECK(result.at("blocks")[1].at("first_emitted_at").get<int>() == 3);
    }
    CHECK(run_cli("construct --stream theorem2").exit_code == 2);   // missing --limit
    CHECK(run_cli("construct --stream nope --limit 1").exit_code == 2);
    CHECK(run_cli("construct --stream fourfree --a 1 --limit 1").exit_code == 2);
}

TEST_CASE("density envelopes", "[cli]") {
    {
        const auto r = run_cli("density --stream fourfree --a 2 --k-max 5");
        CHECK(r.exit_code == 0);
        const json result = parse_envelope(r.out, "density");
        CHECK(result.at("closed_form").at("upper").get<std::string>() == "2/3");
        CHECK(result.at("closed_form").at("lower").get<std::string>() == "1/3");
        bool found = false;
        for (const auto& s : result.at("samples"))
            if (s.at("n").get<long long>() == 2048) {
                found = true;
                CHECK(s.at("count").get<long long>() == 1371);
                CHECK(s.at("ratio").get<std::string>() == "1371/2048");
                CHECK(s.at("ratio_decimal").get<std::string>() == "0.669434");
            }
        CHECK(found);
    }
    {
        const auto r = run_cli("density --stream threefree --k-max 2");
        const json result = parse_envelope(r.out, "density");
        bool found = false;
        for (const auto& s : result.at("samples"))
            if (s.at("n").get<long long>() == 14) {
                found = true;
                CHECK(s.at("count").get<long long>() == 9);
            }
        CHECK(found);
    }
    {
        const auto r = run_cli("density --stream fourfree --a 2 --k-max 5 --format csv");
        CHECK(r.exit_code == 0);
        CHECK(r.out.find("n,count,ratio_decimal,ratio_fraction,at,block\n") == 0);
        CHECK(r.out.find("2048,1371,0.669434,1371/2048,block_end,5\n") != std::string::npos);
    }
    CHECK(run_cli("density --stream theorem2").exit_code == 2);
}

TEST_CASE("verify suites", "[cli]") {
    {
        const auto r = run_cli("verify --suite claim11");
        CHECK(r.exit_code == 0);
        const json result = parse_envelope(r.out, "verify");
        CHECK(result.at("passed").get<bool>());
        REQUIRE(result.at("checks").size() == 1);
        const json& c = result.at("checks")[0];
        CHECK(c.at("name").get<std::string>() == "claim11_prefix_2_1_forces_odd_3ap_n11");
        CHECK(c.at("pass").get<bool>());
        CHECK(c.at("provenance").get<std::string>() == "computed");
    }
    {
        const auto r = run_cli("verify --suite recurrences --n-max 12");
        CHECK(r.exit_code == 0);
        const json result = parse_envelope(r.out, "verify");
        CHECK(result.at("passed").get<bool>());
        bool saw_m12 = false;
        for (const auto& c : result.at("checks"))
            if (c.at("name").get<std::string>() == "recurrence_M12") {
                saw_m12 = true;
                CHECK(c.at("pass").get<bool>());
                CHECK(c.at("provenance").get<std::string>() == "paper");
            }
        CHECK(saw_m12);
    }
    {
        const auto r = run_cli("verify --suite bounds --n-max 12");
        CHECK(r.exit_code == 0);
        const json result = parse_envelope(r.out, "verify");
        CHECK(result.at("passed").get<bool>());
        bool saw_cross = false, saw_t1_10 = false;
        for (const auto& c : result.at("checks")) {
            const auto name = c.at("name").get<std::string>();
            if (name == "cross_source_agreement_8_12") saw_cross = true;
            if (name == "theorem1_10") {
                saw_t1_10 = true;
                CHECK(c.at("pass").get<bool>());
                CHECK(c.at("provenance").get<std::string>() == "paper");
            }
        }
        CHECK(saw_cross);
        CHECK(saw_t1_10);
    }
    {
        const auto r = run_cli("verify --suite oracle --n-max 5 --prefix-len 2");
        CHECK(r.exit_code == 0);
        const json result = parse_envelope(r.out, "verify");
        CHECK(result.at("passed").get<bool>());
        bool saw_sum = false;
        for (const auto& c : result.at("checks"))
            if (c.at("name").get<std::string>() == "prefix_partition_sum") saw_sum = true;
        CHECK(saw_sum);
    }
    {
        const auto r = run_cli("verify --suite claim11 --format text");
        CHECK(r.exit_code == 0);
        CHECK(r.out.find("[PASS] claim11_prefix_2_1_forces_odd_3ap_n11") != std::string::npos);
        CHECK(r.out.find("all checks passed") != std::string::npos);
    }
    CHECK(run_cli("verify --suite nonsense").exit_code == 2);
    CHECK(run_cli("verify --suite oracle --n-max 9").exit_code == 2);
}

TEST_CASE("verify streams suite passes end to end", "[cli][slow]") {
    const auto r = run_cli("verify --suite streams");
    CHECK(r.exit_code == 0);
    const json result = parse_envelope(r.out, "verify");
    CHECK(result.at("passed").get<bool>());
    CHECK(result.at("checks").size() == 6);
    for (const auto& c : result.at("checks")) {
        INFO(c.at("name").get<std::string>());
        CHECK(c.at("pass").get<bool>());
    }
}

TEST_CASE("json output is bit-identical between runs, elapsed aside", "[cli]") {
    for (const char* invocation :
         {"count --n 6", "construct --stream theorem2 --limit 20 --format json --annotate-blocks",
          "density --stream threefree --k-max 4", "verify --suite recurrences --n-max 10"}) {
        const auto a = run_cli(invocation);
        const auto b = run_cli(invocation);
        CHECK(a.exit_code == b.exit_code);
        CHECK(strip_elapsed(a.out) == strip_elapsed(b.out));
        CHECK(a.out.find("\"schema_version\": 1") != std::string::npos);
    }
}

TEST_CASE("count cache flow", "[cli]") {
    TempDir dir;
    const std::string cache = (dir.path / "counts.json").string();
    {
        const auto r = run_cli("count --n 10 --cache \"" + cache + "\"");
        CHECK(r.exit_code == 0);
        const json result = parse_envelope(r.out, "count");
        CHECK(result.at("count").get<std::string>() == "1066");
        CHECK(result.at("cache_hit").get<bool>() == false);
    }
    {
        const auto r = run_cli("count --n 10 --cache \"" + cache + "\"");
        CHECK(r.exit_code == 0);
        const json result = parse_envelope(r.out, "count");
        CHECK(result.at("count").get<std::string>() == "1066");
        CHECK(result.at("cache_hit").get<bool>() == true);
        CHECK(result.at("node_count").get<long long>() == 0);  // served, not searched
    }
    {
        // a hit is served as stored — the cache is the document of record, and
        // conflicts are caught at put time (library-level contract)
        write_file(dir, "seeded_cache.json",
                   R"({"version": 1, "entries": [)"
                   R"({"n": 4, "k": 3, "parity": "any", "prefix": [], "count": "11"}]})");
        const auto r = run_cli("count --n 4 --cache \"" +
                               (dir.path / "seeded_cache.json").string() + "\"");
        CHECK(r.exit_code == 0);
        const json result = parse_envelope(r.out, "count");
        CHECK(result.at("count").get<std::string>() == "11");
        CHECK(result.at("cache_hit").get<bool>() == true);
    }
    {
        write_file(dir, "corrupt.json", "{not json");
        CHECK(run_cli("count --n 4 --cache \"" + (dir.path / "corrupt.json").string() + "\"")
                  .exit_code == 2);
    }
}

TEST_CASE("APFREE_THREADS is honored and validated", "[cli]") {
    const auto lone = run_cli("count --n 9");
    const auto pooled = run_cli_env("APFREE_THREADS=4", "count --n 9");
    CHECK(pooled.exit_code == 0);
    const json a = parse_envelope(lone.out, "count");
    const json b = parse_envelope(pooled.out, "count");
    CHECK(a.at("count") == b.at("count"));
    CHECK(a.at("node_count") == b.at("node_count"));

    const auto autod = run_cli_env("APFREE_THREADS=0", "count --n 9");
    CHECK(autod.exit_code == 0);
    CHECK(parse_envelope(autod.out, "count").at("count") == a.at("count"));

    CHECK(run_cli_env("APFREE_THREADS=soon", "count --n 4").exit_code == 2);
    CHECK(run_cli_env("APFREE_THREADS=-2", "count --n 4").exit_code == 2);
}
