#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

#ifndef FINSLER_BIN
#error "FINSLER_BIN must point at the finsler executable"
#endif

namespace {

struct RunResult {
    int status = -1;
    std::string output;  // stdout and stderr interleaved
};

RunResult run(const std::string& args) {
    std::string cmd = std::string(FINSLER_BIN) + " " + args + " 2>&1";
    RunResult r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    while (size_t got = fread(buf, 1, sizeof buf, pipe)) r.output.append(buf, got);
    int rc = pclose(pipe);
    r.status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    return r;
}

std::string write_temp(const std::string& name, const std::string& content) {
    std::string path = std::string("cli_test_") + name;
    std::ofstream(path) << content;
    return path;
}

}  // namespace

TEST_CASE("classify exits 0 regardless of verdicts") {
    RunResult r = run("classify --builtin najafi --seed 42 --sites 15");
    CHECK(r.status == 0);
    CHECK(r.output.find("dually_flat") != std::string::npos);
    CHECK(r.output.find("h_berwald") != std::string::npos);
    CHECK(r.output.find("fails") != std::string::npos);  // h_berwald fails
}

TEST_CASE("classify emits a deterministic structured report") {
    std::string args = "classify --builtin ex37 --seed 7 --sites 10 --format report";
    RunResult a = run(args);
    RunResult b = run(args);
    CHECK(a.status == 0);
    CHECK(a.output == b.output);
    CHECK(a.output.find("\"metric\"") != std::string::npos);
    CHECK(a.output.find("\"definition_hash\"") != std::string::npos);
}

TEST_CASE("classify reads metric definition files") {
    std::string path = write_temp(
        "ok.fm", "dimension = 2\nmetric = \"sqrt(y1^2 + y2^2)\"\n");
    RunResult r = run("classify --metric " + path + " --sites 10");
    CHECK(r.status == 0);
    CHECK(r.output.find("holds") != std::string::npos);
    std::remove(path.c_str());
}

TEST_CASE("syntax errors exit 2 with a location") {
    std::string path = write_temp(
        "bad.fm", "dimension = 2\nmetric = \"y1 + + y2\"\n");
    RunResult r = run("classify --metric " + path);
    CHECK(r.status == 2);
    CHECK(r.output.find("line") != std::string::npos);
    std::remove(path.c_str());
    RunResult missing = run("classify --metric does_not_exist.fm");
    CHECK(missing.status == 2);
}

TEST_CASE("eval prints tensors with 17 significant digits") {
    // G = (0, 0, 0, 1) up to roundoff in the last printed digits
    RunResult r = run("eval --builtin ex37 --x 0,0,0,1 --y 1,1,1,2 --q G");
    CHECK(r.status == 0);
    REQUIRE(r.output.rfind("G = (0, 0, 0, ", 0) == 0);
    CHECK(std::stod(r.output.substr(14)) == doctest::Approx(1.0).epsilon(1e-12));
    RunResult h = run("eval --builtin ex51 --x 0,0 --y 3,4 --q H");
    CHECK(h.status == 0);
    CHECK(h.output.find("7.5") != std::string::npos);
    CHECK(h.output.find("10") != std::string::npos);
    RunResult f = run("eval --builtin ex37 --x 0,0,0,1 --y 1,1,1,2 --q F");
    CHECK(f.status == 0);
    // 17 significant digits of sqrt(sqrt(3) + 4)
    CHECK(f.output.find("2.39417017097132") != std::string::npos);
}

TEST_CASE("eval rejects invalid points with exit 2") {
    RunResult zero = run("eval --builtin euclidean_2d --x 0,0 --y 0,0 --q F");
    CHECK(zero.status == 2);
    RunResult dim = run("eval --builtin euclidean_2d --x 0 --y 1 --q F");
    CHECK(dim.status == 2);
    // ex37 needs x4 > 0
    RunResult dom = run("eval --builtin ex37 --x 0,0,0,-1 --y 1,1,1,2 --q F");
    CHECK(dom.status == 2);
}

TEST_CASE("verify passes on the library and respects tolerances") {
    RunResult ok = run("verify --sites 5");
    CHECK(ok.status == 0);
    CHECK(ok.output.find("pass") != std::string::npos);
    // an impossible tolerance pushes the finite-difference suite below the
    // roundoff floor and must flip the exit code
    RunResult tight = run("verify --sites 3 --tol 1e-15");
    CHECK(tight.status == 1);
}

TEST_CASE("report can be written to a file") {
    std::string path = "cli_test_report.json";
    RunResult r = run("classify --builtin euclidean_2d --sites 5 --format report --out " +
                      path);
    CHECK(r.status == 0);
    std::ifstream in(path);
    REQUIRE(in.good());
    std::string content((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
    CHECK(content.find("\"predicates\"") != std::string::npos);
    std::remove(path.c_str());
}
