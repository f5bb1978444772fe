#include <doctest.h>

#include <cstdio>
#include <string>
#include <sys/wait.h>

namespace {

struct CmdResult {
    int exitCode;
    std::string out;
};

CmdResult runCmd(const std::string& args) {
    std::string cmd = std::string(SYSMOD_BIN) + " " + args + " 2>&1";
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    std::string out;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, n);
    int status = pclose(p);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

bool contains(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

std::string fx(const std::string& name) { return std::string(FIXTURE_DIR) + "/" + name; }

} // namespace

TEST_CASE("validate accepts the bundled fixtures") {
    for (const char* f : {"calendar.smx", "factorial.smx", "factorial_stmt.smx",
                          "factorial_race.smx", "echo.smx", "team.smx"}) {
        CmdResult r = runCmd("validate " + fx(f));
        CHECK(r.exitCode == 0);
        CHECK(contains(r.out, "ok:"));
        CHECK(!contains(r.out, "violation"));
    }
}

TEST_CASE("run prints a trace, the outputs and the final store") {
    CmdResult r = runCmd("run " + fx("factorial.smx"));
    CHECK(r.exitCode == 0);
    CHECK(contains(r.out, "quiescent: yes"));
    CHECK(contains(r.out, "return(env, 6, Factorial#1, th1)"));
    CHECK(contains(r.out, "erg = 6"));
    CHECK(contains(r.out, "step 1:"));
}

TEST_CASE("run substitutes scenario call arguments by parameter name") {
    CmdResult r = runCmd("run " + fx("factorial.smx") + " --arg n=5");
    CHECK(r.exitCode == 0);
    CHECK(contains(r.out, "erg = 120"));
    CmdResult bad = runCmd("run " + fx("factorial.smx") + " --arg nope=5");
    CHECK(bad.exitCode == 2);
    CHECK(contains(bad.out, "error:"));
}

TEST_CASE("snapshot prints the store before and after running") {
    CmdResult before = runCmd("snapshot " + fx("calendar.smx"));
    CHECK(before.exitCode == 0);
    CHECK(contains(before.out, "object Calendar#1"));
    CHECK(contains(before.out, "time = 456"));
    CmdResult after = runCmd("snapshot " + fx("calendar.smx") + " --at 100");
    CHECK(after.exitCode == 0);
    CHECK(contains(after.out, "date = 200"));
    CHECK(contains(after.out, "time = 300"));
}

TEST_CASE("explore reports terminals and exhaustion") {
    CmdResult r = runCmd("explore " + fx("factorial_race.smx") + " --depth 60");
    CHECK(r.exitCode == 0);
    CHECK(contains(r.out, "exhausted: yes"));
    CHECK(contains(r.out, "terminal "));
}

TEST_CASE("law suites run from the command line") {
    CmdResult r = runCmd("laws --suite kernel --n 50");
    CHECK(r.exitCode == 0);
    CHECK(contains(r.out, "laws hold"));
    CmdResult bad = runCmd("laws --suite nope");
    CHECK(bad.exitCode == 2);
}

TEST_CASE("abstract prints the timed behavior of one object") {
    CmdResult r = runCmd("abstract " + fx("echo.smx") + " --oid e --horizon 3");
    CHECK(r.exitCode == 0);
    CHECK(contains(r.out, "timeGuarded: yes"));
    CHECK(contains(r.out, "properlyTimed: yes"));
    CHECK(contains(r.out, "deterministic: yes"));
}

TEST_CASE("errors surface with a nonzero exit code") {
    CmdResult r = runCmd("validate /no/such/file.smx");
    CHECK(r.exitCode == 2);
    CHECK(contains(r.out, "error:"));
    CmdResult noArgs = runCmd("");
    CHECK(noArgs.exitCode != 0);
}
