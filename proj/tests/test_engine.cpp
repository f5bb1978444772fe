#include <doctest.h>

#include "sysmodel/engine.hpp"
#include "sysmodel/parser.hpp"

#include <set>

using namespace sysmodel;

namespace {

RunResult runScenario(const ModelFile& mf) {
    Engine eng(mf.model);
    return run(eng, initialConfig(mf.model, mf.scenario),
               SchedulerPolicy::parse(mf.scenario.policy, mf.scenario.seed),
               mf.scenario.maxSteps);
}

bool traceHasLabel(const RunResult& rr, const std::string& needle) {
    for (const auto& st : rr.trace)
        if (st.choice.label.find(needle) != std::string::npos) return true;
    return false;
}

} // namespace

TEST_CASE("a tabled method runs to completion with the expected result") {
    ModelFile mf = loadModelFile(FIXTURE_DIR "/factorial.smx");
    RunResult rr = runScenario(mf);
    CHECK(rr.quiescent);
    CHECK(rr.final.state.ds.val(Oid{"Factorial", 1}, "erg") == Value::ofInt(6));
    auto outs = envMessages(rr.final);
    REQUIRE(outs.size() == 1);
    CHECK(outs[0].isReturn());
    CHECK(outs[0].asReturn().value == Value::ofInt(6)); // 3! = 6

    CHECK(traceHasLabel(rr, "assign erg := 1"));
    CHECK(traceHasLabel(rr, "call this.mult"));
    CHECK(traceHasLabel(rr, "guard (n <= 1)"));
}

TEST_CASE("statement bodies compile to the same observable behavior") {
    ModelFile tab = loadModelFile(FIXTURE_DIR "/factorial.smx");
    ModelFile stm = loadModelFile(FIXTURE_DIR "/factorial_stmt.smx");
    RunResult a = runScenario(tab);
    RunResult b = runScenario(stm);
    CHECK(b.quiescent);
    CHECK(a.final.state.ds.val(Oid{"Factorial", 1}, "erg") ==
          b.final.state.ds.val(Oid{"Factorial", 1}, "erg"));
    auto ea = envMessages(a.final), eb = envMessages(b.final);
    REQUIRE(ea.size() == eb.size());
    CHECK(ea[0].asReturn().value == eb[0].asReturn().value);
}

TEST_CASE("method compilation yields structurally valid transition tables") {
    ModelFile stm = loadModelFile(FIXTURE_DIR "/factorial_stmt.smx");
    const MethodDef* mth = stm.model.resolveImpl("Factorial", "fac");
    REQUIRE(mth != nullptr);
    CfstsDef cf = compileMethodBody(stm.model, *mth);
    CHECK(validateCfsts(stm.model, *mth, cf).empty());
    CHECK(!cf.finish.empty());
    CHECK(!cf.waitReturn.empty()); // the inner call introduces a wait state

    ModelFile tab = loadModelFile(FIXTURE_DIR "/factorial.smx");
    const MethodDef* tm = tab.model.resolveImpl("Factorial", "fac");
    REQUIRE(tm != nullptr);
    REQUIRE(tm->table.has_value());
    CHECK(validateCfsts(tab.model, *tm, *tm->table).empty());
    Engine eng(tab.model);
    CHECK(&eng.tableFor("Factorial", "fac") == &eng.tableFor("Factorial", "fac")); // cached
}

TEST_CASE("initial configurations put scenario calls in flight") {
    ModelFile mf = loadModelFile(FIXTURE_DIR "/factorial.smx");
    SysConfig cfg = initialConfig(mf.model, mf.scenario);
    REQUIRE(cfg.buf.size() == 1);
    CHECK(cfg.buf.fst().isCall());
    CHECK(cfg.buf.fst().asCall().op == "fac");
    CHECK(cfg.buf.fst().sender() == Oid::env());
    CHECK(cfg.state.ds.has(Oid{"Factorial", 1}));
}

TEST_CASE("system successors are canonically ordered and reproducible") {
    ModelFile mf = loadModelFile(FIXTURE_DIR "/factorial_race.smx");
    Engine eng(mf.model);
    SysConfig cfg = initialConfig(mf.model, mf.scenario);
    auto s1 = sysStep(eng, cfg);
    auto s2 = sysStep(eng, cfg);
    REQUIRE(s1.size() == s2.size());
    CHECK(s1.size() > 1); // two pending calls can be delivered in either order
    for (std::size_t i = 0; i < s1.size(); ++i) {
        CHECK(s1[i].choice.key() == s2[i].choice.key());
        CHECK(s1[i].cfg == s2[i].cfg);
    }
}

TEST_CASE("bounded exploration is exhaustive and deterministic on the race") {
    ModelFile mf = loadModelFile(FIXTURE_DIR "/factorial_race.smx");
    Engine eng(mf.model);
    SysConfig cfg = initialConfig(mf.model, mf.scenario);
    ExploreResult r1 = explore(eng, cfg, 60);
    CHECK(r1.exhausted);
    CHECK(r1.terminals.size() > 1); // scheduling matters
    std::set<std::string> digests;
    for (const auto& t : r1.terminals) digests.insert(t.digest);
    CHECK(digests.size() == r1.terminals.size()); // terminals are distinct states

    ExploreResult r2 = explore(eng, cfg, 60);
    REQUIRE(r2.terminals.size() == r1.terminals.size());
    for (std::size_t i = 0; i < r1.terminals.size(); ++i)
        CHECK(r1.terminals[i].digest == r2.terminals[i].digest);
}

TEST_CASE("object views project and replace losslessly") {
    ModelFile mf = loadModelFile(FIXTURE_DIR "/calendar.smx");
    Engine eng(mf.model);
    SysConfig cfg = initialConfig(mf.model, mf.scenario);
    Oid cal{"Calendar", 1};
    OState os = projectState(cfg.state, cal);
    CHECK(os.inst.self == cal);
    CHECK(replaceState(cfg.state, cal, os) == cfg.state);

    GroupState g = groupState(cfg.state, {cal, Oid{"DateTime", 1}});
    CHECK(g.size() == 2);
    GroupState merged = groupOverride(groupState(cfg.state, {cal}), g);
    CHECK(merged == g);
}

TEST_CASE("configuration digests are stable") {
    ModelFile mf = loadModelFile(FIXTURE_DIR "/factorial.smx");
    SysConfig cfg = initialConfig(mf.model, mf.scenario);
    CHECK(configDigest(cfg) == configDigest(cfg));
    CHECK(configKey(cfg) == configKey(cfg));
    RunResult rr = runScenario(mf);
    CHECK(configDigest(rr.final) != configDigest(cfg));
}

TEST_CASE("scripted scheduling replays recorded choices") {
    ModelFile mf = loadModelFile(FIXTURE_DIR "/factorial.smx");
    Engine eng(mf.model);
    RunResult ref = runScenario(mf);
    SchedulerPolicy scripted;
    scripted.k = SchedulerPolicy::K::Scripted;
    for (const auto& st : ref.trace) scripted.script.push_back(st.choice.key());
    RunResult replay = run(eng, initialConfig(mf.model, mf.scenario), scripted,
                           mf.scenario.maxSteps);
    CHECK(replay.final == ref.final);
}
