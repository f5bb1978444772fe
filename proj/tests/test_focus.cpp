#include <doctest.h>

#include "sysmodel/focus.hpp"
#include "sysmodel/laws.hpp"
#include "sysmodel/parser.hpp"

using namespace sysmodel;

TEST_CASE("time slices merge per channel with the right side winning") {
    TimeSlice a, b;
    a.add("c", "m1");
    a.add("d", "m2");
    b.add("c", "m3");
    TimeSlice m = sliceMerge(a, b);
    CHECK(m.on("c") == std::vector<std::string>{"m3"});
    CHECK(m.on("d") == std::vector<std::string>{"m2"});
    TimeSlice r = sliceRestrict(m, {"d"});
    CHECK(r.on("d") == std::vector<std::string>{"m2"});
    CHECK(r.on("c").empty());
}

TEST_CASE("histories restrict, merge and truncate channel-wise") {
    TimedHistory h = histEmpty({"c", "d"}, 3);
    h.slices[0].add("c", "m");
    h.slices[2].add("d", "n");
    CHECK(h.horizon() == 3);

    TimedHistory hc = histRestrict(h, {"c"});
    CHECK(hc.channels == std::set<std::string>{"c"});
    CHECK(hc.slices[0].on("c") == std::vector<std::string>{"m"});
    CHECK(hc.slices[2].empty());

    TimedHistory down = histDown(h, 2);
    CHECK(down.horizon() == 2);
    CHECK(down.slices[0].on("c") == std::vector<std::string>{"m"});

    TimedHistory merged = histMerge(histRestrict(h, {"c"}), histRestrict(h, {"d"}));
    CHECK(merged == h);
}

TEST_CASE("message distribution sorts a flat sequence onto channels") {
    std::map<std::string, std::function<bool(const std::string&)>> csort;
    csort["calls"] = [](const std::string& m) { return m.rfind("call", 0) == 0; };
    csort["rets"] = [](const std::string& m) { return m.rfind("ret", 0) == 0; };
    TimeSlice s = cdist(csort, {"call1", "ret1", "call2"});
    CHECK(s.on("calls") == std::vector<std::string>{"call1", "call2"});
    CHECK(s.on("rets") == std::vector<std::string>{"ret1"});
}

TEST_CASE("slice and history enumeration matches the alphabet bounds") {
    ChannelAlphabet alpha;
    alpha.messages["c"] = {"a", "b"};
    alpha.maxPerSlot = 1;
    auto slices = enumSlices({"c"}, alpha);
    CHECK(slices.size() == 3); // empty, a, b
    CHECK(enumHistories({"c"}, alpha, 2).size() == 9);
    CHECK(enumHistories({}, alpha, 2).size() == 1); // the silent history
}

TEST_CASE("a constant emitter is a deterministic time-guarded machine") {
    MachineSpec spec;
    spec.states = 1;
    spec.symbols = {"m"};
    spec.table = {{{{0, 0}}, {{0, 0}}}}; // always emit m, ignore the input
    TstsDef a = mkMachine(spec, "x", "y");
    CHECK(validateTsts(a, 3).empty());
    CHECK(isDeterministicTsts(a, 3));
    BehaviorTable f = abstraction(a, 3);
    CHECK(isComplete(f));
    CHECK(isDeterministic(f));
    CHECK(isTimeGuarded(f));
    CHECK(isProperlyTimed(f));
    CHECK(realizableBounded(f));
}

TEST_CASE("the zero-delay copier is properly timed but not time guarded") {
    TstsDef c = zeroDelayCopier("x", "y", {"m"});
    BehaviorTable f = abstraction(c, 3);
    CHECK(isComplete(f));
    CHECK(isProperlyTimed(f));
    CHECK(!isTimeGuarded(f));
}

TEST_CASE("behavior refinement is pointwise set inclusion") {
    MachineSpec nd;
    nd.states = 1;
    nd.symbols = {"m"};
    nd.table = {{{{0, 0}, {0, -1}}, {{0, 0}, {0, -1}}}}; // may emit or stay silent
    BehaviorTable f = abstraction(mkMachine(nd, "x", "y"), 2);
    MachineSpec det;
    det.states = 1;
    det.symbols = {"m"};
    det.table = {{{{0, 0}}, {{0, 0}}}};
    BehaviorTable g = abstraction(mkMachine(det, "x", "y"), 2);
    CHECK(refines(f, g));
    CHECK(!refines(g, f));
    CHECK(refines(f, f));
}

TEST_CASE("composing with feedback solves the fixpoint consistently") {
    // two zero-delay copiers wired head to tail: every channel is internal
    BehaviorTable c1 = abstraction(zeroDelayCopier("a", "b", {"m"}), 2);
    BehaviorTable c2 = abstraction(zeroDelayCopier("b", "a", {"m"}), 2);
    BehaviorTable loop = behaviorCompose(c1, c2);
    CHECK(loop.inC.empty());
    CHECK(loop.outC.empty());
    REQUIRE(loop.table.size() == 1);
    CHECK(loop.table.begin()->second.size() == 1); // only the consistent solution
}

TEST_CASE("machine composition agrees with behavior composition") {
    MachineSpec sa;
    sa.states = 1;
    sa.symbols = {"m"};
    sa.table = {{{{0, 0}}, {{0, 0}}}};
    MachineSpec sb;
    sb.states = 2;
    sb.symbols = {"m"};
    sb.table = {{{{1, -1}}, {{1, -1}}}, {{{0, 0}}, {{0, 0}}}};
    TstsDef a = mkMachine(sa, "x", "y");
    TstsDef b = mkMachine(sb, "y", "z");
    TstsDef c = tstsCompose(a, b);
    CHECK(c.inC == std::set<std::string>{"x"});
    CHECK(c.outC == std::set<std::string>{"z"});
    CHECK(validateTsts(c, 4).empty());
    CHECK(abstraction(c, 4) == behaviorCompose(abstraction(a, 4), abstraction(b, 4)));
}

TEST_CASE("object channel interfaces and group hiding") {
    ModelFile mf = loadModelFile(FIXTURE_DIR "/calendar.smx");
    Oid cal{"Calendar", 1}, dt1{"DateTime", 1};
    CHECK(inChannelsOf(mf.model, cal) == std::set<std::string>{"ccin", "d2c"});
    CHECK(outChannelsOf(mf.model, cal) == std::set<std::string>{"c2d", "cout"});
    CHECK(groupInChannels(mf.model, {cal, dt1}) == std::set<std::string>{"ccin"});
    CHECK(groupOutChannels(mf.model, {cal, dt1}) == std::set<std::string>{"cout"});
    CHECK(checkChannelDiscipline(mf.model).empty());
}

TEST_CASE("an event-driven object translates to a valid timed machine") {
    ModelFile mf = loadModelFile(FIXTURE_DIR "/echo.smx");
    Engine eng(mf.model);
    const Instance* e = mf.scenario.findObject("e");
    REQUIRE(e != nullptr);
    TstsDef a = estsToTsts(eng, e->self, estsInitial(*e));
    CHECK(validateTsts(a, 4).empty());

    BehaviorTable f = abstraction(a, 3);
    CHECK(isComplete(f));
    CHECK(isDeterministic(f));
    CHECK(isTimeGuarded(f));

    // a call in slot 0 is answered in slot 1
    TimedHistory in = histEmpty({"cin"}, 3);
    in.slices[0].add("cin", "call(Echo#1, ping, (0), env, th)");
    const auto& outs = f.at(in);
    REQUIRE(outs.size() == 1);
    const TimedHistory& out = *outs.begin();
    CHECK(out.slices[0].empty());
    CHECK(out.slices[1].on("cout") ==
          std::vector<std::string>{"return(env, 1, Echo#1, th)"});
}

TEST_CASE("single-tick translation logs exactly one tick per transition") {
    ModelFile mf = loadModelFile(FIXTURE_DIR "/echo.smx");
    Engine eng(mf.model);
    const Instance* e = mf.scenario.findObject("e");
    REQUIRE(e != nullptr);
    EstsToTstsOptions opts;
    opts.oneTickPerSlot = true;
    TstsDef a = estsToTsts(eng, e->self, estsInitial(*e), opts);
    CHECK(validateTsts(a, 4).empty());
    (void)abstraction(a, 4); // drive the machine so the log fills up
    REQUIRE(a.microLog);
    REQUIRE(!a.microLog->empty());
    for (const auto& [key, micro] : *a.microLog) {
        int ticks = 0;
        for (const auto& step : micro)
            if (step.rfind("tick(", 0) == 0) ++ticks;
        CHECK(ticks == 1);
    }
}

TEST_CASE("the whole-model bundle assembles per-object and composite behaviors") {
    ModelFile mf = loadModelFile(FIXTURE_DIR "/echo.smx");
    SysmodBundle bundle = assembleSysmod(mf, 3);
    CHECK(bundle.modelReport.ok());
    CHECK(bundle.storeReport.ok());
    CHECK(bundle.channelReport.empty());
    CHECK(bundle.behaviors.count(Oid{"Echo", 1}) == 1);
    CHECK(bundle.hasComposite);
}
