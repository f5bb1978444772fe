#include <doctest.h>

#include "sysmodel/control.hpp"
#include "sysmodel/parser.hpp"

using namespace sysmodel;

namespace {

Frame mkFrame(Oid callee, const std::string& op, Oid caller, int mark) {
    Frame f;
    f.callee = std::move(callee);
    f.op = op;
    f.pc = "P1";
    f.caller = std::move(caller);
    f.vars.set("m", Value::ofInt(mark));
    return f;
}

} // namespace

TEST_CASE("central stores split by object and reassemble uniquely") {
    CentralControlStore ccs;
    FrameStack t1;
    t1.push(mkFrame(Oid{"Calendar", 1}, "f", Oid::env(), 1));
    t1.push(mkFrame(Oid{"DateTime", 1}, "g", Oid{"Calendar", 1}, 2));
    t1.push(mkFrame(Oid{"Calendar", 1}, "h", Oid{"DateTime", 1}, 3));
    ccs.setStack("t1", t1);
    FrameStack t2;
    t2.push(mkFrame(Oid{"User", 1}, "k", Oid::env(), 4));
    ccs.setStack("t2", t2);
    CHECK(ccs.check().empty());

    ControlStore cs = decentralize(ccs);
    CHECK(cs.stack(Oid{"Calendar", 1}, "t1").size() == 2);
    CHECK(cs.stack(Oid{"DateTime", 1}, "t1").size() == 1);
    CHECK(cs.stack(Oid{"User", 1}, "t2").size() == 1);
    CHECK(cs.stack(Oid{"User", 1}, "t1").empty());

    CHECK(centralize(cs) == ccs);
    CHECK(decentralize(centralize(cs)) == cs);
}

TEST_CASE("a broken caller chain is rejected") {
    CentralControlStore ccs;
    FrameStack st;
    st.push(mkFrame(Oid{"Calendar", 1}, "f", Oid{"User", 1}, 1)); // bottom caller not env
    ccs.setStack("t1", st);
    CHECK(!ccs.check().empty());
}

TEST_CASE("centralize fails when no interleaving satisfies the chain") {
    ControlStore cs;
    FrameStack a, b;
    a.push(mkFrame(Oid{"A", 1}, "f", Oid::env(), 1));
    b.push(mkFrame(Oid{"B", 1}, "g", Oid::env(), 2)); // second bottom frame on one thread
    cs.setStack(Oid{"A", 1}, "t1", a);
    cs.setStack(Oid{"B", 1}, "t1", b);
    CHECK_THROWS_AS((void)centralize(cs), Error);
}

TEST_CASE("call construction checks the operation signature") {
    ModelFile mf = loadModelFile(FIXTURE_DIR "/calendar.smx");
    TupleValue ok;
    ok.items = {Value::ofInt(1), Value::ofInt(2)};
    Message m = mkCall(mf.model, Oid{"Calendar", 1}, "updateTime", ok, Oid::env(), "th1");
    CHECK(m.isCall());
    CHECK(m.receiver() == Oid{"Calendar", 1});
    CHECK(m.sender() == Oid::env());
    CHECK(m.thread() == std::optional<std::string>("th1"));

    TupleValue shortArgs;
    shortArgs.items = {Value::ofInt(1)};
    CHECK_THROWS_AS(mkCall(mf.model, Oid{"Calendar", 1}, "updateTime", shortArgs, Oid::env(),
                           "th1"),
                    Error);
    TupleValue wrongSort;
    wrongSort.items = {Value(true), Value::ofInt(2)};
    CHECK_THROWS_AS(mkCall(mf.model, Oid{"Calendar", 1}, "updateTime", wrongSort, Oid::env(),
                           "th1"),
                    Error);
    CHECK_THROWS_AS(mkCall(mf.model, Oid{"Calendar", 1}, "noSuchOp", ok, Oid::env(), "th1"),
                    Error);
}

TEST_CASE("messages and events have distinct kinds and stable text") {
    Message r = mkReturn(Oid::env(), Value::ofInt(6), Oid{"Factorial", 1}, "th1");
    CHECK(r.isReturn());
    CHECK(r.asReturn().value == Value::ofInt(6));
    Message s = mkSignal(Oid{"A", 1}, RecordValue{}, Oid{"B", 1});
    CHECK(s.isSignal());
    CHECK(!s.thread().has_value());

    Event tick{TickEvent{"th1"}};
    CHECK(tick.isTick());
    CHECK(tick.str() == "tick(th1)");
    CHECK(Event(r).isMsg());
    CHECK(Event(r).str() == r.str());
    CHECK(r.str() == "return(env, 6, Factorial#1, th1)");
}

TEST_CASE("event stores dequeue by predicate anywhere in the buffer") {
    Message r1 = mkReturn(Oid{"A", 1}, Value::ofInt(1), Oid{"B", 1}, "t");
    Message r2 = mkReturn(Oid{"A", 1}, Value::ofInt(2), Oid{"B", 1}, "t");
    EventStore es;
    es = es.enqueue(Oid{"A", 1}, r1).enqueue(Oid{"A", 1}, r2);
    CHECK(es.buffer(Oid{"A", 1}).size() == 2);

    auto hit = es.dequeueMatching(Oid{"A", 1}, [&](const Message& m) {
        return m.isReturn() && m.asReturn().value == Value::ofInt(2);
    });
    REQUIRE(hit.has_value());
    CHECK(hit->first == r2);
    CHECK(hit->second.buffer(Oid{"A", 1}).items() == std::vector<Message>{r1});

    auto miss = es.dequeueMatching(Oid{"A", 1}, [](const Message&) { return false; });
    CHECK(!miss.has_value());
}
