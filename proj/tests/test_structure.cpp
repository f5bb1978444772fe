#include <doctest.h>

#include "sysmodel/model.hpp"
#include "sysmodel/parser.hpp"

#include <algorithm>

using namespace sysmodel;

namespace {
ModelFile calendar() { return loadModelFile(FIXTURE_DIR "/calendar.smx"); }
}

TEST_CASE("calendar model validates and resolves its declarations") {
    ModelFile mf = calendar();
    const ModelDef& m = mf.model;
    CHECK(validateModel(m).ok());
    CHECK(m.findClass("Calendar") != nullptr);
    CHECK(m.findClass("Nope") == nullptr);
    CHECK(m.findOp("Calendar", "updateTime") != nullptr);
    CHECK(m.findAssoc("Aparticipants") != nullptr);
    CHECK(m.findAttr("Meeting", "organizer") != nullptr);
}

TEST_CASE("subclassing is reflexive and transitive") {
    ModelDef m = calendar().model;
    CHECK(m.isSub("Meeting", "Meeting"));
    CHECK(m.isSub("Meeting", "Entry"));
    CHECK(!m.isSub("Entry", "Meeting"));
    CHECK(!m.isSub("Meeting", "Appointment"));
    auto subs = m.subClassesOf("Entry");
    CHECK(subs.size() == 3); // Entry itself plus both concrete subclasses
    CHECK(std::count(subs.begin(), subs.end(), "Meeting") == 1);
    CHECK(std::count(subs.begin(), subs.end(), "Appointment") == 1);
}

TEST_CASE("class-reference carriers follow budgets and subclassing") {
    ModelDef m = calendar().model;
    CHECK(oidsOfExactClass(m, "Entry").empty()); // abstract: budget 0
    CHECK(oidsOfExactClass(m, "Meeting").size() == 2);
    // nil + 2 meetings + 2 appointments
    CHECK(classRefCarrier(m, "Entry").size() == 5);
    CHECK(inCarrier(m, "Entry&", Value(Oid{"Meeting", 1})));
    CHECK(inCarrier(m, "Entry&", Value(Oid::nil())));
    CHECK(!inCarrier(m, "Entry&", Value(Oid{"Meeting", 3}))); // beyond the budget
    CHECK(!inCarrier(m, "Meeting&", Value(Oid{"Appointment", 1})));
    CHECK(carrierSubset(m, "Meeting&", "Entry&"));
    CHECK(!carrierSubset(m, "Entry&", "Meeting&"));
}

TEST_CASE("basic carriers, defaults and bounded enumeration") {
    ModelDef m = calendar().model;
    CHECK(inCarrier(m, "Int", Value::ofInt(-5)));
    CHECK(!inCarrier(m, "Int", Value(true)));
    CHECK(inCarrier(m, "Bool", Value(false)));
    CHECK(inCarrier(m, "String", Value("x")));
    CHECK(defaultValue(m, "Int") == Value::ofInt(0));
    CHECK(defaultValue(m, "Bool") == Value(false));
    CHECK(defaultValue(m, "User&") == Value(Oid::nil()));
    CHECK(enumCarrier(m, "Bool").size() == 2);
    CHECK(enumCarrier(m, "Int", -1, 2).size() == 4);
    CHECK_THROWS_AS((void)enumCarrier(m, "String"), Error);
}

TEST_CASE("instances respect abstractness and budgets") {
    ModelDef m = calendar().model;
    Instance inst = mkInstance(m, "Meeting", 1);
    CHECK(inst.self == Oid{"Meeting", 1});
    CHECK(getAttr(inst, "organizer") == Value(Oid::nil()));
    CHECK(getThis(inst) == inst.self);
    CHECK_THROWS_AS(mkInstance(m, "Entry", 1), Error);   // abstract
    CHECK_THROWS_AS(mkInstance(m, "Meeting", 3), Error); // beyond the budget
}

TEST_CASE("collection types wrap an element type") {
    CHECK(isCollection("[Person&]"));
    CHECK(!isCollection("Person&"));
    CHECK(elemType("[Person&]") == "Person&");

    ModelFile mf = loadModelFile(FIXTURE_DIR "/team.smx");
    CHECK(validateModel(mf.model).ok());
    CHECK(mf.model.isTypeName("[Person&]"));
    TupleValue two;
    two.items = {Value(Oid{"Person", 1}), Value(Oid{"Person", 2})};
    CHECK(inCarrier(mf.model, "[Person&]", Value(two)));
    CHECK(!inCarrier(mf.model, "[Person&]", Value::ofInt(1)));
    CHECK(defaultValue(mf.model, "[Person&]") == Value(TupleValue{}));
}

TEST_CASE("the qualified variable map covers attributes and parameters") {
    ModelDef m = calendar().model;
    auto vars = m.variables();
    CHECK(vars.at("Calendar.owner") == "User&");
    CHECK(vars.at("Calendar.updateTime.d") == "Int");
    CHECK(vars.count("Meeting.start") == 1);
}

TEST_CASE("implementation resolution follows the impl map") {
    ModelDef m = calendar().model;
    const MethodDef* mth = m.resolveImpl("Meeting", "check");
    REQUIRE(mth != nullptr);
    CHECK(mth->definedIn == "Entry"); // shared implementation
    CHECK(m.resolveImpl("Calendar", "updateTime") != nullptr);
    CHECK(m.resolveImpl("Calendar", "nothing") == nullptr);
}

TEST_CASE("parse errors carry positions and strictness") {
    CHECK_THROWS_AS(parseModelFile("model x\nclass {"), ParseError);
    CHECK_THROWS_AS(parseModelFile("model x\nwibble y"), ParseError);
    try {
        parseModelFile("model x\nclass {");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line == 2);
    }
}

TEST_CASE("scenario objects resolve labels to oids in declaration order") {
    ModelFile mf = calendar().model.name.empty() ? ModelFile{} : calendar();
    const Instance* jo = mf.scenario.findObject("jo");
    const Instance* jim = mf.scenario.findObject("jim");
    REQUIRE(jo != nullptr);
    REQUIRE(jim != nullptr);
    CHECK(jo->self == Oid{"User", 1});
    CHECK(jim->self == Oid{"User", 2});
    CHECK(mf.scenario.labelOf(Oid{"Meeting", 1}) == std::optional<std::string>("m1"));
    CHECK(mf.scenario.findObject("nobody") == nullptr);
    // label references inside attribute initializers
    CHECK(jo->attrs.get("name") == Value("Jo"));
    CHECK(mf.scenario.findObject("cal")->attrs.get("owner") == Value(Oid{"User", 1}));
}
