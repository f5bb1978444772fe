#include <doctest.h>

#include "sysmodel/parser.hpp"
#include "sysmodel/store.hpp"

#include <set>

using namespace sysmodel;

namespace {

ModelFile calendar() { return loadModelFile(FIXTURE_DIR "/calendar.smx"); }

DataStore storeOf(const ModelFile& mf) {
    DataStore ds;
    for (const auto& [label, inst] : mf.scenario.objects) ds = ds.addObj(inst);
    return ds;
}

std::set<std::pair<Oid, Oid>> pairSet(const std::vector<std::pair<Oid, Oid>>& v) {
    return {v.begin(), v.end()};
}

} // namespace

TEST_CASE("data stores are immutable maps with guarded allocation") {
    ModelFile mf = calendar();
    DataStore ds = storeOf(mf);
    CHECK(ds.size() == 10);
    CHECK(ds.has(Oid{"Calendar", 1}));
    CHECK(ds.val(Oid{"DateTime", 1}, "date") == Value::ofInt(123));

    DataStore ds2 = ds.setVal(Oid{"DateTime", 1}, "date", Value::ofInt(777));
    CHECK(ds2.val(Oid{"DateTime", 1}, "date") == Value::ofInt(777));
    CHECK(ds.val(Oid{"DateTime", 1}, "date") == Value::ofInt(123)); // original untouched

    CHECK_THROWS_AS(ds.addObj(ds.get(Oid{"Calendar", 1})), Error); // already allocated
    CHECK_THROWS_AS((void)ds.get(Oid{"Calendar", 2}), Error);
    CHECK_THROWS_AS((void)ds.val(Oid{"Calendar", 1}, "nope"), Error);
}

TEST_CASE("store validation checks attribute sets and carriers") {
    ModelFile mf = calendar();
    DataStore ds = storeOf(mf);
    CHECK(validateStore(mf.model, ds).ok());
    DataStore bad = ds.setVal(Oid{"Calendar", 1}, "owner", Value::ofInt(5));
    CHECK(!validateStore(mf.model, bad).ok());
}

TEST_CASE("association-class links project to the expected pairs") {
    ModelFile mf = calendar();
    DataStore ds = storeOf(mf);
    const AssocDef* a = mf.model.findAssoc("Aparticipants");
    REQUIRE(a != nullptr);

    auto rel = pairSet(binaryRelOf(mf.model, *a, ds));
    std::set<std::pair<Oid, Oid>> expect = {{Oid{"User", 1}, Oid{"Meeting", 1}},
                                            {Oid{"User", 2}, Oid{"Meeting", 1}}};
    CHECK(rel == expect);

    auto dest = destinations(mf.model, *a, ds, Oid{"User", 1});
    CHECK(dest == std::vector<Oid>{Oid{"Meeting", 1}});
    auto src = sources(mf.model, *a, ds, Oid{"Meeting", 1});
    CHECK(std::set<Oid>(src.begin(), src.end()) ==
          std::set<Oid>{Oid{"User", 1}, Oid{"User", 2}});
}

TEST_CASE("attribute-realized links and qualified navigation") {
    ModelFile mf = calendar();
    DataStore ds = storeOf(mf);
    const AssocDef* a = mf.model.findAssoc("Aowner");
    REQUIRE(a != nullptr);
    auto rel = pairSet(binaryRelOf(mf.model, *a, ds));
    CHECK(rel == std::set<std::pair<Oid, Oid>>{{Oid{"Calendar", 1}, Oid{"User", 1}}});

    auto q = qualifiedRelOf(mf.model, *a, ds);
    REQUIRE(q.size() == 1);
    CHECK(std::get<0>(q[0]) == Oid{"Calendar", 1});
    CHECK(std::get<1>(q[0]) == Value("Jo"));
    CHECK(std::get<2>(q[0]) == Oid{"User", 1});
}

TEST_CASE("ordered navigation sorts by the declared keys") {
    ModelFile mf = calendar();
    DataStore ds = storeOf(mf);
    // a second meeting with an earlier start must sort first
    Instance m2 = mkInstance(mf.model, "Meeting", 2);
    m2.attrs.set("organizer", Value(Oid{"User", 2}));
    m2.attrs.set("start", Value(Oid{"DateTime", 1})); // date 123 < 345
    m2.attrs.set("end", Value(Oid{"DateTime", 1}));
    Instance row = mkInstance(mf.model, "Cal2Entries", 2);
    row.attrs.set("cal", Value(Oid{"Calendar", 1}));
    row.attrs.set("entries", Value(Oid{"Meeting", 2}));
    ds = ds.addObj(m2).addObj(row);

    const AssocDef* a = mf.model.findAssoc("Aentries");
    REQUIRE(a != nullptr);
    auto ordered = orderedRelOf(mf.model, *a, ds, Oid{"Calendar", 1});
    CHECK(ordered == std::vector<Oid>{Oid{"Meeting", 2}, Oid{"Meeting", 1}});
    CHECK(checkMultiplicities(mf.model, ds).empty());
}

TEST_CASE("multiplicity violations are reported per object and side") {
    ModelFile mf = calendar();
    DataStore ds = storeOf(mf);
    CHECK(checkMultiplicities(mf.model, ds).empty());
    // drop the owner: Aowner requires exactly one owner per calendar
    DataStore bad = ds.setVal(Oid{"Calendar", 1}, "owner", Value(Oid::nil()));
    CHECK(!checkMultiplicities(mf.model, bad).empty());
}

TEST_CASE("collection realization needs both directions to agree") {
    ModelFile mf = loadModelFile(FIXTURE_DIR "/team.smx");
    DataStore ds = storeOf(mf);
    const AssocDef* a = mf.model.findAssoc("Aboss");
    REQUIRE(a != nullptr);
    auto rel = pairSet(binaryRelOf(mf.model, *a, ds));
    std::set<std::pair<Oid, Oid>> expect = {{Oid{"Person", 1}, Oid{"Person", 3}},
                                            {Oid{"Person", 2}, Oid{"Person", 3}}};
    CHECK(rel == expect);
    CHECK(checkMultiplicities(mf.model, ds).empty());

    // a stale back-collection is an inconsistency, not silently one-sided
    TupleValue onlyP1;
    onlyP1.items = {Value(Oid{"Person", 1})};
    DataStore stale = ds.setVal(Oid{"Person", 3}, "reports", Value(onlyP1));
    CHECK_THROWS_AS((void)relOf(mf.model, *a, stale), Error);
}

TEST_CASE("store snapshots serialize canonically and parse back") {
    ModelFile mf = calendar();
    DataStore ds = storeOf(mf);
    std::string text = serializeStore(ds);
    CHECK(parseStoreText(text) == ds);
    CHECK(serializeStore(parseStoreText(text)) == text);
}
