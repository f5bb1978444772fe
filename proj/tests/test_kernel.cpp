#include <doctest.h>

#include "sysmodel/parser.hpp"
#include "sysmodel/streams.hpp"
#include "sysmodel/values.hpp"

using namespace sysmodel;

TEST_CASE("oid literals and ordering") {
    Oid a{"A", 1}, b{"A", 2}, c{"B", 1};
    CHECK(a < b);
    CHECK(b < c);
    CHECK(Oid::nil().isNil());
    CHECK(Oid::env().isEnv());
    CHECK(Oid::nil() != Oid::env());
    CHECK(a.str() == "A#1");
}

TEST_CASE("record entries stay sorted and override is right-biased") {
    RecordValue r;
    r.set("b", Value::ofInt(2));
    r.set("a", Value::ofInt(1));
    CHECK(r.entries().front().first == "a");
    CHECK(r.get("b") == Value::ofInt(2));

    RecordValue g;
    g.set("b", Value::ofInt(9));
    g.set("c", Value::ofInt(3));
    RecordValue m = recOverride(r, g);
    CHECK(m.size() == 3);
    CHECK(m.get("a") == Value::ofInt(1));
    CHECK(m.get("b") == Value::ofInt(9)); // right operand wins
    CHECK(m.get("c") == Value::ofInt(3));
}

TEST_CASE("record/tuple conversions check their preconditions") {
    TupleValue t;
    t.items = {Value::ofInt(1), Value("x")};
    RecordValue r = recOfTuple({"p", "q"}, t);
    CHECK(r.get("p") == Value::ofInt(1));
    CHECK(tupleOfRec({"p", "q"}, r) == t);
    CHECK_THROWS_AS(recOfTuple({"p"}, t), Error);              // arity mismatch
    CHECK_THROWS_AS(recOfTuple({"p", "p"}, t), Error);         // duplicate name
    CHECK_THROWS_AS((void)tupleOfRec({"p", "missing"}, r), Error);
}

TEST_CASE("value text forms parse back to the same value") {
    TupleValue pair;
    pair.items = {Value::ofInt(-7), Value(true)};
    RecordValue rec;
    rec.set("x", Value(Oid{"C", 2}));
    rec.set("y", Value(std::string("hi")));
    std::vector<Value> samples = {
        Value::ofInt(0), Value::ofInt(-123456789), Value(true), Value(false),
        Value(VoidValue{}), Value(std::string("")), Value(std::string("jo")),
        Value(Oid{"User", 3}), Value(Oid::nil()), Value(pair), Value(rec),
        Value(TupleValue{}),
    };
    for (const auto& v : samples) CHECK(parseValue(v.str()) == v);
}

TEST_CASE("streams decompose and concatenate") {
    Stream<int> s = {1, 2, 3};
    Stream<int> r = {4, 5};
    CHECK(fst(s) == 1);
    CHECK(rst(s) == Stream<int>{2, 3});
    CHECK(concat(s, r) == Stream<int>{1, 2, 3, 4, 5});
    CHECK(take(s, 2) == Stream<int>{1, 2});
    CHECK(take(s, 9) == s);
    CHECK(isPrefix(s, concat(s, r)));
    CHECK(!isPrefix(concat(s, r), s));
    CHECK_THROWS_AS((void)fst(Stream<int>{}), Error);
    CHECK_THROWS_AS((void)rst(Stream<int>{}), Error);

    auto even = [](int v) { return v % 2 == 0; };
    CHECK(filterBy(even, concat(s, r)) == Stream<int>{2, 4});
    CHECK(countBy(even, s) == 1);
    CHECK(mapOver<int>([](int v) { return v + 1; }, s) == Stream<int>{2, 3, 4});
}

TEST_CASE("stacks are LIFO with top update") {
    StackOf<int> st;
    CHECK(st.empty());
    CHECK_THROWS_AS(st.pop(), Error);
    st.push(1);
    st.push(2);
    CHECK(st.top() == 2);
    st.update(9);
    CHECK(st.top() == 9);
    CHECK(st.pop() == 9);
    CHECK(st.pop() == 1);
    CHECK(st.empty());
}

TEST_CASE("buffers are FIFO with positional removal") {
    BufferOf<int> b;
    b.addLast(1);
    b.addLast(2);
    b.addLast(3);
    CHECK(b.fst() == 1);
    CHECK(b.rst().fst() == 2);
    b.removeAt(1); // matching in the middle, not only at the head
    CHECK(b.items() == std::vector<int>{1, 3});
    b.addFirst(0);
    CHECK(b.items() == std::vector<int>{0, 1, 3});
    CHECK_THROWS_AS(b.removeAt(7), Error);

    BufferOf<int> c;
    c.addLast(9);
    CHECK(BufferOf<int>::concat(b, c).items() == std::vector<int>{0, 1, 3, 9});
}
