#ifndef SYSMODEL_VALUES_HPP
#define SYSMODEL_VALUES_HPP

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace sysmodel {

using Int = boost::multiprecision::cpp_int;

struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Object identifier: a class name plus a per-class index.  Two identifiers
// are distinguished and classless: Nil (the absent reference) and Env (the
// system environment, used as the caller of bottom-most call frames).
struct Oid {
    std::string cls;   // empty for Nil and Env
    std::uint64_t idx; // Nil: 0, Env: 1

    static Oid nil() { return Oid{"", 0}; }
    static Oid env() { return Oid{"", 1}; }

    bool isNil() const { return cls.empty() && idx == 0; }
    bool isEnv() const { return cls.empty() && idx == 1; }

    friend bool operator==(const Oid& a, const Oid& b) {
        return a.cls == b.cls && a.idx == b.idx;
    }
    friend bool operator!=(const Oid& a, const Oid& b) { return !(a == b); }
    friend bool operator<(const Oid& a, const Oid& b) {
        if (a.cls != b.cls) return a.cls < b.cls;
        return a.idx < b.idx;
    }
    std::string str() const;
};

class Value;

// Finite map from variable names to values; entries kept sorted by name so
// equality and serialization are canonical.
class RecordValue {
public:
    RecordValue() = default;
    explicit RecordValue(std::vector<std::pair<std::string, Value>> entries);

    bool has(const std::string& name) const;
    const Value& get(const std::string& name) const;
    void set(const std::string& name, Value v); // insert or overwrite
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }

    const std::vector<std::pair<std::string, Value>>& entries() const { return entries_; }

    friend bool operator==(const RecordValue& a, const RecordValue& b);
    friend bool operator!=(const RecordValue& a, const RecordValue& b) { return !(a == b); }

private:
    std::vector<std::pair<std::string, Value>> entries_; // sorted by name, unique
};

struct TupleValue {
    std::vector<Value> items;

    friend bool operator==(const TupleValue& a, const TupleValue& b);
    friend bool operator!=(const TupleValue& a, const TupleValue& b) { return !(a == b); }
};

struct VoidValue {
    friend bool operator==(VoidValue, VoidValue) { return true; }
    friend bool operator!=(VoidValue, VoidValue) { return false; }
};

// Closed sum of all runtime values.  Immutable by convention: operations
// produce new values.
class Value {
public:
    using Rep = std::variant<Int, bool, VoidValue, std::string, Oid, RecordValue, TupleValue>;

    Value() : rep_(VoidValue{}) {}
    Value(Int v) : rep_(std::move(v)) {}
    Value(bool v) : rep_(v) {}
    Value(VoidValue v) : rep_(v) {}
    Value(std::string v) : rep_(std::move(v)) {}
    Value(const char* v) : rep_(std::string(v)) {}
    Value(Oid v) : rep_(std::move(v)) {}
    Value(RecordValue v) : rep_(std::move(v)) {}
    Value(TupleValue v) : rep_(std::move(v)) {}
    static Value ofInt(long v) { return Value(Int(v)); }

    bool isInt() const { return std::holds_alternative<Int>(rep_); }
    bool isBool() const { return std::holds_alternative<bool>(rep_); }
    bool isVoid() const { return std::holds_alternative<VoidValue>(rep_); }
    bool isStr() const { return std::holds_alternative<std::string>(rep_); }
    bool isOid() const { return std::holds_alternative<Oid>(rep_); }
    bool isRec() const { return std::holds_alternative<RecordValue>(rep_); }
    bool isTup() const { return std::holds_alternative<TupleValue>(rep_); }

    const Int& asInt() const { return expect<Int>("Int"); }
    bool asBool() const { return expect<bool>("Bool"); }
    const std::string& asStr() const { return expect<std::string>("String"); }
    const Oid& asOid() const { return expect<Oid>("Oid"); }
    const RecordValue& asRec() const { return expect<RecordValue>("Record"); }
    const TupleValue& asTup() const { return expect<TupleValue>("Tuple"); }

    const Rep& rep() const { return rep_; }

    friend bool operator==(const Value& a, const Value& b) { return a.rep_ == b.rep_; }
    friend bool operator!=(const Value& a, const Value& b) { return !(a == b); }

    // Total order over all values (by alternative index, then content);
    // used for canonical ordering of value sets.
    friend bool operator<(const Value& a, const Value& b);

    std::string str() const; // canonical text form

private:
    template <class T>
    const T& expect(const char* what) const {
        const T* p = std::get_if<T>(&rep_);
        if (!p) throw Error(std::string("value is not of sort ") + what + ": " + str());
        return *p;
    }
    Rep rep_;
};

// Record override: entries of the right operand win on shared names.
RecordValue recOverride(const RecordValue& f, const RecordValue& g);

// Build a record binding names[i] -> tuple.items[i]; names must be distinct
// and match the tuple arity.
RecordValue recOfTuple(const std::vector<std::string>& names, const TupleValue& tuple);

// Project a record onto an ordered name list, yielding a tuple.
TupleValue tupleOfRec(const std::vector<std::string>& names, const RecordValue& rec);

} // namespace sysmodel

#endif
