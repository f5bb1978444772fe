#include "sysmodel/values.hpp"

#include <algorithm>
#include <sstream>

namespace sysmodel {

std::string Oid::str() const {
    if (isNil()) return "nil";
    if (isEnv()) return "env";
    std::ostringstream os;
    os << cls << "#" << idx;
    return os.str();
}

RecordValue::RecordValue(std::vector<std::pair<std::string, Value>> entries)
    : entries_(std::move(entries)) {
    std::sort(entries_.begin(), entries_.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 1; i < entries_.size(); ++i)
        if (entries_[i - 1].first == entries_[i].first)
            throw Error("duplicate record field: " + entries_[i].first);
}

bool RecordValue::has(const std::string& name) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), name,
                               [](const auto& e, const std::string& n) { return e.first < n; });
    return it != entries_.end() && it->first == name;
}

const Value& RecordValue::get(const std::string& name) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), name,
                               [](const auto& e, const std::string& n) { return e.first < n; });
    if (it == entries_.end() || it->first != name)
        throw Error("record has no field " + name);
    return it->second;
}

void RecordValue::set(const std::string& name, Value v) {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), name,
                               [](const auto& e, const std::string& n) { return e.first < n; });
    if (it != entries_.end() && it->first == name)
        it->second = std::move(v);
    else
        entries_.insert(it, {name, std::move(v)});
}

bool operator==(const RecordValue& a, const RecordValue& b) {
    return a.entries_ == b.entries_;
}

bool operator==(const TupleValue& a, const TupleValue& b) {
    return a.items == b.items;
}

namespace {

int cmpValue(const Value& a, const Value& b);

int cmp3(bool lt, bool gt) { return lt ? -1 : (gt ? 1 : 0); }

int cmpValue(const Value& a, const Value& b) {
    const auto& ra = a.rep();
    const auto& rb = b.rep();
    if (ra.index() != rb.index()) return ra.index() < rb.index() ? -1 : 1;
    switch (ra.index()) {
    case 0: { // Int
        const Int& x = std::get<Int>(ra);
        const Int& y = std::get<Int>(rb);
        return cmp3(x < y, x > y);
    }
    case 1:
        return cmp3(!std::get<bool>(ra) && std::get<bool>(rb),
                    std::get<bool>(ra) && !std::get<bool>(rb));
    case 2:
        return 0; // void
    case 3: {
        int c = std::get<std::string>(ra).compare(std::get<std::string>(rb));
        return c < 0 ? -1 : (c > 0 ? 1 : 0);
    }
    case 4: {
        const Oid& x = std::get<Oid>(ra);
        const Oid& y = std::get<Oid>(rb);
        return cmp3(x < y, y < x);
    }
    case 5: {
        const auto& xs = std::get<RecordValue>(ra).entries();
        const auto& ys = std::get<RecordValue>(rb).entries();
        for (std::size_t i = 0; i < std::min(xs.size(), ys.size()); ++i) {
            int c = xs[i].first.compare(ys[i].first);
            if (c != 0) return c < 0 ? -1 : 1;
            c = cmpValue(xs[i].second, ys[i].second);
            if (c != 0) return c;
        }
        return cmp3(xs.size() < ys.size(), xs.size() > ys.size());
    }
    default: {
        const auto& xs = std::get<TupleValue>(ra).items;
        const auto& ys = std::get<TupleValue>(rb).items;
        for (std::size_t i = 0; i < std::min(xs.size(), ys.size()); ++i) {
            int c = cmpValue(xs[i], ys[i]);
            if (c != 0) return c;
        }
        return cmp3(xs.size() < ys.size(), xs.size() > ys.size());
    }
    }
}

} // namespace

bool operator<(const Value& a, const Value& b) { return cmpValue(a, b) < 0; }

std::string Value::str() const {
    std::ostringstream os;
    struct V {
        std::ostringstream& os;
        void operator()(const Int& v) { os << v; }
        void operator()(bool v) { os << (v ? "true" : "false"); }
        void operator()(VoidValue) { os << "void"; }
        void operator()(const std::string& v) { os << '"' << v << '"'; }
        void operator()(const Oid& v) { os << v.str(); }
        void operator()(const RecordValue& v) {
            os << "[";
            bool first = true;
            for (const auto& [n, x] : v.entries()) {
                if (!first) os << ", ";
                first = false;
                os << n << " = " << x.str();
            }
            os << "]";
        }
        void operator()(const TupleValue& v) {
            os << "(";
            bool first = true;
            for (const auto& x : v.items) {
                if (!first) os << ", ";
                first = false;
                os << x.str();
            }
            os << ")";
        }
    } vis{os};
    std::visit(vis, rep_);
    return os.str();
}

RecordValue recOverride(const RecordValue& f, const RecordValue& g) {
    RecordValue out = f;
    for (const auto& [n, v] : g.entries()) out.set(n, v);
    return out;
}

RecordValue recOfTuple(const std::vector<std::string>& names, const TupleValue& tuple) {
    if (names.size() != tuple.items.size())
        throw Error("recOfTuple: arity mismatch");
    std::vector<std::pair<std::string, Value>> entries;
    entries.reserve(names.size());
    for (std::size_t i = 0; i < names.size(); ++i)
        entries.emplace_back(names[i], tuple.items[i]);
    return RecordValue(std::move(entries)); // ctor rejects duplicate names
}

TupleValue tupleOfRec(const std::vector<std::string>& names, const RecordValue& rec) {
    TupleValue out;
    out.items.reserve(names.size());
    for (const auto& n : names) out.items.push_back(rec.get(n));
    return out;
}

} // namespace sysmodel
