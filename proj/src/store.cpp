#include "sysmodel/store.hpp"

#include <algorithm>
#include <set>

namespace sysmodel {

const Instance& DataStore::get(const Oid& o) const {
    auto it = map_.find(o);
    if (it == map_.end()) throw Error("no object " + o.str() + " in store");
    return it->second;
}

std::vector<Oid> DataStore::oids() const {
    std::vector<Oid> out;
    out.reserve(map_.size());
    for (const auto& [o, _] : map_) out.push_back(o);
    return out;
}

DataStore DataStore::addObj(Instance inst) const {
    if (inst.self.isNil() || inst.self.isEnv())
        throw Error("cannot store an object under " + inst.self.str());
    if (map_.count(inst.self))
        throw Error("object " + inst.self.str() + " already allocated");
    DataStore out = *this;
    Oid o = inst.self;
    out.map_.emplace(std::move(o), std::move(inst));
    return out;
}

const Value& DataStore::val(const Oid& o, const std::string& attr) const {
    return get(o).attrs.get(attr);
}

DataStore DataStore::setVal(const Oid& o, const std::string& attr, Value v) const {
    DataStore out = *this;
    auto it = out.map_.find(o);
    if (it == out.map_.end()) throw Error("no object " + o.str() + " in store");
    if (!it->second.attrs.has(attr))
        throw Error("object " + o.str() + " has no attribute " + attr);
    it->second.attrs.set(attr, std::move(v));
    return out;
}

ValidationReport validateStore(const ModelDef& m, const DataStore& ds) {
    ValidationReport r;
    bool ok = true;
    for (const auto& [o, inst] : ds.map()) {
        if (inst.self != o) {
            r.violations.push_back({"store-self", o.str() + " maps to an instance of " +
                                                      inst.self.str()});
            ok = false;
            continue;
        }
        const ClassDef* c = m.findClass(o.cls);
        if (!c) {
            r.violations.push_back({"store-class", o.str() + " has unknown class"});
            ok = false;
            continue;
        }
        if (c->oidBudget == 0 || o.idx < 1 || o.idx > c->oidBudget) {
            r.violations.push_back({"store-budget", o.str() + " exceeds the oid budget of " +
                                                        o.cls});
            ok = false;
        }
        std::set<std::string> expected;
        for (const auto& a : c->attrs) {
            expected.insert(a.name);
            if (!inst.attrs.has(a.name)) {
                r.violations.push_back({"store-attrs", o.str() + " lacks attribute " + a.name});
                ok = false;
            } else if (!inCarrier(m, a.type, inst.attrs.get(a.name))) {
                r.violations.push_back({"store-sorts", o.str() + "." + a.name + " = " +
                                                           inst.attrs.get(a.name).str() +
                                                           " is outside carrier of " + a.type});
                ok = false;
            }
        }
        for (const auto& [n, _] : inst.attrs.entries())
            if (!expected.count(n)) {
                r.violations.push_back({"store-attrs", o.str() + " has undeclared attribute " + n});
                ok = false;
            }
    }
    if (ok) r.passed.push_back("store-conformance");
    return r;
}

// ---- associations ----

namespace {

// all allocated oids whose class is a (reflexive) subclass of c
std::vector<Oid> storeOidsOf(const ModelDef& m, const DataStore& ds, const std::string& c) {
    std::vector<Oid> out;
    for (const auto& [o, _] : ds.map())
        if (m.isSub(o.cls, c)) out.push_back(o);
    return out;
}

std::vector<Link> attributeLinks(const ModelDef& m, const AssocDef& a, const DataStore& ds) {
    std::vector<Link> out;
    for (const auto& o1 : storeOidsOf(m, ds, a.classes.at(0))) {
        const Value& v = ds.val(o1, a.attrVar);
        if (!v.isOid()) throw Error("association " + a.name + ": " + a.attrVar +
                                    " of " + o1.str() + " is not a reference");
        if (v.asOid().isNil()) continue; // no partner
        out.push_back(Link{{o1, v.asOid()}, Value(VoidValue{})});
    }
    return out;
}

} // namespace

std::vector<Link> relOf(const ModelDef& m, const AssocDef& a, const DataStore& ds) {
    std::vector<Link> out;
    switch (a.realization) {
    case AssocDef::Real::Attribute:
        out = attributeLinks(m, a, ds);
        break;
    case AssocDef::Real::AssocClass:
        for (const auto& l : storeOidsOf(m, ds, a.linkClass)) {
            const Value& v1 = ds.val(l, a.endVar1);
            const Value& v2 = ds.val(l, a.endVar2);
            if (v1.asOid().isNil() || v2.asOid().isNil()) continue;
            out.push_back(Link{{v1.asOid(), v2.asOid()}, Value(l)});
        }
        break;
    case AssocDef::Real::MToOneCollection: {
        out = attributeLinks(m, a, ds);
        // redundant back-collections on the target side must agree
        for (const auto& o2 : storeOidsOf(m, ds, a.classes.at(1))) {
            const Value& coll = ds.val(o2, a.collVar);
            if (!coll.isTup())
                throw Error("association " + a.name + ": " + a.collVar + " of " + o2.str() +
                            " is not a collection");
            std::set<Oid> stored;
            for (const auto& v : coll.asTup().items) stored.insert(v.asOid());
            std::set<Oid> derived;
            for (const auto& lk : out)
                if (lk.ends.at(1) == o2) derived.insert(lk.ends.at(0));
            if (stored != derived)
                throw Error("association " + a.name + ": back-collection of " + o2.str() +
                            " disagrees with the attribute links (realization inconsistency)");
        }
        break;
    }
    case AssocDef::Real::ExplicitTable:
        for (const auto& [ends, extra] : a.table) out.push_back(Link{ends, extra});
        break;
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::pair<Oid, Oid>> binaryRelOf(const ModelDef& m, const AssocDef& a,
                                             const DataStore& ds) {
    std::vector<std::pair<Oid, Oid>> out;
    for (const auto& lk : relOf(m, a, ds)) {
        if (lk.ends.size() < 2) throw Error("association " + a.name + " is not binary");
        out.emplace_back(lk.ends[0], lk.ends[1]);
    }
    return out;
}

std::vector<Oid> destinations(const ModelDef& m, const AssocDef& a, const DataStore& ds,
                              const Oid& o1) {
    std::vector<Oid> out;
    for (const auto& [x, y] : binaryRelOf(m, a, ds))
        if (x == o1) out.push_back(y);
    return out;
}

std::vector<Oid> sources(const ModelDef& m, const AssocDef& a, const DataStore& ds,
                         const Oid& o2) {
    std::vector<Oid> out;
    for (const auto& [x, y] : binaryRelOf(m, a, ds))
        if (y == o2) out.push_back(x);
    return out;
}

std::vector<Violation> checkMultiplicities(const ModelDef& m, const DataStore& ds) {
    std::vector<Violation> out;
    for (const auto& a : m.associations) {
        if (!a.multiplicity) continue;
        const auto& [n1, n2] = *a.multiplicity;
        auto rel = binaryRelOf(m, a, ds);
        for (const auto& o1 : ds.oids()) {
            if (!m.isSub(o1.cls, a.classes.at(0))) continue;
            std::uint64_t cnt = 0;
            for (const auto& [x, y] : rel)
                if (x == o1) ++cnt;
            if (!n1.contains(cnt))
                out.push_back({"multiplicity", a.name + ": " + o1.str() + " has " +
                                                   std::to_string(cnt) + " targets, expected " +
                                                   n1.str()});
        }
        for (const auto& o2 : ds.oids()) {
            if (!m.isSub(o2.cls, a.classes.at(1))) continue;
            std::uint64_t cnt = 0;
            for (const auto& [x, y] : rel)
                if (y == o2) ++cnt;
            if (!n2.contains(cnt))
                out.push_back({"multiplicity", a.name + ": " + o2.str() + " has " +
                                                   std::to_string(cnt) + " origins, expected " +
                                                   n2.str()});
        }
    }
    return out;
}

std::vector<Oid> orderedRelOf(const ModelDef& m, const AssocDef& a, const DataStore& ds,
                              const Oid& o1) {
    if (a.orderKeys.empty()) throw Error("association " + a.name + " has no declared ordering");
    std::vector<Oid> out = destinations(m, a, ds, o1);
    auto navigate = [&](const Oid& o, const std::vector<std::string>& path) -> Value {
        Value cur(o);
        for (const auto& step : path) {
            if (!cur.isOid() || cur.asOid().isNil())
                throw Error("association " + a.name + ": order key path crosses nil");
            cur = ds.val(cur.asOid(), step);
        }
        return cur;
    };
    std::stable_sort(out.begin(), out.end(), [&](const Oid& x, const Oid& y) {
        for (const auto& key : a.orderKeys) {
            Value vx = navigate(x, key.path);
            Value vy = navigate(y, key.path);
            if (vx != vy) return key.ascending ? vx < vy : vy < vx;
        }
        return x < y; // deterministic tie-break
    });
    return out;
}

std::vector<std::tuple<Oid, Value, Oid>> qualifiedRelOf(const ModelDef& m, const AssocDef& a,
                                                        const DataStore& ds) {
    if (a.qualifierAttr.empty())
        throw Error("association " + a.name + " has no declared qualifier");
    std::vector<std::tuple<Oid, Value, Oid>> out;
    std::set<std::pair<Oid, Value>> seen;
    for (const auto& [o1, o2] : binaryRelOf(m, a, ds)) {
        Value q = ds.val(o2, a.qualifierAttr);
        if (!seen.insert({o1, q}).second)
            throw Error("association " + a.name + ": qualifier " + q.str() + " of " + o1.str() +
                        " resolves to more than one target");
        out.emplace_back(o1, std::move(q), o2);
    }
    return out;
}

} // namespace sysmodel
