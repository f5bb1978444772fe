#ifndef SYSMODEL_STORE_HPP
#define SYSMODEL_STORE_HPP

// Data stores: finite maps from oids to instances, plus association
// extraction (links, navigation, multiplicity checks) over a store.

#include "sysmodel/model.hpp"

#include <map>
#include <vector>

namespace sysmodel {

// Immutable by convention: update operations return a new store.
class DataStore {
public:
    DataStore() = default;

    bool has(const Oid& o) const { return map_.count(o) != 0; }
    const Instance& get(const Oid& o) const;
    std::vector<Oid> oids() const;
    std::size_t size() const { return map_.size(); }

    // Add a fresh object; its oid must not be allocated yet and must not be
    // Nil or the environment.
    DataStore addObj(Instance inst) const;

    // Read attribute a of object o.
    const Value& val(const Oid& o, const std::string& attr) const;

    // Override attribute a of object o.
    DataStore setVal(const Oid& o, const std::string& attr, Value v) const;

    const std::map<Oid, Instance>& map() const { return map_; }

    friend bool operator==(const DataStore& a, const DataStore& b) { return a.map_ == b.map_; }
    friend bool operator!=(const DataStore& a, const DataStore& b) { return !(a == b); }

private:
    std::map<Oid, Instance> map_;
};

// Check every instance against the model: attrs match the declared set and
// their values lie in the declared carriers.
ValidationReport validateStore(const ModelDef& m, const DataStore& ds);

// ---- associations ----

// A link: one oid per association end plus an optional extra payload.
struct Link {
    std::vector<Oid> ends;
    Value extra; // void when absent
    friend bool operator==(const Link& a, const Link& b) {
        return a.ends == b.ends && a.extra == b.extra;
    }
    friend bool operator<(const Link& a, const Link& b) {
        if (a.ends != b.ends) return a.ends < b.ends;
        return a.extra < b.extra;
    }
};

// Extract the links of an association as realized in the given store.
// Throws on realization inconsistencies (e.g. a stale back-collection).
std::vector<Link> relOf(const ModelDef& m, const AssocDef& a, const DataStore& ds);

// Binary projection of relOf: (first end, second end) pairs.
std::vector<std::pair<Oid, Oid>> binaryRelOf(const ModelDef& m, const AssocDef& a,
                                             const DataStore& ds);

// Link targets of o1: all o2 with (o1, o2) linked.
std::vector<Oid> destinations(const ModelDef& m, const AssocDef& a, const DataStore& ds,
                              const Oid& o1);

// Link origins of o2: all o1 with (o1, o2) linked.
std::vector<Oid> sources(const ModelDef& m, const AssocDef& a, const DataStore& ds,
                         const Oid& o2);

// One violation per (oid, side) whose link count falls outside the declared
// multiplicity set; associations without a declared multiplicity are skipped.
std::vector<Violation> checkMultiplicities(const ModelDef& m, const DataStore& ds);

// Targets of o1 sorted by the association's order keys (ties broken by oid).
// Requires a declared ordering.
std::vector<Oid> orderedRelOf(const ModelDef& m, const AssocDef& a, const DataStore& ds,
                              const Oid& o1);

// Qualified navigation: (o1, qualifier value, o2) triples where the
// qualifier is the declared attribute of o2.  Throws when some (o1, q)
// resolves to more than one target.
std::vector<std::tuple<Oid, Value, Oid>> qualifiedRelOf(const ModelDef& m, const AssocDef& a,
                                                        const DataStore& ds);

} // namespace sysmodel

#endif
