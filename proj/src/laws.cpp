#include "sysmodel/laws.hpp"

#include "sysmodel/engine.hpp"
#include "sysmodel/streams.hpp"

#include <algorithm>
#include <random>
#include <sstream>

namespace sysmodel {

namespace {

int pick(std::mt19937_64& rng, int n) {
    return static_cast<int>(rng() % static_cast<std::uint64_t>(n));
}

bool chance(std::mt19937_64& rng, int percent) { return pick(rng, 100) < percent; }

void note(LawResult& r, const std::string& what) {
    ++r.failures;
    if (r.notes.size() < 5) r.notes.push_back(what);
}

Value randomValue(std::mt19937_64& rng, int depth) {
    switch (pick(rng, depth > 0 ? 7 : 5)) {
    case 0: return Value(Int(pick(rng, 2001) - 1000));
    case 1: return Value(pick(rng, 2) == 0);
    case 2: return Value(std::string(1 + pick(rng, 3), static_cast<char>('a' + pick(rng, 26))));
    case 3: return Value(Oid{std::string(1, static_cast<char>('A' + pick(rng, 3))),
                             static_cast<std::uint64_t>(1 + pick(rng, 3))});
    case 4: return Value(VoidValue{});
    case 5: {
        TupleValue t;
        int k = pick(rng, 3);
        for (int i = 0; i < k; ++i) t.items.push_back(randomValue(rng, depth - 1));
        return Value(std::move(t));
    }
    default: {
        RecordValue r;
        int k = pick(rng, 3);
        for (int i = 0; i < k; ++i)
            r.set(std::string(1, static_cast<char>('p' + i)), randomValue(rng, depth - 1));
        return Value(std::move(r));
    }
    }
}

Stream<int> randomStream(std::mt19937_64& rng, int maxLen) {
    Stream<int> s(static_cast<std::size_t>(pick(rng, maxLen + 1)));
    for (auto& x : s) x = pick(rng, 5);
    return s;
}

} // namespace

// ---- kernel ----

std::vector<LawResult> kernelLawSuite(std::uint64_t seed, int n) {
    std::mt19937_64 rng(seed);
    LawResult roundtrip{"record-tuple-roundtrip"};
    LawResult basic{"stream-structure"};
    LawResult extra{"stream-operators"};

    for (int i = 0; i < n; ++i) {
        // tuple -> record -> tuple and record -> tuple -> record
        int k = pick(rng, 6);
        std::vector<std::string> names;
        for (int j = 0; j < k; ++j) names.push_back("a" + std::to_string(j));
        std::shuffle(names.begin(), names.end(), rng);
        TupleValue t;
        for (int j = 0; j < k; ++j) t.items.push_back(randomValue(rng, 2));
        ++roundtrip.cases;
        if (tupleOfRec(names, recOfTuple(names, t)) != t)
            note(roundtrip, "tuple round trip broke at case " + std::to_string(i));
        RecordValue r;
        for (const auto& nm : names) r.set(nm, randomValue(rng, 2));
        ++roundtrip.cases;
        if (recOfTuple(names, tupleOfRec(names, r)) != r)
            note(roundtrip, "record round trip broke at case " + std::to_string(i));
    }

    for (int i = 0; i < n; ++i) {
        auto s = randomStream(rng, 8);
        auto r = randomStream(rng, 8);
        int x = pick(rng, 5);
        auto xs = concat<int>({x}, s);
        ++basic.cases;
        if (xs.size() != 1 + s.size() || fst(xs) != x || rst(xs) != s)
            note(basic, "cons decomposition broke at case " + std::to_string(i));
        if (!s.empty()) {
            ++basic.cases;
            if (fst(concat(s, r)) != fst(s) || rst(concat(s, r)) != concat(rst(s), r))
                note(basic, "concat head/tail broke at case " + std::to_string(i));
        }
        ++basic.cases;
        auto z = randomStream(rng, 8);
        if (concat(concat(s, r), z) != concat(s, concat(r, z)))
            note(basic, "concat associativity broke at case " + std::to_string(i));
    }

    for (int i = 0; i < n; ++i) {
        auto s = randomStream(rng, 8);
        auto r = randomStream(rng, 8);
        auto t = randomStream(rng, 6);
        std::size_t cut = static_cast<std::size_t>(pick(rng, 12));
        ++extra.cases;
        if (take(s, cut).size() != std::min(cut, s.size()) || !isPrefix(take(s, cut), s))
            note(extra, "take prefix law broke at case " + std::to_string(i));
        ++extra.cases;
        if (!isPrefix(s, concat(s, r)))
            note(extra, "prefix-of-extension broke at case " + std::to_string(i));
        ++extra.cases;
        if (isPrefix(s, r) != isPrefix(concat(t, s), concat(t, r)))
            note(extra, "prefix congruence broke at case " + std::to_string(i));
        auto f = [](int v) { return v * 2 + 1; };
        auto p = [](int v) { return v % 2 == 0; };
        ++extra.cases;
        if (mapOver<int>(f, concat(s, r)) != concat(mapOver<int>(f, s), mapOver<int>(f, r)))
            note(extra, "map over concat broke at case " + std::to_string(i));
        ++extra.cases;
        if (filterBy(p, concat(s, r)) != concat(filterBy(p, s), filterBy(p, r)))
            note(extra, "filter over concat broke at case " + std::to_string(i));
        ++extra.cases;
        if (countBy(p, s) != filterBy(p, s).size())
            note(extra, "count/filter agreement broke at case " + std::to_string(i));
    }

    return {roundtrip, basic, extra};
}

// ---- control stores ----

namespace {

CentralControlStore randomCentralStore(std::mt19937_64& rng, int& uniq) {
    const std::vector<Oid> pool = {{"A", 1}, {"A", 2}, {"B", 1}, {"B", 2}, {"C", 1}};
    CentralControlStore ccs;
    int threads = 1 + pick(rng, 4);
    for (int t = 0; t < threads; ++t) {
        FrameStack st;
        int depth = pick(rng, 7);
        Oid caller = Oid::env();
        for (int d = 0; d < depth; ++d) {
            Frame f;
            f.callee = pool[static_cast<std::size_t>(pick(rng, static_cast<int>(pool.size())))];
            f.op = "f";
            f.vars.set("i", Value::ofInt(++uniq)); // keep frames pairwise distinct
            f.pc = "P1";
            f.caller = caller;
            caller = f.callee;
            st.push(std::move(f));
        }
        ccs.setStack("t" + std::to_string(t + 1), std::move(st));
    }
    return ccs;
}

} // namespace

std::vector<LawResult> controlLawSuite(std::uint64_t seed, int n) {
    std::mt19937_64 rng(seed);
    LawResult law{"control-store-roundtrip"};
    int uniq = 0;
    for (int i = 0; i < n; ++i) {
        CentralControlStore ccs = randomCentralStore(rng, uniq);
        ++law.cases;
        if (!ccs.check().empty()) {
            note(law, "generated store breaks the caller chain at case " + std::to_string(i));
            continue;
        }
        ControlStore cs = decentralize(ccs);
        try {
            if (centralize(cs) != ccs) {
                note(law, "centralize(decentralize) differs at case " + std::to_string(i));
                continue;
            }
        } catch (const Error& e) {
            note(law, std::string("centralize failed: ") + e.what());
            continue;
        }
        if (decentralize(centralize(cs)) != cs)
            note(law, "decentralize(centralize) differs at case " + std::to_string(i));
    }
    return {law};
}

// ---- group states ----

namespace {

ModelDef stateLawModel() {
    ModelDef m;
    m.name = "statelaw";
    m.classes.push_back({"C", {{"a", "Int"}, {"b", "Bool"}}, 6});
    m.threads = {"t1", "t2"};
    return m;
}

SysState randomSysState(const ModelDef& m, std::mt19937_64& rng) {
    SysState s;
    for (std::uint64_t i = 1; i <= 6; ++i) {
        if (!chance(rng, 80)) continue;
        Instance inst = mkInstance(m, "C", i);
        inst.attrs.set("a", Value::ofInt(pick(rng, 100)));
        inst.attrs.set("b", Value(pick(rng, 2) == 0));
        s.ds = s.ds.addObj(inst);
    }
    for (const auto& o : s.ds.oids()) {
        for (const auto& th : m.threads) {
            if (!chance(rng, 40)) continue;
            FrameStack st;
            int depth = 1 + pick(rng, 3);
            Oid caller = Oid::env();
            for (int d = 0; d < depth; ++d) {
                Frame f;
                f.callee = o;
                f.op = "f";
                f.vars.set("n", Value::ofInt(pick(rng, 50)));
                f.pc = "P1";
                f.caller = caller;
                caller = o;
                st.push(std::move(f));
            }
            s.cs.setStack(o, th, std::move(st));
        }
        if (chance(rng, 50)) {
            int k = 1 + pick(rng, 2);
            for (int j = 0; j < k; ++j)
                s.es = s.es.enqueue(o, mkReturn(o, Value::ofInt(pick(rng, 9)), Oid::env(), "t1"));
        }
    }
    return s;
}

std::set<Oid> randomOidSet(std::mt19937_64& rng) {
    std::set<Oid> out;
    for (std::uint64_t i = 1; i <= 6; ++i)
        if (chance(rng, 50)) out.insert(Oid{"C", i});
    return out;
}

GroupState groupRestrict(const GroupState& g, const std::set<Oid>& os) {
    GroupState out;
    for (const auto& [o, st] : g)
        if (os.count(o)) out.emplace(o, st);
    return out;
}

std::set<Oid> setMinus(const std::set<Oid>& a, const std::set<Oid>& b) {
    std::set<Oid> out;
    for (const auto& x : a)
        if (!b.count(x)) out.insert(x);
    return out;
}

} // namespace

std::vector<LawResult> stateLawSuite(std::uint64_t seed, int n) {
    std::mt19937_64 rng(seed);
    ModelDef m = stateLawModel();
    LawResult comp{"group-state-composition"};
    LawResult overlap{"group-state-overlap-identities"};
    for (int i = 0; i < n; ++i) {
        SysState s = randomSysState(m, rng);
        std::set<Oid> os1 = randomOidSet(rng);
        std::set<Oid> os2 = randomOidSet(rng);
        std::set<Oid> both = os1;
        both.insert(os2.begin(), os2.end());
        GroupState g1 = groupState(s, os1);
        GroupState g2 = groupState(s, os2);
        GroupState whole = groupState(s, both);

        ++comp.cases;
        if (whole != groupOverride(g1, g2))
            note(comp, "union/override mismatch at case " + std::to_string(i));

        std::set<Oid> shared;
        for (const auto& o : os1)
            if (os2.count(o)) shared.insert(o);
        ++overlap.cases;
        if (whole != groupOverride(g1, groupRestrict(g2, setMinus(os2, os1))))
            note(overlap, "right-trimmed override differs at case " + std::to_string(i));
        ++overlap.cases;
        if (whole != groupOverride(groupRestrict(g1, setMinus(os1, os2)), g2))
            note(overlap, "left-trimmed override differs at case " + std::to_string(i));
        ++overlap.cases;
        if (groupRestrict(g1, shared) != groupRestrict(g2, shared))
            note(overlap, "projections disagree on shared objects at case " + std::to_string(i));
    }
    return {comp, overlap};
}

// ---- machines ----

TstsDef mkMachine(const MachineSpec& spec, const std::string& cin, const std::string& cout) {
    TstsDef a;
    a.inC = {cin};
    a.outC = {cout};
    a.alpha.maxPerSlot = 1;
    a.alpha.messages[cin] = spec.symbols;
    a.alpha.messages[cout] = spec.symbols;
    a.init = {"0"};
    auto symbols = spec.symbols;
    auto table = spec.table;
    a.delta = [symbols, table, cin, cout](const std::string& key, const TimeSlice& in)
        -> std::vector<std::pair<std::string, TimeSlice>> {
        std::size_t s = static_cast<std::size_t>(std::stoi(key));
        const auto& msgs = in.on(cin);
        std::size_t j = 0;
        if (!msgs.empty()) {
            auto it = std::find(symbols.begin(), symbols.end(), msgs.front());
            if (it == symbols.end())
                throw Error("message outside the machine alphabet: " + msgs.front());
            j = 1 + static_cast<std::size_t>(it - symbols.begin());
        }
        std::vector<std::pair<std::string, TimeSlice>> res;
        std::set<std::pair<std::string, TimeSlice>> seen;
        for (const auto& [succ, out] : table[s][j]) {
            TimeSlice o;
            if (out >= 0) o.add(cout, symbols[static_cast<std::size_t>(out)]);
            auto item = std::make_pair(std::to_string(succ), o);
            if (seen.insert(item).second) res.push_back(std::move(item));
        }
        return res;
    };
    return a;
}

TstsDef zeroDelayCopier(const std::string& cin, const std::string& cout,
                        const std::vector<std::string>& symbols) {
    TstsDef a;
    a.inC = {cin};
    a.outC = {cout};
    a.alpha.maxPerSlot = 1;
    a.alpha.messages[cin] = symbols;
    a.alpha.messages[cout] = symbols;
    a.init = {"0"};
    a.delta = [cin, cout](const std::string&, const TimeSlice& in)
        -> std::vector<std::pair<std::string, TimeSlice>> {
        TimeSlice o;
        for (const auto& msg : in.on(cin)) o.add(cout, msg);
        return {{"0", o}};
    };
    return a;
}

std::string bisimKey(const TstsDef& a, std::size_t depth) {
    auto states = reachableStates(a, depth);
    auto slices = enumSlices(a.inC, a.alpha);
    // bounded bisimulation classes by iterated refinement
    std::map<std::string, std::string> sig;
    for (const auto& s : states) sig[s] = "";
    auto classOf = [&sig](const std::string& s) {
        auto it = sig.find(s);
        return it == sig.end() ? std::string("?") : it->second;
    };
    auto signatureOf = [&](const std::string& s) {
        std::ostringstream os;
        for (const auto& in : slices) {
            std::set<std::string> succ;
            for (const auto& [t, out] : a.delta(s, in))
                succ.insert(out.str() + "|" + classOf(t));
            os << in.str() << "->{";
            for (const auto& x : succ) os << x << ";";
            os << "} ";
        }
        return os.str();
    };
    for (std::size_t round = 0; round < depth; ++round) {
        std::map<std::string, int> cls; // class id by sorted signature text
        std::map<std::string, std::string> raw;
        for (const auto& s : states) {
            raw[s] = signatureOf(s);
            cls.emplace(raw[s], 0);
        }
        int next = 0;
        for (auto& [v, id] : cls) id = next++;
        std::map<std::string, std::string> refined;
        for (const auto& s : states) refined[s] = std::to_string(cls[raw[s]]);
        if (refined == sig) break;
        sig = std::move(refined);
    }
    // canonical quotient table: one row per class in numeric order, written
    // in terms of class ids, plus the set of initial classes
    std::map<std::string, std::string> rows; // class -> one-step signature
    for (const auto& s : states) rows.emplace(classOf(s), signatureOf(s));
    std::ostringstream os;
    os << "init{";
    std::set<std::string> inits;
    for (const auto& s : a.init) inits.insert(classOf(s));
    for (const auto& x : inits) os << x << ",";
    os << "} ";
    for (const auto& [c, row] : rows) os << c << ":" << row << "; ";
    return os.str();
}

// ---- causality ----

namespace {

MachineSpec randomMoore(std::mt19937_64& rng, int maxStates, int nSymbols) {
    MachineSpec spec;
    spec.states = 1 + pick(rng, maxStates);
    for (int i = 0; i < nSymbols; ++i)
        spec.symbols.push_back(std::string(1, static_cast<char>('a' + i)));
    int inputs = 1 + nSymbols;
    spec.table.assign(static_cast<std::size_t>(spec.states), {});
    for (int s = 0; s < spec.states; ++s) {
        // output choices of this state, independent of the input
        std::set<int> outs{pick(rng, nSymbols + 1) - 1};
        if (chance(rng, 30)) outs.insert(pick(rng, nSymbols + 1) - 1);
        auto& row = spec.table[static_cast<std::size_t>(s)];
        row.assign(static_cast<std::size_t>(inputs), {});
        for (int j = 0; j < inputs; ++j)
            for (int out : outs) {
                int branches = 1 + (chance(rng, 25) ? 1 : 0);
                for (int b = 0; b < branches; ++b)
                    row[static_cast<std::size_t>(j)].emplace_back(pick(rng, spec.states), out);
            }
    }
    return spec;
}

} // namespace

std::vector<LawResult> causalityLawSuite(std::uint64_t seed, int machines, std::size_t horizon) {
    std::mt19937_64 rng(seed);
    LawResult law{"time-guarded-implies-properly-timed"};
    for (int i = 0; i < machines; ++i) {
        MachineSpec spec = randomMoore(rng, 4, chance(rng, 50) ? 1 : 2);
        TstsDef a = mkMachine(spec, "x", "y");
        BehaviorTable f = abstraction(a, horizon);
        ++law.cases;
        if (!isTimeGuarded(f)) {
            note(law, "abstraction not time guarded at case " + std::to_string(i));
            continue;
        }
        if (!isProperlyTimed(f))
            note(law, "time guarded but not properly timed at case " + std::to_string(i));
    }
    LawResult neg{"zero-delay-copier-negative-control"};
    BehaviorTable c = abstraction(zeroDelayCopier("x", "y", {"a"}), horizon);
    ++neg.cases;
    if (isTimeGuarded(c)) note(neg, "copier wrongly classified as time guarded");
    ++neg.cases;
    if (!isProperlyTimed(c)) note(neg, "copier should still be properly timed");
    return {law, neg};
}

// ---- composition ----

namespace {

// every deterministic two-state machine over one symbol: outputs per state,
// successors per state and input
std::vector<MachineSpec> detTwoStateFamily() {
    std::vector<MachineSpec> out;
    for (int mask = 0; mask < (1 << 6); ++mask) {
        MachineSpec spec;
        spec.states = 2;
        spec.symbols = {"a"};
        spec.table.assign(2, std::vector<std::vector<std::pair<int, int>>>(2));
        for (int s = 0; s < 2; ++s) {
            int outSym = (mask >> s) & 1 ? 0 : -1;
            for (int j = 0; j < 2; ++j) {
                int succ = (mask >> (2 + 2 * s + j)) & 1;
                spec.table[s][j] = {{succ, outSym}};
            }
        }
        out.push_back(std::move(spec));
    }
    return out;
}

// every deterministic three-state machine over one symbol whose successor
// ignores the input
std::vector<MachineSpec> detThreeStateFamily() {
    std::vector<MachineSpec> out;
    for (int s0 = 0; s0 < 3; ++s0)
        for (int s1 = 0; s1 < 3; ++s1)
            for (int s2 = 0; s2 < 3; ++s2)
                for (int omask = 0; omask < 8; ++omask) {
                    MachineSpec spec;
                    spec.states = 3;
                    spec.symbols = {"a"};
                    spec.table.assign(3, std::vector<std::vector<std::pair<int, int>>>(2));
                    int succ[3] = {s0, s1, s2};
                    for (int s = 0; s < 3; ++s) {
                        int outSym = (omask >> s) & 1 ? 0 : -1;
                        for (int j = 0; j < 2; ++j) spec.table[s][j] = {{succ[s], outSym}};
                    }
                    out.push_back(std::move(spec));
                }
    return out;
}

std::vector<MachineSpec> dedupeByBehavior(const std::vector<MachineSpec>& specs,
                                          std::size_t depth) {
    std::vector<MachineSpec> out;
    std::set<std::string> seen;
    for (const auto& spec : specs)
        if (seen.insert(bisimKey(mkMachine(spec, "x", "y"), depth)).second) out.push_back(spec);
    return out;
}

// machines get unfolded many times over the same few states; cache the
// transition function
TstsDef cached(const TstsDef& a) {
    TstsDef out = a;
    auto d = a.delta;
    auto cache = std::make_shared<
        std::map<std::pair<std::string, std::string>,
                 std::vector<std::pair<std::string, TimeSlice>>>>();
    out.delta = [d, cache](const std::string& s, const TimeSlice& x) {
        auto key = std::make_pair(s, x.str());
        auto it = cache->find(key);
        if (it != cache->end()) return it->second;
        auto res = d(s, x);
        cache->emplace(std::move(key), res);
        return res;
    };
    return out;
}

struct PairCheck {
    LawResult* fullAbs;
    LawResult* comm;
    std::size_t horizon;
};

void checkPair(const TstsDef& a1, const BehaviorTable& s1, const TstsDef& a2,
               const BehaviorTable& s2, const PairCheck& pc, const std::string& tag) {
    TstsDef c12 = cached(tstsCompose(a1, a2));
    BehaviorTable absC = abstraction(c12, pc.horizon);
    BehaviorTable composed = behaviorCompose(s1, s2);
    ++pc.fullAbs->cases;
    if (absC != composed) note(*pc.fullAbs, "abstraction/composition mismatch at " + tag);

    TstsDef c21 = cached(tstsCompose(a2, a1));
    ++pc.comm->cases;
    if (bisimKey(c12, pc.horizon + 1) != bisimKey(c21, pc.horizon + 1))
        note(*pc.comm, "machine composition not commutative at " + tag);
    ++pc.comm->cases;
    if (abstraction(c21, pc.horizon) != absC)
        note(*pc.comm, "swapped composition abstraction differs at " + tag);
    ++pc.comm->cases;
    if (behaviorCompose(s2, s1) != composed)
        note(*pc.comm, "behavior composition not commutative at " + tag);
}

} // namespace

std::vector<LawResult> compositionLawSuite(std::uint64_t seed, int randomPairs,
                                           std::size_t horizon) {
    std::mt19937_64 rng(seed);
    LawResult fullAbsEx{"full-abstraction-exhaustive"};
    LawResult fullAbsRnd{"full-abstraction-random"};
    LawResult comm{"composition-commutative"};
    LawResult assoc{"composition-associative"};
    PairCheck exCheck{&fullAbsEx, &comm, horizon};
    PairCheck rndCheck{&fullAbsRnd, &comm, horizon};

    // exhaustive family, trimmed to behaviorally distinct representatives
    std::vector<MachineSpec> family = detTwoStateFamily();
    for (auto& spec : detThreeStateFamily()) family.push_back(std::move(spec));
    family = dedupeByBehavior(family, horizon + 1);

    std::vector<TstsDef> left, right;
    std::vector<BehaviorTable> leftAbs, rightAbs;
    for (const auto& spec : family) {
        left.push_back(cached(mkMachine(spec, "x", "y")));
        leftAbs.push_back(abstraction(left.back(), horizon));
        right.push_back(cached(mkMachine(spec, "y", "z")));
        rightAbs.push_back(abstraction(right.back(), horizon));
    }
    for (std::size_t i = 0; i < family.size(); ++i)
        for (std::size_t j = 0; j < family.size(); ++j)
            checkPair(left[i], leftAbs[i], right[j], rightAbs[j], exCheck,
                      "family pair " + std::to_string(i) + "/" + std::to_string(j));

    for (int i = 0; i < randomPairs; ++i) {
        MachineSpec m1 = randomMoore(rng, 4, 2);
        MachineSpec m2 = randomMoore(rng, 4, 2);
        TstsDef a1 = cached(mkMachine(m1, "x", "y"));
        TstsDef a2 = cached(mkMachine(m2, "y", "z"));
        checkPair(a1, abstraction(a1, horizon), a2, abstraction(a2, horizon), rndCheck,
                  "random pair " + std::to_string(i));
    }

    for (int i = 0; i < 60; ++i) {
        int nSym = i % 3 == 0 ? 2 : 1;
        MachineSpec m1 = randomMoore(rng, 3, nSym);
        MachineSpec m2 = randomMoore(rng, 3, nSym);
        MachineSpec m3 = randomMoore(rng, 3, nSym);
        TstsDef a1 = cached(mkMachine(m1, "x", "y"));
        TstsDef a2 = cached(mkMachine(m2, "y", "z"));
        TstsDef a3 = cached(mkMachine(m3, "z", "w"));
        TstsDef l = cached(tstsCompose(cached(tstsCompose(a1, a2)), a3));
        TstsDef r = cached(tstsCompose(a1, cached(tstsCompose(a2, a3))));
        std::string tag = "triple " + std::to_string(i);
        ++assoc.cases;
        if (bisimKey(l, horizon + 1) != bisimKey(r, horizon + 1))
            note(assoc, "machine associativity broke at " + tag);
        BehaviorTable la = abstraction(l, horizon);
        ++assoc.cases;
        if (la != abstraction(r, horizon)) note(assoc, "abstraction associativity broke at " + tag);
        BehaviorTable s1 = abstraction(a1, horizon);
        BehaviorTable s2 = abstraction(a2, horizon);
        BehaviorTable s3 = abstraction(a3, horizon);
        ++assoc.cases;
        if (behaviorCompose(behaviorCompose(s1, s2), s3) !=
            behaviorCompose(s1, behaviorCompose(s2, s3)))
            note(assoc, "behavior associativity broke at " + tag);
    }

    fullAbsEx.notes.insert(fullAbsEx.notes.begin(),
                           std::to_string(family.size()) + " distinct family machines");
    return {fullAbsEx, fullAbsRnd, comm, assoc};
}

// ---- channels ----

std::vector<LawResult> channelLawSuite(std::uint64_t seed, int n) {
    std::mt19937_64 rng(seed);
    LawResult law{"channel-discipline"};
    LawResult hide{"group-channel-hiding"};
    for (int i = 0; i < n; ++i) {
        ModelDef m;
        m.name = "chans";
        std::uint64_t nObj = static_cast<std::uint64_t>(2 + pick(rng, 4));
        m.classes.push_back({"C", {}, nObj});
        m.threads = {"t1"};
        std::vector<Oid> pool{Oid::env()};
        for (std::uint64_t k = 1; k <= nObj; ++k) pool.push_back(Oid{"C", k});
        int nCh = 1 + pick(rng, 6);
        std::set<std::pair<Oid, Oid>> used;
        for (int c = 0; c < nCh; ++c) {
            Oid from = pool[static_cast<std::size_t>(pick(rng, static_cast<int>(pool.size())))];
            Oid to = pool[static_cast<std::size_t>(pick(rng, static_cast<int>(pool.size())))];
            if (from == to || !used.insert({from, to}).second) continue;
            m.channels.push_back({"c" + std::to_string(c), from, to, {}});
        }

        ++law.cases;
        if (!checkChannelDiscipline(m).empty()) {
            note(law, "well-formed configuration flagged at case " + std::to_string(i));
            continue;
        }
        // pairwise disjoint output channels, checked directly
        bool disjoint = true;
        for (std::size_t a = 1; a < pool.size() && disjoint; ++a)
            for (std::size_t b = a + 1; b < pool.size() && disjoint; ++b)
                for (const auto& c : outChannelsOf(m, pool[a]))
                    if (outChannelsOf(m, pool[b]).count(c)) disjoint = false;
        ++law.cases;
        if (!disjoint) note(law, "output channels overlap at case " + std::to_string(i));

        std::set<Oid> group;
        for (std::uint64_t k = 1; k <= nObj; ++k)
            if (chance(rng, 50)) group.insert(Oid{"C", k});
        std::set<std::string> expIn, expOut;
        for (const auto& ch : m.channels) {
            if (group.count(ch.to) && !group.count(ch.from)) expIn.insert(ch.name);
            if (group.count(ch.from) && !group.count(ch.to)) expOut.insert(ch.name);
        }
        ++hide.cases;
        if (groupInChannels(m, group) != expIn || groupOutChannels(m, group) != expOut)
            note(hide, "group interface hides the wrong channels at case " + std::to_string(i));
    }

    // negative control: one channel name claimed by two senders
    ModelDef bad;
    bad.name = "badchans";
    bad.classes.push_back({"C", {}, 2});
    bad.channels.push_back({"c", Oid{"C", 1}, Oid::env(), {}});
    bad.channels.push_back({"c", Oid{"C", 2}, Oid::env(), {}});
    ++law.cases;
    if (checkChannelDiscipline(bad).empty())
        note(law, "shared output channel went undetected");

    return {law, hide};
}

std::vector<LawResult> allLawSuites(std::uint64_t seed) {
    std::vector<LawResult> out;
    auto add = [&out](std::vector<LawResult> rs) {
        for (auto& r : rs) out.push_back(std::move(r));
    };
    add(kernelLawSuite(seed, 1000));
    add(controlLawSuite(seed + 1, 1000));
    add(stateLawSuite(seed + 2, 500));
    add(causalityLawSuite(seed + 3, 200, 3));
    add(compositionLawSuite(seed + 4, 100, 5));
    add(channelLawSuite(seed + 5, 200));
    return out;
}

} // namespace sysmodel
