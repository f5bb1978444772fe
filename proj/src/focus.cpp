#include "sysmodel/focus.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace sysmodel {

// ---- slices and histories ----

namespace {
const std::vector<std::string> kNoMsgs;
}

const std::vector<std::string>& TimeSlice::on(const std::string& c) const {
    auto it = at.find(c);
    return it == at.end() ? kNoMsgs : it->second;
}

void TimeSlice::add(const std::string& c, std::string msg) {
    at[c].push_back(std::move(msg));
}

std::string TimeSlice::str() const {
    std::ostringstream os;
    os << "{";
    bool firstC = true;
    for (const auto& [c, msgs] : at) {
        if (!firstC) os << "; ";
        firstC = false;
        os << c << ": ";
        bool first = true;
        for (const auto& m : msgs) {
            if (!first) os << ", ";
            first = false;
            os << m;
        }
    }
    os << "}";
    return os.str();
}

TimeSlice sliceMerge(const TimeSlice& a, const TimeSlice& b) {
    TimeSlice out = a;
    for (const auto& [c, msgs] : b.at) {
        if (msgs.empty())
            out.at.erase(c);
        else
            out.at[c] = msgs;
    }
    return out;
}

TimeSlice sliceRestrict(const TimeSlice& s, const std::set<std::string>& channels) {
    TimeSlice out;
    for (const auto& [c, msgs] : s.at)
        if (channels.count(c) && !msgs.empty()) out.at[c] = msgs;
    return out;
}

std::string TimedHistory::str() const {
    std::ostringstream os;
    os << "[";
    for (std::size_t t = 0; t < slices.size(); ++t) {
        if (t) os << " | ";
        os << slices[t].str();
    }
    os << "]";
    return os.str();
}

TimedHistory histEmpty(const std::set<std::string>& channels, std::size_t horizon) {
    TimedHistory h;
    h.channels = channels;
    h.slices.resize(horizon);
    return h;
}

TimedHistory histMerge(const TimedHistory& a, const TimedHistory& b) {
    if (a.horizon() != b.horizon()) throw Error("histMerge: horizons differ");
    TimedHistory out;
    out.channels = a.channels;
    out.channels.insert(b.channels.begin(), b.channels.end());
    out.slices.reserve(a.horizon());
    for (std::size_t t = 0; t < a.horizon(); ++t) {
        // right operand wins on its own channels, even when silent there
        TimeSlice s = a.slices[t];
        for (const auto& c : b.channels) s.at.erase(c);
        out.slices.push_back(sliceMerge(s, b.slices[t]));
    }
    return out;
}

TimedHistory histRestrict(const TimedHistory& h, const std::set<std::string>& channels) {
    TimedHistory out;
    for (const auto& c : channels)
        if (h.channels.count(c)) out.channels.insert(c);
    out.slices.reserve(h.horizon());
    for (const auto& s : h.slices) out.slices.push_back(sliceRestrict(s, out.channels));
    return out;
}

TimedHistory histDown(const TimedHistory& h, std::size_t t) {
    TimedHistory out;
    out.channels = h.channels;
    t = std::min(t, h.horizon());
    out.slices.assign(h.slices.begin(), h.slices.begin() + static_cast<std::ptrdiff_t>(t));
    return out;
}

TimeSlice cdist(const std::map<std::string, std::function<bool(const std::string&)>>& csort,
                const std::vector<std::string>& msgs) {
    TimeSlice out;
    for (const auto& [c, pred] : csort)
        for (const auto& m : msgs)
            if (pred(m)) out.add(c, m);
    return out;
}

// ---- enumeration ----

std::vector<TimeSlice> enumSlices(const std::set<std::string>& channels,
                                  const ChannelAlphabet& alpha) {
    std::vector<TimeSlice> acc{TimeSlice{}};
    for (const auto& c : channels) {
        std::vector<std::string> msgs;
        auto it = alpha.messages.find(c);
        if (it != alpha.messages.end()) msgs = it->second;
        // all sequences over msgs of length 0..maxPerSlot
        std::vector<std::vector<std::string>> seqs{{}};
        std::vector<std::vector<std::string>> layer{{}};
        for (int l = 1; l <= alpha.maxPerSlot; ++l) {
            std::vector<std::vector<std::string>> next;
            for (const auto& s : layer)
                for (const auto& m : msgs) {
                    auto s2 = s;
                    s2.push_back(m);
                    next.push_back(s2);
                }
            seqs.insert(seqs.end(), next.begin(), next.end());
            layer = std::move(next);
        }
        std::vector<TimeSlice> nextAcc;
        for (const auto& sl : acc)
            for (const auto& seq : seqs) {
                TimeSlice s2 = sl;
                if (!seq.empty()) s2.at[c] = seq;
                nextAcc.push_back(std::move(s2));
            }
        acc = std::move(nextAcc);
    }
    return acc;
}

std::vector<TimedHistory> enumHistories(const std::set<std::string>& channels,
                                        const ChannelAlphabet& alpha, std::size_t horizon) {
    auto slices = enumSlices(channels, alpha);
    std::vector<TimedHistory> acc{histEmpty(channels, 0)};
    for (std::size_t t = 0; t < horizon; ++t) {
        std::vector<TimedHistory> next;
        next.reserve(acc.size() * slices.size());
        for (const auto& h : acc)
            for (const auto& s : slices) {
                TimedHistory h2 = h;
                h2.slices.push_back(s);
                next.push_back(std::move(h2));
            }
        acc = std::move(next);
    }
    return acc;
}

// ---- behaviors ----

const std::set<TimedHistory>& BehaviorTable::at(const TimedHistory& in) const {
    auto it = table.find(in);
    if (it == table.end()) throw Error("behavior undefined on input " + in.str());
    return it->second;
}

bool isComplete(const BehaviorTable& f) {
    for (const auto& [x, ys] : f.table)
        if (ys.empty()) return false;
    return true;
}

bool isDeterministic(const BehaviorTable& f) {
    for (const auto& [x, ys] : f.table)
        if (ys.size() != 1) return false;
    return true;
}

namespace {

// outputs projected to outLen slices must agree whenever inputs projected
// to inLen slices agree
bool prefixDetermined(const BehaviorTable& f, std::size_t inLen, std::size_t outLen) {
    std::map<TimedHistory, std::set<TimedHistory>> seen;
    for (const auto& [x, ys] : f.table) {
        std::set<TimedHistory> proj;
        for (const auto& y : ys) proj.insert(histDown(y, outLen));
        TimedHistory key = histDown(x, inLen);
        auto it = seen.find(key);
        if (it == seen.end())
            seen.emplace(std::move(key), std::move(proj));
        else if (it->second != proj)
            return false;
    }
    return true;
}

} // namespace

bool isProperlyTimed(const BehaviorTable& f) {
    for (std::size_t t = 0; t <= f.horizon; ++t)
        if (!prefixDetermined(f, t, t)) return false;
    return true;
}

bool isTimeGuarded(const BehaviorTable& f) {
    for (std::size_t t = 0; t < f.horizon; ++t)
        if (!prefixDetermined(f, t, t + 1)) return false;
    return true;
}

bool refines(const BehaviorTable& f, const BehaviorTable& g) {
    if (f.inC != g.inC || f.outC != g.outC || f.horizon != g.horizon) return false;
    for (const auto& [x, ys] : g.table) {
        const auto& fs = f.at(x);
        for (const auto& y : ys)
            if (!fs.count(y)) return false;
    }
    return true;
}

namespace {

bool choiceConsistent(const std::vector<std::pair<const TimedHistory*, const TimedHistory*>>&
                          chosen,
                      const TimedHistory& x, const TimedHistory& y, std::size_t horizon) {
    for (const auto& [px, py] : chosen)
        for (std::size_t t = 0; t < horizon; ++t)
            if (histDown(*px, t) == histDown(x, t) && histDown(*py, t + 1) != histDown(y, t + 1))
                return false;
    return true;
}

bool realizeRec(const BehaviorTable& f,
                const std::vector<const TimedHistory*>& inputs, std::size_t idx,
                std::vector<std::pair<const TimedHistory*, const TimedHistory*>>& chosen) {
    if (idx == inputs.size()) return true;
    const TimedHistory& x = *inputs[idx];
    for (const auto& y : f.at(x)) {
        if (!choiceConsistent(chosen, x, y, f.horizon)) continue;
        chosen.emplace_back(&x, &y);
        if (realizeRec(f, inputs, idx + 1, chosen)) return true;
        chosen.pop_back();
    }
    return false;
}

} // namespace

bool realizableBounded(const BehaviorTable& f) {
    if (!isComplete(f)) return false;
    std::vector<const TimedHistory*> inputs;
    for (const auto& [x, _] : f.table) inputs.push_back(&x);
    std::vector<std::pair<const TimedHistory*, const TimedHistory*>> chosen;
    return realizeRec(f, inputs, 0, chosen);
}

namespace {

std::set<std::string> setMinus(const std::set<std::string>& a, const std::set<std::string>& b) {
    std::set<std::string> out;
    for (const auto& x : a)
        if (!b.count(x)) out.insert(x);
    return out;
}

std::set<std::string> setUnion(const std::set<std::string>& a, const std::set<std::string>& b) {
    std::set<std::string> out = a;
    out.insert(b.begin(), b.end());
    return out;
}

std::set<std::string> setInter(const std::set<std::string>& a, const std::set<std::string>& b) {
    std::set<std::string> out;
    for (const auto& x : a)
        if (b.count(x)) out.insert(x);
    return out;
}

ChannelAlphabet alphaUnion(const ChannelAlphabet& a, const ChannelAlphabet& b) {
    ChannelAlphabet out = a;
    out.maxPerSlot = std::max(a.maxPerSlot, b.maxPerSlot);
    for (const auto& [c, msgs] : b.messages) {
        auto& dst = out.messages[c];
        for (const auto& m : msgs)
            if (std::find(dst.begin(), dst.end(), m) == dst.end()) dst.push_back(m);
    }
    return out;
}

} // namespace

BehaviorTable behaviorCompose(const BehaviorTable& f1, const BehaviorTable& f2) {
    if (!setInter(f1.outC, f2.outC).empty())
        throw Error("behaviorCompose: output channels overlap");
    if (f1.horizon != f2.horizon) throw Error("behaviorCompose: horizons differ");
    const std::size_t T = f1.horizon;
    auto allOut = setUnion(f1.outC, f2.outC);
    auto allIn = setUnion(f1.inC, f2.inC);

    BehaviorTable out;
    out.inC = setMinus(allIn, allOut);
    out.outC = setMinus(allOut, allIn);
    out.alpha = alphaUnion(f1.alpha, f2.alpha);
    out.horizon = T;

    // When one side's input never sees an output channel, its outputs can be
    // looked up directly and fed to the other side, avoiding the candidate
    // cross product below.
    bool f1Direct = setInter(f1.inC, allOut).empty() && setInter(f2.inC, f2.outC).empty();
    bool f2Direct = setInter(f2.inC, allOut).empty() && setInter(f1.inC, f1.outC).empty();

    // candidate outputs: everything each behavior ever produces
    std::set<TimedHistory> cands1, cands2;
    if (!f1Direct && !f2Direct) {
        for (const auto& [x, ys] : f1.table) cands1.insert(ys.begin(), ys.end());
        for (const auto& [x, ys] : f2.table) cands2.insert(ys.begin(), ys.end());
    }
    bool f1Early = setInter(f1.inC, f2.outC).empty(); // f1's input independent of f2's output

    for (const auto& x : enumHistories(out.inC, out.alpha, T)) {
        std::set<TimedHistory> res;
        if (f1Direct) {
            for (const auto& y1 : f1.at(histRestrict(x, f1.inC))) {
                auto y = histMerge(x, y1);
                for (const auto& y2 : f2.at(histRestrict(y, f2.inC)))
                    res.insert(histRestrict(histMerge(y, y2), out.outC));
            }
        } else if (f2Direct) {
            for (const auto& y2 : f2.at(histRestrict(x, f2.inC))) {
                auto y = histMerge(x, y2);
                for (const auto& y1 : f1.at(histRestrict(y, f1.inC)))
                    res.insert(histRestrict(histMerge(y, y1), out.outC));
            }
        } else {
            for (const auto& y1 : cands1) {
                if (f1Early) {
                    auto y = histMerge(x, y1);
                    if (!f1.at(histRestrict(y, f1.inC)).count(y1)) continue;
                }
                for (const auto& y2 : cands2) {
                    auto y = histMerge(histMerge(x, y1), y2);
                    if (!f1Early && !f1.at(histRestrict(y, f1.inC)).count(y1)) continue;
                    if (!f2.at(histRestrict(y, f2.inC)).count(y2)) continue;
                    res.insert(histRestrict(y, out.outC));
                }
            }
        }
        out.table[x] = std::move(res);
    }
    return out;
}

// ---- timed machines ----

std::vector<std::string> reachableStates(const TstsDef& a, std::size_t depth) {
    auto inputs = enumSlices(a.inC, a.alpha);
    std::vector<std::string> order;
    std::set<std::string> seen;
    std::deque<std::pair<std::string, std::size_t>> queue;
    for (const auto& s : a.init)
        if (seen.insert(s).second) {
            order.push_back(s);
            queue.emplace_back(s, 0);
        }
    while (!queue.empty()) {
        auto [s, d] = queue.front();
        queue.pop_front();
        if (d >= depth) continue;
        for (const auto& i : inputs)
            for (const auto& [t, o] : a.delta(s, i))
                if (seen.insert(t).second) {
                    order.push_back(t);
                    queue.emplace_back(t, d + 1);
                }
    }
    return order;
}

std::vector<Violation> validateTsts(const TstsDef& a, std::size_t depth) {
    std::vector<Violation> out;
    auto inputs = enumSlices(a.inC, a.alpha);
    for (const auto& s : reachableStates(a, depth)) {
        std::optional<std::set<TimeSlice>> outputs;
        for (const auto& i : inputs) {
            auto succs = a.delta(s, i);
            if (succs.empty()) {
                out.push_back({"tsts-complete",
                               "state " + s + " has no successor on input " + i.str()});
                continue;
            }
            std::set<TimeSlice> outs;
            for (const auto& [t, o] : succs) outs.insert(o);
            if (!outputs)
                outputs = std::move(outs);
            else if (*outputs != outs)
                out.push_back({"tsts-output-independence",
                               "state " + s + ": outputs depend on the current input " +
                                   i.str()});
        }
    }
    return out;
}

bool isDeterministicTsts(const TstsDef& a, std::size_t depth) {
    if (a.init.size() != 1) return false;
    auto inputs = enumSlices(a.inC, a.alpha);
    for (const auto& s : reachableStates(a, depth))
        for (const auto& i : inputs)
            if (a.delta(s, i).size() != 1) return false;
    return true;
}

// length-prefixed pairing of state keys; unambiguous under nesting
static std::string pairKey(const std::string& s1, const std::string& s2) {
    return std::to_string(s1.size()) + ":" + s1 + s2;
}

static std::pair<std::string, std::string> splitPair(const std::string& s) {
    auto colon = s.find(':');
    if (colon == std::string::npos) throw Error("composite state key is not a pair");
    std::size_t len = 0;
    for (std::size_t i = 0; i < colon; ++i) {
        if (!std::isdigit(static_cast<unsigned char>(s[i])))
            throw Error("composite state key is not a pair");
        len = len * 10 + static_cast<std::size_t>(s[i] - '0');
    }
    if (colon + 1 + len > s.size()) throw Error("composite state key is not a pair");
    return {s.substr(colon + 1, len), s.substr(colon + 1 + len)};
}

TstsDef tstsCompose(const TstsDef& a1, const TstsDef& a2) {
    if (!setInter(a1.outC, a2.outC).empty())
        throw Error("tstsCompose: output channels overlap");
    auto allOut = setUnion(a1.outC, a2.outC);
    auto allIn = setUnion(a1.inC, a2.inC);

    TstsDef out;
    out.inC = setMinus(allIn, allOut);
    out.outC = setMinus(allOut, allIn);
    out.alpha = alphaUnion(a1.alpha, a2.alpha);
    for (const auto& s1 : a1.init)
        for (const auto& s2 : a2.init) out.init.push_back(pairKey(s1, s2));

    auto in1 = a1.inC, out1 = a1.outC, in2 = a2.inC, out2 = a2.outC;
    auto external = out.outC;
    auto d1 = a1.delta, d2 = a2.delta;
    out.delta = [d1, d2, in1, out1, in2, out2,
                 external](const std::string& s, const TimeSlice& x)
        -> std::vector<std::pair<std::string, TimeSlice>> {
        auto [s1, s2] = splitPair(s);
        // outputs never depend on the current input: probe with the empty slice
        std::set<TimeSlice> c1, c2;
        for (const auto& [t, o] : d1(s1, TimeSlice{})) c1.insert(o);
        for (const auto& [t, o] : d2(s2, TimeSlice{})) c2.insert(o);
        std::vector<std::pair<std::string, TimeSlice>> res;
        std::set<std::pair<std::string, TimeSlice>> seen;
        for (const auto& o1 : c1)
            for (const auto& o2 : c2) {
                TimeSlice y = sliceMerge(sliceMerge(x, o1), o2);
                TimeSlice y1 = sliceRestrict(y, in1);
                TimeSlice y2 = sliceRestrict(y, in2);
                for (const auto& [t1, oo1] : d1(s1, y1)) {
                    if (oo1 != o1) continue;
                    for (const auto& [t2, oo2] : d2(s2, y2)) {
                        if (oo2 != o2) continue;
                        auto item = std::make_pair(pairKey(t1, t2), sliceRestrict(y, external));
                        if (seen.insert(item).second) res.push_back(item);
                    }
                }
            }
        return res;
    };
    return out;
}

namespace {

// set of output suffixes producible from a state at a slot, memoized so that
// shared subtrees of the nondeterministic unfolding are computed once
using SuffixSet = std::set<std::vector<TimeSlice>>;

const SuffixSet& unfold(const TstsDef& a, const std::string& s, const TimedHistory& x,
                        std::size_t idx, const std::set<std::string>& outC,
                        std::map<std::pair<std::string, std::size_t>, SuffixSet>& memo) {
    auto key = std::make_pair(s, idx);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    SuffixSet res;
    if (idx == x.horizon())
        res.insert(std::vector<TimeSlice>{});
    else
        for (const auto& [t, o] : a.delta(s, x.slices[idx])) {
            TimeSlice head = sliceRestrict(o, outC);
            for (const auto& tail : unfold(a, t, x, idx + 1, outC, memo)) {
                std::vector<TimeSlice> v;
                v.reserve(tail.size() + 1);
                v.push_back(head);
                v.insert(v.end(), tail.begin(), tail.end());
                res.insert(std::move(v));
            }
        }
    return memo.emplace(std::move(key), std::move(res)).first->second;
}

} // namespace

BehaviorTable abstraction(const TstsDef& a, std::size_t horizon) {
    BehaviorTable out;
    out.inC = a.inC;
    out.outC = a.outC;
    out.alpha = a.alpha;
    out.horizon = horizon;
    for (const auto& x : enumHistories(a.inC, a.alpha, horizon)) {
        std::set<TimedHistory> res;
        std::map<std::pair<std::string, std::size_t>, SuffixSet> memo;
        for (const auto& s : a.init)
            for (const auto& slices : unfold(a, s, x, 0, a.outC, memo)) {
                TimedHistory h;
                h.channels = a.outC;
                h.slices = slices;
                res.insert(std::move(h));
            }
        out.table[x] = std::move(res);
    }
    return out;
}

// ---- channels of objects ----

std::set<std::string> inChannelsOf(const ModelDef& m, const Oid& o) {
    std::set<std::string> out;
    for (const auto& ch : m.channels)
        if (ch.to == o) out.insert(ch.name);
    return out;
}

std::set<std::string> outChannelsOf(const ModelDef& m, const Oid& o) {
    std::set<std::string> out;
    for (const auto& ch : m.channels)
        if (ch.from == o) out.insert(ch.name);
    return out;
}

std::set<std::string> groupInChannels(const ModelDef& m, const std::set<Oid>& os) {
    std::set<std::string> out;
    for (const auto& ch : m.channels)
        if (os.count(ch.to) && !os.count(ch.from)) out.insert(ch.name);
    return out;
}

std::set<std::string> groupOutChannels(const ModelDef& m, const std::set<Oid>& os) {
    std::set<std::string> out;
    for (const auto& ch : m.channels)
        if (os.count(ch.from) && !os.count(ch.to)) out.insert(ch.name);
    return out;
}

std::vector<Violation> checkChannelDiscipline(const ModelDef& m) {
    std::vector<Violation> out;
    std::set<std::pair<Oid, Oid>> endpoints;
    for (const auto& ch : m.channels)
        if (!endpoints.insert({ch.from, ch.to}).second)
            out.push_back({"channel-endpoints", "events from " + ch.from.str() + " to " +
                                                    ch.to.str() + " claimed by two channels"});
    // distinct senders never share an output channel
    std::set<Oid> senders;
    for (const auto& ch : m.channels) senders.insert(ch.from);
    for (const auto& a : senders)
        for (const auto& b : senders) {
            if (!(a < b)) continue;
            auto shared = setInter(outChannelsOf(m, a), outChannelsOf(m, b));
            for (const auto& c : shared)
                out.push_back({"output-channels-disjoint",
                               "channel " + c + " has two senders"});
        }
    return out;
}

// ---- event machines as timed machines ----

namespace {

std::string ostateKey(const OState& s) {
    std::ostringstream os;
    os << Value(s.inst.attrs).str() << "#";
    for (const auto& [th, st] : s.stacks) {
        os << th << "=[";
        for (const auto& f : st.items()) os << f.str() << ",";
        os << "];";
    }
    os << "#[";
    for (const auto& msg : s.buffer.items()) os << msg.str() << ",";
    os << "]";
    return os.str();
}

Message decodeChannelMsg(const ModelDef& m, const ChannelDecl& ch, const ChannelMsg& cm) {
    std::string th = cm.thread.empty()
                         ? (m.threads.empty() ? std::string("th") : m.threads.front())
                         : cm.thread;
    if (cm.isReturn) return mkReturn(ch.to, cm.retVal, ch.from, th);
    TupleValue args;
    args.items = cm.args;
    return mkCall(m, ch.to, cm.op, std::move(args), ch.from, th);
}

} // namespace

TstsDef estsToTsts(const Engine& eng, const Oid& self, const OState& s0,
                   const EstsToTstsOptions& opts) {
    const ModelDef& m = eng.model();
    TstsDef out;
    out.inC = inChannelsOf(m, self);
    out.outC = outChannelsOf(m, self);
    out.alpha.maxPerSlot = 1;
    out.microLog = std::make_shared<std::map<std::string, std::vector<std::string>>>();

    // channel message alphabets and the decode map (canonical text -> message)
    auto decode = std::make_shared<std::map<std::pair<std::string, std::string>, Message>>();
    for (const auto& ch : m.channels) {
        if (ch.to != self && ch.from != self) continue;
        for (const auto& cm : ch.alphabet) {
            Message msg = decodeChannelMsg(m, ch, cm);
            out.alpha.messages[ch.name].push_back(msg.str());
            decode->emplace(std::make_pair(ch.name, msg.str()), msg);
        }
        out.alpha.messages.emplace(ch.name, std::vector<std::string>{}); // ensure presence
    }

    // channel of an emitted message, by endpoints
    std::map<Oid, std::string> outBy;
    for (const auto& ch : m.channels)
        if (ch.from == self) outBy[ch.to] = ch.name;

    auto registry = std::make_shared<std::map<std::string, OState>>();
    std::string k0 = ostateKey(s0);
    registry->emplace(k0, s0);
    out.init.push_back(k0);

    auto inC = out.inC;
    auto microLog = out.microLog;
    bool oneTick = opts.oneTickPerSlot || m.flags.oneTickPerSlot;
    int budget = opts.tickBudget;

    out.delta = [&eng, self, registry, decode, outBy, inC, microLog, oneTick,
                 budget](const std::string& key, const TimeSlice& input)
        -> std::vector<std::pair<std::string, TimeSlice>> {
        auto it = registry->find(key);
        if (it == registry->end()) throw Error("unknown machine state " + key);
        const ModelDef& m = eng.model();

        struct Branch {
            OState s;
            std::vector<Message> outs;
            std::vector<std::string> micro;
        };
        std::vector<Branch> branches;

        // self-addressed emissions never leave the object: they go straight
        // back into its own buffer
        auto routeOuts = [&eng, self](Branch& b, std::vector<Message>&& outs) {
            for (auto& msg : outs) {
                if (msg.receiver() == self) {
                    auto ss = eng.estsStep(self, b.s, Event(msg));
                    b.s = std::move(ss.front().state);
                    b.micro.push_back("self:" + msg.str());
                } else
                    b.outs.push_back(std::move(msg));
            }
        };

        if (oneTick) {
            // exactly one tick per slot: one branch per thread choice
            for (const auto& th : m.threads) {
                auto succs = eng.estsStep(self, it->second, Event(TickEvent{th}));
                if (succs.empty()) {
                    branches.push_back({it->second, {}, {"tick(" + th + ")"}});
                    continue;
                }
                for (auto& sc : succs) {
                    Branch b{std::move(sc.state), {}, {"tick(" + th + ")"}};
                    routeOuts(b, std::move(sc.out));
                    branches.push_back(std::move(b));
                }
            }
            if (branches.empty()) branches.push_back({it->second, {}, {}});
        } else {
            // run ticks to quiescence, first enabled thread first, within budget
            Branch b{it->second, {}, {}};
            int steps = 0;
            for (;;) {
                bool moved = false;
                for (const auto& th : m.threads) {
                    auto succs = eng.estsStep(self, b.s, Event(TickEvent{th}));
                    if (succs.empty()) continue;
                    if (++steps > budget)
                        throw Error("micro-step budget exceeded in a slot of " + self.str());
                    auto& sc = succs.front();
                    b.s = std::move(sc.state);
                    b.micro.push_back("tick(" + th + ")");
                    routeOuts(b, std::move(sc.out));
                    moved = true;
                    break;
                }
                if (!moved) break;
            }
            branches.push_back(std::move(b));
        }

        std::vector<std::pair<std::string, TimeSlice>> res;
        std::set<std::pair<std::string, TimeSlice>> seen;
        for (auto& b : branches) {
            // slot output: the tick phase's emissions, distributed on channels
            TimeSlice outSlice;
            for (const auto& msg : b.outs) {
                auto ob = outBy.find(msg.receiver());
                if (ob == outBy.end())
                    throw Error("emitted event on no declared channel: " + msg.str());
                outSlice.add(ob->second, msg.str());
            }
            // deliver the slot's input messages into the buffer
            OState cur = std::move(b.s);
            for (const auto& c : inC) {
                for (const auto& text : input.on(c)) {
                    auto dc = decode->find({c, text});
                    if (dc == decode->end())
                        throw Error("message outside the alphabet of channel " + c + ": " + text);
                    auto succs = eng.estsStep(self, cur, Event(dc->second));
                    cur = std::move(succs.front().state);
                    b.micro.push_back(text);
                }
            }
            std::string nk = ostateKey(cur);
            registry->emplace(nk, std::move(cur));
            auto item = std::make_pair(nk, outSlice);
            if (seen.insert(item).second) {
                (*microLog)[key + "|" + input.str() + "|" + nk] = b.micro;
                res.push_back(std::move(item));
            }
        }
        return res;
    };
    return out;
}

// ---- whole-system bundle ----

SysmodBundle assembleSysmod(const ModelFile& mf, std::size_t horizon,
                            const EstsToTstsOptions& opts) {
    SysmodBundle out;
    out.modelReport = validateModel(mf.model);
    DataStore ds;
    for (const auto& [label, inst] : mf.scenario.objects) ds = ds.addObj(inst);
    out.storeReport = validateStore(mf.model, ds);
    out.channelReport = checkChannelDiscipline(mf.model);

    Engine eng(mf.model);
    std::optional<TstsDef> composite;
    for (const auto& [label, inst] : mf.scenario.objects) {
        const Oid& o = inst.self;
        if (inChannelsOf(mf.model, o).empty() && outChannelsOf(mf.model, o).empty()) continue;
        TstsDef a = estsToTsts(eng, o, estsInitial(inst), opts);
        out.behaviors.emplace(o, abstraction(a, horizon));
        composite = composite ? tstsCompose(*composite, a) : std::move(a);
    }
    if (composite) {
        out.composite = abstraction(*composite, horizon);
        out.hasComposite = true;
    }
    return out;
}

} // namespace sysmodel
