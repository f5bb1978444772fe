#ifndef SYSMODEL_FOCUS_HPP
#define SYSMODEL_FOCUS_HPP

// Timed-stream semantics: channel histories sliced into discrete time slots,
// extensional behaviors over bounded horizons, timed state transition
// systems, their composition, and the abstraction from machines to
// behaviors.  Everything is bounded: finite alphabets, bounded messages per
// slot, explicit horizons.

#include "sysmodel/engine.hpp"
#include "sysmodel/model.hpp"

#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace sysmodel {

// One slot: per channel, the finite message sequence observed in that slot.
// Channels with no messages are absent from the map (canonical form).
struct TimeSlice {
    std::map<std::string, std::vector<std::string>> at;

    const std::vector<std::string>& on(const std::string& c) const;
    void add(const std::string& c, std::string msg);
    bool empty() const { return at.empty(); }

    friend bool operator==(const TimeSlice& a, const TimeSlice& b) { return a.at == b.at; }
    friend bool operator!=(const TimeSlice& a, const TimeSlice& b) { return !(a == b); }
    friend bool operator<(const TimeSlice& a, const TimeSlice& b) { return a.at < b.at; }
    std::string str() const;
};

// Per-channel merge, right operand winning on shared channels.
TimeSlice sliceMerge(const TimeSlice& a, const TimeSlice& b);
TimeSlice sliceRestrict(const TimeSlice& s, const std::set<std::string>& channels);

struct TimedHistory {
    std::set<std::string> channels;
    std::vector<TimeSlice> slices; // length = horizon

    std::size_t horizon() const { return slices.size(); }

    friend bool operator==(const TimedHistory& a, const TimedHistory& b) {
        return a.channels == b.channels && a.slices == b.slices;
    }
    friend bool operator!=(const TimedHistory& a, const TimedHistory& b) { return !(a == b); }
    friend bool operator<(const TimedHistory& a, const TimedHistory& b) {
        if (a.channels != b.channels) return a.channels < b.channels;
        return a.slices < b.slices;
    }
    std::string str() const;
};

TimedHistory histEmpty(const std::set<std::string>& channels, std::size_t horizon);
TimedHistory histMerge(const TimedHistory& a, const TimedHistory& b); // b wins on shared channels
TimedHistory histRestrict(const TimedHistory& h, const std::set<std::string>& channels);
TimedHistory histDown(const TimedHistory& h, std::size_t t); // first t slices

// Distribute a flat message sequence onto channels: each channel keeps the
// subsequence its sort predicate accepts.
TimeSlice cdist(const std::map<std::string, std::function<bool(const std::string&)>>& csort,
                const std::vector<std::string>& msgs);

// ---- alphabets and enumeration ----

struct ChannelAlphabet {
    std::map<std::string, std::vector<std::string>> messages; // per channel
    int maxPerSlot = 1;
};

// Every slice over the given channels within the alphabet bound.
std::vector<TimeSlice> enumSlices(const std::set<std::string>& channels,
                                  const ChannelAlphabet& alpha);

// Every history of the given horizon; grows as |slices|^horizon.
std::vector<TimedHistory> enumHistories(const std::set<std::string>& channels,
                                        const ChannelAlphabet& alpha, std::size_t horizon);

// ---- extensional behaviors ----

struct BehaviorTable {
    std::set<std::string> inC, outC;
    ChannelAlphabet alpha;
    std::size_t horizon = 0;
    // total on every enumerated input history; empty set = no reaction
    std::map<TimedHistory, std::set<TimedHistory>> table;

    const std::set<TimedHistory>& at(const TimedHistory& in) const;

    friend bool operator==(const BehaviorTable& a, const BehaviorTable& b) {
        return a.inC == b.inC && a.outC == b.outC && a.horizon == b.horizon &&
               a.table == b.table;
    }
    friend bool operator!=(const BehaviorTable& a, const BehaviorTable& b) { return !(a == b); }
};

bool isComplete(const BehaviorTable& f);      // every input has some output
bool isDeterministic(const BehaviorTable& f); // exactly one output per input

// outputs up to t agree whenever inputs up to t agree
bool isProperlyTimed(const BehaviorTable& f);
// outputs up to t+1 agree whenever inputs up to t agree (strictly delayed)
bool isTimeGuarded(const BehaviorTable& f);

// g refines f: same channels, and g's reactions are a subset of f's pointwise
bool refines(const BehaviorTable& f, const BehaviorTable& g);

// exists a deterministic time-guarded refinement (bounded backtracking)
bool realizableBounded(const BehaviorTable& f);

// Parallel composition with feedback: shared channels are connected and
// hidden from the composite's interface.  Output channel sets must be
// disjoint.
BehaviorTable behaviorCompose(const BehaviorTable& f1, const BehaviorTable& f2);

// ---- timed state transition systems ----

// delta maps (state key, input slice) to successor (state key, output slice)
// pairs; machines must be complete (nonempty for every bounded input) and
// may not let outputs depend on the current slot's input.
struct TstsDef {
    std::set<std::string> inC, outC;
    ChannelAlphabet alpha;
    std::vector<std::string> init;
    std::function<std::vector<std::pair<std::string, TimeSlice>>(const std::string&,
                                                                 const TimeSlice&)>
        delta;
    // micro-step input sequences per transition, recorded by the translation
    // from event machines (see estsToTsts); keyed by (state, input, successor)
    std::shared_ptr<std::map<std::string, std::vector<std::string>>> microLog;
};

// state keys reachable within the given number of slots
std::vector<std::string> reachableStates(const TstsDef& a, std::size_t depth);

// completeness and input-independence of outputs, over reachable states
std::vector<Violation> validateTsts(const TstsDef& a, std::size_t depth);

// single initial state and a unique successor everywhere
bool isDeterministicTsts(const TstsDef& a, std::size_t depth);

// Composition: product states, shared channels connected and hidden.
TstsDef tstsCompose(const TstsDef& a1, const TstsDef& a2);

// Finite unfolding of a machine into its behavior over the horizon.
BehaviorTable abstraction(const TstsDef& a, std::size_t horizon);

// ---- channels of objects ----

std::set<std::string> inChannelsOf(const ModelDef& m, const Oid& o);
std::set<std::string> outChannelsOf(const ModelDef& m, const Oid& o);
// external interface of an object group: channels crossing the boundary
std::set<std::string> groupInChannels(const ModelDef& m, const std::set<Oid>& os);
std::set<std::string> groupOutChannels(const ModelDef& m, const std::set<Oid>& os);

// distinct objects never share an output channel; plus endpoint sanity
std::vector<Violation> checkChannelDiscipline(const ModelDef& m);

// ---- event machines as timed machines ----

struct EstsToTstsOptions {
    int tickBudget = 64;      // max micro-steps per slot before reporting an error
    bool oneTickPerSlot = false; // exactly one tick per slot (overrides the budget)
};

// One slot = a bounded sequence of micro-steps: ticks first (their emissions
// are the slot's output, so outputs never depend on the same slot's input),
// then the slot's input messages are appended to the buffer.  Input alphabet
// and enumeration bounds come from the model's channel declarations.
TstsDef estsToTsts(const Engine& eng, const Oid& self, const OState& s0,
                   const EstsToTstsOptions& opts = {});

// ---- whole-system bundle ----

struct SysmodBundle {
    ValidationReport modelReport;
    ValidationReport storeReport;
    std::vector<Violation> channelReport;
    std::map<Oid, BehaviorTable> behaviors; // per scenario object
    BehaviorTable composite;                // composed group behavior
    bool hasComposite = false;
};

SysmodBundle assembleSysmod(const ModelFile& mf, std::size_t horizon,
                            const EstsToTstsOptions& opts = {});

} // namespace sysmodel

#endif
