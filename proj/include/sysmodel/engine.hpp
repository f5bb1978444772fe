#ifndef SYSMODEL_ENGINE_HPP
#define SYSMODEL_ENGINE_HPP

// Executable semantics: whole-system states, compilation of method bodies to
// per-method control-flow transition systems, the object-local micro-step
// relation, system scheduling, runs and bounded exploration.

#include "sysmodel/control.hpp"
#include "sysmodel/model.hpp"
#include "sysmodel/store.hpp"

#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace sysmodel {

// ---- states ----

struct SysState {
    DataStore ds;
    ControlStore cs;
    EventStore es;
    friend bool operator==(const SysState& a, const SysState& b) {
        return a.ds == b.ds && a.cs == b.cs && a.es == b.es;
    }
    friend bool operator!=(const SysState& a, const SysState& b) { return !(a == b); }
};

// Local view of one object: its instance, its per-thread frame stacks and
// its pending-message buffer.
struct OState {
    Instance inst;
    std::map<std::string, FrameStack> stacks;
    EventBuffer buffer;
    friend bool operator==(const OState& a, const OState& b) {
        return a.inst == b.inst && a.stacks == b.stacks && a.buffer == b.buffer;
    }
    friend bool operator!=(const OState& a, const OState& b) { return !(a == b); }
};

OState projectState(const SysState& s, const Oid& o);
SysState replaceState(SysState s, const Oid& o, const OState& os);

// Grouped view over a set of objects; merging is right-biased override.
using GroupState = std::map<Oid, OState>;
GroupState groupState(const SysState& s, const std::set<Oid>& os);
GroupState groupOverride(const GroupState& a, const GroupState& b);

// ---- expressions ----

struct EvalCtx {
    const ModelDef& model;
    const Instance* inst = nullptr;      // attribute reads (may be null)
    const RecordValue* vars = nullptr;   // frame variables (may be null)
    Oid self;
};

Value evalExpr(const EvalCtx& ctx, const Expr& e);

// Static typing of an expression under a variable scope (name -> type).
std::string inferType(const ModelDef& m, const std::map<std::string, std::string>& scope,
                      const Expr& e);

// ---- method compilation ----

// Translate a statement body into a control-flow transition system: fresh
// program counters between statements, one transition per elementary action,
// guarded branch/loop transitions, call emission followed by a wait state
// whose only exit consumes the matching return, and return emission into a
// final state.  Typechecks all expressions.  Explicit tables are validated
// and passed through unchanged.
CfstsDef compileMethodBody(const ModelDef& m, const MethodDef& mth);

// Structural checks on a transition table: one start, at least one final pc,
// wait pcs exit only by consuming returns, expressions typecheck.
std::vector<Violation> validateCfsts(const ModelDef& m, const MethodDef& mth,
                                     const CfstsDef& cf);

// ---- object micro-steps ----

enum class UninitPolicy {
    Defaults,    // locals start at the default value of their type
    NondetSmall, // locals range over a small per-type value set
};

struct EstsSucc {
    OState state;
    std::vector<Message> out;
    std::string rule;  // "step", "call", "return", "end", "in"
    std::string label; // fired transition / consumed message description
};

OState estsInitial(const Instance& inst);

class Engine {
public:
    explicit Engine(const ModelDef& m, UninitPolicy up = UninitPolicy::Defaults)
        : model_(m), uninit_(up) {}

    const ModelDef& model() const { return model_; }

    // Transition table of the method implementing op on class cls
    // (compiled and cached on first use).
    const CfstsDef& tableFor(const std::string& cls, const std::string& op) const;

    // All successors of one object state under one event.  A message event
    // is appended to the buffer; a tick for thread th nondeterministically
    // fires one enabled micro-rule: a transition of the top frame, a
    // return consumption, the start of a buffered call, or a frame pop at a
    // final pc.  No successors means the object is idle (or stuck) for th.
    std::vector<EstsSucc> estsStep(const Oid& self, const OState& s, const Event& ev) const;

private:
    const ModelDef& model_;
    UninitPolicy uninit_;
    mutable std::map<std::pair<std::string, std::string>, CfstsDef> cache_;
};

// ---- system steps ----

// A system configuration: object states plus the in-flight message buffer.
struct SysConfig {
    SysState state;
    EventBuffer buf;
    friend bool operator==(const SysConfig& a, const SysConfig& b) {
        return a.state == b.state && a.buf == b.buf;
    }
    friend bool operator!=(const SysConfig& a, const SysConfig& b) { return !(a == b); }
};

struct SchedChoice {
    Oid oid;
    std::string thread;
    bool deliver = false;   // true: a buffered message was handed to the object
    std::string rule;       // micro-rule on ticks, "deliver" otherwise
    std::string label;
    std::string key() const;
};

struct SysSucc {
    SysConfig cfg;
    SchedChoice choice;
    std::vector<Message> emitted;
    std::string consumed; // delivered or consumed event description
};

// All successors of a configuration: for every allocated object and declared
// thread, either hand over a buffered message addressed to the object (when
// one exists) or tick the thread.  Emitted messages join the in-flight
// buffer.  Canonically ordered.
std::vector<SysSucc> sysStep(const Engine& eng, const SysConfig& cfg);

// Successors restricted to scheduling objects of the given component.
std::vector<SysSucc> componentDelta(const Engine& eng, const SysConfig& cfg,
                                    const std::set<Oid>& component);

// ---- scheduling policies and runs ----

struct SchedulerPolicy {
    enum class K { RoundRobin, SeededRandom, Exhaustive, Scripted, RunToCompletion };
    K k = K::RunToCompletion;
    std::uint64_t seed = 0;
    std::vector<std::string> script; // SchedChoice keys, replayed in order

    static SchedulerPolicy parse(const std::string& name, std::uint64_t seed);
};

struct StepRecord {
    int index = 0;
    SchedChoice choice;
    std::string consumed;
    std::vector<std::string> emitted;
    std::string digest; // stable hash of the post-step configuration
};

struct RunResult {
    SysConfig final;
    std::vector<StepRecord> trace;
    bool quiescent = false; // no successor existed (run ended before maxSteps)
};

// Initial configuration of a scenario: the declared store, empty control and
// event state, and the scenario calls in flight (sent by the environment).
SysConfig initialConfig(const ModelDef& m, const Scenario& sc);

RunResult run(const Engine& eng, const SysConfig& cfg0, const SchedulerPolicy& policy,
              int maxSteps);

// Messages addressed to the environment in the in-flight buffer (outputs).
std::vector<Message> envMessages(const SysConfig& cfg);

// ---- bounded exploration ----

struct ExploreOutcome {
    std::string digest;
    SysConfig cfg;
    std::vector<StepRecord> trace; // lexicographically least trace reaching it
};

struct ExploreResult {
    std::vector<ExploreOutcome> terminals; // quiescent configurations, sorted by digest
    std::size_t frontierStates = 0;        // non-terminal states at the depth bound
    std::size_t visitedStates = 0;
    bool exhausted = false; // true when the frontier was empty (full state space seen)
};

ExploreResult explore(const Engine& eng, const SysConfig& cfg0, int maxDepth);

// ---- digests ----

std::uint64_t fnv1a(const std::string& s);
std::string configKey(const SysConfig& cfg); // canonical serialization
std::string configDigest(const SysConfig& cfg);

} // namespace sysmodel

#endif
