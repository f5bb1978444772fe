#ifndef SYSMODEL_CONTROL_HPP
#define SYSMODEL_CONTROL_HPP

// Control state: call frames organized into per-thread stacks, either
// centrally (one stack per thread for the whole system) or decentrally
// (each object holds the frames it executes), plus messages and the event
// buffers they travel through.

#include "sysmodel/model.hpp"
#include "sysmodel/store.hpp"
#include "sysmodel/streams.hpp"

#include <map>
#include <optional>
#include <vector>

namespace sysmodel {

struct Frame {
    Oid callee;        // executing object
    std::string op;    // operation being run
    RecordValue vars;  // parameters and locals
    std::string pc;    // program counter of the method's transition system
    Oid caller;        // who to return to (env for top-level calls)

    friend bool operator==(const Frame& a, const Frame& b) {
        return a.callee == b.callee && a.op == b.op && a.vars == b.vars && a.pc == b.pc &&
               a.caller == b.caller;
    }
    friend bool operator!=(const Frame& a, const Frame& b) { return !(a == b); }
    std::string str() const;
};

using FrameStack = StackOf<Frame>;

// One stack per thread; the whole system's control state.
// Invariant (caller chain): within a stack, each frame's callee is the next
// frame's caller, and the bottom frame's caller is the environment.
class CentralControlStore {
public:
    const FrameStack& stack(const std::string& thread) const;
    void setStack(const std::string& thread, FrameStack s);
    const std::map<std::string, FrameStack>& map() const { return map_; }

    // Check the caller-chain invariant on every thread.
    std::vector<Violation> check() const;

    friend bool operator==(const CentralControlStore& a, const CentralControlStore& b) {
        return a.map_ == b.map_;
    }
    friend bool operator!=(const CentralControlStore& a, const CentralControlStore& b) {
        return !(a == b);
    }

private:
    std::map<std::string, FrameStack> map_;
};

// Each object holds, per thread, the subsequence of frames it executes.
class ControlStore {
public:
    const FrameStack& stack(const Oid& o, const std::string& thread) const;
    void setStack(const Oid& o, const std::string& thread, FrameStack s);
    const std::map<Oid, std::map<std::string, FrameStack>>& map() const { return map_; }
    std::map<std::string, FrameStack> stacksOf(const Oid& o) const;

    friend bool operator==(const ControlStore& a, const ControlStore& b) {
        return a.map_ == b.map_;
    }
    friend bool operator!=(const ControlStore& a, const ControlStore& b) { return !(a == b); }

private:
    std::map<Oid, std::map<std::string, FrameStack>> map_; // empty stacks are dropped
};

// Split a central store by executing object (frame filter).
ControlStore decentralize(const CentralControlStore& ccs);

// Reassemble the unique central store whose per-object projections match.
// Throws when no interleaving satisfies the caller chain or when more than
// one does.
CentralControlStore centralize(const ControlStore& cs);

// ---- messages and events ----

struct CallMsg {
    Oid receiver;
    std::string op;
    TupleValue args;
    Oid sender;
    std::string thread;
};

struct ReturnMsg {
    Oid receiver;
    Value value;
    Oid sender;
    std::string thread;
};

struct SignalMsg { // asynchronous, threadless
    Oid receiver;
    RecordValue payload;
    Oid sender;
};

class Message {
public:
    using Rep = std::variant<CallMsg, ReturnMsg, SignalMsg>;
    Message(CallMsg m) : rep_(std::move(m)) {}
    Message(ReturnMsg m) : rep_(std::move(m)) {}
    Message(SignalMsg m) : rep_(std::move(m)) {}

    bool isCall() const { return std::holds_alternative<CallMsg>(rep_); }
    bool isReturn() const { return std::holds_alternative<ReturnMsg>(rep_); }
    bool isSignal() const { return std::holds_alternative<SignalMsg>(rep_); }
    const CallMsg& asCall() const { return std::get<CallMsg>(rep_); }
    const ReturnMsg& asReturn() const { return std::get<ReturnMsg>(rep_); }
    const SignalMsg& asSignal() const { return std::get<SignalMsg>(rep_); }

    const Oid& receiver() const;
    const Oid& sender() const;
    std::optional<std::string> thread() const; // signals carry none

    friend bool operator==(const Message& a, const Message& b);
    friend bool operator!=(const Message& a, const Message& b) { return !(a == b); }
    std::string str() const;

private:
    Rep rep_;
};

// Construct a call message, checking receiver class and argument sorts
// against the operation signature.
Message mkCall(const ModelDef& m, const Oid& receiver, const std::string& op,
               TupleValue args, const Oid& sender, const std::string& thread);

Message mkReturn(const Oid& receiver, Value value, const Oid& sender, const std::string& thread);

Message mkSignal(const Oid& receiver, RecordValue payload, const Oid& sender);

// An event is a message in flight or a scheduler tick for a thread.
struct TickEvent {
    std::string thread;
    friend bool operator==(const TickEvent& a, const TickEvent& b) { return a.thread == b.thread; }
    friend bool operator!=(const TickEvent& a, const TickEvent& b) { return !(a == b); }
};

class Event {
public:
    Event(Message m) : rep_(std::move(m)) {}
    Event(TickEvent t) : rep_(std::move(t)) {}
    bool isTick() const { return std::holds_alternative<TickEvent>(rep_); }
    bool isMsg() const { return std::holds_alternative<Message>(rep_); }
    const TickEvent& asTick() const { return std::get<TickEvent>(rep_); }
    const Message& asMsg() const { return std::get<Message>(rep_); }

    friend bool operator==(const Event& a, const Event& b) { return a.rep_ == b.rep_; }
    friend bool operator!=(const Event& a, const Event& b) { return !(a == b); }
    std::string str() const;

private:
    std::variant<Message, TickEvent> rep_;
};

using EventBuffer = BufferOf<Message>;

// Per-object pending messages.
class EventStore {
public:
    const EventBuffer& buffer(const Oid& o) const;
    void setBuffer(const Oid& o, EventBuffer b);
    const std::map<Oid, EventBuffer>& map() const { return map_; }

    EventStore enqueue(const Oid& o, Message m) const;

    // Remove the first buffered message satisfying pred (matching anywhere in
    // the buffer, not only at the head); nullopt when none matches.
    template <class Pred>
    std::optional<std::pair<Message, EventStore>> dequeueMatching(const Oid& o,
                                                                  const Pred& pred) const {
        const EventBuffer& buf = buffer(o);
        for (std::size_t i = 0; i < buf.items().size(); ++i) {
            if (!pred(buf.items()[i])) continue;
            EventStore out = *this;
            Message m = buf.items()[i];
            EventBuffer nb = buf;
            nb.removeAt(i);
            out.setBuffer(o, std::move(nb));
            return std::make_pair(std::move(m), std::move(out));
        }
        return std::nullopt;
    }

    friend bool operator==(const EventStore& a, const EventStore& b) { return a.map_ == b.map_; }
    friend bool operator!=(const EventStore& a, const EventStore& b) { return !(a == b); }

private:
    std::map<Oid, EventBuffer> map_; // empty buffers are dropped
};

// ---- option-flag validators over dynamic control state ----

// thread names are object labels: frames of an object may only run on the
// thread named after it
std::vector<Violation> checkMessagesOnly(const Scenario& sc, const ControlStore& cs);

// every nonempty stack's bottom frame runs the "run" operation
std::vector<Violation> checkActiveObjects(const ControlStore& cs);

// single declared thread actually in use
std::vector<Violation> checkSingleThread(const ModelDef& m, const ControlStore& cs);

// caller and callee of every frame live in the same declared region
// (environment callers are exempt)
std::vector<Violation> checkRegions(const ModelDef& m, const ControlStore& cs);

} // namespace sysmodel

#endif
