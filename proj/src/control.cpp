#include "sysmodel/control.hpp"

#include <algorithm>
#include <sstream>

namespace sysmodel {

std::string Frame::str() const {
    std::ostringstream os;
    os << "(" << callee.str() << ", " << op << ", " << [this] {
        std::string s;
        bool first = true;
        s += "[";
        for (const auto& [n, v] : vars.entries()) {
            if (!first) s += ", ";
            first = false;
            s += n + " = " + v.str();
        }
        s += "]";
        return s;
    }() << ", " << pc << ", " << caller.str() << ")";
    return os.str();
}

namespace {
const FrameStack kEmptyStack;
const EventBuffer kEmptyBuffer;
} // namespace

const FrameStack& CentralControlStore::stack(const std::string& thread) const {
    auto it = map_.find(thread);
    return it == map_.end() ? kEmptyStack : it->second;
}

void CentralControlStore::setStack(const std::string& thread, FrameStack s) {
    if (s.empty())
        map_.erase(thread);
    else
        map_[thread] = std::move(s);
}

std::vector<Violation> CentralControlStore::check() const {
    std::vector<Violation> out;
    for (const auto& [th, st] : map_) {
        const auto& frames = st.items();
        for (std::size_t i = 0; i < frames.size(); ++i) {
            const Oid& expect = i == 0 ? Oid::env() : frames[i - 1].callee;
            if (frames[i].caller != expect)
                out.push_back({"caller-chain",
                               "thread " + th + " frame " + std::to_string(i) + " has caller " +
                                   frames[i].caller.str() + ", expected " + expect.str()});
        }
    }
    return out;
}

const FrameStack& ControlStore::stack(const Oid& o, const std::string& thread) const {
    auto it = map_.find(o);
    if (it == map_.end()) return kEmptyStack;
    auto jt = it->second.find(thread);
    return jt == it->second.end() ? kEmptyStack : jt->second;
}

void ControlStore::setStack(const Oid& o, const std::string& thread, FrameStack s) {
    if (s.empty()) {
        auto it = map_.find(o);
        if (it != map_.end()) {
            it->second.erase(thread);
            if (it->second.empty()) map_.erase(it);
        }
        return;
    }
    map_[o][thread] = std::move(s);
}

std::map<std::string, FrameStack> ControlStore::stacksOf(const Oid& o) const {
    auto it = map_.find(o);
    return it == map_.end() ? std::map<std::string, FrameStack>{} : it->second;
}

ControlStore decentralize(const CentralControlStore& ccs) {
    ControlStore out;
    for (const auto& [th, st] : ccs.map()) {
        std::map<Oid, FrameStack> split;
        for (const auto& f : st.items()) split[f.callee].push(f);
        for (auto& [o, s] : split) out.setStack(o, th, std::move(s));
    }
    return out;
}

namespace {

// Interleave per-object frame queues into a single stack respecting the
// caller chain.  Backtracking search; counts solutions up to 2.
void interleave(std::vector<std::vector<Frame>>& queues, std::vector<std::size_t>& pos,
                const Oid& prevCallee, std::vector<Frame>& acc, std::size_t remaining,
                int& solutions, std::vector<Frame>& found) {
    if (solutions >= 2) return;
    if (remaining == 0) {
        ++solutions;
        if (solutions == 1) found = acc;
        return;
    }
    for (std::size_t q = 0; q < queues.size(); ++q) {
        if (pos[q] >= queues[q].size()) continue;
        const Frame& f = queues[q][pos[q]];
        if (f.caller != prevCallee) continue;
        ++pos[q];
        acc.push_back(f);
        interleave(queues, pos, f.callee, acc, remaining - 1, solutions, found);
        acc.pop_back();
        --pos[q];
    }
}

} // namespace

CentralControlStore centralize(const ControlStore& cs) {
    // collect the set of threads
    std::set<std::string> threads;
    for (const auto& [o, per] : cs.map())
        for (const auto& [th, _] : per) threads.insert(th);

    CentralControlStore out;
    for (const auto& th : threads) {
        std::vector<std::vector<Frame>> queues;
        std::size_t total = 0;
        for (const auto& [o, per] : cs.map()) {
            auto it = per.find(th);
            if (it == per.end() || it->second.empty()) continue;
            queues.push_back(it->second.items()); // bottom-to-top order is preserved
            total += it->second.size();
        }
        std::vector<std::size_t> pos(queues.size(), 0);
        std::vector<Frame> acc, found;
        int solutions = 0;
        interleave(queues, pos, Oid::env(), acc, total, solutions, found);
        if (solutions == 0)
            throw Error("centralize: thread " + th + " has no caller-chain interleaving");
        if (solutions > 1)
            throw Error("centralize: thread " + th + " has an ambiguous caller chain");
        FrameStack st;
        for (auto& f : found) st.push(std::move(f));
        out.setStack(th, std::move(st));
    }
    return out;
}

// ---- messages ----

const Oid& Message::receiver() const {
    if (isCall()) return asCall().receiver;
    if (isReturn()) return asReturn().receiver;
    return asSignal().receiver;
}

const Oid& Message::sender() const {
    if (isCall()) return asCall().sender;
    if (isReturn()) return asReturn().sender;
    return asSignal().sender;
}

std::optional<std::string> Message::thread() const {
    if (isCall()) return asCall().thread;
    if (isReturn()) return asReturn().thread;
    return std::nullopt;
}

bool operator==(const Message& a, const Message& b) {
    if (a.rep_.index() != b.rep_.index()) return false;
    if (a.isCall()) {
        const auto& x = a.asCall();
        const auto& y = b.asCall();
        return x.receiver == y.receiver && x.op == y.op && x.args == y.args &&
               x.sender == y.sender && x.thread == y.thread;
    }
    if (a.isReturn()) {
        const auto& x = a.asReturn();
        const auto& y = b.asReturn();
        return x.receiver == y.receiver && x.value == y.value && x.sender == y.sender &&
               x.thread == y.thread;
    }
    const auto& x = a.asSignal();
    const auto& y = b.asSignal();
    return x.receiver == y.receiver && x.payload == y.payload && x.sender == y.sender;
}

std::string Message::str() const {
    std::ostringstream os;
    if (isCall()) {
        const auto& c = asCall();
        os << "call(" << c.receiver.str() << ", " << c.op << ", " << Value(c.args).str() << ", "
           << c.sender.str() << ", " << c.thread << ")";
    } else if (isReturn()) {
        const auto& r = asReturn();
        os << "return(" << r.receiver.str() << ", " << r.value.str() << ", " << r.sender.str()
           << ", " << r.thread << ")";
    } else {
        const auto& s = asSignal();
        os << "signal(" << s.receiver.str() << ", " << Value(s.payload).str() << ", "
           << s.sender.str() << ")";
    }
    return os.str();
}

Message mkCall(const ModelDef& m, const Oid& receiver, const std::string& op, TupleValue args,
               const Oid& sender, const std::string& thread) {
    if (receiver.isNil() || receiver.isEnv())
        throw Error("call receiver must be an object, got " + receiver.str());
    const OperationSig* sig = m.findOp(receiver.cls, op);
    if (!sig) throw Error("class " + receiver.cls + " declares no operation " + op);
    if (args.items.size() != sig->parTypes.size())
        throw Error("call to " + receiver.cls + "." + op + " with wrong arity");
    for (std::size_t i = 0; i < args.items.size(); ++i)
        if (!inCarrier(m, sig->parTypes[i], args.items[i]))
            throw Error("call to " + receiver.cls + "." + op + ": argument " +
                        std::to_string(i) + " = " + args.items[i].str() +
                        " is outside carrier of " + sig->parTypes[i]);
    return Message(CallMsg{receiver, op, std::move(args), sender, thread});
}

Message mkReturn(const Oid& receiver, Value value, const Oid& sender, const std::string& thread) {
    return Message(ReturnMsg{receiver, std::move(value), sender, thread});
}

Message mkSignal(const Oid& receiver, RecordValue payload, const Oid& sender) {
    if (receiver.isNil()) throw Error("signal receiver must not be nil");
    return Message(SignalMsg{receiver, std::move(payload), sender});
}

std::string Event::str() const {
    if (isTick()) return "tick(" + asTick().thread + ")";
    return asMsg().str();
}

const EventBuffer& EventStore::buffer(const Oid& o) const {
    auto it = map_.find(o);
    return it == map_.end() ? kEmptyBuffer : it->second;
}

void EventStore::setBuffer(const Oid& o, EventBuffer b) {
    if (b.empty())
        map_.erase(o);
    else
        map_[o] = std::move(b);
}

EventStore EventStore::enqueue(const Oid& o, Message m) const {
    EventStore out = *this;
    EventBuffer b = out.buffer(o);
    b.addLast(std::move(m));
    out.map_[o] = std::move(b);
    return out;
}

// ---- dynamic option-flag validators ----

std::vector<Violation> checkMessagesOnly(const Scenario& sc, const ControlStore& cs) {
    std::vector<Violation> out;
    for (const auto& [o, per] : cs.map()) {
        auto label = sc.labelOf(o);
        for (const auto& [th, st] : per) {
            if (st.empty()) continue;
            if (!label || th != *label)
                out.push_back({"messages-only",
                               o.str() + " runs frames on thread " + th +
                                   ", not on its own thread"});
        }
    }
    return out;
}

std::vector<Violation> checkActiveObjects(const ControlStore& cs) {
    std::vector<Violation> out;
    for (const auto& [o, per] : cs.map())
        for (const auto& [th, st] : per) {
            if (st.empty()) continue;
            if (st.items().front().op != "run")
                out.push_back({"active-objects",
                               o.str() + " thread " + th + " bottom frame runs " +
                                   st.items().front().op + ", not run"});
        }
    return out;
}

std::vector<Violation> checkSingleThread(const ModelDef& m, const ControlStore& cs) {
    std::vector<Violation> out;
    if (m.threads.size() != 1) {
        out.push_back({"single-thread", "model declares " + std::to_string(m.threads.size()) +
                                            " threads"});
        return out;
    }
    for (const auto& [o, per] : cs.map())
        for (const auto& [th, st] : per)
            if (!st.empty() && th != m.threads.front())
                out.push_back({"single-thread", o.str() + " runs frames on undeclared thread " + th});
    return out;
}

std::vector<Violation> checkRegions(const ModelDef& m, const ControlStore& cs) {
    std::vector<Violation> out;
    auto regionOf = [&m](const Oid& o) -> std::optional<std::string> {
        auto it = m.regions.find(o.cls);
        if (it == m.regions.end()) return std::nullopt;
        return it->second;
    };
    for (const auto& [o, per] : cs.map())
        for (const auto& [th, st] : per)
            for (const auto& f : st.items()) {
                if (f.caller.isEnv()) continue;
                auto r1 = regionOf(f.caller);
                auto r2 = regionOf(f.callee);
                if (!r1 || !r2 || *r1 != *r2)
                    out.push_back({"regions", "frame " + f.str() +
                                                  " crosses region boundaries"});
            }
    return out;
}

} // namespace sysmodel
