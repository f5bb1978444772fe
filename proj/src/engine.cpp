#include "sysmodel/engine.hpp"

#include <algorithm>
#include <deque>
#include <iomanip>
#include <sstream>

namespace sysmodel {

// ---- state projection and grouping ----

OState projectState(const SysState& s, const Oid& o) {
    OState out;
    out.inst = s.ds.get(o);
    out.stacks = s.cs.stacksOf(o);
    out.buffer = s.es.buffer(o);
    return out;
}

SysState replaceState(SysState s, const Oid& o, const OState& os) {
    if (os.inst.self != o) throw Error("replaceState: instance identity mismatch");
    DataStore ds;
    for (const auto& [oo, inst] : s.ds.map()) ds = ds.addObj(oo == o ? os.inst : inst);
    s.ds = std::move(ds);
    // clear all stacks of o, then install the new ones
    for (const auto& [th, _] : s.cs.stacksOf(o)) s.cs.setStack(o, th, FrameStack{});
    for (const auto& [th, st] : os.stacks) s.cs.setStack(o, th, st);
    s.es.setBuffer(o, os.buffer);
    return s;
}

GroupState groupState(const SysState& s, const std::set<Oid>& os) {
    GroupState out;
    for (const auto& o : os)
        if (s.ds.has(o)) out.emplace(o, projectState(s, o));
    return out;
}

GroupState groupOverride(const GroupState& a, const GroupState& b) {
    GroupState out = a;
    for (const auto& [o, st] : b) out[o] = st;
    return out;
}

// ---- expression evaluation ----

Value evalExpr(const EvalCtx& ctx, const Expr& e) {
    switch (e.k) {
    case Expr::K::IntLit: return Value(e.intVal);
    case Expr::K::BoolLit: return Value(e.boolVal);
    case Expr::K::StrLit: return Value(e.strVal);
    case Expr::K::NilLit: return Value(Oid::nil());
    case Expr::K::VoidLit: return Value(VoidValue{});
    case Expr::K::This: return Value(ctx.self);
    case Expr::K::Var:
        if (ctx.vars && ctx.vars->has(e.var)) return ctx.vars->get(e.var);
        if (ctx.inst && ctx.inst->attrs.has(e.var)) return ctx.inst->attrs.get(e.var);
        throw Error("unbound variable " + e.var);
    case Expr::K::Unary: {
        Value a = evalExpr(ctx, *e.a);
        if (e.op == "not") return Value(!a.asBool());
        if (e.op == "neg") return Value(Int(-a.asInt()));
        throw Error("unknown unary operator " + e.op);
    }
    case Expr::K::Binary: {
        Value a = evalExpr(ctx, *e.a);
        Value b = evalExpr(ctx, *e.b);
        if (e.op == "==") return Value(a == b);
        if (e.op == "!=") return Value(a != b);
        if (e.op == "and") return Value(a.asBool() && b.asBool());
        if (e.op == "or") return Value(a.asBool() || b.asBool());
        if (e.op == "+") return Value(Int(a.asInt() + b.asInt()));
        if (e.op == "-") return Value(Int(a.asInt() - b.asInt()));
        if (e.op == "*") return Value(Int(a.asInt() * b.asInt()));
        if (e.op == "/") {
            if (b.asInt() == 0) throw Error("division by zero");
            return Value(Int(a.asInt() / b.asInt()));
        }
        if (e.op == "<") return Value(a.asInt() < b.asInt());
        if (e.op == "<=") return Value(a.asInt() <= b.asInt());
        if (e.op == ">") return Value(a.asInt() > b.asInt());
        if (e.op == ">=") return Value(a.asInt() >= b.asInt());
        throw Error("unknown binary operator " + e.op);
    }
    }
    throw Error("unreachable");
}

// the pseudo-type of the nil literal: assignable to any class reference
static const std::string kNilType = "@nil";

static bool typeAssignable(const ModelDef& m, const std::string& declType,
                           const std::string& exprType) {
    if (exprType == kNilType) return isClassRef(declType);
    return carrierSubset(m, exprType, declType);
}

std::string inferType(const ModelDef& m, const std::map<std::string, std::string>& scope,
                      const Expr& e) {
    switch (e.k) {
    case Expr::K::IntLit: return "Int";
    case Expr::K::BoolLit: return "Bool";
    case Expr::K::StrLit: return "String";
    case Expr::K::NilLit: return kNilType;
    case Expr::K::VoidLit: return "Void";
    case Expr::K::This: {
        auto it = scope.find("this");
        if (it == scope.end()) throw Error("this used outside a method body");
        return it->second;
    }
    case Expr::K::Var: {
        auto it = scope.find(e.var);
        if (it == scope.end()) throw Error("undeclared variable " + e.var);
        return it->second;
    }
    case Expr::K::Unary: {
        std::string a = inferType(m, scope, *e.a);
        if (e.op == "not") {
            if (a != "Bool") throw Error("operand of not must be Bool, got " + a);
            return "Bool";
        }
        if (a != "Int") throw Error("operand of unary - must be Int, got " + a);
        return "Int";
    }
    case Expr::K::Binary: {
        std::string a = inferType(m, scope, *e.a);
        std::string b = inferType(m, scope, *e.b);
        if (e.op == "==" || e.op == "!=") {
            if (!typeAssignable(m, a, b) && !typeAssignable(m, b, a))
                throw Error("cannot compare " + a + " with " + b);
            return "Bool";
        }
        if (e.op == "and" || e.op == "or") {
            if (a != "Bool" || b != "Bool")
                throw Error("operands of " + e.op + " must be Bool");
            return "Bool";
        }
        if (a != "Int" || b != "Int")
            throw Error("operands of " + e.op + " must be Int, got " + a + ", " + b);
        if (e.op == "<" || e.op == "<=" || e.op == ">" || e.op == ">=") return "Bool";
        return "Int";
    }
    }
    throw Error("unreachable");
}

// ---- method compilation ----

namespace {

std::map<std::string, std::string> methodScope(const ModelDef& m, const MethodDef& mth) {
    std::map<std::string, std::string> scope;
    scope["this"] = mth.definedIn + "&";
    if (const ClassDef* c = m.findClass(mth.definedIn))
        for (const auto& a : c->attrs) scope[a.name] = a.type;
    for (std::size_t i = 0; i < mth.parNames.size(); ++i) scope[mth.parNames[i]] = mth.parTypes[i];
    for (std::size_t i = 0; i < mth.localNames.size(); ++i)
        scope[mth.localNames[i]] = mth.localTypes[i];
    return scope;
}

struct BodyCompiler {
    const ModelDef& m;
    const MethodDef& mth;
    std::map<std::string, std::string> scope;
    CfstsDef cf;
    int counter = 0;

    std::string fresh() {
        std::string pc = "P" + std::to_string(++counter);
        cf.pcs.push_back(pc);
        return pc;
    }

    void requireBool(const ExprPtr& e) {
        if (inferType(m, scope, *e) != "Bool") throw Error(where() + ": condition must be Bool");
    }

    std::string where() const { return mth.definedIn + "." + mth.name; }

    void checkAssign(const std::string& target, const ExprPtr& rhs) {
        auto it = scope.find(target);
        if (it == scope.end()) throw Error(where() + ": assignment to undeclared " + target);
        std::string rt = inferType(m, scope, *rhs);
        if (!typeAssignable(m, it->second, rt))
            throw Error(where() + ": cannot assign " + rt + " to " + target + ": " + it->second);
    }

    // Typecheck a call's receiver/arguments; returns the result type.
    std::string checkCall(const ExprPtr& callee, const std::string& op,
                          const std::vector<ExprPtr>& args) {
        std::string ct = inferType(m, scope, *callee);
        if (!isClassRef(ct)) throw Error(where() + ": call receiver must be an object reference");
        const OperationSig* sig = m.findOp(refClass(ct), op);
        if (!sig) throw Error(where() + ": class " + refClass(ct) + " declares no operation " + op);
        if (args.size() != sig->parTypes.size())
            throw Error(where() + ": call to " + op + " with wrong arity");
        for (std::size_t i = 0; i < args.size(); ++i) {
            std::string at = inferType(m, scope, *args[i]);
            if (!typeAssignable(m, sig->parTypes[i], at))
                throw Error(where() + ": argument " + std::to_string(i) + " of " + op +
                            " has type " + at + ", expected " + sig->parTypes[i]);
        }
        return sig->resType;
    }

    // Compile a statement sequence starting at entry; returns the fall-through
    // pc, or nullopt when every path ends in a return.
    std::optional<std::string> compileSeq(const std::vector<StmtPtr>& stmts, std::string entry) {
        std::string cur = entry;
        for (std::size_t i = 0; i < stmts.size(); ++i) {
            auto next = compileStmt(*stmts[i], cur);
            if (!next) {
                if (i + 1 < stmts.size()) throw Error(where() + ": unreachable code after return");
                return std::nullopt;
            }
            cur = *next;
        }
        return cur;
    }

    std::optional<std::string> compileStmt(const Stmt& st, const std::string& entry) {
        switch (st.k) {
        case Stmt::K::Assign: {
            checkAssign(st.target, st.expr);
            std::string exit = fresh();
            CfTransition t;
            t.from = entry;
            t.to = exit;
            t.assignTarget = st.target;
            t.assignExpr = st.expr;
            t.label = "assign " + st.target + " := " + st.expr->str();
            cf.transitions.push_back(std::move(t));
            return exit;
        }
        case Stmt::K::Call: {
            std::string res = checkCall(st.callee, st.op, st.args);
            if (!st.target.empty()) {
                auto it = scope.find(st.target);
                if (it == scope.end())
                    throw Error(where() + ": result bound to undeclared " + st.target);
                if (!typeAssignable(m, it->second, res))
                    throw Error(where() + ": cannot bind " + res + " result to " + st.target);
            }
            std::string wait = fresh();
            std::string exit = fresh();
            cf.waitReturn.insert(wait);
            CfTransition emit;
            emit.from = entry;
            emit.to = wait;
            emit.emit = CfTransition::Emit::Call;
            emit.calleeExpr = st.callee;
            emit.emitOp = st.op;
            emit.emitArgs = st.args;
            emit.label = "call " + st.callee->str() + "." + st.op;
            cf.transitions.push_back(std::move(emit));
            CfTransition cons;
            cons.from = wait;
            cons.to = exit;
            cons.consumesReturn = true;
            cons.bindTarget = st.target;
            cons.label = st.target.empty() ? "consume return"
                                           : "consume return into " + st.target;
            cf.transitions.push_back(std::move(cons));
            return exit;
        }
        case Stmt::K::Send: {
            checkCall(st.callee, st.op, st.args);
            std::string exit = fresh();
            CfTransition t;
            t.from = entry;
            t.to = exit;
            t.emit = CfTransition::Emit::Signal;
            t.calleeExpr = st.callee;
            t.emitOp = st.op;
            t.emitArgs = st.args;
            t.label = "send " + st.callee->str() + "." + st.op;
            cf.transitions.push_back(std::move(t));
            return exit;
        }
        case Stmt::K::Return: {
            std::string rt = st.expr ? inferType(m, scope, *st.expr) : "Void";
            if (!typeAssignable(m, mth.resType, rt))
                throw Error(where() + ": returns " + rt + ", declared " + mth.resType);
            std::string fin = fresh();
            cf.finish.insert(fin);
            CfTransition t;
            t.from = entry;
            t.to = fin;
            t.emit = CfTransition::Emit::Ret;
            t.retExpr = st.expr;
            t.label = st.expr ? "return " + st.expr->str() : "return void";
            cf.transitions.push_back(std::move(t));
            return std::nullopt;
        }
        case Stmt::K::If: {
            requireBool(st.expr);
            std::string thenEntry = fresh();
            addGuard(entry, thenEntry, st.expr, false);
            auto thenExit = compileSeq(st.body, thenEntry);
            std::optional<std::string> elseExit;
            std::string elseEntry;
            if (!st.elseBody.empty()) {
                elseEntry = fresh();
                addGuard(entry, elseEntry, st.expr, true);
                elseExit = compileSeq(st.elseBody, elseEntry);
            }
            if (!thenExit && st.elseBody.empty()) {
                // then-branch returns; fall through on the false guard
                std::string join = fresh();
                addGuard(entry, join, st.expr, true);
                return join;
            }
            if (!thenExit && !elseExit && !st.elseBody.empty()) return std::nullopt;
            std::string join = fresh();
            if (st.elseBody.empty())
                addGuard(entry, join, st.expr, true);
            else if (elseExit)
                addNoop(*elseExit, join);
            if (thenExit) addNoop(*thenExit, join);
            return join;
        }
        case Stmt::K::While: {
            requireBool(st.expr);
            std::string head = fresh();
            addNoop(entry, head);
            std::string bodyEntry = fresh();
            addGuard(head, bodyEntry, st.expr, false);
            auto bodyExit = compileSeq(st.body, bodyEntry);
            if (bodyExit) addNoop(*bodyExit, head);
            std::string exit = fresh();
            addGuard(head, exit, st.expr, true);
            return exit;
        }
        }
        throw Error("unreachable");
    }

    void addNoop(const std::string& from, const std::string& to) {
        CfTransition t;
        t.from = from;
        t.to = to;
        t.label = "noop";
        cf.transitions.push_back(std::move(t));
    }

    void addGuard(const std::string& from, const std::string& to, const ExprPtr& cond,
                  bool negated) {
        CfTransition t;
        t.from = from;
        t.to = to;
        t.guard = negated ? mkUnary("not", cond) : cond;
        t.label = "guard " + t.guard->str();
        cf.transitions.push_back(std::move(t));
    }
};

} // namespace

CfstsDef compileMethodBody(const ModelDef& m, const MethodDef& mth) {
    if (mth.table) {
        auto viols = validateCfsts(m, mth, *mth.table);
        if (!viols.empty())
            throw Error("invalid transition table for " + mth.definedIn + "." + mth.name + ": " +
                        viols.front().detail);
        return *mth.table;
    }
    BodyCompiler c{m, mth, methodScope(m, mth), CfstsDef{}, 0};
    c.cf.start = c.fresh();
    auto exit = c.compileSeq(mth.stmts, c.cf.start);
    if (exit) {
        // implicit void return at the end of the body
        if (mth.resType != "Void")
            throw Error(c.where() + ": missing return of " + mth.resType);
        std::string fin = c.fresh();
        c.cf.finish.insert(fin);
        CfTransition t;
        t.from = *exit;
        t.to = fin;
        t.emit = CfTransition::Emit::Ret;
        t.label = "return void";
        c.cf.transitions.push_back(std::move(t));
    }
    auto viols = validateCfsts(m, mth, c.cf);
    if (!viols.empty())
        throw Error("compiled body of " + c.where() + " is malformed: " + viols.front().detail);
    return c.cf;
}

std::vector<Violation> validateCfsts(const ModelDef& m, const MethodDef& mth, const CfstsDef& cf) {
    std::vector<Violation> out;
    std::string who = mth.definedIn + "." + mth.name;
    std::set<std::string> pcs(cf.pcs.begin(), cf.pcs.end());
    if (pcs.size() != cf.pcs.size()) out.push_back({"cfsts-pcs", who + ": duplicate pc"});
    if (!pcs.count(cf.start)) out.push_back({"cfsts-start", who + ": start pc undeclared"});
    if (cf.finish.empty()) out.push_back({"cfsts-finish", who + ": no final pc"});
    for (const auto& p : cf.finish)
        if (!pcs.count(p)) out.push_back({"cfsts-finish", who + ": final pc " + p + " undeclared"});
    for (const auto& p : cf.waitReturn)
        if (!pcs.count(p)) out.push_back({"cfsts-wait", who + ": wait pc " + p + " undeclared"});

    auto scope = methodScope(m, mth);
    for (const auto& t : cf.transitions) {
        if (!pcs.count(t.from) || !pcs.count(t.to)) {
            out.push_back({"cfsts-trans", who + ": transition over undeclared pc"});
            continue;
        }
        if (cf.finish.count(t.from))
            out.push_back({"cfsts-finish", who + ": final pc " + t.from + " has an exit"});
        if (t.consumesReturn != (cf.waitReturn.count(t.from) != 0))
            out.push_back({"cfsts-wait", who + ": wait pcs exit exactly by consuming returns (" +
                                             t.from + ")"});
        try {
            if (t.guard && inferType(m, scope, *t.guard) != "Bool")
                out.push_back({"cfsts-guard", who + ": guard is not Bool"});
            if (!t.assignTarget.empty()) {
                auto it = scope.find(t.assignTarget);
                if (it == scope.end())
                    out.push_back({"cfsts-assign", who + ": undeclared target " + t.assignTarget});
                else if (!typeAssignable(m, it->second, inferType(m, scope, *t.assignExpr)))
                    out.push_back({"cfsts-assign", who + ": ill-typed assignment to " +
                                                       t.assignTarget});
            }
            if (t.emit == CfTransition::Emit::Call || t.emit == CfTransition::Emit::Signal) {
                std::string ct = inferType(m, scope, *t.calleeExpr);
                if (!isClassRef(ct))
                    out.push_back({"cfsts-emit", who + ": emitted call receiver is no reference"});
                else if (!m.findOp(refClass(ct), t.emitOp))
                    out.push_back({"cfsts-emit", who + ": emitted call to unknown operation " +
                                                     t.emitOp});
            }
            if (t.emit == CfTransition::Emit::Ret) {
                std::string rt = t.retExpr ? inferType(m, scope, *t.retExpr) : "Void";
                if (!typeAssignable(m, mth.resType, rt))
                    out.push_back({"cfsts-return", who + ": returns " + rt + ", declared " +
                                                       mth.resType});
            }
            if (t.consumesReturn && !t.bindTarget.empty() && !scope.count(t.bindTarget))
                out.push_back({"cfsts-bind", who + ": undeclared bind target " + t.bindTarget});
        } catch (const Error& e) {
            out.push_back({"cfsts-types", who + ": " + e.what()});
        }
    }
    return out;
}

// ---- object micro-steps ----

OState estsInitial(const Instance& inst) {
    OState out;
    out.inst = inst;
    return out;
}

const CfstsDef& Engine::tableFor(const std::string& cls, const std::string& op) const {
    auto key = std::make_pair(cls, op);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    const MethodDef* mth = model_.resolveImpl(cls, op);
    if (!mth) throw Error("class " + cls + " has no body for operation " + op);
    return cache_.emplace(key, compileMethodBody(model_, *mth)).first->second;
}

namespace {

// Assign into the frame's variables when declared there, else into the
// instance's attributes; checks the declared carrier.
void applyAssign(const ModelDef& m, const MethodDef& mth, Frame& f, Instance& inst,
                 const std::string& target, Value v) {
    if (f.vars.has(target)) {
        // declared type of the parameter or local
        std::string type;
        for (std::size_t i = 0; i < mth.parNames.size(); ++i)
            if (mth.parNames[i] == target) type = mth.parTypes[i];
        for (std::size_t i = 0; i < mth.localNames.size(); ++i)
            if (mth.localNames[i] == target) type = mth.localTypes[i];
        if (!type.empty() && !inCarrier(m, type, v))
            throw Error("assignment of " + v.str() + " to " + target + " leaves carrier of " +
                        type);
        f.vars.set(target, std::move(v));
        return;
    }
    if (inst.attrs.has(target)) {
        if (const AttrDecl* a = m.findAttr(inst.self.cls, target))
            if (!inCarrier(m, a->type, v))
                throw Error("assignment of " + v.str() + " to " + target + " leaves carrier of " +
                            a->type);
        inst.attrs.set(target, std::move(v));
        return;
    }
    throw Error("assignment to unknown variable " + target);
}

// local-variable bindings under an uninitialized-value policy
std::vector<RecordValue> localBindings(const ModelDef& m, const MethodDef& mth,
                                       UninitPolicy up) {
    if (up == UninitPolicy::Defaults || mth.localNames.empty()) {
        RecordValue r;
        for (std::size_t i = 0; i < mth.localNames.size(); ++i)
            r.set(mth.localNames[i], defaultValue(m, mth.localTypes[i]));
        return {r};
    }
    // small per-type value sets
    std::vector<RecordValue> acc{RecordValue{}};
    for (std::size_t i = 0; i < mth.localNames.size(); ++i) {
        std::vector<Value> cands;
        const std::string& t = mth.localTypes[i];
        if (t == "Int")
            cands = {Value(Int(0)), Value(Int(1))};
        else if (t == "Bool")
            cands = {Value(false), Value(true)};
        else
            cands = {defaultValue(m, t)};
        std::vector<RecordValue> next;
        for (const auto& r : acc)
            for (const auto& v : cands) {
                RecordValue r2 = r;
                r2.set(mth.localNames[i], v);
                next.push_back(std::move(r2));
            }
        acc = std::move(next);
    }
    return acc;
}

} // namespace

std::vector<EstsSucc> Engine::estsStep(const Oid& self, const OState& s, const Event& ev) const {
    std::vector<EstsSucc> out;

    if (ev.isMsg()) {
        const Message& msg = ev.asMsg();
        if (msg.receiver() != self)
            throw Error("message for " + msg.receiver().str() + " delivered to " + self.str());
        OState ns = s;
        ns.buffer.addLast(msg);
        out.push_back({std::move(ns), {}, "in", msg.str()});
        return out;
    }

    const std::string& th = ev.asTick().thread;
    auto stIt = s.stacks.find(th);
    const FrameStack* stack =
        (stIt != s.stacks.end() && !stIt->second.empty()) ? &stIt->second : nullptr;

    if (stack) {
        const Frame& f = stack->top();
        const CfstsDef& cf = tableFor(f.callee.cls, f.op);
        const MethodDef* mth = model_.resolveImpl(f.callee.cls, f.op);

        for (const auto& t : cf.transitions) {
            if (t.from != f.pc) continue;
            if (t.consumesReturn) {
                // match a buffered return for this thread, anywhere in the buffer
                for (std::size_t i = 0; i < s.buffer.items().size(); ++i) {
                    const Message& bm = s.buffer.items()[i];
                    if (!bm.isReturn() || bm.asReturn().thread != th) continue;
                    OState ns = s;
                    ns.buffer.removeAt(i);
                    Frame nf = f;
                    nf.pc = t.to;
                    if (!t.bindTarget.empty())
                        applyAssign(model_, *mth, nf, ns.inst, t.bindTarget,
                                    bm.asReturn().value);
                    ns.stacks[th].update(std::move(nf));
                    out.push_back({std::move(ns), {}, "return", t.label + " " + bm.str()});
                }
                continue;
            }
            EvalCtx ctx{model_, &s.inst, &f.vars, self};
            if (t.guard && !evalExpr(ctx, *t.guard).asBool()) continue;
            OState ns = s;
            Frame nf = f;
            nf.pc = t.to;
            std::vector<Message> emitted;
            if (!t.assignTarget.empty())
                applyAssign(model_, *mth, nf, ns.inst, t.assignTarget,
                            evalExpr(ctx, *t.assignExpr));
            switch (t.emit) {
            case CfTransition::Emit::None:
                break;
            case CfTransition::Emit::Call: {
                Value callee = evalExpr(ctx, *t.calleeExpr);
                if (!callee.isOid() || callee.asOid().isNil())
                    throw Error("call on nil in " + f.callee.cls + "." + f.op);
                TupleValue args;
                for (const auto& a : t.emitArgs) args.items.push_back(evalExpr(ctx, *a));
                emitted.push_back(
                    mkCall(model_, callee.asOid(), t.emitOp, std::move(args), self, th));
                break;
            }
            case CfTransition::Emit::Ret: {
                Value v = t.retExpr ? evalExpr(ctx, *t.retExpr) : Value(VoidValue{});
                emitted.push_back(mkReturn(f.caller, std::move(v), self, th));
                break;
            }
            case CfTransition::Emit::Signal: {
                Value callee = evalExpr(ctx, *t.calleeExpr);
                if (!callee.isOid() || callee.asOid().isNil())
                    throw Error("signal to nil in " + f.callee.cls + "." + f.op);
                TupleValue args;
                for (const auto& a : t.emitArgs) args.items.push_back(evalExpr(ctx, *a));
                RecordValue payload;
                payload.set("signal", Value(t.emitOp));
                payload.set("args", Value(std::move(args)));
                emitted.push_back(mkSignal(callee.asOid(), std::move(payload), self));
                break;
            }
            }
            ns.stacks[th].update(std::move(nf));
            out.push_back({std::move(ns), std::move(emitted), "step", t.label});
        }

        if (cf.finish.count(f.pc)) {
            OState ns = s;
            ns.stacks[th].pop();
            if (ns.stacks[th].empty()) ns.stacks.erase(th);
            out.push_back({std::move(ns), {}, "end", "pop " + f.op});
        }
    }

    // start a buffered call: allowed on an empty stack, or on top of a frame
    // suspended at a wait pc (object recursion / re-entrance); calls from the
    // environment only start on an empty stack so the caller chain stays
    // rooted there
    bool canStart = stack == nullptr;
    if (stack) {
        const Frame& f = stack->top();
        canStart = tableFor(f.callee.cls, f.op).waitReturn.count(f.pc) != 0;
    }
    if (canStart) {
        for (std::size_t i = 0; i < s.buffer.items().size(); ++i) {
            const Message& bm = s.buffer.items()[i];
            if (!bm.isCall() || bm.asCall().thread != th) continue;
            if (bm.asCall().sender.isEnv() && stack) continue;
            const MethodDef* mth = model_.resolveImpl(self.cls, bm.asCall().op);
            if (!mth)
                throw Error("class " + self.cls + " has no body for operation " +
                            bm.asCall().op);
            const CfstsDef& cf = tableFor(self.cls, bm.asCall().op);
            for (const auto& locals : localBindings(model_, *mth, uninit_)) {
                OState ns = s;
                ns.buffer.removeAt(i);
                Frame f;
                f.callee = self;
                f.op = bm.asCall().op;
                f.vars = recOverride(locals, recOfTuple(mth->parNames, bm.asCall().args));
                f.pc = cf.start;
                f.caller = bm.asCall().sender;
                ns.stacks[th].push(std::move(f));
                out.push_back({std::move(ns), {}, "call", "start " + bm.str()});
            }
        }
    }

    return out;
}

// ---- system steps ----

std::string SchedChoice::key() const {
    return oid.str() + "/" + thread + "/" + rule + "/" + label;
}

static std::string stateKey(const SysState& s);

std::vector<SysSucc> sysStep(const Engine& eng, const SysConfig& cfg) {
    std::vector<SysSucc> out;
    for (const Oid& o : cfg.state.ds.oids()) {
        OState os = projectState(cfg.state, o);
        // pending deliveries take precedence over ticks for this object
        std::vector<std::size_t> deliverable;
        for (std::size_t i = 0; i < cfg.buf.items().size(); ++i)
            if (cfg.buf.items()[i].receiver() == o) deliverable.push_back(i);
        if (!deliverable.empty()) {
            for (std::size_t i : deliverable) {
                Message m = cfg.buf.items()[i];
                auto succs = eng.estsStep(o, os, Event(m));
                EventBuffer nb = cfg.buf;
                nb.removeAt(i);
                for (auto& sc : succs) {
                    SysSucc s;
                    s.cfg.state = replaceState(cfg.state, o, sc.state);
                    s.cfg.buf = nb;
                    s.choice = SchedChoice{o, "", true, "deliver", m.str()};
                    s.consumed = m.str();
                    out.push_back(std::move(s));
                }
            }
            continue;
        }
        for (const auto& th : eng.model().threads) {
            for (auto& sc : eng.estsStep(o, os, Event(TickEvent{th}))) {
                SysSucc s;
                s.cfg.state = replaceState(cfg.state, o, sc.state);
                EventBuffer nb = cfg.buf;
                for (const auto& m : sc.out) nb.addLast(m);
                s.cfg.buf = std::move(nb);
                s.choice = SchedChoice{o, th, false, sc.rule, sc.label};
                s.emitted = sc.out;
                s.consumed = "tick(" + th + ")";
                out.push_back(std::move(s));
            }
        }
    }
    std::sort(out.begin(), out.end(), [](const SysSucc& a, const SysSucc& b) {
        std::string ka = a.choice.key();
        std::string kb = b.choice.key();
        if (ka != kb) return ka < kb;
        return configKey(a.cfg) < configKey(b.cfg);
    });
    return out;
}

std::vector<SysSucc> componentDelta(const Engine& eng, const SysConfig& cfg,
                                    const std::set<Oid>& component) {
    std::vector<SysSucc> out;
    for (auto& s : sysStep(eng, cfg))
        if (component.count(s.choice.oid)) out.push_back(std::move(s));
    return out;
}

// ---- policies, runs ----

SchedulerPolicy SchedulerPolicy::parse(const std::string& name, std::uint64_t seed) {
    SchedulerPolicy p;
    p.seed = seed;
    if (name == "rtc" || name == "run-to-completion")
        p.k = K::RunToCompletion;
    else if (name == "rr" || name == "round-robin")
        p.k = K::RoundRobin;
    else if (name == "random")
        p.k = K::SeededRandom;
    else if (name == "exhaustive")
        p.k = K::Exhaustive;
    else if (name == "scripted")
        p.k = K::Scripted;
    else
        throw Error("unknown scheduling policy " + name);
    return p;
}

SysConfig initialConfig(const ModelDef& m, const Scenario& sc) {
    SysConfig cfg;
    for (const auto& [label, inst] : sc.objects) cfg.state.ds = cfg.state.ds.addObj(inst);
    std::set<std::string> threads(m.threads.begin(), m.threads.end());
    for (const auto& call : sc.calls) {
        if (!threads.count(call.thread))
            throw Error("scenario call on undeclared thread " + call.thread);
        TupleValue args;
        args.items = call.args;
        cfg.buf.addLast(mkCall(m, call.receiver, call.op, std::move(args), Oid::env(),
                               call.thread));
    }
    return cfg;
}

namespace {

std::size_t pickSuccessor(const std::vector<SysSucc>& succs, const SchedulerPolicy& p,
                          std::mt19937_64& rng, std::size_t& rrIndex,
                          std::optional<std::pair<Oid, std::string>>& last,
                          std::size_t& scriptPos) {
    switch (p.k) {
    case SchedulerPolicy::K::Exhaustive:
        throw Error("the exhaustive policy drives exploration, not single runs");
    case SchedulerPolicy::K::SeededRandom: {
        std::uniform_int_distribution<std::size_t> d(0, succs.size() - 1);
        return d(rng);
    }
    case SchedulerPolicy::K::Scripted: {
        if (scriptPos >= p.script.size()) throw Error("scheduler script exhausted");
        const std::string& want = p.script[scriptPos++];
        for (std::size_t i = 0; i < succs.size(); ++i)
            if (succs[i].choice.key() == want) return i;
        throw Error("scheduler script step not enabled: " + want);
    }
    case SchedulerPolicy::K::RoundRobin: {
        // rotate over the distinct (object, thread) pairs currently enabled
        std::vector<std::string> pairs;
        for (const auto& s : succs) {
            std::string k = s.choice.oid.str() + "/" + s.choice.thread;
            if (std::find(pairs.begin(), pairs.end(), k) == pairs.end()) pairs.push_back(k);
        }
        const std::string& want = pairs[rrIndex++ % pairs.size()];
        for (std::size_t i = 0; i < succs.size(); ++i)
            if (succs[i].choice.oid.str() + "/" + succs[i].choice.thread == want) return i;
        return 0;
    }
    case SchedulerPolicy::K::RunToCompletion: {
        // stay with the object/thread handling the current call until done
        if (last) {
            for (std::size_t i = 0; i < succs.size(); ++i)
                if (succs[i].choice.oid == last->first &&
                    (succs[i].choice.deliver || succs[i].choice.thread == last->second))
                    return i;
        }
        for (std::size_t i = 0; i < succs.size(); ++i) {
            const auto& r = succs[i].choice.rule;
            if (r == "step" || r == "return" || r == "end") return i;
        }
        for (std::size_t i = 0; i < succs.size(); ++i)
            if (succs[i].choice.deliver) return i;
        return 0;
    }
    }
    return 0;
}

} // namespace

RunResult run(const Engine& eng, const SysConfig& cfg0, const SchedulerPolicy& policy,
              int maxSteps) {
    RunResult res;
    res.final = cfg0;
    std::mt19937_64 rng(policy.seed);
    std::size_t rrIndex = 0, scriptPos = 0;
    std::optional<std::pair<Oid, std::string>> last;
    for (int step = 1; step <= maxSteps; ++step) {
        auto succs = sysStep(eng, res.final);
        if (succs.empty()) {
            res.quiescent = true;
            break;
        }
        std::size_t i = pickSuccessor(succs, policy, rng, rrIndex, last, scriptPos);
        SysSucc& s = succs[i];
        if (!s.choice.deliver || !last || s.choice.oid != last->first)
            last = {s.choice.oid, s.choice.thread};
        StepRecord rec;
        rec.index = step;
        rec.choice = s.choice;
        rec.consumed = s.consumed;
        for (const auto& m : s.emitted) rec.emitted.push_back(m.str());
        rec.digest = configDigest(s.cfg);
        res.trace.push_back(std::move(rec));
        res.final = std::move(s.cfg);
    }
    if (!res.quiescent && sysStep(eng, res.final).empty()) res.quiescent = true;
    return res;
}

std::vector<Message> envMessages(const SysConfig& cfg) {
    std::vector<Message> out;
    for (const auto& m : cfg.buf.items())
        if (m.receiver().isEnv()) out.push_back(m);
    return out;
}

// ---- exploration ----

ExploreResult explore(const Engine& eng, const SysConfig& cfg0, int maxDepth) {
    struct Node {
        SysConfig cfg;
        int parent;
        StepRecord step;
        int depth;
    };
    std::vector<Node> nodes;
    std::map<std::string, int> visited;
    std::deque<int> queue;

    nodes.push_back({cfg0, -1, StepRecord{}, 0});
    visited[configKey(cfg0)] = 0;
    queue.push_back(0);

    ExploreResult res;
    std::set<std::string> terminalSeen;

    while (!queue.empty()) {
        int cur = queue.front();
        queue.pop_front();
        SysConfig cfg = nodes[cur].cfg; // copy: nodes may reallocate below
        int depth = nodes[cur].depth;
        auto succs = sysStep(eng, cfg);
        if (succs.empty()) {
            std::string digest = configDigest(cfg);
            if (terminalSeen.insert(configKey(cfg)).second) {
                ExploreOutcome o;
                o.digest = digest;
                o.cfg = cfg;
                for (int n = cur; n > 0; n = nodes[n].parent) o.trace.push_back(nodes[n].step);
                std::reverse(o.trace.begin(), o.trace.end());
                for (std::size_t i = 0; i < o.trace.size(); ++i)
                    o.trace[i].index = static_cast<int>(i) + 1;
                res.terminals.push_back(std::move(o));
            }
            continue;
        }
        if (depth >= maxDepth) {
            ++res.frontierStates;
            continue;
        }
        for (auto& s : succs) {
            std::string key = configKey(s.cfg);
            if (visited.count(key)) continue;
            visited[key] = static_cast<int>(nodes.size());
            StepRecord rec;
            rec.choice = s.choice;
            rec.consumed = s.consumed;
            for (const auto& m : s.emitted) rec.emitted.push_back(m.str());
            rec.digest = configDigest(s.cfg);
            nodes.push_back({std::move(s.cfg), cur, std::move(rec), depth + 1});
            queue.push_back(static_cast<int>(nodes.size()) - 1);
        }
    }
    res.visitedStates = visited.size();
    res.exhausted = res.frontierStates == 0;
    std::sort(res.terminals.begin(), res.terminals.end(),
              [](const ExploreOutcome& a, const ExploreOutcome& b) {
                  if (a.digest != b.digest) return a.digest < b.digest;
                  return configKey(a.cfg) < configKey(b.cfg);
              });
    return res;
}

// ---- digests ----

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

static std::string stateKey(const SysState& s) {
    std::ostringstream os;
    os << "ds{";
    for (const auto& [o, inst] : s.ds.map())
        os << o.str() << "=" << Value(inst.attrs).str() << ";";
    os << "}cs{";
    for (const auto& [o, per] : s.cs.map()) {
        os << o.str() << ":";
        for (const auto& [th, st] : per) {
            os << th << "=[";
            for (const auto& f : st.items()) os << f.str() << ",";
            os << "];";
        }
    }
    os << "}es{";
    for (const auto& [o, buf] : s.es.map()) {
        os << o.str() << "=[";
        for (const auto& m : buf.items()) os << m.str() << ",";
        os << "];";
    }
    os << "}";
    return os.str();
}

std::string configKey(const SysConfig& cfg) {
    std::ostringstream os;
    os << stateKey(cfg.state) << "buf[";
    for (const auto& m : cfg.buf.items()) os << m.str() << ",";
    os << "]";
    return os.str();
}

std::string configDigest(const SysConfig& cfg) {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << fnv1a(configKey(cfg));
    return os.str();
}

} // namespace sysmodel
