#include "sysmodel/model.hpp"

#include <algorithm>
#include <sstream>

namespace sysmodel {

// ---- expression constructors ----

namespace {
ExprPtr mk(Expr e) { return std::make_shared<const Expr>(std::move(e)); }
}

ExprPtr mkIntLit(Int v) {
    Expr e; e.k = Expr::K::IntLit; e.intVal = std::move(v); return mk(std::move(e));
}
ExprPtr mkBoolLit(bool v) {
    Expr e; e.k = Expr::K::BoolLit; e.boolVal = v; return mk(std::move(e));
}
ExprPtr mkStrLit(std::string v) {
    Expr e; e.k = Expr::K::StrLit; e.strVal = std::move(v); return mk(std::move(e));
}
ExprPtr mkNil() { Expr e; e.k = Expr::K::NilLit; return mk(std::move(e)); }
ExprPtr mkVoidLit() { Expr e; e.k = Expr::K::VoidLit; return mk(std::move(e)); }
ExprPtr mkThis() { Expr e; e.k = Expr::K::This; return mk(std::move(e)); }
ExprPtr mkVar(std::string name) {
    Expr e; e.k = Expr::K::Var; e.var = std::move(name); return mk(std::move(e));
}
ExprPtr mkUnary(std::string op, ExprPtr a) {
    Expr e; e.k = Expr::K::Unary; e.op = std::move(op); e.a = std::move(a); return mk(std::move(e));
}
ExprPtr mkBinary(std::string op, ExprPtr a, ExprPtr b) {
    Expr e; e.k = Expr::K::Binary; e.op = std::move(op); e.a = std::move(a); e.b = std::move(b);
    return mk(std::move(e));
}

std::string Expr::str() const {
    std::ostringstream os;
    switch (k) {
    case K::IntLit: os << intVal; break;
    case K::BoolLit: os << (boolVal ? "true" : "false"); break;
    case K::StrLit: os << '"' << strVal << '"'; break;
    case K::NilLit: os << "nil"; break;
    case K::VoidLit: os << "void"; break;
    case K::This: os << "this"; break;
    case K::Var: os << var; break;
    case K::Unary:
        os << (op == "neg" ? "-" : op + " ") << a->str();
        break;
    case K::Binary:
        os << "(" << a->str() << " " << op << " " << b->str() << ")";
        break;
    }
    return os.str();
}

std::string MultSet::str() const {
    switch (k) {
    case K::Any: return "*";
    case K::One: return "1";
    case K::ZeroOrOne: return "0..1";
    default: {
        std::ostringstream os;
        os << "{";
        bool first = true;
        for (auto n : elems) { if (!first) os << ","; first = false; os << n; }
        os << "}";
        return os.str();
    }
    }
}

// ---- model lookups ----

const ClassDef* ModelDef::findClass(const std::string& n) const {
    for (const auto& c : classes)
        if (c.name == n) return &c;
    return nullptr;
}

const ClassDef& ModelDef::getClass(const std::string& n) const {
    const ClassDef* c = findClass(n);
    if (!c) throw Error("unknown class " + n);
    return *c;
}

const EnumType* ModelDef::findEnum(const std::string& n) const {
    for (const auto& e : enums)
        if (e.name == n) return &e;
    return nullptr;
}

const OperationSig* ModelDef::findOp(const std::string& cls, const std::string& op) const {
    for (const auto& o : operations)
        if (o.ownerClass == cls && o.name == op) return &o;
    return nullptr;
}

const MethodDef* ModelDef::findMethod(const std::string& cls, const std::string& name) const {
    for (const auto& m : methods)
        if (m.definedIn == cls && m.name == name) return &m;
    return nullptr;
}

const AssocDef* ModelDef::findAssoc(const std::string& n) const {
    for (const auto& a : associations)
        if (a.name == n) return &a;
    return nullptr;
}

bool ModelDef::isTypeName(const std::string& t) const {
    if (t == "Int" || t == "Bool" || t == "Void" || t == "String") return true;
    if (isCollection(t)) return isTypeName(elemType(t));
    if (isClassRef(t)) return findClass(refClass(t)) != nullptr;
    return findEnum(t) != nullptr;
}

const AttrDecl* ModelDef::findAttr(const std::string& cls, const std::string& attr) const {
    const ClassDef* c = findClass(cls);
    if (!c) return nullptr;
    for (const auto& a : c->attrs)
        if (a.name == attr) return &a;
    return nullptr;
}

bool ModelDef::isSub(const std::string& c1, const std::string& c2) const {
    if (c1 == c2) return true;
    // breadth-first over declared edges
    std::vector<std::string> frontier{c1};
    std::set<std::string> seen{c1};
    while (!frontier.empty()) {
        std::string cur = frontier.back();
        frontier.pop_back();
        for (const auto& [sub, super] : subEdges) {
            if (sub != cur || seen.count(super)) continue;
            if (super == c2) return true;
            seen.insert(super);
            frontier.push_back(super);
        }
    }
    return false;
}

std::vector<std::string> ModelDef::subClassesOf(const std::string& c) const {
    std::vector<std::string> out;
    for (const auto& d : classes)
        if (isSub(d.name, c)) out.push_back(d.name);
    return out;
}

std::map<std::string, std::string> ModelDef::variables() const {
    std::map<std::string, std::string> out;
    auto add = [&out](const std::string& qual, const std::string& type) {
        auto [it, fresh] = out.emplace(qual, type);
        if (!fresh) throw Error("variable declared twice: " + qual);
    };
    for (const auto& c : classes)
        for (const auto& a : c.attrs) add(c.name + "." + a.name, a.type);
    for (const auto& m : methods) {
        for (std::size_t i = 0; i < m.parNames.size(); ++i)
            add(m.definedIn + "." + m.name + "." + m.parNames[i], m.parTypes[i]);
        for (std::size_t i = 0; i < m.localNames.size(); ++i)
            add(m.definedIn + "." + m.name + "." + m.localNames[i], m.localTypes[i]);
    }
    return out;
}

const MethodDef* ModelDef::resolveImpl(const std::string& cls, const std::string& op) const {
    auto it = impl.find({cls, op});
    if (it == impl.end()) return nullptr;
    return findMethod(it->second.first, it->second.second);
}

const Instance* Scenario::findObject(const std::string& label) const {
    for (const auto& [l, inst] : objects)
        if (l == label) return &inst;
    return nullptr;
}

std::optional<std::string> Scenario::labelOf(const Oid& o) const {
    for (const auto& [l, inst] : objects)
        if (inst.self == o) return l;
    return std::nullopt;
}

// ---- carriers ----

bool inCarrier(const ModelDef& m, const std::string& type, const Value& v) {
    if (type == "Int") return v.isInt();
    if (type == "Bool") return v.isBool();
    if (type == "Void") return v.isVoid();
    if (type == "String") return v.isStr();
    if (isCollection(type)) {
        if (!v.isTup()) return false;
        for (const auto& i : v.asTup().items)
            if (!inCarrier(m, elemType(type), i)) return false;
        return true;
    }
    if (isClassRef(type)) {
        if (!v.isOid()) return false;
        const Oid& o = v.asOid();
        if (o.isNil()) return true;
        if (o.isEnv()) return false;
        const ClassDef* c = m.findClass(o.cls);
        if (!c || !m.isSub(o.cls, refClass(type))) return false;
        return o.idx >= 1 && o.idx <= c->oidBudget;
    }
    if (const EnumType* e = m.findEnum(type)) {
        if (!v.isStr()) return false;
        return std::find(e->literals.begin(), e->literals.end(), v.asStr()) != e->literals.end();
    }
    throw Error("unknown type " + type);
}

std::vector<Oid> oidsOfExactClass(const ModelDef& m, const std::string& c) {
    const ClassDef& cd = m.getClass(c);
    std::vector<Oid> out;
    for (std::uint64_t i = 1; i <= cd.oidBudget; ++i) out.push_back(Oid{c, i});
    return out;
}

std::vector<Value> classRefCarrier(const ModelDef& m, const std::string& c) {
    std::vector<Value> out{Value(Oid::nil())};
    for (const auto& d : m.subClassesOf(c))
        for (const auto& o : oidsOfExactClass(m, d)) out.emplace_back(o);
    return out;
}

std::vector<Value> enumCarrier(const ModelDef& m, const std::string& type, long intLo, long intHi) {
    if (type == "Int") {
        std::vector<Value> out;
        for (long i = intLo; i <= intHi; ++i) out.push_back(Value::ofInt(i));
        return out;
    }
    if (type == "Bool") return {Value(true), Value(false)};
    if (type == "Void") return {Value(VoidValue{})};
    if (type == "String") throw Error("carrier of String is not enumerable");
    if (isCollection(type)) throw Error("carrier of " + type + " is not enumerable");
    if (isClassRef(type)) return classRefCarrier(m, refClass(type));
    if (const EnumType* e = m.findEnum(type)) {
        std::vector<Value> out;
        for (const auto& l : e->literals) out.emplace_back(l);
        return out;
    }
    throw Error("unknown type " + type);
}

bool carrierSubset(const ModelDef& m, const std::string& t1, const std::string& t2) {
    if (t1 == t2) return true;
    if (isCollection(t1) && isCollection(t2))
        return carrierSubset(m, elemType(t1), elemType(t2));
    if (isClassRef(t1) && isClassRef(t2)) {
        // C1& subseteq C2& iff every subclass of C1 is a subclass of C2
        for (const auto& d : m.subClassesOf(refClass(t1)))
            if (!m.isSub(d, refClass(t2))) return false;
        return true;
    }
    const EnumType* e1 = m.findEnum(t1);
    const EnumType* e2 = m.findEnum(t2);
    if (e1 && e2) {
        for (const auto& l : e1->literals)
            if (std::find(e2->literals.begin(), e2->literals.end(), l) == e2->literals.end())
                return false;
        return true;
    }
    return false;
}

Value defaultValue(const ModelDef& m, const std::string& type) {
    if (type == "Int") return Value(Int(0));
    if (type == "Bool") return Value(false);
    if (type == "Void") return Value(VoidValue{});
    if (type == "String") return Value(std::string());
    if (isCollection(type)) return Value(TupleValue{});
    if (isClassRef(type)) return Value(Oid::nil());
    if (const EnumType* e = m.findEnum(type)) {
        if (e->literals.empty()) throw Error("enum " + type + " has no literals");
        return Value(e->literals.front());
    }
    throw Error("unknown type " + type);
}

Instance mkInstance(const ModelDef& m, const std::string& cls, std::uint64_t idx) {
    const ClassDef& c = m.getClass(cls);
    if (c.oidBudget == 0)
        throw Error("class " + cls + " is abstract: no instances");
    if (idx < 1 || idx > c.oidBudget)
        throw Error("oid index out of budget for class " + cls);
    Instance inst;
    inst.self = Oid{cls, idx};
    for (const auto& a : c.attrs) inst.attrs.set(a.name, defaultValue(m, a.type));
    return inst;
}

const Value& getAttr(const Instance& inst, const std::string& attr) {
    return inst.attrs.get(attr);
}

// ---- validation ----

namespace {

void checkTypeSafeOps(const ModelDef& m, ValidationReport& r) {
    bool violated = false;
    for (const auto& op1 : m.operations) {
        for (const auto& c : m.classes) {
            if (!m.isSub(c.name, op1.ownerClass)) continue;
            const OperationSig* op2 = m.findOp(c.name, op1.name);
            if (!op2) {
                r.violations.push_back({"type-safe-ops",
                    "class " + c.name + " has no operation " + op1.name +
                    " redeclared from " + op1.ownerClass});
                violated = true;
                continue;
            }
            if (!carrierSubset(m, op2->resType, op1.resType)) {
                r.violations.push_back({"type-safe-ops",
                    c.name + "." + op1.name + ": result type " + op2->resType +
                    " does not specialize " + op1.resType});
                violated = true;
            }
            if (op2->parTypes.size() != op1.parTypes.size()) {
                r.violations.push_back({"type-safe-ops",
                    c.name + "." + op1.name + ": parameter arity differs"});
                violated = true;
                continue;
            }
            for (std::size_t i = 0; i < op1.parTypes.size(); ++i)
                if (!carrierSubset(m, op1.parTypes[i], op2->parTypes[i])) {
                    r.violations.push_back({"type-safe-ops",
                        c.name + "." + op1.name + ": parameter " + std::to_string(i) +
                        " type " + op2->parTypes[i] + " does not generalize " + op1.parTypes[i]});
                    violated = true;
                }
        }
    }
    if (!violated) r.passed.push_back("type-safe-ops");
}

void checkImpl(const ModelDef& m, ValidationReport& r) {
    bool violated = false;
    for (const auto& c : m.classes) {
        if (c.oidBudget == 0) continue; // abstract classes need no bodies
        for (const auto& op : m.operations) {
            if (op.ownerClass != c.name) continue;
            const MethodDef* mth = m.resolveImpl(c.name, op.name);
            if (!mth) {
                r.violations.push_back({"impl-total",
                    "instantiable class " + c.name + " lacks a body for operation " + op.name});
                violated = true;
                continue;
            }
            if (mth->name != op.name) {
                r.violations.push_back({"impl-name",
                    c.name + "." + op.name + " implemented by differently named method " + mth->name});
                violated = true;
            }
            if (!m.isSub(op.ownerClass, mth->definedIn)) {
                r.violations.push_back({"impl-owner",
                    c.name + "." + op.name + ": body defined in unrelated class " + mth->definedIn});
                violated = true;
            }
            if (!carrierSubset(m, mth->resType, op.resType)) {
                r.violations.push_back({"impl-result",
                    c.name + "." + op.name + ": body result " + mth->resType +
                    " does not specialize " + op.resType});
                violated = true;
            }
            if (mth->parTypes.size() != op.parTypes.size()) {
                r.violations.push_back({"impl-params",
                    c.name + "." + op.name + ": body parameter arity differs"});
                violated = true;
            } else {
                for (std::size_t i = 0; i < op.parTypes.size(); ++i)
                    if (!carrierSubset(m, op.parTypes[i], mth->parTypes[i])) {
                        r.violations.push_back({"impl-params",
                            c.name + "." + op.name + ": body parameter " + std::to_string(i) +
                            " cannot accept all arguments of " + op.parTypes[i]});
                        violated = true;
                    }
            }
        }
    }
    if (!violated) r.passed.push_back("impl-total");
}

} // namespace

ValidationReport validateModel(const ModelDef& m) {
    ValidationReport r;

    // declarations are well-formed
    {
        bool ok = true;
        std::set<std::string> names;
        for (const auto& c : m.classes) {
            if (!names.insert(c.name).second) {
                r.violations.push_back({"class-unique", "class " + c.name + " declared twice"});
                ok = false;
            }
            std::set<std::string> attrNames;
            for (const auto& a : c.attrs) {
                if (!attrNames.insert(a.name).second) {
                    r.violations.push_back({"attr-unique",
                        c.name + "." + a.name + " declared twice"});
                    ok = false;
                }
                if (!m.isTypeName(a.type)) {
                    r.violations.push_back({"attr-type",
                        c.name + "." + a.name + " has unknown type " + a.type});
                    ok = false;
                }
            }
        }
        for (const auto& [sub, super] : m.subEdges)
            if (!m.findClass(sub) || !m.findClass(super)) {
                r.violations.push_back({"sub-declared",
                    "subclass edge (" + sub + ", " + super + ") names an unknown class"});
                ok = false;
            }
        if (ok) r.passed.push_back("declarations");
    }

    // qualified variable namespace is collision-free
    try {
        m.variables();
        r.passed.push_back("variables-unique");
    } catch (const Error& e) {
        r.violations.push_back({"variables-unique", e.what()});
    }

    // method scopes: parameters, locals and visible attributes stay disjoint
    {
        bool ok = true;
        for (const auto& mth : m.methods) {
            std::set<std::string> seen{"this"};
            auto clash = [&](const std::string& n, const char* what) {
                if (!seen.insert(n).second) {
                    r.violations.push_back({"method-vars-disjoint",
                        mth.definedIn + "." + mth.name + ": " + what + " " + n + " shadows another name"});
                    ok = false;
                }
            };
            if (const ClassDef* c = m.findClass(mth.definedIn))
                for (const auto& a : c->attrs) seen.insert(a.name);
            for (const auto& p : mth.parNames) clash(p, "parameter");
            for (const auto& l : mth.localNames) clash(l, "local");
        }
        if (ok) r.passed.push_back("method-vars-disjoint");
    }

    checkTypeSafeOps(m, r);
    checkImpl(m, r);

    // channels: at most one channel per (sender, receiver) endpoint pair
    {
        bool ok = true;
        std::set<std::pair<Oid, Oid>> seen;
        std::set<std::string> chNames;
        for (const auto& ch : m.channels) {
            if (!chNames.insert(ch.name).second) {
                r.violations.push_back({"channel-unique", "channel " + ch.name + " declared twice"});
                ok = false;
            }
            if (!seen.insert({ch.from, ch.to}).second) {
                r.violations.push_back({"channel-endpoints",
                    "events from " + ch.from.str() + " to " + ch.to.str() +
                    " claimed by two channels"});
                ok = false;
            }
        }
        if (ok) r.passed.push_back("channels");
    }

    {
        bool ok = true;
        std::set<std::string> ths(m.threads.begin(), m.threads.end());
        if (ths.size() != m.threads.size()) {
            r.violations.push_back({"threads-unique", "duplicate thread name"});
            ok = false;
        }
        if (ok) r.passed.push_back("threads");
    }

    if (m.flags.liskov) {
        bool ok = true;
        for (const auto& c1 : m.classes)
            for (const auto& c2 : m.classes) {
                if (c1.name == c2.name || !m.isSub(c1.name, c2.name)) continue;
                for (const auto& a : c2.attrs) {
                    const AttrDecl* a1 = m.findAttr(c1.name, a.name);
                    if (!a1 || a1->type != a.type) {
                        r.violations.push_back({"liskov",
                            "subclass " + c1.name + " lacks attribute " + a.name +
                            ": " + a.type + " of " + c2.name});
                        ok = false;
                    }
                }
            }
        if (ok) r.passed.push_back("liskov");
    }

    if (m.flags.antisymmetricSub) {
        bool ok = true;
        for (const auto& c1 : m.classes)
            for (const auto& c2 : m.classes)
                if (c1.name != c2.name && m.isSub(c1.name, c2.name) && m.isSub(c2.name, c1.name)) {
                    r.violations.push_back({"antisymmetric-sub",
                        "classes " + c1.name + " and " + c2.name + " subclass each other"});
                    ok = false;
                }
        if (ok) r.passed.push_back("antisymmetric-sub");
    }

    if (m.flags.typeSafeOps2) {
        bool ok = true;
        for (const auto& op1 : m.operations)
            for (const auto& c : m.classes) {
                if (!m.isSub(c.name, op1.ownerClass)) continue;
                const OperationSig* op2 = m.findOp(c.name, op1.name);
                if (!op2 || op2->parTypes != op1.parTypes || op2->resType != op1.resType) {
                    r.violations.push_back({"type-safe-ops-strict",
                        c.name + "." + op1.name + ": signature differs from " +
                        op1.ownerClass + "." + op1.name});
                    ok = false;
                }
            }
        if (ok) r.passed.push_back("type-safe-ops-strict");
    }

    if (m.flags.singleThread) {
        if (m.threads.size() != 1)
            r.violations.push_back({"single-thread",
                "model declares " + std::to_string(m.threads.size()) + " threads"});
        else
            r.passed.push_back("single-thread");
    }

    if (m.flags.activeObjects) {
        bool ok = true;
        for (const auto& c : m.classes) {
            if (c.oidBudget == 0) continue;
            if (!m.findOp(c.name, "run")) {
                r.violations.push_back({"active-objects",
                    "instantiable class " + c.name + " has no run operation"});
                ok = false;
            }
        }
        if (ok) r.passed.push_back("active-objects");
    }

    if (m.flags.regions) {
        bool ok = true;
        for (const auto& c : m.classes)
            if (!m.regions.count(c.name)) {
                r.violations.push_back({"regions-total",
                    "class " + c.name + " is not assigned to a region"});
                ok = false;
            }
        if (ok) r.passed.push_back("regions-total");
    }

    // finiteness holds by construction: budgets are finite numbers
    if (m.flags.finiteObjectSet) r.passed.push_back("finite-object-set");
    if (m.flags.typeOf) r.passed.push_back("type-of-total");

    return r;
}

} // namespace sysmodel
