#ifndef SYSMODEL_MODEL_HPP
#define SYSMODEL_MODEL_HPP

// Static system description: type names and carriers, classes with typed
// attributes, a subclassing relation, associations, operation signatures,
// method bodies, threads, channels and option flags.  A model is data; all
// semantic operations are free functions over it.

#include "sysmodel/values.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace sysmodel {

// Types are referenced by name: "Int", "Bool", "Void", "String", a declared
// enum name, or "C&" for a reference to class C (carrier: Nil plus the oids
// of C and its subclasses).
inline bool isClassRef(const std::string& t) { return !t.empty() && t.back() == '&'; }
inline std::string refClass(const std::string& t) { return t.substr(0, t.size() - 1); }

// "[T]" is the collection type over T: finite sequences of T values,
// carried as tuples.
inline bool isCollection(const std::string& t) {
    return t.size() >= 2 && t.front() == '[' && t.back() == ']';
}
inline std::string elemType(const std::string& t) { return t.substr(1, t.size() - 2); }

struct EnumType {
    std::string name;
    std::vector<std::string> literals; // carried as string values
};

struct AttrDecl {
    std::string name;
    std::string type;
};

struct ClassDef {
    std::string name;
    std::vector<AttrDecl> attrs;
    std::uint64_t oidBudget = 0; // 0 = abstract: no instances can exist
};

struct OperationSig {
    std::string name;
    std::string ownerClass;
    std::vector<std::string> parTypes;
    std::string resType;
};

// ---- expressions and statements (method bodies) ----

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    enum class K { IntLit, BoolLit, StrLit, NilLit, VoidLit, This, Var, Unary, Binary };
    K k;
    Int intVal;
    bool boolVal = false;
    std::string strVal;
    std::string var; // variable or attribute name
    std::string op;  // Binary: + - * / < <= > >= == != and or; Unary: not, neg
    ExprPtr a, b;
    std::string str() const;
};

ExprPtr mkIntLit(Int v);
ExprPtr mkBoolLit(bool v);
ExprPtr mkStrLit(std::string v);
ExprPtr mkNil();
ExprPtr mkVoidLit();
ExprPtr mkThis();
ExprPtr mkVar(std::string name);
ExprPtr mkUnary(std::string op, ExprPtr a);
ExprPtr mkBinary(std::string op, ExprPtr a, ExprPtr b);

struct Stmt;
using StmtPtr = std::shared_ptr<const Stmt>;

struct Stmt {
    enum class K { Assign, Call, Send, Return, If, While };
    K k;
    std::string target; // Assign target; Call: optional result binding ("" = none)
    ExprPtr expr;       // Assign rhs; Return value (null = void); If/While condition
    ExprPtr callee;     // Call/Send receiver expression
    std::string op;     // Call/Send operation name
    std::vector<ExprPtr> args;
    std::vector<StmtPtr> body, elseBody; // If (then/else); While (body)
};

// ---- control-flow state transition system (one per method) ----

struct CfTransition {
    std::string from, to;
    ExprPtr guard; // null = unconditional
    // fired on a tick unless consumesReturn is set
    std::string assignTarget; // "" = no assignment
    ExprPtr assignExpr;
    enum class Emit { None, Call, Ret, Signal };
    Emit emit = Emit::None;
    ExprPtr calleeExpr; // Call/Signal receiver
    std::string emitOp;
    std::vector<ExprPtr> emitArgs;
    ExprPtr retExpr;             // Ret payload; null = void
    bool consumesReturn = false; // fires by consuming a matching buffered return
    std::string bindTarget;      // "" = discard consumed return value
    std::string label;           // human-readable, shows up in traces
};

struct CfstsDef {
    std::vector<std::string> pcs;
    std::string start;
    std::set<std::string> finish;
    std::set<std::string> waitReturn;
    std::vector<CfTransition> transitions;
};

struct MethodDef {
    std::string name;
    std::string definedIn;
    std::vector<std::string> parNames;
    std::vector<std::string> parTypes;
    std::vector<std::string> localNames;
    std::vector<std::string> localTypes;
    std::string resType;
    std::vector<StmtPtr> stmts;     // statement body (compiled on demand), or
    std::optional<CfstsDef> table;  // explicit transition table
};

// ---- associations ----

// A set of admissible link counts.
struct MultSet {
    enum class K { Any, One, ZeroOrOne, Explicit };
    K k = K::Any;
    std::set<std::uint64_t> elems; // Explicit only
    bool contains(std::uint64_t n) const {
        switch (k) {
        case K::Any: return true;
        case K::One: return n == 1;
        case K::ZeroOrOne: return n <= 1;
        default: return elems.count(n) != 0;
        }
    }
    std::string str() const;
};

struct OrderKey {
    std::vector<std::string> path; // attribute navigation from the link target
    bool ascending = true;
};

struct AssocDef {
    std::string name;
    std::vector<std::string> classes; // binary associations: [C1, C2]
    enum class Real { Attribute, AssocClass, MToOneCollection, ExplicitTable };
    Real realization = Real::Attribute;
    std::string attrVar;                          // Attribute / MToOneCollection
    std::string linkClass, endVar1, endVar2;      // AssocClass
    std::string collVar;                          // MToOneCollection back-collection on C2
    std::vector<std::pair<std::vector<Oid>, Value>> table; // ExplicitTable rows + extra value
    std::optional<std::pair<MultSet, MultSet>> multiplicity; // (N1, N2)
    std::vector<OrderKey> orderKeys; // nonempty: association is ordered
    std::string qualifierAttr;       // nonempty: qualified by this C2 attribute
};

// ---- channels ----

struct ChannelMsg { // element of a channel's finite message alphabet
    bool isReturn = false;
    std::string op;          // call: operation name
    std::vector<Value> args; // call arguments
    Value retVal;            // return payload
    std::string thread;      // carrying thread; empty = first declared thread
};

struct ChannelDecl {
    std::string name;
    Oid from, to; // env allowed on either end
    std::vector<ChannelMsg> alphabet;
};

// ---- flags, model, scenario ----

struct OptionFlags {
    bool typeOf = false;
    bool liskov = false;
    bool antisymmetricSub = false;
    bool typeSafeOps2 = false;
    bool finiteObjectSet = false;
    bool singleThread = false;
    bool messagesOnly = false;
    bool activeObjects = false;
    bool regions = false;
    bool oneTickPerSlot = false; // timed translation: exactly one tick per slot
};

struct Instance {
    Oid self;
    RecordValue attrs;
    friend bool operator==(const Instance& a, const Instance& b) {
        return a.self == b.self && a.attrs == b.attrs;
    }
    friend bool operator!=(const Instance& a, const Instance& b) { return !(a == b); }
};

struct ModelDef {
    std::string name;
    std::vector<EnumType> enums;
    std::vector<ClassDef> classes;
    std::vector<std::pair<std::string, std::string>> subEdges; // (subclass, superclass)
    std::vector<AssocDef> associations;
    std::vector<OperationSig> operations;
    std::vector<MethodDef> methods;
    // (class, op name) -> (method definedIn, method name)
    std::map<std::pair<std::string, std::string>, std::pair<std::string, std::string>> impl;
    std::vector<std::string> threads;
    std::vector<ChannelDecl> channels;
    std::map<std::string, std::string> regions; // class -> region
    OptionFlags flags;

    const ClassDef* findClass(const std::string& n) const;
    const ClassDef& getClass(const std::string& n) const;
    const EnumType* findEnum(const std::string& n) const;
    const OperationSig* findOp(const std::string& cls, const std::string& op) const;
    const MethodDef* findMethod(const std::string& cls, const std::string& name) const;
    const AssocDef* findAssoc(const std::string& n) const;
    bool isTypeName(const std::string& t) const;
    const AttrDecl* findAttr(const std::string& cls, const std::string& attr) const;

    // Reflexive-transitive subclass test: is c1 a (possibly indirect) subclass of c2?
    bool isSub(const std::string& c1, const std::string& c2) const;
    std::vector<std::string> subClassesOf(const std::string& c) const; // incl. c itself

    // Namespace-qualified variable map (Class.attr, Class.method.param) -> type;
    // construction fails on qualified-name clashes.
    std::map<std::string, std::string> variables() const;

    // Resolve the method implementing op on class cls (via the impl map).
    const MethodDef* resolveImpl(const std::string& cls, const std::string& op) const;
};

struct ScenarioCall {
    Oid receiver;
    std::string op;
    std::vector<Value> args;
    std::string thread;
};

struct Scenario {
    std::vector<std::pair<std::string, Instance>> objects; // (label, instance)
    std::vector<ScenarioCall> calls;
    std::string policy = "rtc";
    std::uint64_t seed = 0;
    int maxSteps = 10000;
    int horizon = 6;

    const Instance* findObject(const std::string& label) const;
    std::optional<std::string> labelOf(const Oid& o) const;
};

struct ModelFile {
    ModelDef model;
    Scenario scenario;
};

// ---- carriers ----

// Membership in the carrier of a type.
bool inCarrier(const ModelDef& m, const std::string& type, const Value& v);

// Bounded enumeration; Int uses [intLo, intHi], String is not enumerable.
std::vector<Value> enumCarrier(const ModelDef& m, const std::string& type,
                               long intLo = -2, long intHi = 2);

// Structural carrier inclusion CAR(t1) subseteq CAR(t2).
bool carrierSubset(const ModelDef& m, const std::string& t1, const std::string& t2);

// All allocatable oids of class c (indices 1..budget), excluding subclasses.
std::vector<Oid> oidsOfExactClass(const ModelDef& m, const std::string& c);

// Carrier of "C&": Nil plus oids of C and all subclasses.
std::vector<Value> classRefCarrier(const ModelDef& m, const std::string& c);

// Default value of a type: Int 0, Bool false, refs Nil, String "", Void void,
// enums their first literal.
Value defaultValue(const ModelDef& m, const std::string& type);

// Fresh instance with default attributes; rejects abstract classes and
// indices beyond the budget.
Instance mkInstance(const ModelDef& m, const std::string& cls, std::uint64_t idx);

const Value& getAttr(const Instance& inst, const std::string& attr);
inline const Oid& getThis(const Instance& inst) { return inst.self; }

// ---- validation ----

struct Violation {
    std::string code;   // symbolic rule name, e.g. "type-safe-ops"
    std::string detail;
};

struct ValidationReport {
    std::vector<Violation> violations;
    std::vector<std::string> passed; // rule names that were checked and hold
    bool ok() const { return violations.empty(); }
};

ValidationReport validateModel(const ModelDef& m);

} // namespace sysmodel

#endif
