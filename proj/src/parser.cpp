#include "sysmodel/parser.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

namespace sysmodel {

namespace {

struct Token {
    enum K { Ident, IntLit, StrLit, Punct, End };
    K k = End;
    std::string text;
    Int ival;
    int line = 0, col = 0;
};

class Lexer {
public:
    explicit Lexer(const std::string& src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        for (;;) {
            skipSpace();
            if (pos_ >= src_.size()) break;
            out.push_back(lexOne());
        }
        Token end;
        end.k = Token::End;
        end.line = line_;
        end.col = col_;
        out.push_back(end);
        return out;
    }

private:
    void skipSpace() {
        for (;;) {
            while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_])))
                advance();
            if (pos_ + 1 < src_.size() && src_[pos_] == '/' && src_[pos_ + 1] == '/') {
                while (pos_ < src_.size() && src_[pos_] != '\n') advance();
                continue;
            }
            break;
        }
    }

    void advance() {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else
            ++col_;
        ++pos_;
    }

    Token lexOne() {
        Token t;
        t.line = line_;
        t.col = col_;
        char c = src_[pos_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            t.k = Token::Ident;
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
                t.text += src_[pos_];
                advance();
            }
            return t;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            t.k = Token::IntLit;
            std::string digits;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                digits += src_[pos_];
                advance();
            }
            t.text = digits;
            t.ival = Int(digits);
            return t;
        }
        if (c == '"') {
            t.k = Token::StrLit;
            advance();
            while (pos_ < src_.size() && src_[pos_] != '"') {
                if (src_[pos_] == '\\' && pos_ + 1 < src_.size()) advance();
                t.text += src_[pos_];
                advance();
            }
            if (pos_ >= src_.size()) throw ParseError("unterminated string", t.line, t.col);
            advance();
            return t;
        }
        t.k = Token::Punct;
        static const char* multi[] = {":=", "->", "<=", ">=", "==", "!=", ".."};
        for (const char* mc : multi) {
            if (src_.compare(pos_, 2, mc) == 0) {
                t.text = mc;
                advance();
                advance();
                return t;
            }
        }
        t.text = std::string(1, c);
        advance();
        return t;
    }

    const std::string& src_;
    std::size_t pos_ = 0;
    int line_ = 1, col_ = 1;
};

// deferred scenario value: literals, object labels, tuples
struct RawValue {
    enum K { Lit, Label, Tup };
    K k = Lit;
    Value lit;
    std::string label;
    std::vector<RawValue> items;
    int line = 0, col = 0;
};

struct RawObject {
    std::string label, cls;
    std::vector<std::pair<std::string, RawValue>> inits;
    int line = 0, col = 0;
};

struct RawCall {
    std::string label, op, thread;
    std::vector<RawValue> args;
    int line = 0, col = 0;
};

struct RawChannelMsg {
    ChannelMsg msg; // args filled after resolution
    std::vector<RawValue> rawArgs;
    RawValue rawRet;
    bool hasRet = false;
};

struct RawChannel {
    std::string name, fromLabel, toLabel; // "env" allowed
    std::vector<RawChannelMsg> alphabet;
    int line = 0, col = 0;
};

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    ModelFile parseModelFile() {
        ModelFile mf;
        bool sawName = false;
        while (!atEnd()) {
            const Token& t = peek();
            if (t.k != Token::Ident) fail("expected a declaration keyword");
            const std::string& kw = t.text;
            if (kw == "model") {
                next();
                mf.model.name = expectIdent("model name");
                sawName = true;
            } else if (kw == "flags")
                parseFlags(mf.model);
            else if (kw == "enum")
                parseEnum(mf.model);
            else if (kw == "class")
                parseClass(mf.model);
            else if (kw == "sub")
                parseSub(mf.model);
            else if (kw == "assoc")
                parseAssoc(mf.model);
            else if (kw == "op")
                parseOp(mf.model);
            else if (kw == "method")
                parseMethod(mf.model);
            else if (kw == "impl")
                parseImpl(mf.model);
            else if (kw == "threads")
                parseThreads(mf.model);
            else if (kw == "region")
                parseRegion(mf.model);
            else if (kw == "object")
                parseObject();
            else if (kw == "channel")
                parseChannel();
            else if (kw == "call")
                parseCall();
            else if (kw == "policy") {
                next();
                mf.scenario.policy = expectIdent("policy name");
            } else if (kw == "seed") {
                next();
                mf.scenario.seed = static_cast<std::uint64_t>(expectInt("seed"));
            } else if (kw == "maxsteps") {
                next();
                mf.scenario.maxSteps = static_cast<int>(expectInt("maxsteps"));
            } else if (kw == "horizon") {
                next();
                mf.scenario.horizon = static_cast<int>(expectInt("horizon"));
            } else
                fail("unknown declaration " + kw);
        }
        if (!sawName) fail("missing model declaration");
        resolve(mf);
        return mf;
    }

    Value parseValueOnly() {
        Value v = parseLiteralValue();
        if (!atEnd()) fail("trailing input after value");
        return v;
    }

    DataStore parseStoreOnly() {
        expectKeyword("store");
        expectPunct("{");
        DataStore ds;
        while (!acceptPunct("}")) {
            expectKeyword("object");
            Oid o = parseOidLiteral();
            Value rec = parseLiteralValue();
            Instance inst;
            inst.self = o;
            inst.attrs = rec.asRec();
            ds = ds.addObj(std::move(inst));
        }
        if (!atEnd()) fail("trailing input after store");
        return ds;
    }

private:
    // ---- token helpers ----

    bool atEnd() const { return toks_[pos_].k == Token::End; }
    const Token& peek(std::size_t off = 0) const {
        return toks_[std::min(pos_ + off, toks_.size() - 1)];
    }
    const Token& next() { return toks_[pos_++]; }
    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError(what, peek().line, peek().col);
    }

    std::string expectIdent(const std::string& what) {
        if (peek().k != Token::Ident) fail("expected " + what);
        return next().text;
    }
    long expectInt(const std::string& what) {
        bool neg = peek().k == Token::Punct && peek().text == "-";
        if (neg) next();
        if (peek().k != Token::IntLit) fail("expected " + what);
        return (neg ? -1 : 1) * static_cast<long>(next().ival);
    }
    void expectPunct(const std::string& p) {
        if (peek().k != Token::Punct || peek().text != p) fail("expected '" + p + "'");
        next();
    }
    bool acceptPunct(const std::string& p) {
        if (peek().k == Token::Punct && peek().text == p) {
            next();
            return true;
        }
        return false;
    }
    bool peekPunct(const std::string& p) const {
        return peek().k == Token::Punct && peek().text == p;
    }
    void expectKeyword(const std::string& kw) {
        if (peek().k != Token::Ident || peek().text != kw) fail("expected '" + kw + "'");
        next();
    }
    bool acceptKeyword(const std::string& kw) {
        if (peek().k == Token::Ident && peek().text == kw) {
            next();
            return true;
        }
        return false;
    }
    bool peekKeyword(const std::string& kw) const {
        return peek().k == Token::Ident && peek().text == kw;
    }

    // ---- shared pieces ----

    std::string parseType() {
        if (acceptPunct("[")) {
            std::string inner = parseType();
            expectPunct("]");
            return "[" + inner + "]";
        }
        std::string name = expectIdent("type name");
        if (acceptPunct("&")) return name + "&";
        return name;
    }

    Oid parseOidLiteral() {
        if (acceptKeyword("nil")) return Oid::nil();
        if (acceptKeyword("env")) return Oid::env();
        std::string cls = expectIdent("class name");
        expectPunct("#");
        long idx = expectInt("oid index");
        if (idx < 0) fail("negative oid index");
        return Oid{cls, static_cast<std::uint64_t>(idx)};
    }

    Value parseLiteralValue() {
        const Token& t = peek();
        if (t.k == Token::IntLit || (t.k == Token::Punct && t.text == "-"))
            return Value(Int(expectInt("integer")));
        if (t.k == Token::StrLit) return Value(next().text);
        if (t.k == Token::Punct && t.text == "(") {
            next();
            TupleValue tup;
            if (!acceptPunct(")")) {
                do
                    tup.items.push_back(parseLiteralValue());
                while (acceptPunct(","));
                expectPunct(")");
            }
            return Value(std::move(tup));
        }
        if (t.k == Token::Punct && t.text == "[") {
            next();
            RecordValue rec;
            if (!acceptPunct("]")) {
                do {
                    std::string n = expectIdent("field name");
                    expectPunct("=");
                    rec.set(n, parseLiteralValue());
                } while (acceptPunct(","));
                expectPunct("]");
            }
            return Value(std::move(rec));
        }
        if (t.k == Token::Ident) {
            if (t.text == "true") {
                next();
                return Value(true);
            }
            if (t.text == "false") {
                next();
                return Value(false);
            }
            if (t.text == "void") {
                next();
                return Value(VoidValue{});
            }
            if (t.text == "nil") {
                next();
                return Value(Oid::nil());
            }
            if (t.text == "env") {
                next();
                return Value(Oid::env());
            }
            // Class#idx
            if (peek(1).k == Token::Punct && peek(1).text == "#") return Value(parseOidLiteral());
        }
        fail("expected a value literal");
    }

    RawValue parseRawValue() {
        RawValue rv;
        rv.line = peek().line;
        rv.col = peek().col;
        const Token& t = peek();
        if (t.k == Token::Ident && t.text != "true" && t.text != "false" && t.text != "void" &&
            t.text != "nil" && t.text != "env" &&
            !(peek(1).k == Token::Punct && peek(1).text == "#")) {
            rv.k = RawValue::Label;
            rv.label = next().text;
            return rv;
        }
        if (t.k == Token::Punct && t.text == "(") {
            next();
            rv.k = RawValue::Tup;
            if (!acceptPunct(")")) {
                do
                    rv.items.push_back(parseRawValue());
                while (acceptPunct(","));
                expectPunct(")");
            }
            return rv;
        }
        rv.k = RawValue::Lit;
        rv.lit = parseLiteralValue();
        return rv;
    }

    // ---- declarations ----

    void parseFlags(ModelDef& m) {
        next();
        expectPunct("{");
        while (!acceptPunct("}")) {
            std::string f = expectIdent("flag name");
            if (f == "typeOf")
                m.flags.typeOf = true;
            else if (f == "liskov")
                m.flags.liskov = true;
            else if (f == "antisymmetricSub")
                m.flags.antisymmetricSub = true;
            else if (f == "typeSafeOpsStrict")
                m.flags.typeSafeOps2 = true;
            else if (f == "finiteObjectSet")
                m.flags.finiteObjectSet = true;
            else if (f == "singleThread")
                m.flags.singleThread = true;
            else if (f == "messagesOnly")
                m.flags.messagesOnly = true;
            else if (f == "activeObjects")
                m.flags.activeObjects = true;
            else if (f == "regions")
                m.flags.regions = true;
            else if (f == "oneTickPerSlot")
                m.flags.oneTickPerSlot = true;
            else
                fail("unknown flag " + f);
            acceptPunct(",");
        }
    }

    void parseEnum(ModelDef& m) {
        next();
        EnumType e;
        e.name = expectIdent("enum name");
        expectPunct("{");
        while (!acceptPunct("}")) {
            e.literals.push_back(expectIdent("enum literal"));
            acceptPunct(",");
        }
        m.enums.push_back(std::move(e));
    }

    void parseClass(ModelDef& m) {
        next();
        ClassDef c;
        c.name = expectIdent("class name");
        if (acceptKeyword("extends")) {
            std::string super = expectIdent("superclass name");
            m.subEdges.emplace_back(c.name, super);
        }
        expectPunct("{");
        while (!acceptPunct("}")) {
            if (acceptKeyword("budget")) {
                long b = expectInt("budget");
                if (b < 0) fail("negative budget");
                c.oidBudget = static_cast<std::uint64_t>(b);
            } else if (acceptKeyword("attr")) {
                AttrDecl a;
                a.name = expectIdent("attribute name");
                expectPunct(":");
                a.type = parseType();
                c.attrs.push_back(std::move(a));
            } else
                fail("unknown class item (expected budget or attr)");
            acceptPunct(";");
        }
        m.classes.push_back(std::move(c));
    }

    void parseSub(ModelDef& m) {
        next();
        std::string sub = expectIdent("subclass name");
        expectPunct("<");
        std::string super = expectIdent("superclass name");
        m.subEdges.emplace_back(std::move(sub), std::move(super));
    }

    void parseAssoc(ModelDef& m) {
        next();
        AssocDef a;
        a.name = expectIdent("association name");
        expectPunct("{");
        bool haveReal = false;
        while (!acceptPunct("}")) {
            if (acceptKeyword("classes")) {
                a.classes.push_back(expectIdent("class name"));
                while (acceptPunct(",")) a.classes.push_back(expectIdent("class name"));
            } else if (acceptKeyword("attribute")) {
                a.realization = AssocDef::Real::Attribute;
                a.attrVar = expectIdent("attribute name");
                haveReal = true;
            } else if (acceptKeyword("assocclass")) {
                a.realization = AssocDef::Real::AssocClass;
                a.linkClass = expectIdent("link class");
                expectPunct("(");
                a.endVar1 = expectIdent("first end attribute");
                expectPunct(",");
                a.endVar2 = expectIdent("second end attribute");
                expectPunct(")");
                haveReal = true;
            } else if (acceptKeyword("collection")) {
                a.realization = AssocDef::Real::MToOneCollection;
                a.attrVar = expectIdent("forward attribute");
                expectPunct(",");
                a.collVar = expectIdent("back collection attribute");
                haveReal = true;
            } else if (acceptKeyword("table")) {
                a.realization = AssocDef::Real::ExplicitTable;
                expectPunct("{");
                while (!acceptPunct("}")) {
                    expectKeyword("row");
                    std::vector<Oid> ends;
                    ends.push_back(parseOidLiteral());
                    while (acceptPunct(",")) ends.push_back(parseOidLiteral());
                    Value extra(VoidValue{});
                    if (acceptKeyword("extra")) extra = parseLiteralValue();
                    a.table.emplace_back(std::move(ends), std::move(extra));
                    acceptPunct(";");
                }
                haveReal = true;
            } else if (acceptKeyword("multiplicity")) {
                MultSet n1 = parseMultSet();
                expectKeyword("to");
                MultSet n2 = parseMultSet();
                a.multiplicity = {std::move(n1), std::move(n2)};
            } else if (acceptKeyword("ordered")) {
                expectKeyword("by");
                do {
                    OrderKey k;
                    k.path.push_back(expectIdent("order key attribute"));
                    while (acceptPunct(".")) k.path.push_back(expectIdent("order key attribute"));
                    if (acceptKeyword("desc"))
                        k.ascending = false;
                    else
                        acceptKeyword("asc");
                    a.orderKeys.push_back(std::move(k));
                } while (acceptPunct(","));
            } else if (acceptKeyword("qualified")) {
                expectKeyword("by");
                a.qualifierAttr = expectIdent("qualifier attribute");
            } else
                fail("unknown association item");
            acceptPunct(";");
        }
        if (a.classes.size() < 2) fail("association " + a.name + " needs two classes");
        if (!haveReal) fail("association " + a.name + " has no realization");
        m.associations.push_back(std::move(a));
    }

    MultSet parseMultSet() {
        MultSet ms;
        if (acceptPunct("*")) {
            ms.k = MultSet::K::Any;
            return ms;
        }
        if (acceptPunct("{")) {
            ms.k = MultSet::K::Explicit;
            do
                ms.elems.insert(static_cast<std::uint64_t>(expectInt("multiplicity")));
            while (acceptPunct(","));
            expectPunct("}");
            return ms;
        }
        long lo = expectInt("multiplicity");
        if (acceptPunct("..")) {
            long hi = expectInt("multiplicity");
            if (lo == 0 && hi == 1) {
                ms.k = MultSet::K::ZeroOrOne;
                return ms;
            }
            ms.k = MultSet::K::Explicit;
            for (long i = lo; i <= hi; ++i) ms.elems.insert(static_cast<std::uint64_t>(i));
            return ms;
        }
        if (lo == 1) {
            ms.k = MultSet::K::One;
            return ms;
        }
        ms.k = MultSet::K::Explicit;
        ms.elems.insert(static_cast<std::uint64_t>(lo));
        return ms;
    }

    void parseOp(ModelDef& m) {
        next();
        OperationSig op;
        op.ownerClass = expectIdent("class name");
        expectPunct(".");
        op.name = expectIdent("operation name");
        expectPunct("(");
        if (!acceptPunct(")")) {
            do
                op.parTypes.push_back(parseType());
            while (acceptPunct(","));
            expectPunct(")");
        }
        expectPunct(":");
        op.resType = parseType();
        m.operations.push_back(std::move(op));
    }

    void parseMethod(ModelDef& m) {
        next();
        MethodDef mth;
        mth.definedIn = expectIdent("class name");
        expectPunct(".");
        mth.name = expectIdent("method name");
        expectPunct("(");
        if (!acceptPunct(")")) {
            do {
                mth.parNames.push_back(expectIdent("parameter name"));
                expectPunct(":");
                mth.parTypes.push_back(parseType());
            } while (acceptPunct(","));
            expectPunct(")");
        }
        expectPunct(":");
        mth.resType = parseType();
        if (acceptKeyword("table"))
            mth.table = parseTable(mth);
        else {
            expectPunct("{");
            while (acceptKeyword("var")) {
                mth.localNames.push_back(expectIdent("local name"));
                expectPunct(":");
                mth.localTypes.push_back(parseType());
                expectPunct(";");
            }
            mth.stmts = parseStmts();
            expectPunct("}");
        }
        // a method is the default body of its own class's synonymous operation
        auto key = std::make_pair(mth.definedIn, mth.name);
        if (!m.impl.count(key)) m.impl[key] = {mth.definedIn, mth.name};
        m.methods.push_back(std::move(mth));
    }

    CfstsDef parseTable(MethodDef& mth) {
        CfstsDef cf;
        expectPunct("{");
        while (!acceptPunct("}")) {
            if (acceptKeyword("var")) { // locals may also appear in table bodies
                mth.localNames.push_back(expectIdent("local name"));
                expectPunct(":");
                mth.localTypes.push_back(parseType());
            } else if (acceptKeyword("pcs")) {
                do
                    cf.pcs.push_back(expectIdent("pc name"));
                while (acceptPunct(","));
            } else if (acceptKeyword("start"))
                cf.start = expectIdent("pc name");
            else if (acceptKeyword("finish")) {
                do
                    cf.finish.insert(expectIdent("pc name"));
                while (acceptPunct(","));
            } else if (acceptKeyword("wait")) {
                do
                    cf.waitReturn.insert(expectIdent("pc name"));
                while (acceptPunct(","));
            } else if (acceptKeyword("at")) {
                CfTransition t;
                t.from = expectIdent("pc name");
                if (acceptKeyword("tick")) {
                    if (acceptKeyword("when")) t.guard = parseExpr();
                    if (acceptKeyword("do")) {
                        t.assignTarget = expectIdent("assignment target");
                        expectPunct(":=");
                        t.assignExpr = parseExpr();
                    }
                    if (acceptKeyword("emit")) {
                        if (acceptKeyword("call")) {
                            t.emit = CfTransition::Emit::Call;
                            t.calleeExpr = parsePrimary();
                            expectPunct(".");
                            t.emitOp = expectIdent("operation name");
                            t.emitArgs = parseArgs();
                        } else if (acceptKeyword("return")) {
                            t.emit = CfTransition::Emit::Ret;
                            if (!peekKeyword("goto")) t.retExpr = parseExpr();
                        } else if (acceptKeyword("signal")) {
                            t.emit = CfTransition::Emit::Signal;
                            t.calleeExpr = parsePrimary();
                            expectPunct(".");
                            t.emitOp = expectIdent("operation name");
                            t.emitArgs = parseArgs();
                        } else
                            fail("expected call, return or signal after emit");
                    }
                } else if (acceptKeyword("on")) {
                    expectKeyword("return");
                    t.consumesReturn = true;
                    if (acceptKeyword("into")) t.bindTarget = expectIdent("bind target");
                } else
                    fail("expected tick or on");
                expectKeyword("goto");
                t.to = expectIdent("pc name");
                t.label = describeTableTransition(t);
                cf.transitions.push_back(std::move(t));
            } else
                fail("unknown table item");
            acceptPunct(";");
        }
        return cf;
    }

    static std::string describeTableTransition(const CfTransition& t) {
        if (t.consumesReturn)
            return t.bindTarget.empty() ? "consume return" : "consume return into " + t.bindTarget;
        std::string s;
        if (!t.assignTarget.empty())
            s = "assign " + t.assignTarget + " := " + t.assignExpr->str();
        switch (t.emit) {
        case CfTransition::Emit::Call:
            s += (s.empty() ? "" : "; ") + std::string("call ") + t.calleeExpr->str() + "." +
                 t.emitOp;
            break;
        case CfTransition::Emit::Ret:
            s += (s.empty() ? "" : "; ") +
                 std::string(t.retExpr ? "return " + t.retExpr->str() : "return void");
            break;
        case CfTransition::Emit::Signal:
            s += (s.empty() ? "" : "; ") + std::string("send ") + t.calleeExpr->str() + "." +
                 t.emitOp;
            break;
        case CfTransition::Emit::None:
            break;
        }
        if (s.empty()) s = t.guard ? "guard " + t.guard->str() : "noop";
        else if (t.guard) s = "guard " + t.guard->str() + "; " + s;
        return s;
    }

    std::vector<ExprPtr> parseArgs() {
        expectPunct("(");
        std::vector<ExprPtr> out;
        if (!acceptPunct(")")) {
            do
                out.push_back(parseExpr());
            while (acceptPunct(","));
            expectPunct(")");
        }
        return out;
    }

    // ---- statements ----

    std::vector<StmtPtr> parseStmts() {
        std::vector<StmtPtr> out;
        while (!peekPunct("}")) out.push_back(parseStmt());
        return out;
    }

    StmtPtr parseStmt() {
        Stmt st;
        if (acceptKeyword("return")) {
            st.k = Stmt::K::Return;
            if (!peekPunct(";")) st.expr = parseExpr();
            expectPunct(";");
        } else if (acceptKeyword("if")) {
            st.k = Stmt::K::If;
            expectPunct("(");
            st.expr = parseExpr();
            expectPunct(")");
            expectPunct("{");
            st.body = parseStmts();
            expectPunct("}");
            if (acceptKeyword("else")) {
                expectPunct("{");
                st.elseBody = parseStmts();
                expectPunct("}");
            }
        } else if (acceptKeyword("while")) {
            st.k = Stmt::K::While;
            expectPunct("(");
            st.expr = parseExpr();
            expectPunct(")");
            expectPunct("{");
            st.body = parseStmts();
            expectPunct("}");
        } else if (peekKeyword("call") || peekKeyword("send")) {
            st.k = next().text == "call" ? Stmt::K::Call : Stmt::K::Send;
            st.callee = parsePrimary();
            expectPunct(".");
            st.op = expectIdent("operation name");
            for (auto& a : parseArgs()) st.args.push_back(std::move(a));
            expectPunct(";");
        } else {
            std::string target = expectIdent("assignment target");
            expectPunct(":=");
            if (acceptKeyword("call")) {
                st.k = Stmt::K::Call;
                st.target = target;
                st.callee = parsePrimary();
                expectPunct(".");
                st.op = expectIdent("operation name");
                for (auto& a : parseArgs()) st.args.push_back(std::move(a));
            } else {
                st.k = Stmt::K::Assign;
                st.target = target;
                st.expr = parseExpr();
            }
            expectPunct(";");
        }
        return std::make_shared<const Stmt>(std::move(st));
    }

    // ---- expressions ----

    ExprPtr parseExpr() { return parseOrExpr(); }

    ExprPtr parseOrExpr() {
        ExprPtr e = parseAndExpr();
        while (acceptKeyword("or")) e = mkBinary("or", e, parseAndExpr());
        return e;
    }

    ExprPtr parseAndExpr() {
        ExprPtr e = parseNotExpr();
        while (acceptKeyword("and")) e = mkBinary("and", e, parseNotExpr());
        return e;
    }

    ExprPtr parseNotExpr() {
        if (acceptKeyword("not")) return mkUnary("not", parseNotExpr());
        return parseCmpExpr();
    }

    ExprPtr parseCmpExpr() {
        ExprPtr e = parseAddExpr();
        static const char* ops[] = {"<=", ">=", "==", "!=", "<", ">"};
        for (const char* op : ops)
            if (peekPunct(op)) {
                next();
                return mkBinary(op, e, parseAddExpr());
            }
        return e;
    }

    ExprPtr parseAddExpr() {
        ExprPtr e = parseMulExpr();
        for (;;) {
            if (acceptPunct("+"))
                e = mkBinary("+", e, parseMulExpr());
            else if (acceptPunct("-"))
                e = mkBinary("-", e, parseMulExpr());
            else
                return e;
        }
    }

    ExprPtr parseMulExpr() {
        ExprPtr e = parseUnaryExpr();
        for (;;) {
            if (acceptPunct("*"))
                e = mkBinary("*", e, parseUnaryExpr());
            else if (acceptPunct("/"))
                e = mkBinary("/", e, parseUnaryExpr());
            else
                return e;
        }
    }

    ExprPtr parseUnaryExpr() {
        if (acceptPunct("-")) return mkUnary("neg", parseUnaryExpr());
        return parsePrimary();
    }

    ExprPtr parsePrimary() {
        const Token& t = peek();
        if (t.k == Token::IntLit) return mkIntLit(next().ival);
        if (t.k == Token::StrLit) return mkStrLit(next().text);
        if (t.k == Token::Punct && t.text == "(") {
            next();
            ExprPtr e = parseExpr();
            expectPunct(")");
            return e;
        }
        if (t.k == Token::Ident) {
            if (t.text == "true") {
                next();
                return mkBoolLit(true);
            }
            if (t.text == "false") {
                next();
                return mkBoolLit(false);
            }
            if (t.text == "nil") {
                next();
                return mkNil();
            }
            if (t.text == "void") {
                next();
                return mkVoidLit();
            }
            if (t.text == "this") {
                next();
                return mkThis();
            }
            return mkVar(next().text);
        }
        fail("expected an expression");
    }

    // ---- remaining declarations ----

    void parseImpl(ModelDef& m) {
        next();
        std::string cls = expectIdent("class name");
        expectPunct(".");
        std::string op = expectIdent("operation name");
        expectPunct("=");
        std::string mcls = expectIdent("class name");
        expectPunct(".");
        std::string mname = expectIdent("method name");
        m.impl[{cls, op}] = {mcls, mname};
    }

    void parseThreads(ModelDef& m) {
        next();
        expectPunct("{");
        while (!acceptPunct("}")) {
            m.threads.push_back(expectIdent("thread name"));
            acceptPunct(",");
        }
    }

    void parseRegion(ModelDef& m) {
        next();
        std::string cls = expectIdent("class name");
        expectPunct("=");
        m.regions[cls] = expectIdent("region name");
    }

    void parseObject() {
        next();
        RawObject o;
        o.line = peek().line;
        o.col = peek().col;
        o.label = expectIdent("object label");
        expectPunct(":");
        o.cls = expectIdent("class name");
        expectPunct("{");
        if (!acceptPunct("}")) {
            do {
                std::string attr = expectIdent("attribute name");
                expectPunct("=");
                o.inits.emplace_back(attr, parseRawValue());
            } while (acceptPunct(","));
            expectPunct("}");
        }
        rawObjects_.push_back(std::move(o));
    }

    void parseChannel() {
        next();
        RawChannel ch;
        ch.line = peek().line;
        ch.col = peek().col;
        ch.name = expectIdent("channel name");
        expectKeyword("from");
        ch.fromLabel = expectIdent("sender (object label or env)");
        expectKeyword("to");
        ch.toLabel = expectIdent("receiver (object label or env)");
        if (acceptPunct("{")) {
            while (!acceptPunct("}")) {
                RawChannelMsg rm;
                if (acceptKeyword("call")) {
                    rm.msg.isReturn = false;
                    rm.msg.op = expectIdent("operation name");
                    expectPunct("(");
                    if (!acceptPunct(")")) {
                        do
                            rm.rawArgs.push_back(parseRawValue());
                        while (acceptPunct(","));
                        expectPunct(")");
                    }
                } else if (acceptKeyword("return")) {
                    rm.msg.isReturn = true;
                    rm.rawRet = parseRawValue();
                    rm.hasRet = true;
                } else
                    fail("expected call or return in channel alphabet");
                if (acceptKeyword("on")) rm.msg.thread = expectIdent("thread name");
                ch.alphabet.push_back(std::move(rm));
                acceptPunct(";");
            }
        }
        rawChannels_.push_back(std::move(ch));
    }

    void parseCall() {
        next();
        RawCall c;
        c.line = peek().line;
        c.col = peek().col;
        c.label = expectIdent("object label");
        expectPunct(".");
        c.op = expectIdent("operation name");
        expectPunct("(");
        if (!acceptPunct(")")) {
            do
                c.args.push_back(parseRawValue());
            while (acceptPunct(","));
            expectPunct(")");
        }
        expectKeyword("on");
        c.thread = expectIdent("thread name");
        rawCalls_.push_back(std::move(c));
    }

    // ---- resolution ----

    void resolve(ModelFile& mf) {
        // oids per class in declaration order
        std::map<std::string, std::uint64_t> counters;
        std::map<std::string, Oid> labels;
        for (const auto& o : rawObjects_) {
            if (!mf.model.findClass(o.cls))
                throw ParseError("object " + o.label + " has unknown class " + o.cls, o.line,
                                 o.col);
            if (labels.count(o.label))
                throw ParseError("object label " + o.label + " declared twice", o.line, o.col);
            labels[o.label] = Oid{o.cls, ++counters[o.cls]};
        }
        auto resolveRaw = [&labels](const RawValue& rv, auto&& self) -> Value {
            switch (rv.k) {
            case RawValue::Lit:
                return rv.lit;
            case RawValue::Label: {
                auto it = labels.find(rv.label);
                if (it != labels.end()) return Value(it->second);
                return Value(rv.label); // enum literal
            }
            default: {
                TupleValue t;
                for (const auto& i : rv.items) t.items.push_back(self(i, self));
                return Value(std::move(t));
            }
            }
        };
        for (const auto& o : rawObjects_) {
            Instance inst = mkInstance(mf.model, o.cls, labels[o.label].idx);
            for (const auto& [attr, rv] : o.inits) {
                if (!inst.attrs.has(attr))
                    throw ParseError("object " + o.label + " has no attribute " + attr, o.line,
                                     o.col);
                inst.attrs.set(attr, resolveRaw(rv, resolveRaw));
            }
            mf.scenario.objects.emplace_back(o.label, std::move(inst));
        }
        auto endpoint = [&labels](const std::string& l, int line, int col) -> Oid {
            if (l == "env") return Oid::env();
            auto it = labels.find(l);
            if (it == labels.end())
                throw ParseError("unknown object label " + l, line, col);
            return it->second;
        };
        for (const auto& rc : rawChannels_) {
            ChannelDecl ch;
            ch.name = rc.name;
            ch.from = endpoint(rc.fromLabel, rc.line, rc.col);
            ch.to = endpoint(rc.toLabel, rc.line, rc.col);
            for (const auto& rm : rc.alphabet) {
                ChannelMsg cm = rm.msg;
                for (const auto& ra : rm.rawArgs) cm.args.push_back(resolveRaw(ra, resolveRaw));
                if (rm.hasRet) cm.retVal = resolveRaw(rm.rawRet, resolveRaw);
                ch.alphabet.push_back(std::move(cm));
            }
            mf.model.channels.push_back(std::move(ch));
        }
        for (const auto& rc : rawCalls_) {
            ScenarioCall c;
            c.receiver = endpoint(rc.label, rc.line, rc.col);
            c.op = rc.op;
            c.thread = rc.thread;
            for (const auto& ra : rc.args) c.args.push_back(resolveRaw(ra, resolveRaw));
            mf.scenario.calls.push_back(std::move(c));
        }
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    std::vector<RawObject> rawObjects_;
    std::vector<RawChannel> rawChannels_;
    std::vector<RawCall> rawCalls_;
};

} // namespace

ModelFile parseModelFile(const std::string& text) {
    Parser p(Lexer(text).run());
    return p.parseModelFile();
}

ModelFile loadModelFile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return parseModelFile(os.str());
}

Value parseValue(const std::string& text) {
    Parser p(Lexer(text).run());
    return p.parseValueOnly();
}

std::string serializeStore(const DataStore& ds) {
    std::ostringstream os;
    os << "store {\n";
    for (const auto& [o, inst] : ds.map())
        os << "  object " << o.str() << " " << Value(inst.attrs).str() << "\n";
    os << "}\n";
    return os.str();
}

DataStore parseStoreText(const std::string& text) {
    Parser p(Lexer(text).run());
    return p.parseStoreOnly();
}

} // namespace sysmodel
