// Command-line front end: validate models, run scenarios, explore the
// scheduler's choices, check algebraic law suites, abstract objects into
// timed behaviors and snapshot stores.

#include "sysmodel/engine.hpp"
#include "sysmodel/laws.hpp"
#include "sysmodel/parser.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <sstream>

namespace {

using namespace sysmodel;

std::uint64_t defaultSeed() {
    if (const char* env = std::getenv("SYSMOD_SEED")) return std::strtoull(env, nullptr, 10);
    return 0;
}

DataStore scenarioStore(const ModelFile& mf) {
    DataStore ds;
    for (const auto& [label, inst] : mf.scenario.objects) ds = ds.addObj(inst);
    return ds;
}

int reportViolations(const std::string& rule, const std::vector<Violation>& vs) {
    for (const auto& v : vs) std::cout << "violation " << v.code << ": " << v.detail << "\n";
    return vs.empty() ? 0 : 1;
}

int cmdValidate(const std::string& path) {
    ModelFile mf = loadModelFile(path);
    int bad = 0;
    ValidationReport mr = validateModel(mf.model);
    bad |= reportViolations("model", mr.violations);
    ValidationReport sr = validateStore(mf.model, scenarioStore(mf));
    bad |= reportViolations("store", sr.violations);
    bad |= reportViolations("multiplicity", checkMultiplicities(mf.model, scenarioStore(mf)));
    bad |= reportViolations("channels", checkChannelDiscipline(mf.model));
    if (bad) {
        std::cout << "invalid: " << mf.model.name << "\n";
        return 1;
    }
    for (const auto& p : mr.passed) std::cout << "passed: " << p << "\n";
    for (const auto& p : sr.passed) std::cout << "passed: " << p << "\n";
    std::cout << "ok: " << mf.model.name << "\n";
    return 0;
}

void applyArgOverrides(ModelFile& mf, const std::vector<std::string>& overrides) {
    for (const auto& ov : overrides) {
        auto eq = ov.find('=');
        if (eq == std::string::npos) throw Error("--arg expects name=value, got " + ov);
        std::string name = ov.substr(0, eq);
        Value val = parseValue(ov.substr(eq + 1));
        bool found = false;
        for (auto& call : mf.scenario.calls) {
            const MethodDef* mth = mf.model.resolveImpl(call.receiver.cls, call.op);
            if (!mth) continue;
            for (std::size_t i = 0; i < mth->parNames.size() && i < call.args.size(); ++i)
                if (mth->parNames[i] == name) {
                    call.args[i] = val;
                    found = true;
                }
        }
        if (!found) throw Error("no scenario call has a parameter named " + name);
    }
}

SchedulerPolicy mkPolicy(const std::string& name, std::uint64_t seed,
                         const std::string& script) {
    SchedulerPolicy p = SchedulerPolicy::parse(name, seed);
    if (!script.empty()) {
        std::istringstream is(script);
        std::string item;
        while (std::getline(is, item, ';'))
            if (!item.empty()) p.script.push_back(item);
    }
    return p;
}

int cmdRun(const std::string& path, const std::string& policy, std::uint64_t seed,
           int maxSteps, const std::vector<std::string>& overrides, const std::string& script) {
    ModelFile mf = loadModelFile(path);
    applyArgOverrides(mf, overrides);
    std::string pol = policy.empty() ? mf.scenario.policy : policy;
    int steps = maxSteps > 0 ? maxSteps : mf.scenario.maxSteps;
    Engine eng(mf.model);
    RunResult rr = run(eng, initialConfig(mf.model, mf.scenario), mkPolicy(pol, seed, script),
                       steps);
    for (const auto& st : rr.trace) {
        std::cout << "step " << st.index << ": " << st.choice.key();
        if (!st.consumed.empty()) std::cout << " consumed " << st.consumed;
        for (const auto& e : st.emitted) std::cout << " emitted " << e;
        std::cout << "\n";
    }
    std::cout << "quiescent: " << (rr.quiescent ? "yes" : "no") << "\n";
    std::cout << "outputs:\n";
    for (const auto& msg : envMessages(rr.final)) std::cout << "  " << msg.str() << "\n";
    std::cout << serializeStore(rr.final.state.ds);
    return 0;
}

int cmdExplore(const std::string& path, int depth) {
    ModelFile mf = loadModelFile(path);
    Engine eng(mf.model);
    ExploreResult res = explore(eng, initialConfig(mf.model, mf.scenario), depth);
    for (const auto& t : res.terminals) {
        std::cout << "terminal " << t.digest << ":";
        for (const auto& msg : envMessages(t.cfg)) std::cout << " " << msg.str();
        std::cout << "\n";
    }
    std::cout << "terminals: " << res.terminals.size() << "\n";
    std::cout << "visited: " << res.visitedStates << "\n";
    std::cout << "frontier: " << res.frontierStates << "\n";
    std::cout << "exhausted: " << (res.exhausted ? "yes" : "no") << "\n";
    return 0;
}

int cmdLaws(const std::string& suite, std::uint64_t seed, int n, std::size_t horizon) {
    std::vector<LawResult> results;
    if (suite == "kernel")
        results = kernelLawSuite(seed, n > 0 ? n : 1000);
    else if (suite == "control")
        results = controlLawSuite(seed, n > 0 ? n : 1000);
    else if (suite == "state")
        results = stateLawSuite(seed, n > 0 ? n : 500);
    else if (suite == "causality")
        results = causalityLawSuite(seed, n > 0 ? n : 200, horizon ? horizon : 3);
    else if (suite == "composition")
        results = compositionLawSuite(seed, n > 0 ? n : 100, horizon ? horizon : 5);
    else if (suite == "channel")
        results = channelLawSuite(seed, n > 0 ? n : 200);
    else if (suite == "all")
        results = allLawSuites(seed);
    else
        throw Error("unknown law suite " + suite);
    bool bad = false;
    for (const auto& r : results) {
        std::cout << "law " << r.name << ": " << r.cases << " cases, " << r.failures
                  << " failures\n";
        for (const auto& note : r.notes) std::cout << "  " << note << "\n";
        bad = bad || !r.ok();
    }
    std::cout << (bad ? "laws failed\n" : "laws hold\n");
    return bad ? 1 : 0;
}

void printBehavior(const BehaviorTable& f) {
    for (const auto& [in, outs] : f.table) {
        std::cout << "in " << in.str() << " ->\n";
        for (const auto& out : outs) std::cout << "  " << out.str() << "\n";
    }
}

int cmdAbstract(const std::string& path, const std::string& label, std::size_t horizon,
                bool oneTick) {
    ModelFile mf = loadModelFile(path);
    const Instance* inst = mf.scenario.findObject(label);
    if (!inst) throw Error("no scenario object labeled " + label);
    Engine eng(mf.model);
    EstsToTstsOptions opts;
    opts.oneTickPerSlot = oneTick;
    TstsDef a = estsToTsts(eng, inst->self, estsInitial(*inst), opts);
    int bad = reportViolations("tsts", validateTsts(a, horizon));
    BehaviorTable f = abstraction(a, horizon);
    printBehavior(f);
    std::cout << "timeGuarded: " << (isTimeGuarded(f) ? "yes" : "no") << "\n";
    std::cout << "properlyTimed: " << (isProperlyTimed(f) ? "yes" : "no") << "\n";
    std::cout << "deterministic: " << (isDeterministic(f) ? "yes" : "no") << "\n";
    return bad;
}

int cmdSnapshot(const std::string& path, int at, const std::string& policy,
                std::uint64_t seed) {
    ModelFile mf = loadModelFile(path);
    SysConfig cfg = initialConfig(mf.model, mf.scenario);
    if (at > 0) {
        Engine eng(mf.model);
        std::string pol = policy.empty() ? mf.scenario.policy : policy;
        RunResult rr = run(eng, cfg, mkPolicy(pol, seed, ""), at);
        cfg = rr.final;
    }
    std::cout << serializeStore(cfg.state.ds);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"object-system semantics workbench"};
    app.require_subcommand(1);

    std::string path, policy, script, suite = "all", label;
    std::uint64_t seed = defaultSeed();
    int maxSteps = 0, depth = 20, at = 0, n = 0;
    std::size_t horizon = 0;
    std::vector<std::string> overrides;
    bool oneTick = false;

    auto* validate = app.add_subcommand("validate", "check a model file");
    validate->add_option("file", path)->required();

    auto* runCmd = app.add_subcommand("run", "run a scenario");
    runCmd->add_option("file", path)->required();
    runCmd->add_option("--policy", policy);
    runCmd->add_option("--seed", seed);
    runCmd->add_option("--max-steps", maxSteps);
    runCmd->add_option("--arg", overrides);
    runCmd->add_option("--script", script);

    auto* exploreCmd = app.add_subcommand("explore", "enumerate scheduler outcomes");
    exploreCmd->add_option("file", path)->required();
    exploreCmd->add_option("--depth", depth);

    auto* laws = app.add_subcommand("laws", "check algebraic law suites");
    laws->add_option("--suite", suite);
    laws->add_option("--seed", seed);
    laws->add_option("--n", n);
    laws->add_option("--horizon", horizon);

    auto* abstractCmd = app.add_subcommand("abstract", "timed behavior of one object");
    abstractCmd->add_option("file", path)->required();
    abstractCmd->add_option("--oid", label)->required();
    abstractCmd->add_option("--horizon", horizon);
    abstractCmd->add_flag("--one-tick", oneTick);

    auto* snapshot = app.add_subcommand("snapshot", "store snapshot after some steps");
    snapshot->add_option("file", path)->required();
    snapshot->add_option("--at", at);
    snapshot->add_option("--policy", policy);
    snapshot->add_option("--seed", seed);

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed()) return cmdValidate(path);
        if (runCmd->parsed()) return cmdRun(path, policy, seed, maxSteps, overrides, script);
        if (exploreCmd->parsed()) return cmdExplore(path, depth);
        if (laws->parsed()) return cmdLaws(suite, seed, n, horizon);
        if (abstractCmd->parsed())
            return cmdAbstract(path, label, horizon ? horizon : 4, oneTick);
        if (snapshot->parsed()) return cmdSnapshot(path, at, policy, seed);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
