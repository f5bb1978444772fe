#ifndef SYSMODEL_LAWS_HPP
#define SYSMODEL_LAWS_HPP

// Randomized and exhaustive law suites over the library's algebra, shared by
// the command-line `laws` command and the acceptance harness.

#include "sysmodel/focus.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace sysmodel {

struct LawResult {
    std::string name;
    long cases = 0;
    long failures = 0;
    std::vector<std::string> notes; // first few failure descriptions
    bool ok() const { return failures == 0; }
};

// Record/tuple round trips and stream algebra.
std::vector<LawResult> kernelLawSuite(std::uint64_t seed, int n);

// Central/decentral control stores are isomorphic (round trips both ways).
std::vector<LawResult> controlLawSuite(std::uint64_t seed, int n);

// Group-state projection composes over unions of object sets.
std::vector<LawResult> stateLawSuite(std::uint64_t seed, int n);

// Time guardedness implies proper timing on generated machines; the
// zero-delay copier is the negative control.
std::vector<LawResult> causalityLawSuite(std::uint64_t seed, int machines, std::size_t horizon);

// Abstraction commutes with composition; composition is commutative and
// associative, at both the machine and the behavior level.
std::vector<LawResult> compositionLawSuite(std::uint64_t seed, int randomPairs,
                                           std::size_t horizon);

// Output channels of distinct senders are disjoint; grouping hides exactly
// the internal channels.
std::vector<LawResult> channelLawSuite(std::uint64_t seed, int n);

// Every suite at its default size.
std::vector<LawResult> allLawSuites(std::uint64_t seed);

// ---- machine corpus helpers (shared with tests) ----

// A pipeline machine skeleton over one input and one output channel.
// States are 0..states-1 with initial state 0.
struct MachineSpec {
    int states = 1;
    std::vector<std::string> symbols; // message texts of both channels
    // table[s][j]: the (successor, output) branches of state s under input
    // slice j (0 = silent slot, i+1 = symbols[i]); output -1 = silent slot,
    // otherwise a symbol index.  The output choice set of a state must not
    // depend on j, keeping outputs independent of the current input.
    std::vector<std::vector<std::vector<std::pair<int, int>>>> table;
};

TstsDef mkMachine(const MachineSpec& spec, const std::string& cin, const std::string& cout);

// Bounded-bisimulation signature of the reachable part: machines that are
// identical up to state renaming get equal keys.
std::string bisimKey(const TstsDef& a, std::size_t depth);

// Repeats each input slice on the output channel within the same slot:
// properly timed, but not time guarded.
TstsDef zeroDelayCopier(const std::string& cin, const std::string& cout,
                        const std::vector<std::string>& symbols);

} // namespace sysmodel

#endif
