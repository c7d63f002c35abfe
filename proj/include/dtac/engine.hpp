#ifndef DTAC_ENGINE_HPP
#define DTAC_ENGINE_HPP

#include <string>
#include <vector>

#include "dtac/guard.hpp"
#include "dtac/kernel.hpp"
#include "dtac/oracle.hpp"
#include "dtac/tactic.hpp"

namespace dtac {

struct TraceEntry {
    std::string tactic;   // innermost named tactic, or "rule"/"match" at top level
    std::string site;     // to_string of the site
    std::string summary;  // printed rewrite or "match"
};

struct EvalOptions {
    std::size_t step_budget = 200000;  // primitive match attempts per run
    std::size_t max_unfold = 64;
};

struct RunResult {
    bool ok = false;
    Program program;
    Environment env;
    std::string failure;
    std::vector<TraceEntry> trace;
    GuardReport guard;
};

// Evaluates tactics against programs.  Search is depth-first over error
// environments, match results and `or` branches; the first result that
// typechecks and passes the refactoring guard wins.
class Engine {
public:
    Engine(const Library& lib, const VerifierOracle& oracle, EvalOptions opts = {});

    // One top-level application.  `carried` holds bindings from earlier
    // applications (e.g. ?meth and ?arg after case-I).
    RunResult run(const Program& p, const Trans& t, const Environment& carried = {}) const;

private:
    const Library& lib_;
    const VerifierOracle& oracle_;
    EvalOptions opts_;
};

// Substitutes formal bindings throughout a tactic body.
Trans substitute_trans(const Trans& t, const std::map<std::string, Node>& vars);

// Short single-line description of an invocation for traces and history.
std::string describe(const Trans& t);

} // namespace dtac

#endif
