#ifndef DTAC_CORPUS_HPP
#define DTAC_CORPUS_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "dtac/engine.hpp"

namespace dtac {

struct CorpusCase {
    std::string name;
    std::string program_text;
    std::string fixture_text;
    std::string script_text;
    std::string expected_text;  // empty when the case has no expected file
};

// Reads `<dir>/program.mdfy`, `fixture.errs`, `script.dtac`, `expected.mdfy`.
CorpusCase load_case(const std::filesystem::path& dir);

struct StepResult {
    std::string invocation;
    RunResult result;
};

struct Replay {
    bool ok = false;
    Program initial;
    Program final;
    std::vector<StepResult> steps;  // the failing step is last when !ok
    std::string failure;
};

// Library extended with the script's own definitions.
Library extend(const Library& base, const Script& s);

// Applies every script step in order, carrying bindings between steps.
// Stops at the first failing step.
Replay replay(const Program& p, const Script& s, const Library& lib, const VerifierOracle& oracle,
              EvalOptions opts = {});

// Loads, binds the fixture and replays a corpus case.
Replay replay_case(const CorpusCase& c, const Library& stdlib, EvalOptions opts = {});

// Bindings carried from one top-level step to the next.
Environment carry(const Environment& e);

std::string read_file(const std::filesystem::path& p);  // throws std::runtime_error

} // namespace dtac

#endif
