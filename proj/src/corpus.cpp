#include "dtac/corpus.hpp"

#include <fstream>
#include <sstream>

#include "dtac/parser.hpp"

namespace dtac {

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

CorpusCase load_case(const std::filesystem::path& dir) {
    CorpusCase c;
    c.name = dir.filename().string();
    c.program_text = read_file(dir / "program.mdfy");
    if (std::filesystem::exists(dir / "fixture.errs")) c.fixture_text = read_file(dir / "fixture.errs");
    c.script_text = read_file(dir / "script.dtac");
    if (std::filesystem::exists(dir / "expected.mdfy")) c.expected_text = read_file(dir / "expected.mdfy");
    return c;
}

Library extend(const Library& base, const Script& s) {
    Library lib = base;
    for (const auto& d : s.defs) lib.add(d);
    lib.check();
    return lib;
}

Environment carry(const Environment& e) {
    Environment out = e;
    out.vars.erase("?error");
    out.vars.erase("?err_arg");
    out.positions.erase("@err_pos");
    out.captures.clear();
    return out;
}

Replay replay(const Program& p, const Script& s, const Library& lib, const VerifierOracle& oracle, EvalOptions opts) {
    Replay r;
    r.initial = p;
    r.final = p;
    Engine engine(lib, oracle, opts);
    Environment env;
    for (std::size_t i = 0; i < s.steps.size(); ++i) {
        StepResult step;
        step.invocation = i < s.step_texts.size() ? s.step_texts[i] : describe(s.steps[i]);
        step.result = engine.run(r.final, s.steps[i], env);
        bool ok = step.result.ok;
        if (ok) {
            r.final = step.result.program;
            env = carry(step.result.env);
        } else {
            r.failure = "step " + std::to_string(i + 1) + " (" + step.invocation + "): " + step.result.failure;
        }
        r.steps.push_back(std::move(step));
        if (!ok) return r;
    }
    r.ok = true;
    return r;
}

Replay replay_case(const CorpusCase& c, const Library& stdlib, EvalOptions opts) {
    Program p = parse_program(c.program_text);
    FixtureOracle oracle = FixtureOracle::parse(c.fixture_text);
    oracle.bind(p);
    Script s = parse_script(c.script_text);
    return replay(p, s, extend(stdlib, s), oracle, opts);
}

} // namespace dtac
