#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <httplib.h>

#include "dtac/corpus.hpp"
#include "dtac/diff.hpp"
#include "dtac/parser.hpp"
#include "dtac/printer.hpp"
#include "dtac/service.hpp"
#include "dtac/stdlib.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kFail = 1;       // I/O, parse error, or guard violation for `check`
constexpr int kStepFail = 2;   // a tactic step failed

int cmd_apply(const std::string& program_path, const std::string& script_path, const std::string& errors_path,
              const std::string& out_path, bool diff, bool trace) {
    dtac::Program p;
    dtac::Script script;
    dtac::FixtureOracle oracle;
    try {
        p = dtac::parse_program(dtac::read_file(program_path));
        script = dtac::parse_script(dtac::read_file(script_path));
        oracle = dtac::FixtureOracle::parse(errors_path.empty() ? std::string() : dtac::read_file(errors_path));
        oracle.bind(p);
    } catch (const std::exception& e) {
        std::cerr << "dtac: " << e.what() << "\n";
        return kFail;
    }
    dtac::Library lib;
    try {
        lib = dtac::extend(dtac::load_stdlib(), script);
    } catch (const dtac::TacticError& e) {
        std::cerr << "dtac: " << e.what() << "\n";
        return kStepFail;
    }

    dtac::Replay r = dtac::replay(p, script, lib, oracle);
    std::string prev = dtac::print_program(r.initial);
    for (std::size_t i = 0; i < r.steps.size(); ++i) {
        const auto& st = r.steps[i];
        if (trace) {
            std::cout << "step " << i + 1 << ": " << st.invocation << (st.result.ok ? "" : "  [failed]") << "\n";
            for (const auto& t : st.result.trace) std::cout << "  " << t.tactic << " at " << t.site << ": " << t.summary << "\n";
        }
        if (diff && st.result.ok) {
            std::string cur = dtac::print_program(st.result.program);
            std::cout << dtac::unified_diff(prev, cur, "step " + std::to_string(i), "step " + std::to_string(i + 1));
            prev = std::move(cur);
        }
    }
    if (!r.ok) {
        std::cerr << "dtac: " << r.failure << "\n";
        return kStepFail;
    }
    std::ofstream out(out_path, std::ios::binary);
    out << dtac::print_program(r.final);
    if (!out) {
        std::cerr << "dtac: cannot write " << out_path << "\n";
        return kFail;
    }
    return kOk;
}

int cmd_check(const std::string& before, const std::string& after) {
    try {
        auto a = dtac::parse_program(dtac::read_file(before));
        auto b = dtac::parse_program(dtac::read_file(after));
        auto report = dtac::check_guard(a, b);
        std::cout << dtac::format_report(report) << "\n";
        return report.ok ? kOk : kFail;
    } catch (const std::exception& e) {
        std::cerr << "dtac: " << e.what() << "\n";
        return kFail;
    }
}

int cmd_parse(const std::string& path, bool check) {
    try {
        auto p = dtac::parse_program(dtac::read_file(path));
        std::cout << dtac::print_program(p);
        if (!check) return kOk;
        auto errs = dtac::typecheck(p);
        for (const auto& e : errs) std::cerr << e.position.method << ": " << e.message << "\n";
        return errs.empty() ? kOk : kFail;
    } catch (const std::exception& e) {
        std::cerr << "dtac: " << e.what() << "\n";
        return kFail;
    }
}

int cmd_stdlib(bool list) {
    if (!list) {
        std::cout << dtac::stdlib_source();
        return kOk;
    }
    for (const auto& m : dtac::manifest(dtac::load_stdlib()))
        std::cout << m.name << "/" << m.arity << "\t" << m.paper_ref << "\t" << m.doc << "\n";
    return kOk;
}

int cmd_serve(const std::string& host, int port, const std::string& snapshots) {
    std::optional<std::filesystem::path> dir;
    if (!snapshots.empty()) dir = snapshots;
    dtac::SessionManager sessions(dtac::load_stdlib(), dir);
    httplib::Server server;
    dtac::install_routes(server, sessions);
    std::cerr << "dtac: listening on " << host << ":" << port << "\n";
    return server.listen(host, port) ? kOk : kFail;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"DTac workbench: tactic-driven refactoring of mini-Dafny proofs"};
    app.require_subcommand(1);

    std::string program, script, errors, out, before, after, host = "127.0.0.1", snapshots;
    bool diff = false, trace = false, list = false, check = false;
    int port = 8080;

    auto* apply = app.add_subcommand("apply", "Replay a tactic script on a program");
    apply->add_option("--program", program, "Program (.mdfy)")->required();
    apply->add_option("--script", script, "Tactic script (.dtac)")->required();
    apply->add_option("--errors", errors, "Verifier error fixture");
    apply->add_option("--out", out, "Output program")->required();
    apply->add_flag("--diff", diff, "Print a unified diff per step");
    apply->add_flag("--trace", trace, "Print the trace of every step");

    auto* chk = app.add_subcommand("check", "Check that AFTER is a refactoring of BEFORE");
    chk->add_option("--before", before)->required();
    chk->add_option("--after", after)->required();

    auto* parse = app.add_subcommand("parse", "Parse and pretty-print a program");
    parse->add_option("program", program)->required();
    parse->add_flag("--typecheck", check, "Also typecheck; exit 1 on errors");

    auto* lib = app.add_subcommand("stdlib", "Show the tactic library");
    lib->add_flag("--list", list, "One line per tactic: name/arity, reference, doc");

    auto* serve = app.add_subcommand("serve", "Run the HTTP session service");
    serve->add_option("--host", host);
    serve->add_option("--port", port);
    serve->add_option("--snapshots", snapshots, "Directory for per-session program snapshots");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kOk : kFail;
    }
    if (*apply) return cmd_apply(program, script, errors, out, diff, trace);
    if (*chk) return cmd_check(before, after);
    if (*parse) return cmd_parse(program, check);
    if (*lib) return cmd_stdlib(list);
    if (*serve) return cmd_serve(host, port, snapshots);
    return kFail;
}
