#include "dtac/service.hpp"

#include <cstdio>
#include <fstream>
#include <random>
#include <regex>
#include <sstream>

#include <httplib.h>

#include "dtac/corpus.hpp"
#include "dtac/diff.hpp"
#include "dtac/parser.hpp"
#include "dtac/printer.hpp"
#include "dtac/stdlib.hpp"

namespace dtac {

using nlohmann::json;

namespace {

ApiResponse error(int status, const std::string& msg) { return ApiResponse{status, json{{"error", msg}}}; }

ApiResponse unknown_session(const std::string& id) { return error(404, "unknown session '" + id + "'"); }

std::string new_token() {
    static std::mutex mu;
    static std::mt19937_64 rng{std::random_device{}()};
    std::lock_guard lock(mu);
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(rng()));
    return buf;
}

json errors_json(const std::vector<ErrorReport>& errs) {
    json out = json::array();
    for (const auto& e : errs) out.push_back(to_json(e));
    return out;
}

const std::string* string_field(const json& body, const char* key) {
    if (!body.is_object() || !body.contains(key) || !body[key].is_string()) return nullptr;
    return body[key].get_ptr<const std::string*>();
}

} // namespace

json to_json(const GuardReport& g) {
    json v = json::array();
    for (const auto& x : g.violations)
        v.push_back({{"kind", std::string(violation_name(x.kind))}, {"method", x.method}, {"detail", x.detail}});
    return json{{"ok", g.ok}, {"violations", v}};
}

json to_json(const ErrorReport& e) {
    return json{{"kind", e.kind}, {"property", print_expr(e.property)}, {"line", e.line}, {"col", e.col}};
}

std::map<std::string, int> anchor_lines(const std::string& printed) {
    static const std::regex marker(R"(/\*@([A-Za-z_][A-Za-z0-9_']*)\*/)");
    std::map<std::string, int> out;
    std::istringstream in(printed);
    std::string line;
    for (int n = 1; std::getline(in, line); ++n)
        for (std::sregex_iterator it(line.begin(), line.end(), marker), end; it != end; ++it) out[(*it)[1]] = n;
    return out;
}

SessionManager::SessionManager(Library stdlib, std::optional<std::filesystem::path> snapshot_dir, EvalOptions opts)
    : stdlib_(std::move(stdlib)), snapshot_dir_(std::move(snapshot_dir)), opts_(opts) {}

std::shared_ptr<SessionManager::Session> SessionManager::find(const std::string& id) const {
    std::shared_lock lock(store_mu_);
    auto it = sessions_.find(id);
    return it == sessions_.end() ? nullptr : it->second;
}

void SessionManager::snapshot(Session& s) const {
    if (!snapshot_dir_) return;
    auto dir = *snapshot_dir_ / s.id;
    std::filesystem::create_directories(dir);
    char name[16];
    std::snprintf(name, sizeof name, "%04d.mdfy", s.snapshots++);
    std::ofstream(dir / name) << print_program(s.history.back().program);
}

json SessionManager::state(const Session& s) const {
    const Program& p = s.history.back().program;
    std::string text = print_program(p);
    return json{{"text", text}, {"anchors", anchor_lines(text)}, {"errors", errors_json(s.oracle.errors(p))}};
}

ApiResponse SessionManager::create(const json& body) {
    const std::string* program = string_field(body, "program");
    if (!program) return error(400, "body must contain a string field 'program'");
    const std::string* fixture = string_field(body, "fixture");
    auto s = std::make_shared<Session>();
    try {
        Program p = parse_program(*program);
        s->oracle = FixtureOracle::parse(fixture ? *fixture : std::string());
        s->oracle.bind(p);
        s->history.push_back(HistoryEntry{std::move(p), "", GuardReport{}, Environment{}});
    } catch (const ParseError& e) {
        return error(400, std::string("parse error: ") + e.what());
    }
    s->lib = stdlib_;
    {
        std::unique_lock lock(store_mu_);
        do s->id = new_token();
        while (sessions_.count(s->id));
        sessions_[s->id] = s;
    }
    std::lock_guard lock(s->mu);
    snapshot(*s);
    return ApiResponse{201, json{{"id", s->id}}};
}

ApiResponse SessionManager::program(const std::string& id) const {
    auto s = find(id);
    if (!s) return unknown_session(id);
    std::lock_guard lock(s->mu);
    return ApiResponse{200, state(*s)};
}

ApiResponse SessionManager::apply(const std::string& id, const json& body) {
    auto s = find(id);
    if (!s) return unknown_session(id);
    const std::string* text = string_field(body, "invocation");
    if (!text) return error(400, "body must contain a string field 'invocation'");

    std::lock_guard lock(s->mu);
    Script script;
    Library lib;
    try {
        script = parse_script(*text);
        if (script.steps.empty()) return error(400, "invocation contains no tactic application");
        lib = extend(s->lib, script);
    } catch (const ParseError& e) {
        return error(400, std::string("parse error: ") + e.what());
    } catch (const TacticError& e) {
        return error(400, std::string("tactic error: ") + e.what());
    }

    Engine engine(lib, s->oracle, opts_);
    const Program before = s->history.back().program;
    std::vector<HistoryEntry> added;
    Program cur = before;
    Environment env = s->history.back().env;
    GuardReport guard;
    for (std::size_t i = 0; i < script.steps.size(); ++i) {
        RunResult r = engine.run(cur, script.steps[i], env);
        if (!r.ok) {
            json out{{"ok", false}, {"failure", r.failure}, {"guard", to_json(r.guard)}};
            if (script.steps.size() > 1) out["failed_step"] = i;
            return ApiResponse{422, out};
        }
        cur = r.program;
        env = carry(r.env);
        guard = r.guard;
        added.push_back(HistoryEntry{cur, script.step_texts[i], r.guard, env});
    }
    s->lib = std::move(lib);
    for (auto& h : added) {
        s->history.push_back(std::move(h));
        snapshot(*s);
    }
    std::string after = print_program(cur);
    return ApiResponse{200, json{{"ok", true},
                                 {"program", after},
                                 {"errors", errors_json(s->oracle.errors(cur))},
                                 {"guard", to_json(guard)},
                                 {"diff", unified_diff(print_program(before), after)}}};
}

ApiResponse SessionManager::undo(const std::string& id) {
    auto s = find(id);
    if (!s) return unknown_session(id);
    std::lock_guard lock(s->mu);
    if (s->history.size() <= 1) return error(409, "nothing to undo");
    s->history.pop_back();
    snapshot(*s);
    json out = state(*s);
    out["history_length"] = s->history.size();
    return ApiResponse{200, out};
}

ApiResponse SessionManager::history(const std::string& id) const {
    auto s = find(id);
    if (!s) return unknown_session(id);
    std::lock_guard lock(s->mu);
    json out = json::array();
    for (std::size_t i = 0; i < s->history.size(); ++i) {
        const auto& h = s->history[i];
        out.push_back(json{{"index", i},
                           {"invocation", h.invocation},
                           {"program", print_program(h.program)},
                           {"guard", to_json(h.guard)}});
    }
    return ApiResponse{200, out};
}

ApiResponse SessionManager::stdlib() const {
    json out = json::array();
    for (const auto& m : manifest(stdlib_))
        out.push_back(json{{"name", m.name}, {"arity", m.arity}, {"doc", m.doc}, {"paper_ref", m.paper_ref}});
    return ApiResponse{200, out};
}

void install_routes(httplib::Server& server, SessionManager& sessions) {
    auto reply = [](httplib::Response& res, const ApiResponse& r) {
        res.status = r.status;
        res.set_content(r.body.dump(), "application/json");
    };
    auto with_body = [reply](const httplib::Request& req, httplib::Response& res, auto&& handler) {
        json body = json::parse(req.body, nullptr, false);
        if (body.is_discarded()) return reply(res, error(400, "request body is not valid JSON"));
        reply(res, handler(body));
    };

    server.Post("/sessions", [&, with_body](const httplib::Request& req, httplib::Response& res) {
        with_body(req, res, [&](const json& b) { return sessions.create(b); });
    });
    server.Get("/sessions/:id/program", [&, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, sessions.program(req.path_params.at("id")));
    });
    server.Post("/sessions/:id/apply", [&, with_body](const httplib::Request& req, httplib::Response& res) {
        with_body(req, res, [&](const json& b) { return sessions.apply(req.path_params.at("id"), b); });
    });
    server.Post("/sessions/:id/undo", [&, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, sessions.undo(req.path_params.at("id")));
    });
    server.Get("/sessions/:id/history", [&, reply](const httplib::Request& req, httplib::Response& res) {
        reply(res, sessions.history(req.path_params.at("id")));
    });
    server.Get("/stdlib", [&, reply](const httplib::Request&, httplib::Response& res) {
        reply(res, sessions.stdlib());
    });
}

} // namespace dtac
