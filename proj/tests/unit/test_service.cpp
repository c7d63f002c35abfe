#include <filesystem>
#include <thread>

#include <unistd.h>

#include <gtest/gtest.h>
#include <httplib.h>

#include "dtac/corpus.hpp"
#include "dtac/parser.hpp"
#include "dtac/printer.hpp"
#include "dtac/service.hpp"
#include "dtac/stdlib.hpp"

using namespace dtac;
using nlohmann::json;

namespace {

std::string corpus(const std::string& c, const std::string& f) {
    return read_file(std::string(DTAC_CORPUS_DIR) + "/" + c + "/" + f);
}

json safer_body() {
    return json{{"program", corpus("safer_null", "program.mdfy")}, {"fixture", corpus("safer_null", "fixture.errs")}};
}

std::string make_session(SessionManager& m) {
    ApiResponse r = m.create(safer_body());
    EXPECT_EQ(r.status, 201);
    return r.body.at("id").get<std::string>();
}

} // namespace

TEST(Service, CreateAndReadProgram) {
    SessionManager m(load_stdlib());
    std::string id = make_session(m);
    ApiResponse p = m.program(id);
    ASSERT_EQ(p.status, 200);
    EXPECT_FALSE(p.body["text"].get<std::string>().empty());
    EXPECT_EQ(p.body["errors"].size(), 16u);
    for (const auto& e : p.body["errors"]) {
        EXPECT_TRUE(e.contains("kind") && e.contains("property") && e.contains("line") && e.contains("col"));
        EXPECT_GT(e["line"].get<int>(), 0);
    }
    EXPECT_TRUE(p.body["anchors"].is_object());
}

TEST(Service, BadRequestsRejected) {
    SessionManager m(load_stdlib());
    EXPECT_EQ(m.create(json{{"fixture", ""}}).status, 400);
    EXPECT_EQ(m.create(json{{"program", "method ("}}).status, 400);
    std::string id = make_session(m);
    EXPECT_EQ(m.apply(id, json::object()).status, 400);
    EXPECT_EQ(m.apply(id, json{{"invocation", "assert-I(x == )"}}).status, 400);
    ApiResponse missing = m.program("nope");
    EXPECT_EQ(missing.status, 404);
    EXPECT_EQ(missing.body["error"], "unknown session 'nope'");
    EXPECT_EQ(m.apply("nope", json{{"invocation", "assert-E()"}}).status, 404);
    EXPECT_EQ(m.undo("nope").status, 404);
    EXPECT_EQ(m.history("nope").status, 404);
}

TEST(Service, ApplyReportsProgramGuardAndDiff) {
    SessionManager m(load_stdlib());
    std::string id = make_session(m);
    ApiResponse r = m.apply(id, json{{"invocation", "null-to-assert()[?meth := selected_thrusters]"}});
    ASSERT_EQ(r.status, 200) << r.body.dump();
    EXPECT_TRUE(r.body["ok"].get<bool>());
    EXPECT_TRUE(r.body["guard"]["ok"].get<bool>());
    EXPECT_NE(r.body["program"].get<std::string>().find("assert comb != null;"), std::string::npos);
    EXPECT_NE(r.body["diff"].get<std::string>().find("+"), std::string::npos);
    EXPECT_TRUE(r.body["errors"].is_array());
}

TEST(Service, FailedApplyLeavesStateAlone) {
    SessionManager m(load_stdlib());
    std::string id = make_session(m);
    std::string before = m.program(id).body["text"];
    ApiResponse r = m.apply(id, json{{"invocation", "no-such-tactic()"}});
    EXPECT_EQ(r.status, 422);
    EXPECT_FALSE(r.body["ok"].get<bool>());
    EXPECT_NE(r.body["failure"].get<std::string>().find("undefined tactic"), std::string::npos);
    EXPECT_EQ(m.program(id).body["text"], before);
    EXPECT_EQ(m.history(id).body.size(), 1u);
}

TEST(Service, UndoRestoresByteIdenticalProgram) {
    SessionManager m(load_stdlib());
    std::string id = make_session(m);
    EXPECT_EQ(m.undo(id).status, 409);
    std::string before = m.program(id).body["text"];
    ASSERT_EQ(m.apply(id, json{{"invocation", "null-to-assert()[?meth := selected_thrusters]"}}).status, 200);
    EXPECT_NE(m.program(id).body["text"], before);
    ApiResponse u = m.undo(id);
    ASSERT_EQ(u.status, 200);
    EXPECT_EQ(m.program(id).body["text"], before);
}

TEST(Service, HistoryHasOneEntryPerStepPlusInitial) {
    SessionManager m(load_stdlib());
    std::string id = make_session(m);
    std::vector<std::string> steps = {"null-to-assert()[?meth := selected_thrusters]", "assert-to-pre()",
                                      "pre-to-assert()", "assert-to-post()"};
    for (const auto& s : steps) ASSERT_EQ(m.apply(id, json{{"invocation", s}}).status, 200) << s;
    json h = m.history(id).body;
    ASSERT_EQ(h.size(), steps.size() + 1);
    EXPECT_EQ(h[0]["invocation"], "");
    for (std::size_t i = 0; i < steps.size(); ++i) {
        EXPECT_EQ(h[i + 1]["index"], i + 1);
        EXPECT_EQ(h[i + 1]["invocation"], steps[i]);
    }
    std::string expected = print_program(parse_program(corpus("safer_null", "expected.mdfy")));
    EXPECT_EQ(m.program(id).body["text"], expected);
    EXPECT_EQ(m.program(id).body["errors"].size(), 11u);
}

TEST(Service, ScriptDefinitionsJoinTheSession) {
    SessionManager m(load_stdlib());
    std::string id = make_session(m);
    ApiResponse r = m.apply(id, json{{"invocation", "first() := null-to-assert()[?meth := selected_thrusters]\n;\nfirst()"}});
    ASSERT_EQ(r.status, 200) << r.body.dump();
    EXPECT_EQ(m.apply(id, json{{"invocation", "first()"}}).status, 200);
}

TEST(Service, StdlibListing) {
    SessionManager m(load_stdlib());
    json s = m.stdlib().body;
    ASSERT_EQ(s.size(), 27u);
    for (const auto& d : s) {
        EXPECT_TRUE(d.contains("name") && d.contains("arity") && d.contains("doc") && d.contains("paper_ref"));
        EXPECT_FALSE(d["paper_ref"].get<std::string>().empty());
    }
}

TEST(Service, SnapshotsWritten) {
    auto dir = std::filesystem::temp_directory_path() / ("dtac_snap_" + std::to_string(::getpid()));
    std::filesystem::remove_all(dir);
    {
        SessionManager m(load_stdlib(), dir);
        std::string id = make_session(m);
        ASSERT_EQ(m.apply(id, json{{"invocation", "null-to-assert()[?meth := selected_thrusters]"}}).status, 200);
        ASSERT_EQ(m.undo(id).status, 200);
        EXPECT_TRUE(std::filesystem::exists(dir / id / "0000.mdfy"));
        EXPECT_TRUE(std::filesystem::exists(dir / id / "0001.mdfy"));
        EXPECT_TRUE(std::filesystem::exists(dir / id / "0002.mdfy"));
        EXPECT_EQ(read_file(dir / id / "0000.mdfy"), read_file(dir / id / "0002.mdfy"));
    }
    std::filesystem::remove_all(dir);
}

TEST(Service, ConcurrentSessionsIndependent) {
    SessionManager m(load_stdlib());
    std::vector<std::string> ids;
    for (int i = 0; i < 4; ++i) ids.push_back(make_session(m));
    std::vector<std::thread> threads;
    std::vector<int> status(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i)
        threads.emplace_back([&, i] {
            status[i] = m.apply(ids[i], json{{"invocation", "null-to-assert()[?meth := selected_thrusters]"}}).status;
        });
    for (auto& t : threads) t.join();
    for (std::size_t i = 0; i < ids.size(); ++i) {
        EXPECT_EQ(status[i], 200);
        EXPECT_EQ(m.history(ids[i]).body.size(), 2u);
    }
}

TEST(Http, RoutesServeJson) {
    SessionManager m(load_stdlib());
    httplib::Server server;
    install_routes(server, m);
    int port = server.bind_to_any_port("127.0.0.1");
    ASSERT_GT(port, 0);
    std::thread t([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    httplib::Client cli("127.0.0.1", port);
    auto created = cli.Post("/sessions", safer_body().dump(), "application/json");
    ASSERT_TRUE(created);
    EXPECT_EQ(created->status, 201);
    std::string id = json::parse(created->body)["id"];

    auto prog = cli.Get("/sessions/" + id + "/program");
    ASSERT_TRUE(prog);
    EXPECT_EQ(prog->status, 200);
    EXPECT_EQ(json::parse(prog->body)["errors"].size(), 16u);

    auto applied = cli.Post("/sessions/" + id + "/apply",
                            json{{"invocation", "null-to-assert()[?meth := selected_thrusters]"}}.dump(),
                            "application/json");
    ASSERT_TRUE(applied);
    EXPECT_EQ(applied->status, 200);
    EXPECT_TRUE(json::parse(applied->body)["ok"].get<bool>());

    auto hist = cli.Get("/sessions/" + id + "/history");
    ASSERT_TRUE(hist);
    EXPECT_EQ(json::parse(hist->body).size(), 2u);

    auto undone = cli.Post("/sessions/" + id + "/undo", "", "application/json");
    ASSERT_TRUE(undone);
    EXPECT_EQ(undone->status, 200);

    auto lib = cli.Get("/stdlib");
    ASSERT_TRUE(lib);
    EXPECT_EQ(json::parse(lib->body).size(), 27u);

    auto bad = cli.Post("/sessions", "{not json", "application/json");
    ASSERT_TRUE(bad);
    EXPECT_EQ(bad->status, 400);
    auto missing = cli.Get("/sessions/zzz/program");
    ASSERT_TRUE(missing);
    EXPECT_EQ(missing->status, 404);

    server.stop();
    t.join();
}
