#include <gtest/gtest.h>

#include "dtac/corpus.hpp"
#include "dtac/oracle.hpp"
#include "dtac/parser.hpp"
#include "dtac/printer.hpp"
#include "dtac/stdlib.hpp"

using namespace dtac;

namespace {

std::string corpus(const std::string& c, const std::string& f) {
    return read_file(std::string(DTAC_CORPUS_DIR) + "/" + c + "/" + f);
}

FixtureOracle bound(const std::string& fixture, const Program& p) {
    FixtureOracle o = FixtureOracle::parse(fixture);
    o.bind(p);
    return o;
}

std::size_t count_kind(const std::vector<ErrorReport>& es, const std::string& kind) {
    std::size_t n = 0;
    for (const auto& e : es) n += e.kind == kind;
    return n;
}

const char* kNull = "target object may be null";

} // namespace

TEST(Oracle, SaferFixtureReportsSixteenErrors) {
    Program p = parse_program(corpus("safer_null", "program.mdfy"));
    auto errs = bound(corpus("safer_null", "fixture.errs"), p).errors(p);
    EXPECT_EQ(errs.size(), 16u);
    EXPECT_EQ(count_kind(errs, kNull), 15u);
    for (std::size_t i = 1; i < errs.size(); ++i)
        EXPECT_TRUE(std::make_pair(errs[i - 1].line, errs[i - 1].col) <= std::make_pair(errs[i].line, errs[i].col));
}

TEST(Oracle, EmptyFixtureHasNoErrors) {
    Program p = parse_program(corpus("safer_null", "program.mdfy"));
    FixtureOracle o = bound("", p);
    EXPECT_TRUE(o.entries().empty());
    EXPECT_TRUE(o.errors(p).empty());
    EXPECT_TRUE(bound("# only a comment\n\n", p).errors(p).empty());
}

TEST(Oracle, NullEntryOnBFCallBindsTarget) {
    Program p = parse_program(corpus("safer_null", "program.mdfy"));
    FixtureOracle o =
        bound("kind=\"target object may be null\"; at=\"method:selected_thrusters 1\"; property=\"comb\";\n", p);
    auto errs = o.errors(p);
    ASSERT_EQ(errs.size(), 1u);
    Environment env = error_env(errs[0]);
    EXPECT_EQ(env.var("?error")->text, kNull);
    EXPECT_EQ(print_expr(*env.var("?err_arg")), "comb");
    ASSERT_NE(env.position("@err_pos"), nullptr);
    EXPECT_EQ(env.position("@err_pos")->method, "selected_thrusters");
    EXPECT_EQ(env.position("@err_pos")->index, 1);
    EXPECT_EQ(env.vars.size(), 2u);
    EXPECT_EQ(env.positions.size(), 1u);

    // The reported line is the line of the BF call.
    std::string text = print_program(p);
    auto at = text.find("var bf_main, bf_opt := BF(");
    int line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(at), '\n'));
    EXPECT_EQ(errs[0].line, line);
    EXPECT_GT(errs[0].col, 0);
}

TEST(Oracle, SerializeRoundTrip) {
    FixtureOracle o = FixtureOracle::parse(corpus("safer_null", "fixture.errs"));
    FixtureOracle again = FixtureOracle::parse(o.serialize());
    ASSERT_EQ(again.entries().size(), o.entries().size());
    for (std::size_t i = 0; i < o.entries().size(); ++i) {
        const auto& a = o.entries()[i];
        const auto& b = again.entries()[i];
        EXPECT_EQ(a.kind, b.kind);
        EXPECT_EQ(a.selector, b.selector);
        EXPECT_TRUE(same(a.property, b.property));
        EXPECT_EQ(a.discharge.size(), b.discharge.size());
        EXPECT_EQ(a.active.size(), b.active.size());
    }
    EXPECT_EQ(again.serialize(), o.serialize());
}

TEST(Oracle, MalformedFixtureRejected) {
    EXPECT_THROW(FixtureOracle::parse("kind=\"x\"; at=\"method:M 1\";\n"), ParseError);
    EXPECT_THROW(FixtureOracle::parse("kind=\"x\"; at=\"method:M 1\"; property=\"a +\";\n"), ParseError);
    EXPECT_THROW(FixtureOracle::parse("kind=\"x\"; at=\"method:M 1\"; property=\"a\"; discharge=\"maybe a\";\n"),
                 ParseError);
}

TEST(Oracle, DischargeAndActiveConditions) {
    Program p = parse_program(R"(method Callee(c: int) returns (r: int)
{
  r := c;
}

method Caller(c: int) returns (r: int)
{
  var x: int := c;
  /*@here*/
  r := Callee(x);
}
)");
    FixtureOracle o = bound(
        "kind=\"A precondition for this call might not hold\"; at=\"@here\"; property=\"x > 0\"; "
        "active=\"requires Callee c > 0\"; discharge=\"asserted x > 0\";\n"
        "kind=\"A postcondition might not hold on this return path\"; at=\"method:Caller end\"; property=\"r > 0\"; "
        "discharge=\"ensures Callee r > 0\";\n",
        p);
    EXPECT_EQ(o.errors(p).size(), 1u);  // precondition entry inactive

    Program with_pre = p;
    find_decl(with_pre, "Callee")->kids[2].kids.push_back(Node(Kind::Requires, "", {parse_expression("c > 0")}));
    auto errs = o.errors(with_pre);
    ASSERT_EQ(errs.size(), 2u);

    Program asserted = with_pre;
    auto& body = find_decl(asserted, "Caller")->kids[3].kids;
    body.insert(body.begin() + 1, make_assert(parse_expression("x > 0 && x < 100")));
    EXPECT_EQ(o.errors(asserted).size(), 1u);

    Program post = asserted;
    find_decl(post, "Callee")->kids[2].kids.push_back(Node(Kind::Ensures, "", {parse_expression("r > 0")}));
    EXPECT_TRUE(o.errors(post).empty());
}

TEST(Oracle, SelectorsFollowTheirStatement) {
    Program p = parse_program("method M(x: int) { var a: int := x; var b: int := a; }");
    FixtureOracle o = bound("kind=\"k\"; at=\"method:M 2\"; property=\"b\";\n", p);
    auto before = o.errors(p);
    ASSERT_EQ(before.size(), 1u);
    EXPECT_EQ(before[0].pos.index, 2);
    Program moved = p;
    auto& body = moved.kids[0].kids[3].kids;
    body.insert(body.begin(), make_assert(parse_expression("x > 0")));
    auto after = o.errors(moved);
    ASSERT_EQ(after.size(), 1u);
    EXPECT_EQ(after[0].pos.index, 3);
    EXPECT_EQ(after[0].line, before[0].line + 1);
}

TEST(Oracle, NullStrategyDischargesFiveErrors) {
    CorpusCase c = load_case(std::string(DTAC_CORPUS_DIR) + "/safer_null");
    Program p = parse_program(c.program_text);
    FixtureOracle o = bound(c.fixture_text, p);
    Replay r = replay_case(c, load_stdlib());
    ASSERT_TRUE(r.ok) << r.failure;
    auto before = o.errors(p);
    auto after = o.errors(r.final);
    EXPECT_EQ(before.size() - after.size(), 5u);
    EXPECT_EQ(count_kind(before, kNull) - count_kind(after, kNull), 5u);
}

TEST(ExternalTool, ParsesVerifierOutput) {
    Program p = parse_program("method M(x: int) {\n  var a: int := x;\n  var b: int := a;\n}\n");
    std::string out =
        "Dafny program verifier version 4\n"
        "tmp.dfy(4,3): Error: assertion might not hold\n"
        "tmp.dfy(3,17): Error: target object may be null\n"
        "Dafny program verifier finished with 0 verified, 2 errors\n";
    auto errs = ExternalToolOracle::parse_output(out, p);
    ASSERT_EQ(errs.size(), 2u);
    EXPECT_EQ(errs[0].kind, "assertion might not hold");
    EXPECT_EQ(errs[0].line, 4);
    EXPECT_EQ(errs[0].col, 3);
    EXPECT_EQ(errs[0].pos.method, "M");
    EXPECT_EQ(errs[0].pos.index, 2);
    EXPECT_EQ(errs[1].pos.index, 1);
}

TEST(ExternalTool, RunsCommandOnPrintedProgram) {
    Program p = parse_program("method M(x: int) {\n  var a: int := x;\n}\n");
    ExternalToolOracle tool("sh -c 'grep -q \"var a\" \"$0\" && echo \"f.dfy(3,3): Error: assertion might not hold\"'");
    auto errs = tool.errors(p);
    ASSERT_EQ(errs.size(), 1u);
    EXPECT_EQ(errs[0].kind, "assertion might not hold");
}
