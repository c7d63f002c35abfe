#include <gtest/gtest.h>

#include "dtac/corpus.hpp"
#include "dtac/kernel.hpp"
#include "dtac/parser.hpp"
#include "dtac/printer.hpp"
#include "gen.hpp"

using namespace dtac;

namespace {

Program safer() { return parse_program(read_file(std::string(DTAC_CORPUS_DIR) + "/safer_null/program.mdfy")); }

Node rule_literal(const std::string& text) {
    return parse_tactic_invocation("assert-rewr(" + text + ")").args.at(0);
}

std::size_t count_asserts(const Program& p) {
    std::size_t n = 0;
    walk(p, [&](const Node& x) { n += x.is(Kind::Assert); });
    return n;
}

} // namespace

TEST(Match, MethodPatternBindsNameAndPostcondition) {
    Program p = safer();
    auto ms = pmatch({}, p, parse_pattern("method ?m(..) ... ensures ?P ..."));
    bool found = false;
    for (const auto& m : ms) {
        const Node* name = m.env.var("?m");
        ASSERT_NE(name, nullptr);
        if (name->text != "control") continue;
        found = true;
        EXPECT_EQ(print_expr(*m.env.var("?P")), "|thrusters| <= 4");
        EXPECT_EQ(m.site.kind, Site::Kind::Decl);
        EXPECT_NE(m.env.position("@m"), nullptr);
    }
    EXPECT_TRUE(found);
}

TEST(Match, ClosedPatternMatchesOnce) {
    Program p = parse_program("method M(x: int) { assert x > 0; var y: int := x; }");
    auto ms = pmatch({}, p, parse_pattern("assert x > 0;"));
    ASSERT_EQ(ms.size(), 1u);
    EXPECT_EQ(ms[0].site.pos.method, "M");
    EXPECT_EQ(ms[0].site.pos.index, 0);
    EXPECT_EQ(ms[0].site.pos.length, 1);
    EXPECT_EQ(ms[0].env.var("?x"), nullptr);
    EXPECT_NE(ms[0].env.position("@m"), nullptr);
}

TEST(Match, BoundVariablesConstrain) {
    Program p = parse_program("method M(x: int) { assert x > 0; assert x > 1; }");
    Environment base;
    base.vars["?P"] = parse_expression("x > 1");
    auto ms = pmatch(base, p, parse_pattern("assert ?P;"));
    ASSERT_EQ(ms.size(), 1u);
    EXPECT_EQ(ms[0].site.pos.index, 1);
}

TEST(Match, AssertCountEqualsScan) {
    testgen::Gen gen(3);
    for (int i = 0; i < 100; ++i) {
        Program p = parse_program(gen.program().text);
        EXPECT_EQ(pmatch({}, p, parse_pattern("assert ?P;")).size(), count_asserts(p));
    }
}

TEST(Match, ExistentialPatternAgainstNode) {
    auto envs = match_node({}, parse_pattern("exists ?y :: ?P'"), parse_expression("exists xs :: length(xs) == n"));
    ASSERT_EQ(envs.size(), 1u);
    EXPECT_EQ(print_expr(*envs[0].var("?y")), "xs");
    EXPECT_EQ(print_expr(*envs[0].var("?P'")), "length(xs) == n");
    EXPECT_TRUE(match_node({}, parse_pattern("exists ?y :: ?P'"), parse_expression("n > 0")).empty());
}

TEST(Apply, AssertEliminationLeavesMarker) {
    Program p = parse_program("method M(x: int) { var y: int := x; assert y == x; }");
    auto ms = pmatch({}, p, parse_pattern("assert ?P;"));
    ASSERT_EQ(ms.size(), 1u);
    Applied a = apply_rule(p, ms[0], parse_pattern("/*@ass*/"));
    const Node& body = a.program.kids[0].kids[3];
    ASSERT_EQ(body.size(), 2u);
    EXPECT_TRUE(body.kids[1].is(Kind::Marker));
    EXPECT_EQ(body.kids[1].text, "ass");
}

TEST(Apply, IdentityRuleKeepsProgram) {
    testgen::Gen gen(5);
    for (int i = 0; i < 50; ++i) {
        Program p = parse_program(gen.program().text);
        Node lhs = parse_pattern("assert ?P;");
        auto ms = pmatch({}, p, lhs);
        std::size_t applied = 0;
        for (const auto& m : ms) {
            Applied a = apply_rule(p, m, lhs);
            EXPECT_TRUE(same(a.program, p));
            ++applied;
        }
        EXPECT_EQ(applied, ms.size());
    }
}

TEST(Rewrite, PairwiseSubstitution) {
    Node from(Kind::Fragment, "", {parse_expression("x + 1"), parse_expression("y")});
    Node to(Kind::Fragment, "", {parse_expression("a"), parse_expression("b")});
    EXPECT_EQ(print_expr(rewrite_pairs(from, to, parse_expression("x + 1 < y"))), "a < b");
}

TEST(Rewrite, SimultaneousNotSequential) {
    Node from(Kind::Fragment, "", {parse_expression("x"), parse_expression("y")});
    Node to(Kind::Fragment, "", {parse_expression("y"), parse_expression("x")});
    EXPECT_EQ(print_expr(rewrite_pairs(from, to, parse_expression("x < y"))), "y < x");
}

TEST(Rewrite, IdentityAndBinderCapture) {
    Node e = parse_expression("exists y :: y > x && x > 0");
    EXPECT_TRUE(same(rewrite_pairs(parse_expression("x"), parse_expression("x"), e), e));
    // A quantifier rebinding the variable is left alone.
    Node q = parse_expression("(exists y :: y > 0) && y > 1");
    EXPECT_EQ(print_expr(rewrite_pairs(parse_expression("y"), parse_expression("z"), q)),
              "(exists y :: y > 0) && z > 1");
}

TEST(Rewrite, RuleLiteralOnceAndToFixpoint) {
    Node rule = rule_literal("`|?x + ?y| <= ?n` =>> `|?x| <= ?n / 2 && |?y| <= ?n / 2`");
    Node out = rewrite_rule(rule, parse_expression("|bf_main + lrud_main| <= 4"), true);
    EXPECT_EQ(print_expr(out), "|bf_main| <= 4 / 2 && |lrud_main| <= 4 / 2");

    Node flip = rule_literal("`?a + ?b` =>> `?b + ?a`");
    EXPECT_THROW(rewrite_rule(flip, parse_expression("p + q"), false, 50), EvalError);
    EXPECT_EQ(print_expr(rewrite_rule(flip, parse_expression("p + q"), true)), "q + p");
}

TEST(Instantiate, SubstitutesAndRejectsUnbound) {
    Environment env;
    env.vars["?P"] = parse_expression("x > 0");
    Node out = instantiate(parse_pattern("assert ?P;"), env);
    EXPECT_EQ(print_node(out), print_node(parse_pattern("assert x > 0;")));
    EXPECT_THROW(instantiate(parse_pattern("assert ?Q;"), env), EvalError);
}

TEST(Instantiate, RewriteCallEvaluated) {
    Environment env;
    env.vars["?y"] = parse_expression("xs");
    env.vars["?x"] = parse_expression("ys");
    env.vars["?P"] = parse_expression("length(xs) == n");
    Node out = instantiate(parse_expression("rewrite(?y, ?x, ?P)", ParseMode::Pattern), env);
    EXPECT_EQ(print_expr(out), "length(ys) == n");
}

TEST(Environment, FlushKeepsReservedOnly) {
    Environment e;
    e.vars["?x"] = parse_expression("1");
    e.vars["?error"] = make_str("target object may be null");
    e.vars["?meth"] = make_var("M");
    e.positions["@pos"] = AbsolutePosition{"M", {}, 0, 0, Edge::At, false};
    e.positions["@tmp"] = AbsolutePosition{"M", {}, 1, 0, Edge::At, false};
    e.captures.push_back(make_int(3));
    Environment f = flush(e);
    EXPECT_EQ(f.var("?x"), nullptr);
    ASSERT_NE(f.var("?error"), nullptr);
    EXPECT_EQ(f.var("?error")->text, "target object may be null");
    EXPECT_NE(f.var("?meth"), nullptr);
    EXPECT_NE(f.position("@pos"), nullptr);
    EXPECT_EQ(f.position("@tmp"), nullptr);
    EXPECT_TRUE(f.captures.empty());
    EXPECT_TRUE(flush(Environment{}).vars.empty());
}

TEST(Environment, FlushIdempotent) {
    std::mt19937 rng(1);
    const std::vector<std::string> names = {"?a", "?b", "?error", "?err_arg", "?pre", "?post", "?meth", "?arg", "?P"};
    for (int i = 0; i < 200; ++i) {
        Environment e;
        for (const auto& n : names)
            if (rng() % 2) e.vars[n] = make_int(static_cast<long long>(rng() % 10));
        Environment once = flush(e);
        Environment twice = flush(once);
        ASSERT_EQ(once.vars.size(), twice.vars.size());
        for (const auto& [k, v] : once.vars) EXPECT_TRUE(same(v, *twice.var(k)));
    }
}

TEST(Reassociate, RightNestsConjunctions) {
    Node e = reassociate(parse_expression("(a && b) && (c && d)"));
    ASSERT_EQ(conjuncts(e).size(), 4u);
    EXPECT_TRUE(same(e, parse_expression("a && b && c && d")));
}
