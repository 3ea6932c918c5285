#include <doctest.h>

#include <cmath>
#include <set>

#include "lfppl/compile.hpp"
#include "lfppl/desugar.hpp"
#include "lfppl/distributions.hpp"
#include "lfppl/evaluator.hpp"
#include "lfppl/experiments.hpp"
#include "lfppl/parser.hpp"
#include "lfppl/rng.hpp"

using namespace lfppl;

namespace {

ExprPtr desugar_text(const std::string& source) {
    return desugar(parse_text(source));
}

bool contains_sugar(const ExprPtr& core) {
    bool found = false;
    walk(core, [&](const Expr& n) {
        if (n.kind == ExprKind::List) found = true;
        if (n.kind == ExprKind::PrimOp &&
            (n.name == "max" || n.name == "vector" || n.name == "nth" || n.name == "<"))
            found = true;
        if (n.kind == ExprKind::Let && (n.bindings.size() != 1 || n.bodies.size() != 1))
            found = true;
        if ((n.kind == ExprKind::Sample || n.kind == ExprKind::Observe) &&
            (n.name == "categorical" || n.name == "bernoulli"))
            found = true;
    });
    return found;
}

}  // namespace

TEST_SUITE_BEGIN("desugar");

TEST_CASE("fig1 desugars to the nested-let core form") {
    ExprPtr core = desugar_text(fig1_program_text());

    // (let [x (sample (uniform 0 1))]
    //   (let [_1 (if ...)] (if (< (- q x) 0) 1 0)))
    REQUIRE(core->kind == ExprKind::Let);
    REQUIRE(core->bindings.size() == 1);
    REQUIRE(core->bodies.size() == 1);
    const ExprPtr& inner = core->bodies[0];
    REQUIRE(inner->kind == ExprKind::Let);
    CHECK(inner->bindings[0].name == "_1");
    CHECK(inner->bindings[0].value->kind == ExprKind::If);

    // the returned comparison becomes an if over 1/0
    const ExprPtr& ret = inner->bodies[0];
    REQUIRE(ret->kind == ExprKind::If);
    CHECK(ret->then_branch->value == 1.0);
    CHECK(ret->else_branch->value == 0.0);
    ExprPtr expected_pred =
        make_primop("-", {make_var("q"), make_var("x")});
    CHECK(structural_equal(ret->pred, expected_pred));

    // observe-if predicate matches too
    CHECK(structural_equal(inner->bindings[0].value->pred, expected_pred));
    CHECK(!contains_sugar(core));
}

TEST_CASE("max rule") {
    ExprPtr got = desugar_text("(max x (- x))");
    ExprPtr neg_x = make_primop("-", {make_var("x")});
    ExprPtr expected = make_if(make_primop("-", {make_var("x"), neg_x}), neg_x, make_var("x"));
    CHECK(structural_equal(got, expected));
}

TEST_CASE("vector and nth inline") {
    ExprPtr got = desugar_text("(let [v (vector 7 8 9)] (nth v 1))");
    CHECK(got->kind == ExprKind::Const);
    CHECK(got->value == 8.0);

    got = desugar_text("(let [v [7 8]] (+ (nth v 0) (nth v 1)))");
    REQUIRE(got->kind == ExprKind::PrimOp);
    CHECK(got->args[0]->value == 7.0);
    CHECK(got->args[1]->value == 8.0);

    CHECK_THROWS_AS(desugar_text("(let [v [1 2] i 0] (nth v i))"), parse_error);
    CHECK_THROWS_AS(desugar_text("(let [v [1 2]] (nth v 5))"), parse_error);
    CHECK_THROWS_AS(desugar_text("(let [v [1 2]] (+ v 1))"), parse_error);
}

TEST_CASE("categorical desugars to a uniform draw and nested ifs") {
    ExprPtr got = desugar_text("(sample (categorical [0.5 0.5]))");
    REQUIRE(got->kind == ExprKind::Let);
    CHECK(got->bindings[0].value->kind == ExprKind::Sample);
    CHECK(got->bindings[0].value->name == "uniform");
    const ExprPtr& body = got->bodies[0];
    REQUIRE(body->kind == ExprKind::If);
    CHECK(body->then_branch->value == 1.0);
    CHECK(body->else_branch->value == 2.0);

    // three categories nest one more if
    ExprPtr three = desugar_text("(sample (categorical [0.2 0.3 0.5]))");
    CHECK(three->bodies[0]->else_branch->kind == ExprKind::If);
}

TEST_CASE("categorical weight validation") {
    CHECK_THROWS_WITH_AS(desugar_text("(sample (categorical [0.5 0.6]))"),
                         doctest::Contains("sum to 1"), parse_error);
    CHECK_THROWS_AS(desugar_text("(sample (categorical [0.5 x]))"), parse_error);
}

TEST_CASE("categorical frequencies match their weights") {
    // oracle: run the desugared draw forward many times
    Quadruple q = compile_text("(sample (categorical [0.5 0.5]))", "cat");
    REQUIRE(q.sample_sites.size() == 1);
    REQUIRE(q.factor_triples.size() == 1);

    RandomStream rng(2024);
    const int trials = 100000;
    int ones = 0;
    for (int i = 0; i < trials; ++i) {
        double u = forward_sample("uniform", {0.0, 1.0}, rng);
        double category =
            eval_sym(q.factor_triples[0].v, {{q.sample_sites[0].var, u}});
        if (category == 1.0) ++ones;
        else CHECK(category == 2.0);
    }
    double freq = static_cast<double>(ones) / trials;
    double three_se = 3.0 * std::sqrt(0.25 / trials);
    CHECK(std::abs(freq - 0.5) < three_se);
}

TEST_CASE("bernoulli sample and observe") {
    ExprPtr s = desugar_text("(sample (bernoulli 0.3))");
    REQUIRE(s->kind == ExprKind::Let);
    CHECK(s->bodies[0]->then_branch->value == 0.0);
    CHECK(s->bodies[0]->else_branch->value == 1.0);

    ExprPtr o = desugar_text("(observe (bernoulli 0.3) 1)");
    REQUIRE(o->kind == ExprKind::Observe);
    CHECK(o->name == "factor");

    CHECK_THROWS_AS(desugar_text("(observe (bernoulli 0.3) 2)"), parse_error);
}

TEST_CASE("multi-binding and multi-body lets unravel") {
    ExprPtr got = desugar_text("(let [a 1 b 2] (+ a b) (* a b))");
    REQUIRE(got->kind == ExprKind::Let);
    REQUIRE(got->bindings.size() == 1);
    CHECK(got->bindings[0].name == "a");
    const ExprPtr& second = got->bodies[0];
    REQUIRE(second->kind == ExprKind::Let);
    CHECK(second->bindings[0].name == "b");
    const ExprPtr& stmt = second->bodies[0];
    REQUIRE(stmt->kind == ExprKind::Let);
    CHECK(stmt->bindings[0].name == "_1");
}

TEST_CASE("no sugar remains in any fixture") {
    for (const std::string& source :
         {fig1_program_text(), gmm_program_text(), heavytail_program_text(4),
          twolevel_program_text()}) {
        CHECK(!contains_sugar(desugar_text(source)));
    }
}

TEST_CASE("fresh binders avoid user identifiers") {
    // user already owns "_1" and "u1"; generated names must not collide
    ExprPtr surface = parse_text(
        "(let [_1 1 u1 2] (+ (sample (categorical [0.5 0.5])) _1) u1)");
    std::set<std::string> before = all_identifiers(surface);
    ExprPtr core = desugar(surface);
    std::set<std::string> after = all_identifiers(core);
    std::set<std::string> fresh;
    for (const auto& name : after)
        if (!before.count(name)) fresh.insert(name);
    for (const auto& name : fresh) CHECK(before.count(name) == 0);
    CHECK(!fresh.empty());
}

TEST_CASE("observed value must be constant") {
    // a let-bound name is not a program constant; translation rejects it
    CHECK_THROWS_AS(compile_text("(let [x 1] (observe (normal 0 1) x))", "t"), compile_error);
    // an expression in observed position fails outright
    CHECK_THROWS_AS(desugar_text("(observe (normal 0 1) (+ 1 2))"), parse_error);
    // via nth it resolves to a constant first
    CHECK_NOTHROW(desugar_text("(let [y [1 2]] (observe (normal 0 1) (nth y 0)))"));
}

TEST_CASE("max over random choices is rejected") {
    CHECK_THROWS_AS(desugar_text("(max (sample (normal 0 1)) 0)"), parse_error);
}

TEST_SUITE_END();
