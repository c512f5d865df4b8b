#include <cmath>
#include <complex>
#include <vector>

#include "blowlab/expr.hpp"
#include "blowlab/rng.hpp"
#include "doctest.h"

using namespace blowlab;
using expr::PerturbationExpr;
using expr::Point;
using cplx = std::complex<double>;

static cplx eval_at(const PerturbationExpr& e, double t, double r, cplx u, cplx v = {},
                    cplx w = {}) {
    Point p;
    p.t = t;
    p.r = r;
    p.u = u;
    p.v = v;
    p.w = w;
    return e.evaluate(p);
}

TEST_CASE("single variable parses to a variable node") {
    auto e = PerturbationExpr::parse("u");
    CHECK(e.root()->kind == expr::Node::Kind::variable);
    CHECK(e.root()->var == expr::VarId::u);
}

TEST_CASE("paper random example parses and evaluates") {
    auto e = PerturbationExpr::parse("t^5*exp(i*t + r^2)*u*v + u^6");
    // at t=1, r=0, u=1, v=1: e^{i} + 1
    cplx val = eval_at(e, 1.0, 0.0, {1, 0}, {1, 0});
    CHECK(std::abs(val - (std::exp(cplx(0, 1)) + 1.0)) < 1e-14);
}

TEST_CASE("syntax errors carry a position") {
    CHECK_THROWS_AS(PerturbationExpr::parse("u*("), ParseError);
    CHECK_THROWS_AS(PerturbationExpr::parse("q + 1"), ParseError);
    CHECK_THROWS_AS(PerturbationExpr::parse("exp u"), ParseError);
    CHECK_THROWS_AS(PerturbationExpr::parse("u^v"), ParseError);  // non-constant exponent
    try {
        PerturbationExpr::parse("u*(");
        FAIL("expected throw");
    } catch (const ParseError& e) {
        CHECK(e.position == 3);
    }
}

TEST_CASE("evaluate: direct arithmetic") {
    CHECK(std::abs(eval_at(PerturbationExpr::parse("u^2"), 0, 0, {1, 1}) - cplx(0, 2)) < 1e-15);
    CHECK(std::abs(eval_at(PerturbationExpr::parse("u*abs(u)^5"), 0, 0, {2, 0}) - cplx(64, 0)) <
          1e-12);
    auto e = PerturbationExpr::parse("t^5*exp(i*t+r^2)*u*v");
    cplx val = eval_at(e, 1.0, 0.0, {1, 0}, {1, 0});
    CHECK(val.real() == doctest::Approx(0.5403023058681398).epsilon(1e-12));
    CHECK(val.imag() == doctest::Approx(0.8414709848078965).epsilon(1e-12));
}

TEST_CASE("singular operations raise eval errors") {
    CHECK_THROWS_AS(eval_at(PerturbationExpr::parse("u/v"), 0, 0, {1, 0}, {0, 0}), EvalError);
    CHECK_THROWS_AS(eval_at(PerturbationExpr::parse("u^(-2)"), 0, 0, {0, 0}), EvalError);
}

TEST_CASE("evaluation is pure and bitwise deterministic") {
    auto e = PerturbationExpr::parse("exp(sin(u)*t) / (1 + r^2) - conj(u)*im(v)");
    Point p;
    p.t = 0.73;
    p.r = 0.21;
    p.u = {0.4, -1.2};
    p.v = {2.0, 0.7};
    cplx a = e.evaluate(p);
    cplx b = e.evaluate(p);
    CHECK(a.real() == b.real());
    CHECK(a.imag() == b.imag());
}

// Random AST generator for the parse-print round trip. Operator nodes always
// keep at least one non-constant operand so parse-time constant folding
// cannot restructure the tree.
namespace {

expr::NodePtr gen_ast(Rng& rng, int depth, bool& has_var) {
    using expr::Node;
    using K = Node::Kind;
    double pick = rng.uniform();
    if (depth <= 0 || pick < 0.25) {
        if (rng.uniform() < 0.55) {
            has_var = true;
            int which = static_cast<int>(rng.uniform() * 5.0);
            return Node::variable(static_cast<expr::VarId>(std::min(which, 4)));
        }
        double re = std::round(rng.uniform(-4.0, 4.0) * 8.0) / 8.0;
        double im = rng.uniform() < 0.5 ? 0.0 : std::round(rng.uniform(-4.0, 4.0) * 8.0) / 8.0;
        return Node::constant({re, im});
    }
    int op = static_cast<int>(rng.uniform() * 7.0);
    bool var_a = false, var_b = false;
    switch (op) {
        case 0:
        case 1:
        case 2:
        case 3: {
            K k = (op == 0) ? K::add : (op == 1) ? K::sub : (op == 2) ? K::mul : K::div;
            auto a = gen_ast(rng, depth - 1, var_a);
            auto b = gen_ast(rng, depth - 1, var_b);
            if (!var_a && !var_b) {
                var_b = true;
                b = Node::variable(expr::VarId::u);
            }
            has_var = true;
            return Node::binary(k, a, b);
        }
        case 4: {
            auto a = gen_ast(rng, depth - 1, var_a);
            if (!var_a) a = Node::variable(expr::VarId::r);
            has_var = true;
            return Node::unary(K::neg, a);
        }
        case 5: {
            auto a = gen_ast(rng, depth - 1, var_a);
            if (!var_a) a = Node::variable(expr::VarId::t);
            has_var = true;
            double e = std::round(rng.uniform(-3.0, 5.0) * 2.0) / 2.0;
            return Node::power(a, e);
        }
        default: {
            auto a = gen_ast(rng, depth - 1, var_a);
            if (!var_a) a = Node::variable(expr::VarId::w);
            has_var = true;
            int f = std::min(static_cast<int>(rng.uniform() * 7.0), 6);
            return Node::call(static_cast<expr::FuncId>(f), a);
        }
    }
}

}  // namespace

TEST_CASE("parse-print identity on 1000 random trees") {
    Rng rng(20240811);
    for (int k = 0; k < 1000; ++k) {
        bool has_var = false;
        PerturbationExpr original(gen_ast(rng, 6, has_var));
        std::string text = original.print();
        CAPTURE(text);
        PerturbationExpr reparsed = PerturbationExpr::parse(text);
        CHECK(original.same_structure(reparsed));
    }
}

TEST_CASE("decompose_abc: no derivative dependence") {
    auto e = PerturbationExpr::parse("2.5*u");
    auto abc = expr::decompose_abc(e);
    CHECK(abc.B.is_zero_literal());
    CHECK(abc.C.is_zero_literal());
    CHECK(std::abs(eval_at(abc.A, 0, 0, {2, 1}) - cplx(5.0, 2.5)) < 1e-14);
}

TEST_CASE("decompose_abc: paper random example splits exactly") {
    auto e = expr::preset("paper_random_example");
    auto abc = expr::decompose_abc(e);
    auto expected_A = PerturbationExpr::parse("u^6");
    auto expected_B = PerturbationExpr::parse("t^5*exp(i*t + r^2)*u");
    CHECK(abc.C.is_zero_literal());

    Rng rng(7);
    for (int k = 0; k < 100; ++k) {
        Point p;
        p.t = rng.uniform(0.5, 1.5);
        p.r = rng.uniform(0.0, 1.0);
        p.u = {rng.uniform(-2, 2), rng.uniform(-2, 2)};
        cplx a1 = abc.A.evaluate(p), a2 = expected_A.evaluate(p);
        cplx b1 = abc.B.evaluate(p), b2 = expected_B.evaluate(p);
        CHECK(std::abs(a1 - a2) <= 1e-12 * (1.0 + std::abs(a2)));
        CHECK(std::abs(b1 - b2) <= 1e-12 * (1.0 + std::abs(b2)));
    }
}

TEST_CASE("decompose_abc rejects nonlinear derivative dependence") {
    CHECK_THROWS_AS(expr::decompose_abc(PerturbationExpr::parse("u*v^2")), ValidationError);
    CHECK_THROWS_AS(expr::decompose_abc(PerturbationExpr::parse("v*w")), ValidationError);
    CHECK_THROWS_AS(expr::decompose_abc(PerturbationExpr::parse("sin(v)")), ValidationError);
}

TEST_CASE("decompose_abc reconstruction on the preset catalog") {
    Rng rng(99);
    for (const char* name : {"mass", "damping", "power_q", "power_q:4", "paper_random_example"}) {
        auto f = expr::preset(name);
        auto abc = expr::decompose_abc(f);
        for (int k = 0; k < 100; ++k) {
            Point p;
            p.t = rng.uniform(0.5, 1.5);
            p.r = rng.uniform(0.0, 1.0);
            p.u = {rng.uniform(-2, 2), rng.uniform(-2, 2)};
            p.v = {rng.uniform(-2, 2), rng.uniform(-2, 2)};
            p.w = {rng.uniform(-2, 2), rng.uniform(-2, 2)};
            cplx whole = f.evaluate(p);
            cplx parts = abc.A.evaluate(p) + abc.B.evaluate(p) * p.v + abc.C.evaluate(p) * p.w;
            CHECK(std::abs(whole - parts) <= 1e-12 * (1.0 + std::abs(whole)));
        }
    }
}

TEST_CASE("affine-in-derivatives terms survive inside non-factor shapes") {
    // v appears once but not as a bare product factor; the evaluation-based
    // fallback must still produce an exact affine split.
    auto f = PerturbationExpr::parse("(v + u)*r + exp(u)*w/2");
    auto abc = expr::decompose_abc(f);
    Rng rng(3);
    for (int k = 0; k < 50; ++k) {
        Point p;
        p.t = rng.uniform(0.5, 1.5);
        p.r = rng.uniform(0.0, 1.0);
        p.u = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
        p.v = {rng.uniform(-2, 2), rng.uniform(-2, 2)};
        p.w = {rng.uniform(-2, 2), rng.uniform(-2, 2)};
        cplx whole = f.evaluate(p);
        cplx parts = abc.A.evaluate(p) + abc.B.evaluate(p) * p.v + abc.C.evaluate(p) * p.w;
        CHECK(std::abs(whole - parts) <= 1e-12 * (1.0 + std::abs(whole)));
    }
}

TEST_CASE("presets resolve") {
    CHECK(expr::preset("mass").print() == "u");
    CHECK(expr::preset("damping").print() == "v");
    CHECK_THROWS_AS(expr::preset("unknown_thing"), ValidationError);
}
