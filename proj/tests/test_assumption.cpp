#include "blowlab/assumption.hpp"
#include "blowlab/expr.hpp"
#include "doctest.h"

using namespace blowlab;
using assumption::SampleBox;

static SampleBox default_box() {
    SampleBox box;
    box.t_lo = 0.95;
    box.t_hi = 1.05;
    box.r_lo = 0.0;
    box.r_hi = 0.3;
    box.u = {-5, 5, -5, 5};
    box.v = {-3, 3, -3, 3};
    box.w = {-3, 3, -3, 3};
    return box;
}

TEST_CASE("mass term passes with q = 1, M = 2") {
    auto f = expr::preset("mass");
    auto rep = assumption::validate_assumption(f, 3.5, 1.0, 2.0, default_box(), 200, 1);
    CHECK(rep.passed());
    CHECK(rep.samples_checked == 200);
}

TEST_CASE("damping term passes with q = 1, M = 2") {
    auto f = expr::preset("damping");
    auto rep = assumption::validate_assumption(f, 5.0, 1.0, 2.0, default_box(), 200, 1);
    CHECK(rep.passed());
}

TEST_CASE("pure power u^6 on a real-u box: magnitude bounds hold, derivative bounds need M >= 12") {
    auto f = expr::PerturbationExpr::parse("u^6");
    SampleBox box = default_box();
    box.u = {-5, 5, 0, 0};  // real u

    // With M = 2 the Wirtinger derivative bound |d_x F| + |d_y F| = 12|u|^5
    // exceeds M(1 + |u|^5 + ...), and the Lipschitz ratio is 6; honest fail.
    auto rep2 = assumption::validate_assumption(f, 7.0, 6.0, 2.0, box, 300, 11);
    CHECK_FALSE(rep2.passed());
    CHECK(rep2.max_ratio_estderF > 2.0);

    // M = 13 clears every family on this box.
    auto rep13 = assumption::validate_assumption(f, 7.0, 6.0, 13.0, box, 300, 11);
    CHECK(rep13.passed());
}

TEST_CASE("seeded runs are reproducible") {
    auto f = expr::preset("paper_random_example");
    auto a = assumption::validate_assumption(f, 7.0, 6.0, 2.0, default_box(), 150, 42);
    auto b = assumption::validate_assumption(f, 7.0, 6.0, 2.0, default_box(), 150, 42);
    CHECK(a.violations.size() == b.violations.size());
    CHECK(a.max_ratio_estderF == b.max_ratio_estderF);
    CHECK(a.max_ratio_estLipF == b.max_ratio_estLipF);
    for (std::size_t i = 0; i < a.violations.size(); ++i) {
        CHECK(a.violations[i].lhs == b.violations[i].lhs);
        CHECK(a.violations[i].inequality == b.violations[i].inequality);
    }
}

TEST_CASE("parameter validation") {
    auto f = expr::preset("mass");
    CHECK_THROWS_AS(assumption::validate_assumption(f, 5.0, 6.0, 2.0, default_box(), 10, 0),
                    ValidationError);  // q >= p
    CHECK_THROWS_AS(assumption::validate_assumption(f, 5.0, 0.5, 2.0, default_box(), 10, 0),
                    ValidationError);  // q < 1
    SampleBox bad = default_box();
    bad.t_lo = 2.0;  // empty t range
    CHECK_THROWS_AS(assumption::validate_assumption(f, 5.0, 1.0, 2.0, bad, 10, 0),
                    ValidationError);
}

TEST_CASE("violations carry the sampled point and both sides") {
    auto f = expr::PerturbationExpr::parse("u^6");
    SampleBox box = default_box();
    auto rep = assumption::validate_assumption(f, 7.0, 6.0, 2.0, box, 200, 5);
    REQUIRE_FALSE(rep.passed());
    const auto& v = rep.violations.front();
    CHECK(v.lhs > v.rhs);
    CHECK((v.inequality == "estderF" || v.inequality == "estLipF" ||
           v.inequality == "estimateV1"));
}
