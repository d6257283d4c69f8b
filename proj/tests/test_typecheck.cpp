// pqm: an interpreter toolchain for a Proto-Quipper-M fragment
// Copyright 2026 The pqm Authors.
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "helpers.hpp"
#include "pqm/bigstep.hpp"
#include "pqm/gen.hpp"

using namespace pqm;
using namespace pqm::testing;

namespace {

TypeExpr expect_type(const TypingContext& ctx, const Term& m) {
    auto r = typecheck(ctx, m);
    if (auto* err = std::get_if<TypeError>(&r)) FAIL(to_string(*err));
    return std::get<TypeExpr>(r);
}

TypeErrorKind expect_error(const TypingContext& ctx, const Term& m) {
    auto r = typecheck(ctx, m);
    REQUIRE(std::holds_alternative<TypeError>(r));
    return std::get<TypeError>(r).kind;
}

} // namespace

TEST_CASE("parameter and simple M-type predicates") {
    CHECK(is_parameter(TypeExpr::bang(TypeExpr::lolli(Q(), Q()))));
    CHECK_FALSE(is_parameter(Q()));
    CHECK(is_parameter(TypeExpr::tensor(TypeExpr::circ(Q(), Q()), TypeExpr::bang(Q()))));
    CHECK_FALSE(is_parameter(TypeExpr::tensor(Q(), TypeExpr::bang(Q()))));

    CHECK(is_simple_m_type(TypeExpr::tensor(Q(), B())));
    CHECK_FALSE(is_simple_m_type(TypeExpr::lolli(Q(), Q())));
    CHECK(is_simple_m_type(Q()));
    CHECK_FALSE(is_simple_m_type(TypeExpr::tensor(Q(), TypeExpr::bang(B()))));
}

TEST_CASE("labels rule") {
    TypingContext ctx;
    ctx.labels = {{LabelId{0}, kQubit}};
    CHECK(expect_type(ctx, Term::lab(LabelId{0})) == Q());
}

TEST_CASE("cloning a linear variable is rejected") {
    TypingContext ctx;
    Term clone = parse("\\x:Qubit. <x, x>");
    CHECK(expect_error(ctx, clone) == TypeErrorKind::LinearReuse);
}

TEST_CASE("unused linear resources are rejected") {
    TypingContext ctx;
    CHECK(expect_error(ctx, parse("\\x:Qubit. lift \\y:Bit. y")) == TypeErrorKind::LinearUnused);
    ctx.labels = {{LabelId{0}, kQubit}};
    CHECK(expect_error(ctx, parse("\\x:Qubit. x")) == TypeErrorKind::LabelUnused);
}

TEST_CASE("boxed circuit literal types by the circ rule") {
    FreshCounter counter;
    TypingContext ctx;
    CHECK(expect_type(ctx, gate("H", counter)) == TypeExpr::circ(Q(), Q()));
    CHECK(expect_type(ctx, gate("Meas", counter)) == TypeExpr::circ(Q(), B()));
    CHECK(expect_type(ctx, gate("CNOT", counter)) ==
          TypeExpr::circ(TypeExpr::tensor(Q(), Q()), TypeExpr::tensor(Q(), Q())));
}

TEST_CASE("boxing the hadamard builder") {
    TypingContext ctx;
    Term t = parse("box[Qubit] (lift \\x:Qubit. apply(gate H, x))");
    CHECK(expect_type(ctx, t) == TypeExpr::circ(Q(), Q()));
}

TEST_CASE("rule failure cases") {
    TypingContext ctx;
    ctx.labels = {{LabelId{0}, kQubit}};
    CHECK(expect_error(ctx, parse("force #0")) == TypeErrorKind::NotABang);
    CHECK(expect_error(ctx, parse("#0 #0")) == TypeErrorKind::NotAFunction);
    CHECK(expect_error(ctx, parse("apply(#0, #0)")) == TypeErrorKind::NotACirc);
    CHECK(expect_error(ctx, parse("let <a,b> = #0 in <a,b>")) == TypeErrorKind::NotATuple);
    CHECK(expect_error(ctx, parse("<#0, x>")) == TypeErrorKind::UnboundVar);
    CHECK(expect_error(ctx, parse("<#0, #7>")) == TypeErrorKind::UnboundLabel);
    CHECK(expect_error(ctx, parse("\\x:Qubit. lift <x, #0>")) == TypeErrorKind::LiftNotClosedLinear);
    CHECK(expect_error(ctx, parse("(\\f:!Qubit. force f) (lift #0)")) ==
          TypeErrorKind::LiftNotClosedLinear);
    CHECK(expect_error(ctx, parse("(\\x:Qubit. box[Bit] (lift \\y:Bit. y)) #0")) ==
          TypeErrorKind::LinearUnused);
    TypingContext empty;
    CHECK(expect_error(empty, parse("box[Bit] (lift \\y:Qubit. y)")) == TypeErrorKind::Mismatch);

    // Hand-built shapes the parser would refuse.
    Term bad_ann = Term::box(TypeExpr::lolli(Q(), Q()), parse("lift \\y:Qubit. y"));
    CHECK(expect_error(empty, bad_ann) == TypeErrorKind::BoxShape);
    FreshCounter counter(60);
    auto g = boxed_gate("H", default_signature(), counter);
    Term bad_tuple = Term::boxed_circ(LabelTuple::pair(g->ins, g->ins), g->circ, g->outs);
    CHECK(expect_error(empty, bad_tuple) == TypeErrorKind::BoxShape);
}

TEST_CASE("frontier splitting honours a nonempty output context") {
    // The circuit keeps one live wire aside while the term consumes the other.
    FreshCounter counter(10);
    LabelContext q0{{LabelId{0}, kQubit}, {LabelId{1}, kQubit}};
    LabelledCircuit c = identity(q0);
    LabelContext keep{{LabelId{1}, kQubit}};
    auto ok = welltyped_config(q0, c, Term::lab(LabelId{0}), Q(), keep);
    REQUIRE(std::holds_alternative<bool>(ok));
    CHECK(std::get<bool>(ok));
    // Declaring the consumed wire as kept cannot split the frontier.
    auto bad = welltyped_config(q0, c, Term::lab(LabelId{0}), Q(), q0);
    REQUIRE(std::holds_alternative<TypeError>(bad));
    CHECK(std::get<TypeError>(bad).kind == TypeErrorKind::FrontierMismatch);
}

TEST_CASE("parameter variables admit weakening and reuse") {
    TypingContext ctx;
    ctx.vars.emplace("c", TypeExpr::circ(Q(), Q()));
    // Used twice:
    Term twice = parse("\\x:Qubit. \\y:Qubit. <apply(c, x), apply(c, y)>");
    CHECK(expect_type(ctx, twice) ==
          TypeExpr::lolli(Q(), TypeExpr::lolli(Q(), TypeExpr::tensor(Q(), Q()))));
    // And unused entirely:
    CHECK(expect_type(ctx, parse("\\x:Qubit. x")) == TypeExpr::lolli(Q(), Q()));
}

TEST_CASE("well-typedness of configurations") {
    // Empty circuit, closed abstraction.
    auto r1 = welltyped_config({}, identity({}), parse("\\x:Qubit. x"), TypeExpr::lolli(Q(), Q()), {});
    REQUIRE(std::holds_alternative<bool>(r1));
    CHECK(std::get<bool>(r1));

    LabelContext q0{{LabelId{0}, kQubit}};
    auto r2 = welltyped_config(q0, identity(q0), Term::lab(LabelId{0}), Q(), {});
    REQUIRE(std::holds_alternative<bool>(r2));
    CHECK(std::get<bool>(r2));

    auto r3 = welltyped_config(q0, identity(q0), Term::lab(LabelId{1}), Q(), {});
    REQUIRE(std::holds_alternative<TypeError>(r3));
    CHECK(std::get<TypeError>(r3).kind == TypeErrorKind::FrontierMismatch);
}

TEST_CASE("substituting a typed value preserves the type of the host term") {
    struct Inhabitant {
        Term v;
        TypeExpr ty;
        LabelContext labels;
    };
    FreshCounter counter(100);
    std::vector<Inhabitant> values = {
        {parse("\\x:Qubit. x"), TypeExpr::lolli(Q(), Q()), {}},
        {parse("lift \\x:Qubit. x"), TypeExpr::bang(TypeExpr::lolli(Q(), Q())), {}},
        {gate("H", counter), TypeExpr::circ(Q(), Q()), {}},
        {Term::lab(LabelId{90}), Q(), {{LabelId{90}, kQubit}}},
        {Term::pair(Term::lab(LabelId{91}), Term::lab(LabelId{92})),
         TypeExpr::tensor(Q(), Q()),
         {{LabelId{91}, kQubit}, {LabelId{92}, kQubit}}},
    };
    GenParams params;
    params.seed = 31;
    params.max_depth = 4;
    int checked = 0;
    for (std::uint64_t i = 0; i < 200; ++i) {
        const auto& inh = values[i % values.size()];
        // Generate m with x:A free (plus its own labels), then substitute.
        TypingContext ctx;
        ctx.vars.emplace("subst_me", inh.ty);
        ctx.labels = {{LabelId{0}, kQubit}};
        GenParams p = params;
        p.seed = params.seed + i;
        Term m;
        try {
            m = gen_welltyped(p, TypeExpr::tensor(Q(), Q()), ctx);
        } catch (const GiveUp&) {
            continue;
        }
        auto before = typecheck(ctx, m);
        REQUIRE(std::holds_alternative<TypeExpr>(before));
        Term substituted = substitute(m, inh.v, "subst_me");
        TypingContext merged;
        merged.labels = ctx.labels;
        for (const auto& [l, w] : inh.labels) merged.labels[l] = w;
        auto after = typecheck(merged, substituted);
        if (auto* err = std::get_if<TypeError>(&after)) FAIL(to_string(*err));
        CHECK(std::get<TypeExpr>(after) == std::get<TypeExpr>(before));
        ++checked;
    }
    CHECK(checked > 30);
}

TEST_CASE("generation of values on evaluated corpora") {
    GenParams params;
    params.seed = 12;
    int circs = 0, tuples = 0;
    for (std::uint64_t i = 0; i < 150; ++i) {
        GenCase c;
        try {
            c = gen_case(params, i);
        } catch (const GiveUp&) {
            continue;
        }
        Runtime rt(1000);
        auto out = run_big(make_config(identity(c.labels), c.term), 100000, rt);
        if (!std::holds_alternative<Converged>(out)) continue;
        const Term& v = std::get<Converged>(out).value;
        if (c.target.kind() == TypeExpr::Kind::Circ) {
            CHECK(v.kind() == Term::Kind::BoxedCirc);
            ++circs;
        }
        if (is_simple_m_type(c.target)) {
            CHECK(is_label_tuple(v));
            ++tuples;
        }
    }
    CHECK(circs > 3);
    CHECK(tuples >= 25);
}

TEST_CASE("declarative oracle agrees on a quick sample") {
    std::mt19937_64 rng(17);
    int agreements = 0;
    for (int i = 0; i < 8000; ++i) {
        Term m = random_raw_term(rng, 3);
        TypingContext ctx;
        if (rng() % 2) ctx.vars.emplace("x", rng() % 2 ? Q() : TypeExpr::bang(TypeExpr::lolli(Q(), Q())));
        if (rng() % 2) ctx.labels[LabelId{0}] = kQubit;
        if (rng() % 2) ctx.labels[LabelId{1}] = kBit;
        auto algo = typecheck(ctx, m);
        auto oracle = derivable_type(ctx, m);
        if (std::holds_alternative<TypeExpr>(algo)) {
            REQUIRE_MESSAGE(oracle.has_value(), pretty_print(m));
            CHECK(*oracle == std::get<TypeExpr>(algo));
            ++agreements;
        } else {
            std::string msg =
                pretty_print(m) + " oracle says " + (oracle ? to_string(*oracle) : std::string("-"));
            CHECK_MESSAGE(!oracle.has_value(), msg);
        }
    }
    CHECK(agreements > 60);
}
