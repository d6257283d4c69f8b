// pqm: an interpreter toolchain for a Proto-Quipper-M fragment
// Copyright 2026 The pqm Authors.
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "helpers.hpp"
#include "pqm/bigstep.hpp"
#include "pqm/correspond.hpp"
#include "pqm/gen.hpp"

using namespace pqm;
using namespace pqm::testing;

namespace {

SmallConfig cfg_of(const GenCase& c) { return make_config(identity(c.labels), c.term); }

std::uint64_t counter_start_for(const GenCase& c) {
    std::uint64_t start = 0;
    for (auto l : all_labels(c.term)) start = std::max(start, l.index + 1);
    for (const auto& [l, w] : c.labels) start = std::max(start, l.index + 1);
    return start;
}

} // namespace

// --- decomposition ------------------------------------------------------

TEST_CASE("decompose finds the unique redex") {
    Term idq = parse("\\x:Qubit. x");
    Term redex = Term::app(idq, Term::lab(LabelId{0}));
    auto d1 = decompose(redex);
    REQUIRE(d1.has_value());
    CHECK(d1->context.is_hole());
    CHECK(d1->focus == redex);

    Term in_pair = Term::pair(redex, Term::force(Term::var("n")));
    auto d2 = decompose(in_pair);
    REQUIRE(d2.has_value());
    CHECK(d2->focus == redex);
    REQUIRE(d2->context.frames.size() == 1);
    CHECK(std::holds_alternative<CtxPairL>(d2->context.frames[0]));
    CHECK(plug(d2->context, d2->focus) == in_pair);

    CHECK_FALSE(decompose(idq).has_value());
    CHECK_FALSE(decompose(Term::lab(LabelId{3})).has_value());
}

TEST_CASE("plugging then decomposing round-trips on random terms") {
    std::mt19937_64 rng(23);
    for (int i = 0; i < 500; ++i) {
        Term m = random_raw_term(rng, 5);
        auto d = decompose(m);
        if (!d) {
            CHECK(is_value(m));
            continue;
        }
        CHECK(plug(d->context, d->focus) == m);
    }
}

TEST_CASE("context exclusivity: a plugged proto-redex decomposes uniquely") {
    std::mt19937_64 rng(41);
    FreshCounter gates(700);
    std::vector<Term> proto_redexes = {
        Term::app(parse("\\x:Qubit. x"), Term::lab(LabelId{0})),
        Term::let_pair("a", "b", Term::pair(Term::lab(LabelId{0}), Term::lab(LabelId{1})),
                       Term::var("a")),
        Term::force(Term::lift(Term::var("z"))),
        Term::box(Q(), Term::lift(parse("\\x:Qubit. x"))),
        Term::apply(gate("H", gates), Term::lab(LabelId{2})),
        Term::force(Term::lab(LabelId{3})), // ill-shaped but still a proto-redex
    };
    int harvested = 0;
    for (int i = 0; i < 600; ++i) {
        Term host = random_raw_term(rng, 4);
        auto dh = decompose(host);
        if (!dh) continue;
        ++harvested;
        for (const auto& redex : proto_redexes) {
            Term whole = plug(dh->context, redex);
            auto dw = decompose(whole);
            REQUIRE(dw.has_value());
            CHECK(dw->focus == redex);
            CHECK(plug(dw->context, dw->focus) == whole);
            CHECK(dw->context.frames.size() == dh->context.frames.size());
        }
    }
    CHECK(harvested > 200);
}

TEST_CASE("context injection composes") {
    std::mt19937_64 rng(29);
    int composed = 0;
    for (int i = 0; i < 500; ++i) {
        Term inner = random_raw_term(rng, 3);
        auto di = decompose(inner);
        if (!di || di->context.is_hole()) continue;
        // Wrap `inner` in an outer context built from another decomposition.
        Term host = random_raw_term(rng, 3);
        auto dh = decompose(host);
        if (!dh) continue;
        EvalContext composite = compose(di->context, dh->context);
        Term whole = plug(composite, di->focus);
        CHECK(whole == plug(dh->context, inner));
        auto dw = decompose(whole);
        REQUIRE(dw.has_value());
        // The decomposition of the composite finds a focus inside `inner`
        // whenever the outer context's spine passes through the hole side.
        CHECK(plug(dw->context, dw->focus) == whole);
        ++composed;
    }
    CHECK(composed > 50);
}

// --- small step ---------------------------------------------------------

TEST_CASE("beta, force, let rules") {
    Runtime rt(100);
    Fuel fuel{100};
    auto c0 = std::make_shared<const LabelledCircuit>(identity({{LabelId{0}, kQubit}}));

    SmallConfig beta{c0, Term::app(parse("\\x:Qubit. x"), Term::lab(LabelId{0}))};
    auto r1 = small_step(beta, rt, fuel);
    REQUIRE(std::holds_alternative<Stepped>(r1));
    CHECK(std::get<Stepped>(r1).next.term == Term::lab(LabelId{0}));
    CHECK(*std::get<Stepped>(r1).next.circ == *c0);

    SmallConfig force{c0, parse("force (lift (\\y:Bit. y) (\\z:Bit. z))")};
    auto r2 = small_step(force, rt, fuel);
    REQUIRE(std::holds_alternative<Stepped>(r2));
    CHECK(std::get<Stepped>(r2).next.term == parse("(\\y:Bit. y) (\\z:Bit. z)"));

    Term letterm = Term::let_pair("x", "y", Term::pair(Term::lab(LabelId{0}), Term::lab(LabelId{1})),
                                  Term::pair(Term::var("y"), Term::var("x")));
    SmallConfig letc{c0, letterm};
    auto r3 = small_step(letc, rt, fuel);
    REQUIRE(std::holds_alternative<Stepped>(r3));
    CHECK(std::get<Stepped>(r3).next.term ==
          Term::pair(Term::lab(LabelId{1}), Term::lab(LabelId{0})));
}

TEST_CASE("ill-shaped redexes are stuck") {
    Runtime rt(100);
    Fuel fuel{100};
    auto c0 = std::make_shared<const LabelledCircuit>(identity({{LabelId{0}, kQubit}}));
    SmallConfig bad{c0, Term::apply(Term::lab(LabelId{0}), Term::lab(LabelId{0}))};
    auto dec = decompose(bad.term);
    REQUIRE(dec.has_value());
    auto r = small_step(bad, rt, fuel);
    CHECK(std::holds_alternative<Stuck>(r));
}

TEST_CASE("run_small classifications") {
    Runtime rt(100);
    auto c0 = std::make_shared<const LabelledCircuit>(identity({}));

    auto conv = run_small(SmallConfig{c0, parse("\\x:Qubit. x")}, 10, rt);
    REQUIRE(std::holds_alternative<Converged>(conv));
    CHECK(std::get<Converged>(conv).steps == 0);

    auto c1 = std::make_shared<const LabelledCircuit>(identity({{LabelId{0}, kQubit}}));
    auto dead = run_small(SmallConfig{c1, Term::force(Term::lab(LabelId{0}))}, 10, rt);
    CHECK(std::holds_alternative<Deadlocked>(dead));

    auto loop = run_small(SmallConfig{c0, Term::force(Term::lift(omega()))}, 5000, rt);
    CHECK(std::holds_alternative<FuelExhausted>(loop));
}

TEST_CASE("apply extends the circuit with fresh outputs") {
    FreshCounter parse_counter;
    Term t = parse_with("apply(gate H, #0)", parse_counter); // gate gets #1 -> #2
    Runtime rt(parse_counter.peek());
    auto out = run_big(make_config(identity({{LabelId{0}, kQubit}}), t), 100, rt);
    REQUIRE(std::holds_alternative<Converged>(out));
    const auto& c = std::get<Converged>(out);
    CHECK(c.value == Term::lab(LabelId{3}));
    REQUIRE(c.circ->gates.size() == 1);
    CHECK(c.circ->gates[0].ins == std::vector<LabelId>{LabelId{0}});
    CHECK(c.circ->gates[0].outs == std::vector<LabelId>{LabelId{3}});
    CHECK(c.circ->outputs == LabelContext{{LabelId{3}, kQubit}});
}

TEST_CASE("big-step errors") {
    Runtime rt(100);
    auto c0 = std::make_shared<const LabelledCircuit>(identity({{LabelId{0}, kQubit}}));
    auto err = big_eval(SmallConfig{c0, Term::force(Term::lab(LabelId{0}))}, 100, rt);
    CHECK(std::holds_alternative<BigError>(err));
    auto var = big_eval(SmallConfig{c0, Term::var("x")}, 100, rt);
    CHECK(std::holds_alternative<BigError>(var));
    auto fuel = big_eval(SmallConfig{c0, omega()}, 50, rt);
    CHECK(std::holds_alternative<BigOutOfFuel>(fuel));
}

TEST_CASE("boxing the hadamard builder under big step") {
    FreshCounter parse_counter;
    Term t = parse_with("box[Qubit] (lift \\x:Qubit. apply(gate H, x))", parse_counter);
    Runtime rt(parse_counter.peek());
    auto out = run_big(make_config(identity({}), t), 1000, rt);
    REQUIRE(std::holds_alternative<Converged>(out));
    const auto& v = std::get<Converged>(out).value;
    REQUIRE(v.kind() == Term::Kind::BoxedCirc);
    const auto& built = CircuitStore::instance().deref(v.circ_id());
    auto h = boxed_gate("H", default_signature(), rt.counter);
    CHECK(equiv(built, CircuitStore::instance().deref(h->circ)));
    CHECK(std::get<Converged>(out).circ->gates.empty()); // underlying circuit untouched
}

TEST_CASE("big evaluation is pure given the counter state") {
    GenParams params;
    params.seed = 5;
    for (std::uint64_t i = 0; i < 60; ++i) {
        GenCase c;
        try {
            c = gen_case(params, i);
        } catch (const GiveUp&) {
            continue;
        }
        Runtime rt1(counter_start_for(c)), rt2(counter_start_for(c));
        auto a = run_big(cfg_of(c), 5000, rt1);
        auto b = run_big(cfg_of(c), 5000, rt2);
        REQUIRE(outcome_class(a) == outcome_class(b));
        if (std::holds_alternative<Converged>(a)) {
            CHECK(std::get<Converged>(a).value == std::get<Converged>(b).value);
            CHECK(*std::get<Converged>(a).circ == *std::get<Converged>(b).circ);
        }
    }
}

TEST_CASE("underlying circuit grows monotonically under big step") {
    GenParams params;
    params.seed = 6;
    for (std::uint64_t i = 0; i < 80; ++i) {
        GenCase c;
        try {
            c = gen_case(params, i);
        } catch (const GiveUp&) {
            continue;
        }
        Runtime rt(counter_start_for(c));
        SmallConfig cfg = cfg_of(c);
        auto out = run_big(cfg, 5000, rt);
        if (!std::holds_alternative<Converged>(out)) continue;
        const auto& final_circ = *std::get<Converged>(out).circ;
        REQUIRE(final_circ.gates.size() >= cfg.circ->gates.size());
        for (std::size_t g = 0; g < cfg.circ->gates.size(); ++g)
            CHECK(final_circ.gates[g] == cfg.circ->gates[g]);
    }
}

TEST_CASE("reduction commutes with context plugging, both directions") {
    std::mt19937_64 rng(31);
    GenParams params;
    params.seed = 8;
    int tried = 0;
    for (std::uint64_t i = 0; i < 150 && tried < 60; ++i) {
        GenCase c;
        try {
            c = gen_case(params, i);
        } catch (const GiveUp&) {
            continue;
        }
        if (is_value(c.term)) continue;
        // Contexts harvested from decompositions of random raw terms.
        Term host = random_raw_term(rng, 3);
        auto dh = decompose(host);
        if (!dh) continue;
        const EvalContext& e = dh->context;

        Runtime rt1(counter_start_for(c) + 500), rt2(counter_start_for(c) + 500);
        Fuel f1{100000}, f2{100000};
        SmallConfig plain = cfg_of(c);
        SmallConfig wrapped{plain.circ, plug(e, plain.term)};
        auto r1 = small_step(plain, rt1, f1);
        auto r2 = small_step(wrapped, rt2, f2);
        if (std::holds_alternative<Stepped>(r1)) {
            REQUIRE(std::holds_alternative<Stepped>(r2));
            const auto& n1 = std::get<Stepped>(r1).next;
            const auto& n2 = std::get<Stepped>(r2).next;
            CHECK(n2.term == plug(e, n1.term));
            CHECK(*n1.circ == *n2.circ);
            ++tried;
        }
    }
    CHECK(tried >= 40);
}

TEST_CASE("small-step determinism: at most one applicable rule") {
    GenParams params;
    params.seed = 9;
    for (std::uint64_t i = 0; i < 60; ++i) {
        GenCase c;
        try {
            c = gen_case(params, i);
        } catch (const GiveUp&) {
            continue;
        }
        Runtime rt(counter_start_for(c));
        std::vector<SmallConfig> trace;
        run_small(cfg_of(c), 100000, rt, &trace);
        for (const auto& state : trace) CHECK(applicable_small_rules(state).size() <= 1);
    }
}

// --- stacked ------------------------------------------------------------

TEST_CASE("stacked: head step mirrors small step") {
    Runtime rt(100);
    auto c0 = std::make_shared<const LabelledCircuit>(identity({{LabelId{0}, kQubit}}));
    StackedConfig x = from_small_step({c0, Term::app(parse("\\x:Qubit. x"), Term::lab(LabelId{0}))});
    auto r = stacked_step(x, rt);
    REQUIRE(std::holds_alternative<StackedConfig>(r));
    const auto& next = std::get<StackedConfig>(r);
    REQUIRE(next.frames.size() == 1);
    CHECK(next.frames[0].term == Term::lab(LabelId{0}));
}

TEST_CASE("stacked: step-in pushes a sandbox frame") {
    FreshCounter pc;
    Term t = parse_with("box[Qubit] (lift \\x:Qubit. apply(gate H, x))", pc);
    Runtime rt(pc.peek());
    auto c0 = std::make_shared<const LabelledCircuit>(identity({}));
    auto r = stacked_step(from_small_step({c0, t}), rt);
    REQUIRE(std::holds_alternative<StackedConfig>(r));
    const auto& next = std::get<StackedConfig>(r);
    REQUIRE(next.frames.size() == 2);
    CHECK(next.frames[0].locals.has_value());
    CHECK(next.frames[0].circ->gates.empty());
    CHECK(next.frames[0].term.kind() == Term::Kind::App);
    CHECK(well_formed(next));
    CHECK(is_reachable_shape(next));
}

TEST_CASE("stacked: step-out plugs the boxed circuit") {
    FreshCounter pc;
    Term t = parse_with("box[Qubit] (lift \\x:Qubit. apply(gate H, x))", pc);
    Runtime rt(pc.peek());
    auto c0 = std::make_shared<const LabelledCircuit>(identity({}));
    std::vector<StackedConfig> trace;
    auto out = run_stacked(from_small_step({c0, t}), 1000, rt, &trace);
    REQUIRE(std::holds_alternative<Converged>(out));
    const auto& v = std::get<Converged>(out).value;
    REQUIRE(v.kind() == Term::Kind::BoxedCirc);
    auto h = boxed_gate("H", default_signature(), rt.counter);
    CHECK(equiv(CircuitStore::instance().deref(v.circ_id()),
                CircuitStore::instance().deref(h->circ)));
    for (const auto& x : trace) {
        CHECK(well_formed(x));
        CHECK(is_reachable_shape(x));
    }
}

TEST_CASE("unreachable shapes are flagged") {
    auto c0 = std::make_shared<const LabelledCircuit>(identity({}));
    StackedConfig bad;
    bad.frames.push_back(StackFrame{c0, parse("\\x:Qubit. x"), LabelTuple::leaf(LabelId{1})});
    bad.frames.push_back(StackFrame{c0, parse("\\x:Qubit. x"), std::nullopt});
    CHECK(well_formed(bad));
    CHECK_FALSE(is_reachable_shape(bad));
}

TEST_CASE("stacked classifications and determinism") {
    Runtime rt(100);
    auto c0 = std::make_shared<const LabelledCircuit>(identity({}));
    auto conv = run_stacked(from_small_step({c0, parse("lift \\x:Qubit. x")}), 10, rt);
    REQUIRE(std::holds_alternative<Converged>(conv));
    CHECK(std::get<Converged>(conv).steps == 0);

    auto c1 = std::make_shared<const LabelledCircuit>(identity({{LabelId{0}, kQubit}}));
    auto dead = run_stacked(from_small_step({c1, Term::force(Term::lab(LabelId{0}))}), 10, rt);
    CHECK(std::holds_alternative<Deadlocked>(dead));

    auto loop = run_stacked(from_small_step({c0, Term::box(Q(), Term::lift(Term::abs(
                                                                    "x", Q(), omega())))}),
                            3000, rt);
    CHECK(std::holds_alternative<FuelExhausted>(loop));

    GenParams params;
    params.seed = 10;
    for (std::uint64_t i = 0; i < 40; ++i) {
        GenCase c;
        try {
            c = gen_case(params, i);
        } catch (const GiveUp&) {
            continue;
        }
        Runtime rt2(counter_start_for(c));
        std::vector<StackedConfig> trace;
        run_stacked(from_small_step(cfg_of(c)), 100000, rt2, &trace);
        for (const auto& x : trace) {
            CHECK(applicable_stacked_rules(x).size() <= 1);
            CHECK(well_formed(x));
        }
    }
}

TEST_CASE("stacked simulates small-step: depth-1 states equal the small trace") {
    GenParams params;
    params.seed = 11;
    int compared = 0;
    for (std::uint64_t i = 0; i < 80; ++i) {
        GenCase c;
        try {
            c = gen_case(params, i);
        } catch (const GiveUp&) {
            continue;
        }
        Runtime rt_small(counter_start_for(c)), rt_stacked(counter_start_for(c));
        std::vector<SmallConfig> small_trace;
        auto a = run_small(cfg_of(c), 100000, rt_small, &small_trace);
        std::vector<StackedConfig> stacked_trace;
        auto b = run_stacked(from_small_step(cfg_of(c)), 100000, rt_stacked, &stacked_trace);
        REQUIRE(outcome_class(a) == outcome_class(b));
        std::vector<SmallConfig> depth1;
        for (const auto& x : stacked_trace)
            if (x.frames.size() == 1) depth1.push_back(from_small_step_inv(x));
        REQUIRE(depth1.size() == small_trace.size());
        for (std::size_t k = 0; k < depth1.size(); ++k) {
            CHECK(depth1[k].term == small_trace[k].term);
            CHECK(*depth1[k].circ == *small_trace[k].circ);
        }
        ++compared;
    }
    CHECK(compared > 40);
}

// --- machine ------------------------------------------------------------

TEST_CASE("machine runs the identity application in three steps") {
    Runtime rt(100);
    auto c0 = std::make_shared<const LabelledCircuit>(identity({{LabelId{0}, kQubit}}));
    MachineConfig mc{c0, Term::app(parse("\\x:Qubit. x"), Term::lab(LabelId{0})), {}};

    auto s1 = machine_step(mc, rt);
    REQUIRE(std::holds_alternative<MachineStepped>(s1));
    CHECK(std::get<MachineStepped>(s1).info.rule == "app-split");
    auto s2 = machine_step(std::get<MachineStepped>(s1).next, rt);
    REQUIRE(std::holds_alternative<MachineStepped>(s2));
    CHECK(std::get<MachineStepped>(s2).info.rule == "app-shift");
    auto s3 = machine_step(std::get<MachineStepped>(s2).next, rt);
    REQUIRE(std::holds_alternative<MachineStepped>(s3));
    CHECK(std::get<MachineStepped>(s3).info.rule == "app-join");
    const auto& done = std::get<MachineStepped>(s3).next;
    CHECK(done.term == Term::lab(LabelId{0}));
    CHECK(done.stack.empty());
}

TEST_CASE("machine box rules") {
    FreshCounter pc;
    Term t = parse_with("box[Qubit] (lift \\x:Qubit. apply(gate H, x))", pc);
    Runtime rt(pc.peek());
    auto c0 = std::make_shared<const LabelledCircuit>(identity({}));
    std::vector<MachineTraceEntry> trace;
    auto out = run_machine(load({c0, t}), 1000, rt, &trace);
    REQUIRE(std::holds_alternative<Converged>(out));
    const auto& v = std::get<Converged>(out).value;
    REQUIRE(v.kind() == Term::Kind::BoxedCirc);
    auto h = boxed_gate("H", default_signature(), rt.counter);
    CHECK(equiv(CircuitStore::instance().deref(v.circ_id()),
                CircuitStore::instance().deref(h->circ)));

    std::vector<std::string> rules;
    for (const auto& e : trace) rules.push_back(e.info.rule);
    CHECK(rules.front() == "box-open");
    CHECK(rules.back() == "box-close");
    REQUIRE(trace.size() >= 2);
    // box-sub swaps in the sandbox circuit and pushes the suspended frame.
    for (std::size_t i = 0; i < trace.size(); ++i) {
        if (trace[i].info.rule == "box-sub") {
            const auto& next = i + 1 < trace.size() ? trace[i + 1].before : MachineConfig{};
            CHECK(next.circ->gates.empty());
            REQUIRE(!next.stack.empty());
            CHECK(std::holds_alternative<SubK>(next.stack.back()));
        }
    }
}

TEST_CASE("machine stuck states") {
    Runtime rt(100);
    auto c0 = std::make_shared<const LabelledCircuit>(identity({{LabelId{0}, kQubit}}));
    MachineConfig mc{c0, Term::lab(LabelId{0}), {MachineStackElem{ForceK{}}}};
    auto r = machine_step(mc, rt);
    REQUIRE(std::holds_alternative<StuckMachine>(r));
    auto run = run_machine(mc, 10, rt);
    CHECK(std::holds_alternative<Deadlocked>(run));
}

TEST_CASE("step kinds follow the bookkeeping/real split") {
    for (const char* b : {"app-split", "app-shift", "apply-split", "apply-shift", "let-split",
                          "tuple-split", "tuple-shift", "tuple-join", "box-open", "force-open"})
        CHECK(step_kind(b) == StepKind::Bookkeeping);
    for (const char* r : {"app-join", "apply-join", "box-sub", "box-close", "let-join", "force-close"})
        CHECK(step_kind(r) == StepKind::Real);
}

TEST_CASE("measure L equations") {
    auto c0 = std::make_shared<const LabelledCircuit>(identity({}));
    Term v = parse("\\x:Qubit. x");
    CHECK(measure_L(MachineConfig{c0, v, {}}) == 0);
    Term mn = Term::app(Term::force(Term::var("m")), Term::force(Term::var("n")));
    CHECK(measure_L(MachineConfig{c0, mn, {}}) ==
          measure_L_term(Term::force(Term::var("m"))) + measure_L_term(Term::force(Term::var("n"))) + 2);
    CHECK(measure_L_term(Term::force(Term::var("m"))) == 1);
    CHECK(measure_L_term(Term::pair(Term::force(Term::var("m")), v)) == 1 + 0 + 3);
    // Stack equations: SubK resets, FArg adds L_t+1, TLeft adds 1.
    MachineConfig s{c0, v, {MachineStackElem{SubK{c0, v, LabelTuple::leaf(LabelId{1}), Q()}}}};
    CHECK(measure_L(s) == 0);
    MachineConfig s2{c0, v, {MachineStackElem{FArg{mn}}}};
    CHECK(measure_L(s2) == measure_L_term(mn) + 1);
    MachineConfig s3{c0, v, {MachineStackElem{TLeft{v}}}};
    CHECK(measure_L(s3) == 1);
}

TEST_CASE("bookkeeping steps strictly decrease L; machine is deterministic") {
    GenParams params;
    params.seed = 13;
    for (std::uint64_t i = 0; i < 60; ++i) {
        GenCase c;
        try {
            c = gen_case(params, i);
        } catch (const GiveUp&) {
            continue;
        }
        Runtime rt(counter_start_for(c));
        std::vector<MachineTraceEntry> trace;
        run_machine(load(cfg_of(c)), 100000, rt, &trace);
        for (std::size_t k = 0; k < trace.size(); ++k) {
            CHECK(applicable_machine_rules(trace[k].before).size() <= 1);
            if (trace[k].info.kind == StepKind::Bookkeeping && k + 1 < trace.size())
                CHECK(measure_L(trace[k + 1].before) < measure_L(trace[k].before));
        }
    }
}

TEST_CASE("irreducible machine states carry a value") {
    GenParams params;
    params.seed = 14;
    for (std::uint64_t i = 0; i < 60; ++i) {
        GenCase c;
        try {
            c = gen_case(params, i);
        } catch (const GiveUp&) {
            continue;
        }
        Runtime rt(counter_start_for(c));
        MachineConfig cur = load(cfg_of(c));
        for (int steps = 0; steps < 100000; ++steps) {
            auto r = machine_step(cur, rt);
            if (std::holds_alternative<StuckMachine>(r)) {
                CHECK(is_value(cur.term));
                break;
            }
            cur = std::get<MachineStepped>(r).next;
            if (is_value(cur.term) && cur.stack.empty()) break;
        }
    }
}

// --- correspondence -----------------------------------------------------

TEST_CASE("fromSmallStep is the single-frame embedding") {
    auto c0 = std::make_shared<const LabelledCircuit>(identity({}));
    SmallConfig cfg{c0, parse("\\x:Qubit. x")};
    StackedConfig x = from_small_step(cfg);
    REQUIRE(x.frames.size() == 1);
    CHECK_FALSE(x.frames[0].locals.has_value());
    SmallConfig back = from_small_step_inv(x);
    CHECK(back.term == cfg.term);
    CHECK(*back.circ == *cfg.circ);
    CHECK(is_reachable_shape(x));
}

TEST_CASE("fromMachine defining equations") {
    auto c0 = std::make_shared<const LabelledCircuit>(identity({}));
    Term v = parse("\\x:Qubit. x");
    Term w = parse("lift \\y:Qubit. y");

    StackedConfig base = from_machine(MachineConfig{c0, v, {}});
    REQUIRE(base.frames.size() == 1);
    CHECK(base.frames[0].term == v);

    // Two evaluation phases of the same application share one image.
    StackedConfig i1 = from_machine(MachineConfig{c0, v, {MachineStackElem{FArg{w}}}});
    StackedConfig i2 = from_machine(MachineConfig{c0, w, {MachineStackElem{FApp{v}}}});
    CHECK(i1 == i2);
    CHECK(i1.frames[0].term == Term::app(v, w));

    // SubK opens a frame with its locals.
    auto d = std::make_shared<const LabelledCircuit>(identity({{LabelId{8}, kQubit}}));
    Term body = parse("\\x:Qubit. x");
    MachineConfig sub{d, Term::lab(LabelId{9}),
                      {MachineStackElem{SubK{c0, body, LabelTuple::leaf(LabelId{8}), Q()}}}};
    StackedConfig img = from_machine(sub);
    REQUIRE(img.frames.size() == 2);
    CHECK(img.frames[0].term == Term::lab(LabelId{9}));
    CHECK(img.frames[0].locals == LabelTuple::leaf(LabelId{8}));
    CHECK(img.frames[1].term == Term::box(Q(), Term::lift(body)));
}

TEST_CASE("fromMachine of load equals fromSmallStep") {
    GenParams params;
    params.seed = 15;
    int done = 0;
    for (std::uint64_t i = 0; i < 300; ++i) {
        GenCase c;
        try {
            c = gen_case(params, i);
        } catch (const GiveUp&) {
            continue;
        }
        SmallConfig cfg = cfg_of(c);
        CHECK(from_machine(load(cfg)) == from_small_step(cfg));
        SmallConfig back = load_inv(load(cfg));
        CHECK(back.term == cfg.term);
        ++done;
    }
    CHECK(done > 200);
}

TEST_CASE("machine trace replays as stutters and single stacked steps") {
    GenParams params;
    params.seed = 16;
    int traced = 0;
    for (std::uint64_t i = 0; i < 60; ++i) {
        GenCase c;
        try {
            c = gen_case(params, i);
        } catch (const GiveUp&) {
            continue;
        }
        Runtime rt(counter_start_for(c));
        std::vector<MachineTraceEntry> trace;
        auto out = run_machine(load(cfg_of(c)), 100000, rt, &trace);
        if (!std::holds_alternative<Converged>(out)) continue;
        for (std::size_t k = 0; k < trace.size(); ++k) {
            const MachineConfig& after =
                k + 1 < trace.size()
                    ? trace[k + 1].before
                    : MachineConfig{std::get<Converged>(out).circ, std::get<Converged>(out).value, {}};
            std::string err = check_machine_step_image(trace[k], after);
            CHECK_MESSAGE(err.empty(), err);
        }
        ++traced;
    }
    CHECK(traced > 30);
}

TEST_CASE("differential run agrees on simple programs") {
    FreshCounter pc;
    Term t = parse_with("(\\x:Qubit. x) #0", pc);
    auto rep = differential_run(make_config(identity({{LabelId{0}, kQubit}}), t), 1000, pc.peek());
    CHECK(rep.disagreement.empty());
    CHECK(outcome_class(rep.big) == OutcomeClass::Converged);

    // Hand-built ill-typed stuck term: all four deadlock.
    FreshCounter pc2;
    Term stuck = parse_with("force #0", pc2);
    auto rep2 = differential_run(make_config(identity({{LabelId{0}, kQubit}}), stuck), 1000, pc2.peek());
    CHECK(rep2.disagreement.empty());
    CHECK(outcome_class(rep2.big) == OutcomeClass::Deadlocked);
    CHECK(outcome_class(rep2.small) == OutcomeClass::Deadlocked);
    CHECK(outcome_class(rep2.stacked) == OutcomeClass::Deadlocked);
    CHECK(outcome_class(rep2.machine) == OutcomeClass::Deadlocked);

    // A diverging body exhausts every budget.
    Term loop = Term::force(Term::lift(omega()));
    auto rep3 = differential_run(make_config(identity({}), loop), 2000, 100);
    CHECK(outcome_class(rep3.big) == OutcomeClass::FuelExhausted);
    CHECK(outcome_class(rep3.small) == OutcomeClass::FuelExhausted);
    CHECK(outcome_class(rep3.stacked) == OutcomeClass::FuelExhausted);
    CHECK(outcome_class(rep3.machine) == OutcomeClass::FuelExhausted);
    CHECK(rep3.disagreement.empty());
}

TEST_CASE("boxing the identity yields a literal with shared frontiers") {
    // The inner run returns the sandbox labels unchanged, so the literal's
    // input and output tuples coincide; it must still typecheck.
    FreshCounter pc;
    Term t = parse_with("box[Qubit] (lift \\x:Qubit. x)", pc);
    auto rep = differential_run(make_config(identity({}), t), 1000, pc.peek());
    CHECK(rep.disagreement.empty());
    REQUIRE(outcome_class(rep.big) == OutcomeClass::Converged);
    const Term& v = std::get<Converged>(rep.big).value;
    REQUIRE(v.kind() == Term::Kind::BoxedCirc);
    CHECK(v.ins() == v.outs());
    TypingContext ctx;
    auto r = typecheck(ctx, v);
    REQUIRE(std::holds_alternative<TypeExpr>(r));
    CHECK(std::get<TypeExpr>(r) == TypeExpr::circ(Q(), Q()));
}

namespace {

// Concatenation of stacked configurations, as the deadlock-extension
// property states it: the first configuration's bottom frame acquires
// locals k and the second configuration becomes the new tail.
StackedConfig concat_stacked(const StackedConfig& x, const LabelTuple& k, const StackedConfig& y) {
    StackedConfig out = x;
    out.frames.back().locals = k;
    out.frames.insert(out.frames.end(), y.frames.begin(), y.frames.end());
    return out;
}

} // namespace

TEST_CASE("extending a deadlocked stack leaves it deadlocked") {
    Runtime rt(300);
    auto c0 = std::make_shared<const LabelledCircuit>(identity({{LabelId{0}, kQubit}}));

    // A tail whose head sits at a box redex, as step-in leaves behind.
    FreshCounter pc(100);
    Term host = parse_with("box[Qubit] (lift \\x:Qubit. apply(gate H, x))", pc);
    StackedConfig tail = from_small_step({std::make_shared<const LabelledCircuit>(identity({})), host});

    std::vector<Term> stuck_terms = {
        Term::force(Term::lab(LabelId{0})),                       // stuck head
        Term::apply(Term::lab(LabelId{0}), Term::lab(LabelId{0})) // ill-shaped apply
    };
    for (const auto& m : stuck_terms) {
        StackedConfig x = from_small_step({c0, m});
        auto direct = run_stacked(x, 1000, rt);
        REQUIRE(std::holds_alternative<Deadlocked>(direct));
        StackedConfig extended = concat_stacked(x, LabelTuple::leaf(LabelId{0}), tail);
        CHECK(well_formed(extended));
        auto ext = run_stacked(extended, 1000, rt);
        CHECK(std::holds_alternative<Deadlocked>(ext));
    }

    // A value head over locals whose tuple shape cannot step out.
    StackedConfig val_head;
    val_head.frames.push_back(
        StackFrame{c0, parse("\\x:Qubit. x"), LabelTuple::leaf(LabelId{0})});
    val_head.frames.insert(val_head.frames.end(), tail.frames.begin(), tail.frames.end());
    auto dead = run_stacked(val_head, 1000, rt);
    REQUIRE(std::holds_alternative<Deadlocked>(dead));
    StackedConfig ext2 = concat_stacked(val_head, LabelTuple::leaf(LabelId{0}), tail);
    auto dead2 = run_stacked(ext2, 1000, rt);
    CHECK(std::holds_alternative<Deadlocked>(dead2));
}

TEST_CASE("subject reduction and progress on sampled traces") {
    GenParams params;
    params.seed = 17;
    int traced = 0;
    for (std::uint64_t i = 0; i < 50; ++i) {
        GenCase c;
        try {
            c = gen_case(params, i);
        } catch (const GiveUp&) {
            continue;
        }
        Runtime rt(counter_start_for(c));
        std::vector<SmallConfig> trace;
        auto out = run_small(cfg_of(c), 100000, rt, &trace);
        CHECK_FALSE(std::holds_alternative<Deadlocked>(out)); // progress
        for (const auto& state : trace) {
            auto r = welltyped_config(c.labels, *state.circ, state.term, c.target, {});
            REQUIRE(std::holds_alternative<bool>(r));
            CHECK(std::get<bool>(r));
        }
        ++traced;
    }
    CHECK(traced > 25);
}
