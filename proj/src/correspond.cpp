// pqm: an interpreter toolchain for a Proto-Quipper-M fragment
// Copyright 2026 The pqm Authors.
// SPDX-License-Identifier: Apache-2.0

#include "pqm/correspond.hpp"

namespace pqm {

StackedConfig from_small_step(const SmallConfig& cfg) {
    StackedConfig x;
    x.frames.push_back(StackFrame{cfg.circ, cfg.term, std::nullopt});
    return x;
}

SmallConfig from_small_step_inv(const StackedConfig& x) {
    return SmallConfig{x.frames.front().circ, x.frames.front().term};
}

StackedConfig from_machine(const MachineConfig& mc) {
    StackedConfig out;
    CircuitPtr circ = mc.circ;
    Term term = mc.term;
    // Walk the stack top-down, wrapping the focus; SubK closes a frame.
    for (auto it = mc.stack.rbegin(); it != mc.stack.rend(); ++it) {
        std::visit(
            [&](const auto& e) {
                using E = std::decay_t<decltype(e)>;
                if constexpr (std::is_same_v<E, FArg>) term = Term::app(term, e.rand);
                else if constexpr (std::is_same_v<E, FApp>) term = Term::app(e.fun, term);
                else if constexpr (std::is_same_v<E, ALabel>) term = Term::apply(term, e.rand);
                else if constexpr (std::is_same_v<E, ACirc>) term = Term::apply(e.circ, term);
                else if constexpr (std::is_same_v<E, TRight>) term = Term::pair(term, e.right);
                else if constexpr (std::is_same_v<E, TLeft>) term = Term::pair(e.left, term);
                else if constexpr (std::is_same_v<E, BoxK>) term = Term::box(e.t, term);
                else if constexpr (std::is_same_v<E, LetK>)
                    term = Term::let_pair(e.x, e.y, term, e.body);
                else if constexpr (std::is_same_v<E, ForceK>) term = Term::force(term);
                else { // SubK: emit the frame and resume below it
                    out.frames.push_back(StackFrame{circ, term, e.l});
                    circ = e.c;
                    term = Term::box(e.t, Term::lift(e.m));
                }
            },
            *it);
    }
    out.frames.push_back(StackFrame{circ, term, std::nullopt});
    return out;
}

MachineConfig load(const SmallConfig& cfg) { return MachineConfig{cfg.circ, cfg.term, {}}; }

SmallConfig load_inv(const MachineConfig& mc) { return SmallConfig{mc.circ, mc.term}; }

std::string check_machine_step_image(const MachineTraceEntry& entry, const MachineConfig& after) {
    StackedConfig img_before = from_machine(entry.before);
    StackedConfig img_after = from_machine(after);
    if (entry.info.kind == StepKind::Bookkeeping) {
        if (!(img_before == img_after))
            return entry.info.rule + ": bookkeeping step changed the stacked image";
        return "";
    }
    // Real step: replay one stacked step, allocating exactly the labels the
    // machine drew; freshlabels still rejects any scripted id occurring in
    // the term, so an invalid script cannot pass.
    Runtime replay_rt;
    ScriptedFresh script(entry.info.fresh_script);
    StackedStepResult r = [&]() -> StackedStepResult {
        // The allocating rules (step-in, head/apply) replay against the
        // script; everything else delegates to stacked_step directly.
        const StackFrame& head = img_before.frames.front();
        if (!is_value(head.term)) {
            auto dec = decompose(head.term);
            if (dec && dec->focus.kind() == Term::Kind::BoxT &&
                dec->focus.sub1().kind() == Term::Kind::Lift) {
                const Term& body = dec->focus.sub1().sub1();
                auto [q, tup] = freshlabels(body, dec->focus.ann(), script);
                StackFrame inner{std::make_shared<const LabelledCircuit>(identity(q)),
                                 Term::app(body, term_of_tuple(tup)), tup};
                StackedConfig next;
                next.frames.push_back(std::move(inner));
                next.frames.insert(next.frames.end(), img_before.frames.begin(),
                                   img_before.frames.end());
                return next;
            }
            if (dec && dec->focus.kind() == Term::Kind::ApplyC) {
                const Term& c = dec->focus.sub1();
                const Term& k = dec->focus.sub2();
                if (c.kind() == Term::Kind::BoxedCirc && is_label_tuple(k)) {
                    LabelTuple ks = LabelTuple::leaf(LabelId{0});
                    tuple_of_term(k, ks);
                    const auto& d = CircuitStore::instance().deref(c.circ_id());
                    auto [c2, k2] = append(*head.circ, ks, c.ins(), d, c.outs(), script);
                    StackedConfig next = img_before;
                    next.frames.front().circ = std::make_shared<const LabelledCircuit>(std::move(c2));
                    next.frames.front().term = plug(dec->context, term_of_tuple(k2));
                    return next;
                }
            }
        }
        return stacked_step(img_before, replay_rt);
    }();
    if (auto* stuck = std::get_if<StuckStacked>(&r))
        return entry.info.rule + ": stacked image is stuck (" + stuck->reason + ")";
    const StackedConfig& expected = std::get<StackedConfig>(r);
    if (!(expected == img_after))
        return entry.info.rule + ": real step image mismatch; expected " + to_string(expected) +
               ", got " + to_string(img_after);
    return "";
}

namespace {

std::string compare_values(const Term& a, const Term& b, bool exact) {
    if (exact) {
        if (!(a == b)) return "values differ: " + pretty_print(a) + " vs " + pretty_print(b);
        return "";
    }
    if (!alpha_equal(a, b))
        return "values not alpha-equal: " + pretty_print(a) + " vs " + pretty_print(b);
    return "";
}

} // namespace

std::string compare_outcomes(const RunOutcome& a, const RunOutcome& b, bool exact) {
    if (outcome_class(a) != outcome_class(b))
        return std::string("outcome classes differ: ") + to_string(outcome_class(a)) + " vs " +
               to_string(outcome_class(b));
    if (outcome_class(a) != OutcomeClass::Converged) return "";
    const auto& ca = std::get<Converged>(a);
    const auto& cb = std::get<Converged>(b);
    std::string v = compare_values(ca.value, cb.value, exact);
    if (!v.empty()) return v;
    if (exact) {
        if (!(*ca.circ == *cb.circ)) return "final circuits differ on the nose";
    } else if (!equiv(*ca.circ, *cb.circ)) {
        return "final circuits not equivalent";
    }
    return "";
}

DifferentialReport differential_run(const SmallConfig& cfg, std::uint64_t fuel,
                                    std::uint64_t counter_start, Mutant mutant) {
    DifferentialReport rep{RunOutcome{FuelExhausted{}}, RunOutcome{FuelExhausted{}},
                           RunOutcome{FuelExhausted{}}, RunOutcome{FuelExhausted{}}, "", false};
    {
        Runtime rt(counter_start, mutant);
        rep.big = run_big(cfg, fuel, rt);
    }
    {
        Runtime rt(counter_start, mutant);
        rep.small = run_small(cfg, fuel, rt);
    }
    {
        Runtime rt(counter_start, mutant);
        rep.stacked = run_stacked(from_small_step(cfg), fuel, rt);
    }
    {
        Runtime rt(counter_start, mutant);
        rep.machine = run_machine(load(cfg), fuel, rt);
    }

    struct Cmp {
        const char* name;
        const RunOutcome* a;
        const RunOutcome* b;
        bool exact;
    };
    const Cmp cmps[] = {{"big vs small", &rep.big, &rep.small, true},
                        {"small vs stacked", &rep.small, &rep.stacked, true},
                        {"small vs machine", &rep.small, &rep.machine, false},
                        {"big vs machine", &rep.big, &rep.machine, false}};
    std::string genuine, boundary;
    for (const auto& c : cmps) {
        std::string e = compare_outcomes(*c.a, *c.b, c.exact);
        if (e.empty()) continue;
        bool fuel_boundary = outcome_class(*c.a) != outcome_class(*c.b) &&
                             (outcome_class(*c.a) == OutcomeClass::FuelExhausted ||
                              outcome_class(*c.b) == OutcomeClass::FuelExhausted);
        std::string msg = std::string(c.name) + ": " + e;
        if (fuel_boundary) {
            if (boundary.empty()) boundary = msg;
        } else if (genuine.empty()) {
            genuine = msg;
        }
    }
    if (!genuine.empty()) {
        rep.disagreement = genuine;
    } else if (!boundary.empty()) {
        // Budget boundary: the four fuel notions are aligned but not
        // identical, so this is reported as inconclusive, not a failure.
        rep.disagreement = boundary;
        rep.inconclusive = true;
    }
    return rep;
}

} // namespace pqm
