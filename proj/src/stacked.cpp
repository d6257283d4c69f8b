// pqm: an interpreter toolchain for a Proto-Quipper-M fragment
// Copyright 2026 The pqm Authors.
// SPDX-License-Identifier: Apache-2.0

#include "pqm/stacked.hpp"

namespace pqm {

bool well_formed(const StackedConfig& x) {
    if (x.frames.empty()) return false;
    for (std::size_t i = 0; i + 1 < x.frames.size(); ++i)
        if (!x.frames[i].locals) return false;
    return !x.frames.back().locals.has_value();
}

namespace {

bool is_box_lift_focus(const Term& m, Decomposition* out = nullptr) {
    auto dec = decompose(m);
    if (!dec) return false;
    if (dec->focus.kind() != Term::Kind::BoxT || dec->focus.sub1().kind() != Term::Kind::Lift)
        return false;
    if (out) *out = *dec;
    return true;
}

} // namespace

StackedStepResult stacked_step(const StackedConfig& x, Runtime& rt) {
    const StackFrame& head = x.frames.front();
    if (is_value(head.term)) {
        // Only step-out can fire on a value head.
        if (x.frames.size() < 2) return StuckStacked{"head is a value with an empty stack"};
        if (!is_label_tuple(head.term))
            return StuckStacked{"head value is not a label tuple; step-out cannot fire"};
        Decomposition under;
        if (!is_box_lift_focus(x.frames[1].term, &under))
            return StuckStacked{"frame below the head is not at a box redex"};
        LabelTuple outs = LabelTuple::leaf(LabelId{0});
        tuple_of_term(head.term, outs);
        CircuitId id = CircuitStore::instance().intern(*head.circ);
        Term boxed = rt.mutant == Mutant::StackedStepOutSwap
                         ? Term::boxed_circ(outs, id, *head.locals)
                         : Term::boxed_circ(*head.locals, id, outs);
        StackedConfig next;
        next.frames.assign(x.frames.begin() + 1, x.frames.end());
        next.frames.front().term = plug(under.context, std::move(boxed));
        return next;
    }
    Decomposition dec;
    if (is_box_lift_focus(head.term, &dec)) {
        // step-in
        const Term& body = dec.focus.sub1().sub1();
        auto [q, tup] = freshlabels(body, dec.focus.ann(), rt.counter);
        StackFrame inner{std::make_shared<const LabelledCircuit>(identity(q)),
                         Term::app(body, term_of_tuple(tup)), tup};
        StackedConfig next;
        next.frames.reserve(x.frames.size() + 1);
        next.frames.push_back(std::move(inner));
        next.frames.insert(next.frames.end(), x.frames.begin(), x.frames.end());
        return next;
    }
    // head: an ordinary small step on the head configuration.
    auto d = decompose(head.term);
    if (!d) return StuckStacked{"no redex"};
    auto r = step_basic_redex(head.circ, d->focus, d->context, rt);
    if (auto* stuck = std::get_if<Stuck>(&r)) return StuckStacked{stuck->reason};
    auto& stepped = std::get<SmallConfig>(r);
    StackedConfig next = x;
    next.frames.front().circ = stepped.circ;
    next.frames.front().term = stepped.term;
    return next;
}

RunOutcome run_stacked(const StackedConfig& x, std::uint64_t fuel_units, Runtime& rt,
                       std::vector<StackedConfig>* trace) {
    Fuel fuel{fuel_units};
    StackedConfig cur = x;
    std::uint64_t steps = 0;
    if (trace) trace->push_back(cur);
    for (;;) {
        const StackFrame& head = cur.frames.front();
        if (cur.frames.size() == 1 && is_value(head.term) && !head.locals)
            return Converged{head.circ, head.term, steps};
        if (!fuel.take()) return FuelExhausted{to_string(cur)};
        auto r = stacked_step(cur, rt);
        if (auto* stuck = std::get_if<StuckStacked>(&r)) return Deadlocked{to_string(cur), stuck->reason};
        cur = std::get<StackedConfig>(std::move(r));
        ++steps;
        if (trace) trace->push_back(cur);
    }
}

bool is_reachable_shape(const StackedConfig& x) {
    for (std::size_t i = 1; i < x.frames.size(); ++i)
        if (!is_box_lift_focus(x.frames[i].term)) return false;
    return true;
}

std::vector<std::string> applicable_stacked_rules(const StackedConfig& x) {
    std::vector<std::string> out;
    const StackFrame& head = x.frames.front();
    bool head_reducible = !applicable_small_rules(SmallConfig{head.circ, head.term}).empty();
    bool box_focus = is_box_lift_focus(head.term);
    if (head_reducible && !box_focus) out.push_back("head");
    if (box_focus) out.push_back("step-in");
    if (is_label_tuple(head.term) && head.locals && x.frames.size() >= 2 &&
        is_box_lift_focus(x.frames[1].term))
        out.push_back("step-out");
    return out;
}

std::string to_string(const StackedConfig& x) {
    std::string out;
    for (std::size_t i = 0; i < x.frames.size(); ++i) {
        const auto& f = x.frames[i];
        out += "(" + std::to_string(f.circ->gates.size()) + " gates, " + pretty_print(f.term) + ")^";
        out += f.locals ? to_string(*f.locals) : std::string("{}");
        out += i + 1 < x.frames.size() ? "." : ".eps";
    }
    return out;
}

} // namespace pqm
