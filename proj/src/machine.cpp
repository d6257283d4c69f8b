// pqm: an interpreter toolchain for a Proto-Quipper-M fragment
// Copyright 2026 The pqm Authors.
// SPDX-License-Identifier: Apache-2.0

#include "pqm/machine.hpp"

namespace pqm {

bool operator==(const MachineStackElem& a, const MachineStackElem& b) {
    if (a.index() != b.index()) return false;
    return std::visit(
        [&](const auto& ea) {
            const auto& eb = std::get<std::decay_t<decltype(ea)>>(b);
            using E = std::decay_t<decltype(ea)>;
            if constexpr (std::is_same_v<E, FArg>) return ea.rand == eb.rand;
            else if constexpr (std::is_same_v<E, FApp>) return ea.fun == eb.fun;
            else if constexpr (std::is_same_v<E, ALabel>) return ea.rand == eb.rand;
            else if constexpr (std::is_same_v<E, ACirc>) return ea.circ == eb.circ;
            else if constexpr (std::is_same_v<E, TRight>) return ea.right == eb.right;
            else if constexpr (std::is_same_v<E, TLeft>) return ea.left == eb.left;
            else if constexpr (std::is_same_v<E, BoxK>)
                return ea.q == eb.q && ea.l == eb.l && ea.t == eb.t;
            else if constexpr (std::is_same_v<E, SubK>)
                return *ea.c == *eb.c && ea.m == eb.m && ea.l == eb.l && ea.t == eb.t;
            else if constexpr (std::is_same_v<E, LetK>)
                return ea.x == eb.x && ea.y == eb.y && ea.body == eb.body;
            else return true; // ForceK
        },
        a);
}

StepKind step_kind(const std::string& rule, Mutant mutant) {
    if (mutant == Mutant::StepKindTupleJoinReal && rule == "tuple-join") return StepKind::Real;
    if (rule == "app-join" || rule == "apply-join" || rule == "box-sub" || rule == "box-close" ||
        rule == "let-join" || rule == "force-close")
        return StepKind::Real;
    return StepKind::Bookkeeping;
}

namespace {

MachineStepped stepped(MachineConfig next, const char* rule, Mutant mutant,
                       std::vector<LabelId> fresh = {}) {
    return MachineStepped{std::move(next), MachineStepInfo{rule, step_kind(rule, mutant), std::move(fresh)}};
}

// Forwards to an underlying source while recording what was taken, so a
// stacked replay of this step can allocate the same ids.
class RecordingFresh : public FreshSource {
public:
    explicit RecordingFresh(FreshSource& inner) : inner_(inner) {}
    std::vector<LabelId> take(std::size_t n, std::uint64_t floor) override {
        auto ids = inner_.take(n, floor);
        taken.insert(taken.end(), ids.begin(), ids.end());
        return ids;
    }
    std::vector<LabelId> taken;

private:
    FreshSource& inner_;
};

} // namespace

MachineStepResult machine_step(const MachineConfig& mc, Runtime& rt) {
    const Term& m = mc.term;
    if (!is_value(m)) {
        switch (m.kind()) {
        case Term::Kind::App: {
            MachineConfig next{mc.circ, m.sub1(), mc.stack};
            next.stack.push_back(FArg{m.sub2()});
            return stepped(std::move(next), "app-split", rt.mutant);
        }
        case Term::Kind::ApplyC: {
            MachineConfig next{mc.circ, m.sub1(), mc.stack};
            next.stack.push_back(ALabel{m.sub2()});
            return stepped(std::move(next), "apply-split", rt.mutant);
        }
        case Term::Kind::Pair: {
            MachineConfig next{mc.circ, m.sub1(), mc.stack};
            next.stack.push_back(TRight{m.sub2()});
            return stepped(std::move(next), "tuple-split", rt.mutant);
        }
        case Term::Kind::LetPair: {
            MachineConfig next{mc.circ, m.sub1(), mc.stack};
            next.stack.push_back(LetK{m.name(), m.name2(), m.sub2()});
            return stepped(std::move(next), "let-split", rt.mutant);
        }
        case Term::Kind::Force: {
            MachineConfig next{mc.circ, m.sub1(), mc.stack};
            next.stack.push_back(ForceK{});
            return stepped(std::move(next), "force-open", rt.mutant);
        }
        case Term::Kind::BoxT: {
            auto [q, tup] = freshlabels(m.sub1(), m.ann(), rt.counter);
            MachineConfig next{mc.circ, m.sub1(), mc.stack};
            next.stack.push_back(BoxK{q, tup, m.ann()});
            return stepped(std::move(next), "box-open", rt.mutant, tup.leaves());
        }
        case Term::Kind::Var: return StuckMachine{"free variable " + m.name()};
        default: return StuckMachine{"no rule for the focused term"};
        }
    }
    if (mc.stack.empty()) return StuckMachine{"value with an empty stack"};
    const MachineStackElem& top = mc.stack.back();
    auto popped = [&] {
        auto s = mc.stack;
        s.pop_back();
        return s;
    };
    if (auto* farg = std::get_if<FArg>(&top)) {
        MachineConfig next{mc.circ, farg->rand, popped()};
        next.stack.push_back(FApp{m});
        return stepped(std::move(next), "app-shift", rt.mutant);
    }
    if (auto* fapp = std::get_if<FApp>(&top)) {
        if (fapp->fun.kind() != Term::Kind::Abs)
            return StuckMachine{"app-join: held function value is not an abstraction"};
        Term body = substitute(fapp->fun.sub1(), m, fapp->fun.name());
        return stepped(MachineConfig{mc.circ, std::move(body), popped()}, "app-join", rt.mutant);
    }
    if (auto* alab = std::get_if<ALabel>(&top)) {
        MachineConfig next{mc.circ, alab->rand, popped()};
        next.stack.push_back(ACirc{m});
        return stepped(std::move(next), "apply-shift", rt.mutant);
    }
    if (auto* acirc = std::get_if<ACirc>(&top)) {
        if (acirc->circ.kind() != Term::Kind::BoxedCirc)
            return StuckMachine{"apply-join: held value is not a boxed circuit"};
        LabelTuple ks = LabelTuple::leaf(LabelId{0});
        if (!tuple_of_term(m, ks)) return StuckMachine{"apply-join: focused value is not a label tuple"};
        try {
            const auto& d = CircuitStore::instance().deref(acirc->circ.circ_id());
            RecordingFresh rec(rt.counter);
            auto [c2, k2] = append(*mc.circ, ks, acirc->circ.ins(), d, acirc->circ.outs(), rec);
            return stepped(MachineConfig{std::make_shared<const LabelledCircuit>(std::move(c2)),
                                         term_of_tuple(k2), popped()},
                           "apply-join", rt.mutant, std::move(rec.taken));
        } catch (const CircuitError& e) {
            return StuckMachine{std::string("apply-join: ") + e.what()};
        }
    }
    if (auto* tr = std::get_if<TRight>(&top)) {
        if (rt.mutant == Mutant::MachineTupleShiftJoins) {
            return stepped(MachineConfig{mc.circ, Term::pair(m, tr->right), popped()}, "tuple-shift",
                           rt.mutant);
        }
        MachineConfig next{mc.circ, tr->right, popped()};
        next.stack.push_back(TLeft{m});
        return stepped(std::move(next), "tuple-shift", rt.mutant);
    }
    if (auto* tl = std::get_if<TLeft>(&top)) {
        return stepped(MachineConfig{mc.circ, Term::pair(tl->left, m), popped()}, "tuple-join", rt.mutant);
    }
    if (auto* boxk = std::get_if<BoxK>(&top)) {
        if (m.kind() != Term::Kind::Lift) return StuckMachine{"box-sub: boxed term is not a lift"};
        const Term& body = m.sub1();
        CircuitPtr inner = rt.mutant == Mutant::MachineBoxSubKeepsCircuit
                               ? mc.circ
                               : std::make_shared<const LabelledCircuit>(identity(boxk->q));
        MachineConfig next{inner, Term::app(body, term_of_tuple(boxk->l)), popped()};
        next.stack.push_back(SubK{mc.circ, body, boxk->l, boxk->t});
        return stepped(std::move(next), "box-sub", rt.mutant, boxk->l.leaves());
    }
    if (auto* subk = std::get_if<SubK>(&top)) {
        LabelTuple outs = LabelTuple::leaf(LabelId{0});
        if (!tuple_of_term(m, outs))
            return StuckMachine{"box-close: boxed body produced a non-label-tuple value"};
        CircuitId id = CircuitStore::instance().intern(*mc.circ);
        Term boxed = Term::boxed_circ(subk->l, id, outs);
        return stepped(MachineConfig{subk->c, std::move(boxed), popped()}, "box-close", rt.mutant);
    }
    if (auto* letk = std::get_if<LetK>(&top)) {
        if (m.kind() != Term::Kind::Pair) return StuckMachine{"let-join: focused value is not a pair"};
        Term body = substitute(substitute(letk->body, m.sub1(), letk->x), m.sub2(), letk->y);
        return stepped(MachineConfig{mc.circ, std::move(body), popped()}, "let-join", rt.mutant);
    }
    // ForceK
    if (m.kind() != Term::Kind::Lift) return StuckMachine{"force-close: focused value is not a lift"};
    return stepped(MachineConfig{mc.circ, m.sub1(), popped()}, "force-close", rt.mutant);
}

std::uint64_t measure_L_term(const Term& m) {
    if (is_value(m)) return 0;
    switch (m.kind()) {
    case Term::Kind::BoxT:
    case Term::Kind::Force: return measure_L_term(m.sub1()) + 1;
    case Term::Kind::LetPair: return measure_L_term(m.sub1()) + 1;
    case Term::Kind::App:
    case Term::Kind::ApplyC: return measure_L_term(m.sub1()) + measure_L_term(m.sub2()) + 2;
    case Term::Kind::Pair: return measure_L_term(m.sub1()) + measure_L_term(m.sub2()) + 3;
    default: return 0; // free variables and other stuck leaves
    }
}

namespace {

std::uint64_t measure_L_stack(const std::vector<MachineStackElem>& stack, std::size_t top) {
    // `top` indexes one past the current top; recursion walks downward.
    if (top == 0) return 0;
    const MachineStackElem& h = stack[top - 1];
    return std::visit(
        [&](const auto& e) -> std::uint64_t {
            using E = std::decay_t<decltype(e)>;
            if constexpr (std::is_same_v<E, SubK>) return 0;
            else if constexpr (std::is_same_v<E, BoxK> || std::is_same_v<E, ForceK> ||
                               std::is_same_v<E, LetK>)
                return measure_L_stack(stack, top - 1);
            else if constexpr (std::is_same_v<E, FArg>)
                return measure_L_term(e.rand) + 1 + measure_L_stack(stack, top - 1);
            else if constexpr (std::is_same_v<E, ALabel>)
                return measure_L_term(e.rand) + 1 + measure_L_stack(stack, top - 1);
            else if constexpr (std::is_same_v<E, TRight>)
                return measure_L_term(e.right) + 2 + measure_L_stack(stack, top - 1);
            else if constexpr (std::is_same_v<E, FApp> || std::is_same_v<E, ACirc>)
                return measure_L_stack(stack, top - 1);
            else // TLeft
                return 1 + measure_L_stack(stack, top - 1);
        },
        h);
}

} // namespace

std::uint64_t measure_L(const MachineConfig& mc) {
    return measure_L_term(mc.term) + measure_L_stack(mc.stack, mc.stack.size());
}

RunOutcome run_machine(const MachineConfig& mc, std::uint64_t fuel_units, Runtime& rt,
                       std::vector<MachineTraceEntry>* trace) {
    Fuel fuel{fuel_units};
    MachineConfig cur = mc;
    std::uint64_t real_steps = 0;
    // Consecutive bookkeeping steps cannot outlast the measure L at the
    // start of the run; exceeding it means strong normalization is broken.
    std::uint64_t b_run = 0, b_budget = measure_L(cur);
    for (;;) {
        if (is_value(cur.term) && cur.stack.empty()) return Converged{cur.circ, cur.term, real_steps};
        auto r = machine_step(cur, rt);
        if (auto* stuck = std::get_if<StuckMachine>(&r)) {
            std::string reason = stuck->reason;
            if (!is_value(cur.term)) reason += " [unexpected: irreducible non-value]";
            return Deadlocked{to_string(cur), reason};
        }
        auto& s = std::get<MachineStepped>(r);
        if (s.info.kind == StepKind::Real) {
            if (!fuel.take()) return FuelExhausted{to_string(cur)};
        } else if (++b_run > b_budget) {
            return Deadlocked{to_string(cur), "bookkeeping overrun: more consecutive bookkeeping "
                                              "steps than the initial measure L allows"};
        }
        if (trace) trace->push_back(MachineTraceEntry{cur, s.info});
        cur = std::move(s.next);
        if (s.info.kind == StepKind::Real) {
            ++real_steps;
            b_run = 0;
            b_budget = measure_L(cur);
        }
    }
}

std::vector<std::string> applicable_machine_rules(const MachineConfig& mc) {
    std::vector<std::string> out;
    const Term& m = mc.term;
    bool value = is_value(m);
    // Rules on non-value terms.
    if (!value && m.kind() == Term::Kind::App) out.push_back("app-split");
    if (!value && m.kind() == Term::Kind::ApplyC) out.push_back("apply-split");
    if (!value && m.kind() == Term::Kind::Pair) out.push_back("tuple-split");
    if (!value && m.kind() == Term::Kind::BoxT) out.push_back("box-open");
    if (!value && m.kind() == Term::Kind::LetPair) out.push_back("let-split");
    if (!value && m.kind() == Term::Kind::Force) out.push_back("force-open");
    // Rules on values, keyed by the stack head.
    if (value && !mc.stack.empty()) {
        const auto& top = mc.stack.back();
        if (std::holds_alternative<FArg>(top)) out.push_back("app-shift");
        if (auto* f = std::get_if<FApp>(&top); f && f->fun.kind() == Term::Kind::Abs)
            out.push_back("app-join");
        if (std::holds_alternative<ALabel>(top)) out.push_back("apply-shift");
        if (auto* a = std::get_if<ACirc>(&top);
            a && a->circ.kind() == Term::Kind::BoxedCirc && is_label_tuple(m))
            out.push_back("apply-join");
        if (std::holds_alternative<TRight>(top)) out.push_back("tuple-shift");
        if (std::holds_alternative<TLeft>(top)) out.push_back("tuple-join");
        if (std::holds_alternative<BoxK>(top) && m.kind() == Term::Kind::Lift) out.push_back("box-sub");
        if (std::holds_alternative<SubK>(top) && is_label_tuple(m)) out.push_back("box-close");
        if (std::holds_alternative<LetK>(top) && m.kind() == Term::Kind::Pair) out.push_back("let-join");
        if (std::holds_alternative<ForceK>(top) && m.kind() == Term::Kind::Lift)
            out.push_back("force-close");
    }
    return out;
}

std::string to_string(const MachineConfig& mc) {
    return "(" + std::to_string(mc.circ->gates.size()) + " gates, " + pretty_print(mc.term) +
           ", |S|=" + std::to_string(mc.stack.size()) + ")";
}

} // namespace pqm
