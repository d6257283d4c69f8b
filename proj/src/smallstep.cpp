// pqm: an interpreter toolchain for a Proto-Quipper-M fragment
// Copyright 2026 The pqm Authors.
// SPDX-License-Identifier: Apache-2.0

#include "pqm/smallstep.hpp"

namespace pqm {

Term plug(const EvalContext& e, Term m) {
    for (const auto& f : e.frames) {
        m = std::visit(
            [&](const auto& frame) -> Term {
                using F = std::decay_t<decltype(frame)>;
                if constexpr (std::is_same_v<F, CtxAppL>) return Term::app(std::move(m), frame.rand);
                else if constexpr (std::is_same_v<F, CtxAppR>) return Term::app(frame.fun, std::move(m));
                else if constexpr (std::is_same_v<F, CtxPairL>) return Term::pair(std::move(m), frame.right);
                else if constexpr (std::is_same_v<F, CtxPairR>) return Term::pair(frame.left, std::move(m));
                else if constexpr (std::is_same_v<F, CtxLet>)
                    return Term::let_pair(frame.x, frame.y, std::move(m), frame.body);
                else if constexpr (std::is_same_v<F, CtxForce>) return Term::force(std::move(m));
                else if constexpr (std::is_same_v<F, CtxBox>) return Term::box(frame.t, std::move(m));
                else if constexpr (std::is_same_v<F, CtxApplyL>) return Term::apply(std::move(m), frame.rand);
                else return Term::apply(frame.circ, std::move(m));
            },
            f);
    }
    return m;
}

EvalContext compose(const EvalContext& inner, const EvalContext& outer) {
    EvalContext out = inner;
    out.frames.insert(out.frames.end(), outer.frames.begin(), outer.frames.end());
    return out;
}

std::optional<Decomposition> decompose(const Term& m, Mutant mutant) {
    if (is_value(m)) return std::nullopt;
    const bool right_first = mutant == Mutant::SmallDecomposeRightFirst;
    std::vector<CtxFrame> spine; // root -> hole while descending
    Term cur = m;
    for (;;) {
        bool descended = false;
        switch (cur.kind()) {
        case Term::Kind::App:
        case Term::Kind::ApplyC: {
            bool is_app = cur.kind() == Term::Kind::App;
            const Term& l = cur.sub1();
            const Term& r = cur.sub2();
            bool take_left = !is_value(l);
            bool take_right = !is_value(r);
            if (right_first && take_right) take_left = false;
            if (take_left) {
                if (is_app) spine.push_back(CtxAppL{r});
                else spine.push_back(CtxApplyL{r});
                cur = l;
                descended = true;
            } else if (take_right) {
                if (is_app) spine.push_back(CtxAppR{l});
                else spine.push_back(CtxApplyR{l});
                cur = r;
                descended = true;
            }
            break;
        }
        case Term::Kind::Pair: {
            const Term& l = cur.sub1();
            const Term& r = cur.sub2();
            bool take_left = !is_value(l);
            bool take_right = !is_value(r);
            if (right_first && take_right) take_left = false;
            if (take_left) {
                spine.push_back(CtxPairL{r});
                cur = l;
                descended = true;
            } else if (take_right) {
                spine.push_back(CtxPairR{l});
                cur = r;
                descended = true;
            }
            break;
        }
        case Term::Kind::LetPair:
            if (!is_value(cur.sub1())) {
                spine.push_back(CtxLet{cur.name(), cur.name2(), cur.sub2()});
                cur = cur.sub1();
                descended = true;
            }
            break;
        case Term::Kind::Force:
            if (!is_value(cur.sub1())) {
                spine.push_back(CtxForce{});
                cur = cur.sub1();
                descended = true;
            }
            break;
        case Term::Kind::BoxT:
            if (!is_value(cur.sub1())) {
                spine.push_back(CtxBox{cur.ann()});
                cur = cur.sub1();
                descended = true;
            }
            break;
        default: break;
        }
        if (!descended) {
            EvalContext ctx;
            ctx.frames.assign(spine.rbegin(), spine.rend());
            return Decomposition{std::move(ctx), std::move(cur)};
        }
    }
}

std::variant<SmallConfig, Stuck> step_basic_redex(const CircuitPtr& circ, const Term& focus,
                                                  const EvalContext& ctx, Runtime& rt) {
    switch (focus.kind()) {
    case Term::Kind::App: {
        const Term& f = focus.sub1();
        if (f.kind() != Term::Kind::Abs)
            return Stuck{focus, "BadRedexShape: application of a non-abstraction"};
        Term next = substitute(f.sub1(), focus.sub2(), f.name());
        return SmallConfig{circ, plug(ctx, std::move(next))};
    }
    case Term::Kind::LetPair: {
        const Term& bound = focus.sub1();
        if (bound.kind() != Term::Kind::Pair)
            return Stuck{focus, "BadRedexShape: let destructuring of a non-pair"};
        Term next;
        if (rt.mutant == Mutant::SmallLetSwap)
            next = substitute(substitute(focus.sub2(), bound.sub2(), focus.name()), bound.sub1(),
                              focus.name2());
        else
            next = substitute(substitute(focus.sub2(), bound.sub1(), focus.name()), bound.sub2(),
                              focus.name2());
        return SmallConfig{circ, plug(ctx, std::move(next))};
    }
    case Term::Kind::Force: {
        if (focus.sub1().kind() != Term::Kind::Lift)
            return Stuck{focus, "BadRedexShape: force of a non-lift"};
        return SmallConfig{circ, plug(ctx, focus.sub1().sub1())};
    }
    case Term::Kind::ApplyC: {
        const Term& c = focus.sub1();
        const Term& k = focus.sub2();
        if (c.kind() != Term::Kind::BoxedCirc)
            return Stuck{focus, "BadRedexShape: apply of a non-circuit"};
        LabelTuple ks = LabelTuple::leaf(LabelId{0});
        if (!tuple_of_term(k, ks)) return Stuck{focus, "BadRedexShape: apply argument is not a label tuple"};
        try {
            const auto& d = CircuitStore::instance().deref(c.circ_id());
            auto [c2, k2] = append(*circ, ks, c.ins(), d, c.outs(), rt.counter);
            return SmallConfig{std::make_shared<const LabelledCircuit>(std::move(c2)),
                               plug(ctx, term_of_tuple(k2))};
        } catch (const CircuitError& e) {
            return Stuck{focus, std::string("BadRedexShape: ") + e.what()};
        }
    }
    default: return Stuck{focus, "BadRedexShape: no rule matches"};
    }
}

StepOutcome small_step(const SmallConfig& cfg, Runtime& rt, Fuel& fuel) {
    auto dec = decompose(cfg.term, rt.mutant);
    if (!dec) return Normal{cfg.term};
    const Term& focus = dec->focus;
    if (focus.kind() == Term::Kind::BoxT && focus.sub1().kind() == Term::Kind::Lift) {
        // box rule: run the sandboxed inner reduction on the shared budget.
        const Term& body = focus.sub1().sub1();
        auto [q, tup] = freshlabels(body, focus.ann(), rt.counter);
        SmallConfig inner = make_config(identity(q), Term::app(body, term_of_tuple(tup)));
        RunOutcome r = run_small_fuelled(inner, fuel, rt);
        if (auto* conv = std::get_if<Converged>(&r)) {
            LabelTuple outs = LabelTuple::leaf(LabelId{0});
            if (!tuple_of_term(conv->value, outs))
                return Stuck{focus, "InnerNotLabels: box body produced a non-label-tuple value"};
            CircuitId id = CircuitStore::instance().intern(*conv->circ);
            Term boxed = Term::boxed_circ(tup, id, outs);
            return Stepped{SmallConfig{cfg.circ, plug(dec->context, std::move(boxed))}};
        }
        if (std::holds_alternative<Deadlocked>(r)) {
            const auto& d = std::get<Deadlocked>(r);
            return Stuck{focus, "InnerDeadlock: " + d.reason};
        }
        return StepOutOfFuel{};
    }
    auto r = step_basic_redex(cfg.circ, focus, dec->context, rt);
    if (auto* stuck = std::get_if<Stuck>(&r)) return *stuck;
    return Stepped{std::get<SmallConfig>(std::move(r))};
}

RunOutcome run_small_fuelled(const SmallConfig& cfg, Fuel& fuel, Runtime& rt,
                             std::vector<SmallConfig>* trace) {
    SmallConfig cur = cfg;
    std::uint64_t steps = 0;
    if (trace) trace->push_back(cur);
    for (;;) {
        if (is_value(cur.term)) return Converged{cur.circ, cur.term, steps};
        if (!fuel.take()) return FuelExhausted{to_string(cur)};
        StepOutcome out = small_step(cur, rt, fuel);
        if (auto* stepped = std::get_if<Stepped>(&out)) {
            cur = stepped->next;
            ++steps;
            if (trace) trace->push_back(cur);
            continue;
        }
        if (auto* stuck = std::get_if<Stuck>(&out))
            return Deadlocked{to_string(cur), stuck->reason};
        return FuelExhausted{to_string(cur)};
    }
}

RunOutcome run_small(const SmallConfig& cfg, std::uint64_t fuel_units, Runtime& rt,
                     std::vector<SmallConfig>* trace) {
    Fuel fuel{fuel_units};
    return run_small_fuelled(cfg, fuel, rt, trace);
}

namespace {

bool reducible(const Term& m);

// Shape-level redex-rule applicability at the root of m.
std::vector<std::string> root_rules(const Term& m) {
    std::vector<std::string> out;
    switch (m.kind()) {
    case Term::Kind::App:
        if (is_value(m.sub1()) && is_value(m.sub2()) && m.sub1().kind() == Term::Kind::Abs)
            out.push_back("beta-reduction");
        if (reducible(m.sub1())) out.push_back("ctx-app-left");
        if (is_value(m.sub1()) && reducible(m.sub2())) out.push_back("ctx-app-right");
        break;
    case Term::Kind::Pair:
        if (reducible(m.sub1())) out.push_back("ctx-tuple-left");
        if (is_value(m.sub1()) && reducible(m.sub2())) out.push_back("ctx-tuple-right");
        break;
    case Term::Kind::LetPair:
        if (is_value(m.sub1()) && m.sub1().kind() == Term::Kind::Pair) out.push_back("let");
        if (reducible(m.sub1())) out.push_back("ctx-let");
        break;
    case Term::Kind::Force:
        if (m.sub1().kind() == Term::Kind::Lift) out.push_back("force");
        if (reducible(m.sub1())) out.push_back("ctx-force");
        break;
    case Term::Kind::BoxT:
        if (m.sub1().kind() == Term::Kind::Lift) out.push_back("box");
        if (reducible(m.sub1())) out.push_back("ctx-box");
        break;
    case Term::Kind::ApplyC:
        if (is_value(m.sub1()) && is_value(m.sub2()) && m.sub1().kind() == Term::Kind::BoxedCirc &&
            is_label_tuple(m.sub2()))
            out.push_back("apply");
        if (reducible(m.sub1())) out.push_back("ctx-apply-left");
        if (is_value(m.sub1()) && reducible(m.sub2())) out.push_back("ctx-apply-right");
        break;
    default: break;
    }
    return out;
}

bool reducible(const Term& m) { return !root_rules(m).empty(); }

} // namespace

std::vector<std::string> applicable_small_rules(const SmallConfig& cfg) { return root_rules(cfg.term); }

std::string to_string(const SmallConfig& cfg) {
    return "(" + std::to_string(cfg.circ->gates.size()) + " gates, " + pretty_print(cfg.term) + ")";
}

} // namespace pqm
