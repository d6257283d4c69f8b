// pqm: an interpreter toolchain for a Proto-Quipper-M fragment
// Copyright 2026 The pqm Authors.
// SPDX-License-Identifier: Apache-2.0

#include "pqm/bigstep.hpp"

namespace pqm {

namespace {

struct BigEval {
    Runtime& rt;
    Fuel fuel;

    BigOutcome eval(const CircuitPtr& circ, const Term& m) {
        if (!fuel.take()) return BigOutOfFuel{};
        switch (m.kind()) {
        case Term::Kind::Var: return BigError{m, "free variable"};
        case Term::Kind::Lab:
        case Term::Kind::Abs:
        case Term::Kind::Lift:
        case Term::Kind::BoxedCirc: return BigValue{circ, m};
        case Term::Kind::Pair: {
            // Label tuples self-evaluate as a single node; other pairs
            // evaluate componentwise.
            if (is_label_tuple(m)) return BigValue{circ, m};
            auto l = eval(circ, m.sub1());
            if (!std::holds_alternative<BigValue>(l)) return l;
            auto& lv = std::get<BigValue>(l);
            auto r = eval(lv.circ, m.sub2());
            if (!std::holds_alternative<BigValue>(r)) return r;
            auto& rv = std::get<BigValue>(r);
            return BigValue{rv.circ, Term::pair(lv.value, rv.value)};
        }
        case Term::Kind::App: {
            auto f = eval(circ, m.sub1());
            if (!std::holds_alternative<BigValue>(f)) return f;
            auto& fv = std::get<BigValue>(f);
            if (fv.value.kind() != Term::Kind::Abs)
                return BigError{m, "application of a non-abstraction"};
            auto a = eval(fv.circ, m.sub2());
            if (!std::holds_alternative<BigValue>(a)) return a;
            auto& av = std::get<BigValue>(a);
            Term body = substitute(fv.value.sub1(), av.value, fv.value.name());
            return eval(av.circ, body);
        }
        case Term::Kind::LetPair: {
            auto b = eval(circ, m.sub1());
            if (!std::holds_alternative<BigValue>(b)) return b;
            auto& bv = std::get<BigValue>(b);
            if (bv.value.kind() != Term::Kind::Pair)
                return BigError{m, "let destructuring of a non-pair"};
            Term body = substitute(substitute(m.sub2(), bv.value.sub1(), m.name()),
                                   bv.value.sub2(), m.name2());
            return eval(bv.circ, body);
        }
        case Term::Kind::Force: {
            auto v = eval(circ, m.sub1());
            if (!std::holds_alternative<BigValue>(v)) return v;
            auto& vv = std::get<BigValue>(v);
            if (vv.value.kind() != Term::Kind::Lift) return BigError{m, "force of a non-lift"};
            if (rt.mutant == Mutant::BigForceNoEval) return BigValue{vv.circ, vv.value.sub1()};
            return eval(vv.circ, vv.value.sub1());
        }
        case Term::Kind::BoxT: {
            auto v = eval(circ, m.sub1());
            if (!std::holds_alternative<BigValue>(v)) return v;
            auto& vv = std::get<BigValue>(v);
            if (vv.value.kind() != Term::Kind::Lift) return BigError{m, "box of a non-lift"};
            const Term& body = vv.value.sub1();
            auto [q, tup] = freshlabels(body, m.ann(), rt.counter);
            auto inner_circ = std::make_shared<const LabelledCircuit>(identity(q));
            auto inner = eval(inner_circ, Term::app(body, term_of_tuple(tup)));
            if (!std::holds_alternative<BigValue>(inner)) return inner;
            auto& iv = std::get<BigValue>(inner);
            LabelTuple outs = LabelTuple::leaf(LabelId{0});
            if (!tuple_of_term(iv.value, outs))
                return BigError{m, "box body produced a non-label-tuple value"};
            CircuitId id = CircuitStore::instance().intern(*iv.circ);
            return BigValue{vv.circ, Term::boxed_circ(tup, id, outs)};
        }
        case Term::Kind::ApplyC: {
            auto c = eval(circ, m.sub1());
            if (!std::holds_alternative<BigValue>(c)) return c;
            auto& cv = std::get<BigValue>(c);
            if (cv.value.kind() != Term::Kind::BoxedCirc)
                return BigError{m, "apply of a non-circuit"};
            auto k = eval(cv.circ, m.sub2());
            if (!std::holds_alternative<BigValue>(k)) return k;
            auto& kv = std::get<BigValue>(k);
            LabelTuple ks = LabelTuple::leaf(LabelId{0});
            if (!tuple_of_term(kv.value, ks))
                return BigError{m, "apply argument is not a label tuple"};
            try {
                const auto& d = CircuitStore::instance().deref(cv.value.circ_id());
                auto [c2, k2] = append(*kv.circ, ks, cv.value.ins(), d, cv.value.outs(), rt.counter);
                return BigValue{std::make_shared<const LabelledCircuit>(std::move(c2)),
                                term_of_tuple(k2)};
            } catch (const CircuitError& e) {
                return BigError{m, e.what()};
            }
        }
        }
        return BigError{m, "unreachable"};
    }
};

} // namespace

BigOutcome big_eval(const SmallConfig& cfg, std::uint64_t fuel, Runtime& rt) {
    BigEval ev{rt, Fuel{fuel}};
    return ev.eval(cfg.circ, cfg.term);
}

RunOutcome run_big(const SmallConfig& cfg, std::uint64_t fuel, Runtime& rt) {
    BigEval ev{rt, Fuel{fuel}};
    BigOutcome o = ev.eval(cfg.circ, cfg.term);
    if (auto* v = std::get_if<BigValue>(&o)) return Converged{v->circ, v->value, fuel - ev.fuel.left};
    if (auto* e = std::get_if<BigError>(&o))
        return Deadlocked{pretty_print(cfg.term), "Error at `" + pretty_print(e->site) + "`: " + e->reason};
    return FuelExhausted{pretty_print(cfg.term)};
}

} // namespace pqm
