// pqm: an interpreter toolchain for a Proto-Quipper-M fragment
// Copyright 2026 The pqm Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef PQM_TESTS_HELPERS_HPP
#define PQM_TESTS_HELPERS_HPP

#include <random>

#include "pqm/circuit.hpp"
#include "pqm/parser.hpp"
#include "pqm/syntax.hpp"
#include "pqm/typecheck.hpp"

namespace pqm::testing {

inline TypeExpr Q() { return TypeExpr::wire(kQubit); }
inline TypeExpr B() { return TypeExpr::wire(kBit); }

inline Term parse_with(const std::string& src, FreshCounter& counter) {
    return parse(src, default_signature(), counter);
}

/// A boxed single-gate literal, labels drawn from `counter`.
inline Term gate(const std::string& name, FreshCounter& counter) {
    auto g = boxed_gate(name, default_signature(), counter);
    return Term::boxed_circ(g->ins, g->circ, g->outs);
}

/// (lam x:Qubit. x x)(lam x:Qubit. x x): closed, ill-typed, loops forever.
inline Term omega() {
    Term self = Term::abs("x", Q(), Term::app(Term::var("x"), Term::var("x")));
    return Term::app(self, self);
}

/// Arbitrary raw (possibly ill-typed, possibly open) terms for syntactic
/// properties: substitution, decomposition, printing.
inline Term random_raw_term(std::mt19937_64& rng, unsigned depth) {
    auto pick = [&](int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); };
    static const char* names[] = {"x", "y", "z"};
    if (depth == 0) {
        switch (pick(3)) {
        case 0: return Term::var(names[pick(3)]);
        case 1: return Term::lab(LabelId{static_cast<std::uint64_t>(pick(4))});
        default: {
            static FreshCounter gate_labels(500);
            return gate("H", gate_labels);
        }
        }
    }
    switch (pick(9)) {
    case 0: return Term::var(names[pick(3)]);
    case 1: return Term::lab(LabelId{static_cast<std::uint64_t>(pick(4))});
    case 2: return Term::abs(names[pick(3)], Q(), random_raw_term(rng, depth - 1));
    case 3: return Term::app(random_raw_term(rng, depth - 1), random_raw_term(rng, depth - 1));
    case 4: return Term::pair(random_raw_term(rng, depth - 1), random_raw_term(rng, depth - 1));
    case 5: {
        int a = pick(3), b = (a + 1 + pick(2)) % 3;
        return Term::let_pair(names[a], names[b], random_raw_term(rng, depth - 1),
                              random_raw_term(rng, depth - 1));
    }
    case 6: return Term::lift(random_raw_term(rng, depth - 1));
    case 7: return Term::force(random_raw_term(rng, depth - 1));
    default: return Term::box(Q(), random_raw_term(rng, depth - 1));
    }
}

} // namespace pqm::testing

#endif
