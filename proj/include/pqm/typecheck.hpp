// pqm: an interpreter toolchain for a Proto-Quipper-M fragment
// Copyright 2026 The pqm Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef PQM_TYPECHECK_HPP
#define PQM_TYPECHECK_HPP

#include <map>
#include <string>
#include <variant>

#include "pqm/circuit.hpp"
#include "pqm/syntax.hpp"
#include "pqm/types.hpp"

namespace pqm {

struct TypingContext {
    std::map<std::string, TypeExpr> vars;
    LabelContext labels;
};

enum class TypeErrorKind {
    LinearReuse, LinearUnused, LabelUnused, Mismatch, NotAFunction, NotABang,
    NotACirc, NotATuple, UnboundVar, UnboundLabel, LiftNotClosedLinear,
    BoxShape, FrontierMismatch
};

const char* to_string(TypeErrorKind k);

struct TypeError {
    TypeErrorKind kind;
    std::string message;
    /// The offending sub-term, pretty-printed.
    std::string site;
    /// Source position when the site came from the parser; 0:0 otherwise.
    int line = 0, col = 0;
};

std::string to_string(const TypeError& e);

using TypeResult = std::variant<TypeExpr, TypeError>;

/// Algorithmic linear type checking with leftover contexts: the checker
/// threads the context through subterms; every linear variable and label
/// must be consumed exactly once, parameter variables freely. On success
/// nothing linear is left over.
TypeResult typecheck(const TypingContext& ctx, const Term& m);

/// True iff there is Q'' disjoint from q_out with c : q_in -> q_out + Q''
/// and Q'' |- m : a. Q'' is computed as free_labels(m) restricted to c's
/// outputs, then checked.
using WellTypedResult = std::variant<bool, TypeError>;
WellTypedResult welltyped_config(const LabelContext& q_in, const LabelledCircuit& c, const Term& m,
                                 const TypeExpr& a, const LabelContext& q_out);

/// Declarative-rules oracle: decides whether ctx |- m : a is derivable by
/// enumerating every split of the linear context at the binary rules.
/// Exponential; test-sized inputs only. Independent of `typecheck`.
bool derivable(const TypingContext& ctx, const Term& m, const TypeExpr& a);

/// Enumerates candidate result types for the oracle (the rule system is
/// syntax-directed, so at most one type is derivable; returns it if any).
std::optional<TypeExpr> derivable_type(const TypingContext& ctx, const Term& m);

} // namespace pqm

#endif
