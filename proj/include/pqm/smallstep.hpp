// pqm: an interpreter toolchain for a Proto-Quipper-M fragment
// Copyright 2026 The pqm Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef PQM_SMALLSTEP_HPP
#define PQM_SMALLSTEP_HPP

#include <optional>
#include <variant>
#include <vector>

#include "pqm/eval.hpp"

namespace pqm {

/// One frame of an evaluation context, from the hole outward.
struct CtxAppL { Term rand; };     // [.] N
struct CtxAppR { Term fun; };      // V [.]
struct CtxPairL { Term right; };   // <[.], N>
struct CtxPairR { Term left; };    // <V, [.]>
struct CtxLet { std::string x, y; Term body; };
struct CtxForce {};
struct CtxBox { TypeExpr t; };
struct CtxApplyL { Term rand; };   // apply([.], N)
struct CtxApplyR { Term circ; };   // apply(V, [.])

using CtxFrame = std::variant<CtxAppL, CtxAppR, CtxPairL, CtxPairR, CtxLet, CtxForce, CtxBox,
                              CtxApplyL, CtxApplyR>;

/// Spine from the hole to the root; plugging wraps the frames in order.
struct EvalContext {
    std::vector<CtxFrame> frames;
    bool is_hole() const { return frames.empty(); }
};

Term plug(const EvalContext& e, Term m);

/// Injects `inner` into `outer`: the composite's hole is inner's hole.
EvalContext compose(const EvalContext& inner, const EvalContext& outer);

/// The unique context/proto-redex split of a non-value term; nullopt iff m
/// is a value. The focus is the leftmost-innermost non-value position; it is
/// a proto-redex for well-formed closed terms and a bare stuck leaf (e.g. a
/// free variable) otherwise.
struct Decomposition {
    EvalContext context;
    Term focus;
};
std::optional<Decomposition> decompose(const Term& m, Mutant mutant = Mutant::None);

struct Stepped { SmallConfig next; };
struct Normal { Term value; };
struct Stuck { Term site; std::string reason; };
struct StepOutOfFuel {};

using StepOutcome = std::variant<Stepped, Normal, Stuck, StepOutOfFuel>;

/// Applies exactly one reduction at the decomposed redex and replugs the
/// context. The box rule runs the full inner reduction against the shared
/// fuel budget; an inner deadlock, non-label-tuple result, or exhausted
/// budget yields Stuck / StepOutOfFuel.
StepOutcome small_step(const SmallConfig& cfg, Runtime& rt, Fuel& fuel);

/// Reduces a basic redex (beta / let / force / apply). Returns nullopt when
/// the focus is a box redex, which the caller must handle. Stuck when no
/// rule matches the focus shape.
std::variant<SmallConfig, Stuck> step_basic_redex(const CircuitPtr& circ, const Term& focus,
                                                  const EvalContext& ctx, Runtime& rt);

/// Iterates small_step; Converged on a value, Deadlocked on Stuck,
/// FuelExhausted otherwise. When `trace` is given, every top-level
/// configuration is recorded (initial one included).
RunOutcome run_small(const SmallConfig& cfg, std::uint64_t fuel, Runtime& rt,
                     std::vector<SmallConfig>* trace = nullptr);

/// As run_small, drawing from an existing budget (shared with box sub-runs).
RunOutcome run_small_fuelled(const SmallConfig& cfg, Fuel& fuel, Runtime& rt,
                             std::vector<SmallConfig>* trace = nullptr);

/// Names of the small-step rules applicable to cfg, per an independent
/// shape-level scan over all five redex rules and nine contextual rules
/// (box counts as applicable on its box_T(lift N) shape).
std::vector<std::string> applicable_small_rules(const SmallConfig& cfg);

std::string to_string(const SmallConfig& cfg);

} // namespace pqm

#endif
