// pqm: an interpreter toolchain for a Proto-Quipper-M fragment
// Copyright 2026 The pqm Authors.
// SPDX-License-Identifier: Apache-2.0

#include "pqm/eval.hpp"

#include <stdexcept>

namespace pqm {

Mutant mutant_from_name(const std::string& name) {
    if (name.empty() || name == "none") return Mutant::None;
    if (name == "big-force-no-eval") return Mutant::BigForceNoEval;
    if (name == "small-let-swap") return Mutant::SmallLetSwap;
    if (name == "small-decompose-right-first") return Mutant::SmallDecomposeRightFirst;
    if (name == "stacked-step-out-swap") return Mutant::StackedStepOutSwap;
    if (name == "machine-tuple-shift-joins") return Mutant::MachineTupleShiftJoins;
    if (name == "machine-box-sub-keeps-circuit") return Mutant::MachineBoxSubKeepsCircuit;
    if (name == "step-kind-tuple-join-real") return Mutant::StepKindTupleJoinReal;
    throw std::runtime_error("unknown mutant " + name);
}

const char* to_string(Mutant m) {
    switch (m) {
    case Mutant::None: return "none";
    case Mutant::BigForceNoEval: return "big-force-no-eval";
    case Mutant::SmallLetSwap: return "small-let-swap";
    case Mutant::SmallDecomposeRightFirst: return "small-decompose-right-first";
    case Mutant::StackedStepOutSwap: return "stacked-step-out-swap";
    case Mutant::MachineTupleShiftJoins: return "machine-tuple-shift-joins";
    case Mutant::MachineBoxSubKeepsCircuit: return "machine-box-sub-keeps-circuit";
    case Mutant::StepKindTupleJoinReal: return "step-kind-tuple-join-real";
    }
    return "?";
}

SmallConfig make_config(LabelledCircuit c, Term m) {
    return SmallConfig{std::make_shared<const LabelledCircuit>(std::move(c)), std::move(m)};
}

OutcomeClass outcome_class(const RunOutcome& o) {
    if (std::holds_alternative<Converged>(o)) return OutcomeClass::Converged;
    if (std::holds_alternative<Deadlocked>(o)) return OutcomeClass::Deadlocked;
    return OutcomeClass::FuelExhausted;
}

const char* to_string(OutcomeClass c) {
    switch (c) {
    case OutcomeClass::Converged: return "Converged";
    case OutcomeClass::Deadlocked: return "Deadlocked";
    case OutcomeClass::FuelExhausted: return "FuelExhausted";
    }
    return "?";
}

} // namespace pqm
