// pqm: an interpreter toolchain for a Proto-Quipper-M fragment
// Copyright 2026 The pqm Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef PQM_MACHINE_HPP
#define PQM_MACHINE_HPP

#include <variant>
#include <vector>

#include "pqm/eval.hpp"

namespace pqm {

// Continuation stack elements.
struct FArg { Term rand; };                         // evaluate the function, argument pending
struct FApp { Term fun; };                          // evaluate the argument, function value held
struct ALabel { Term rand; };                       // apply: evaluating the circuit side
struct ACirc { Term circ; };                        // apply: evaluating the label side
struct TRight { Term right; };                      // tuple: evaluating the left component
struct TLeft { Term left; };                        // tuple: evaluating the right component
struct BoxK { LabelContext q; LabelTuple l; TypeExpr t; };
struct SubK { CircuitPtr c; Term m; LabelTuple l; TypeExpr t; };
struct LetK { std::string x, y; Term body; };
struct ForceK {};

using MachineStackElem =
    std::variant<FArg, FApp, ALabel, ACirc, TRight, TLeft, BoxK, SubK, LetK, ForceK>;

/// Circuit, term under focus, and the continuation stack (back() is the top).
struct MachineConfig {
    CircuitPtr circ;
    Term term;
    std::vector<MachineStackElem> stack;
};

enum class StepKind { Bookkeeping, Real };

/// Bookkeeping steps only decompose or move terms around; real steps
/// advance the stacked image by one step.
StepKind step_kind(const std::string& rule, Mutant mutant = Mutant::None);

struct MachineStepInfo {
    std::string rule;
    StepKind kind;
    /// Fresh labels this step drew (box-open, apply-join), or—for box-sub—
    /// the stored labels a stacked replay of the step must allocate.
    std::vector<LabelId> fresh_script;
};

struct StuckMachine {
    std::string reason;
};

struct MachineStepped {
    MachineConfig next;
    MachineStepInfo info;
};

using MachineStepResult = std::variant<MachineStepped, StuckMachine>;

/// Applies the unique applicable rule among the sixteen.
MachineStepResult machine_step(const MachineConfig& mc, Runtime& rt);

/// Termination measure for bookkeeping steps: L = L_t(term) + L_s(stack).
/// Strictly decreases across every bookkeeping step.
std::uint64_t measure_L(const MachineConfig& mc);
std::uint64_t measure_L_term(const Term& m);

struct MachineTraceEntry {
    MachineConfig before;
    MachineStepInfo info;
};

/// Converged iff a value with an empty stack is reached. Fuel is charged on
/// real steps only; bookkeeping runs are bounded by measure_L.
RunOutcome run_machine(const MachineConfig& mc, std::uint64_t fuel, Runtime& rt,
                       std::vector<MachineTraceEntry>* trace = nullptr);

/// Independent applicability scan over all sixteen rule patterns.
std::vector<std::string> applicable_machine_rules(const MachineConfig& mc);

std::string to_string(const MachineConfig& mc);

bool operator==(const MachineStackElem& a, const MachineStackElem& b);
inline bool operator==(const MachineConfig& a, const MachineConfig& b) {
    return *a.circ == *b.circ && a.term == b.term && a.stack == b.stack;
}

} // namespace pqm

#endif
