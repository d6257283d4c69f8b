// pqm: an interpreter toolchain for a Proto-Quipper-M fragment
// Copyright 2026 The pqm Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef PQM_EVAL_HPP
#define PQM_EVAL_HPP

#include <cstdint>
#include <string>
#include <variant>

#include "pqm/circuit.hpp"
#include "pqm/syntax.hpp"

namespace pqm {

/// Rule-level mutants for the mutation-sensitivity suite. Each one breaks a
/// single rule of one semantics family; the differential harness must catch
/// every one of them.
enum class Mutant {
    None,
    BigForceNoEval,            // big: force returns the lift body unevaluated
    SmallLetSwap,              // small: let substitutes the pair components swapped
    SmallDecomposeRightFirst,  // small: contexts descend into the right subterm first
    StackedStepOutSwap,        // stacked: step-out swaps the boxed circuit's tuples
    MachineTupleShiftJoins,    // machine: tuple-shift pairs up early (acts like tuple-join)
    MachineBoxSubKeepsCircuit, // machine: box-sub keeps the outer circuit instead of id_Q
    StepKindTupleJoinReal,     // correspondence: tuple-join misclassified as a real step
};

Mutant mutant_from_name(const std::string& name);
const char* to_string(Mutant m);

/// Shared evaluation resources: a private fresh-label counter scope and the
/// active mutant (None in production).
struct Runtime {
    FreshCounter counter;
    Mutant mutant = Mutant::None;

    explicit Runtime(std::uint64_t counter_start = 0, Mutant m = Mutant::None)
        : counter(counter_start), mutant(m) {}
};

/// A circuit paired with the closed term building it.
struct SmallConfig {
    CircuitPtr circ;
    Term term;
};

SmallConfig make_config(LabelledCircuit c, Term m);

struct Converged {
    CircuitPtr circ;
    Term value;
    std::uint64_t steps = 0;
};
struct Deadlocked {
    std::string state_dump;
    std::string reason;
};
struct FuelExhausted {
    std::string state_dump;
};

using RunOutcome = std::variant<Converged, Deadlocked, FuelExhausted>;

enum class OutcomeClass { Converged, Deadlocked, FuelExhausted };
OutcomeClass outcome_class(const RunOutcome& o);
const char* to_string(OutcomeClass c);

/// Step budget shared across an evaluation, including box sub-runs.
struct Fuel {
    std::uint64_t left = 0;
    bool take() {
        if (left == 0) return false;
        --left;
        return true;
    }
};

} // namespace pqm

#endif
