// pqm: an interpreter toolchain for a Proto-Quipper-M fragment
// Copyright 2026 The pqm Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef PQM_BIGSTEP_HPP
#define PQM_BIGSTEP_HPP

#include <variant>

#include "pqm/eval.hpp"

namespace pqm {

struct BigValue {
    CircuitPtr circ;
    Term value;
};
struct BigError {
    Term site;
    std::string reason;
};
struct BigOutOfFuel {};

using BigOutcome = std::variant<BigValue, BigError, BigOutOfFuel>;

/// The evaluation relation as a fuel-bounded recursive evaluator. Fuel
/// counts rule applications (one per evaluation node), shared across box
/// sub-evaluations; exhaustion returns BigOutOfFuel, never BigError.
BigOutcome big_eval(const SmallConfig& cfg, std::uint64_t fuel, Runtime& rt);

/// Outcome classes aligned with the other evaluators (Error maps to
/// Deadlocked). Converged.steps reports the number of evaluation nodes.
RunOutcome run_big(const SmallConfig& cfg, std::uint64_t fuel, Runtime& rt);

} // namespace pqm

#endif
