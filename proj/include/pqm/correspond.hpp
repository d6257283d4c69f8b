// pqm: an interpreter toolchain for a Proto-Quipper-M fragment
// Copyright 2026 The pqm Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef PQM_CORRESPOND_HPP
#define PQM_CORRESPOND_HPP

#include <string>
#include <vector>

#include "pqm/bigstep.hpp"
#include "pqm/machine.hpp"
#include "pqm/stacked.hpp"

namespace pqm {

StackedConfig from_small_step(const SmallConfig& cfg);
SmallConfig from_small_step_inv(const StackedConfig& x);

/// Unwinds the machine stack to rebuild the term under evaluation; SubK
/// elements start new stack frames carrying their locals.
StackedConfig from_machine(const MachineConfig& mc);

MachineConfig load(const SmallConfig& cfg);
SmallConfig load_inv(const MachineConfig& mc);

/// Replays one recorded machine step on the stacked side: bookkeeping steps
/// must leave the image unchanged; real steps must advance it by exactly one
/// stacked step (allocating the very labels the machine used, validated for
/// freshness). Returns an empty string on success, a diagnostic otherwise.
std::string check_machine_step_image(const MachineTraceEntry& entry, const MachineConfig& after);

/// Compares two run outcomes: classes must match; on Converged the values
/// must be alpha-equal (boxed circuits up to renaming) and the final
/// circuits equivalent. When `exact` is set, values and circuits must be
/// equal on the nose (same counter discipline). Returns "" or a diagnostic.
std::string compare_outcomes(const RunOutcome& a, const RunOutcome& b, bool exact);

struct DifferentialReport {
    RunOutcome big, small, stacked, machine;
    /// Empty when all four agree.
    std::string disagreement;
    /// True when classes differ only because some evaluator ran out of fuel:
    /// a budget boundary, reported but not counted as a failure.
    bool inconclusive = false;
};

/// Runs all four evaluators under one fuel policy, each with a private
/// label-counter scope seeded identically.
DifferentialReport differential_run(const SmallConfig& cfg, std::uint64_t fuel,
                                    std::uint64_t counter_start, Mutant mutant = Mutant::None);

} // namespace pqm

#endif
