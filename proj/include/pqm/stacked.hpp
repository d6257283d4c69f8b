// pqm: an interpreter toolchain for a Proto-Quipper-M fragment
// Copyright 2026 The pqm Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef PQM_STACKED_HPP
#define PQM_STACKED_HPP

#include <optional>
#include <variant>
#include <vector>

#include "pqm/eval.hpp"
#include "pqm/smallstep.hpp"

namespace pqm {

/// One frame of a stacked configuration. `locals` holds the labels made
/// locally available by the step-in that pushed the frame; the bottom frame
/// has none (explicit empty marker keeps well-formedness checkable).
struct StackFrame {
    CircuitPtr circ;
    Term term;
    std::optional<LabelTuple> locals;

    bool operator==(const StackFrame& other) const {
        return *circ == *other.circ && term == other.term && locals == other.locals;
    }
};

/// Frames head-first (frames[0] is the active frame).
struct StackedConfig {
    std::vector<StackFrame> frames;
    bool operator==(const StackedConfig&) const = default;
};

/// Last frame has empty locals; every other frame has locals.
bool well_formed(const StackedConfig& x);

struct StuckStacked {
    std::string reason;
};

using StackedStepResult = std::variant<StackedConfig, StuckStacked>;

/// One of head / step-in / step-out, whichever applies.
StackedStepResult stacked_step(const StackedConfig& x, Runtime& rt);

/// Converged iff a single frame with a value and no locals is reached.
RunOutcome run_stacked(const StackedConfig& x, std::uint64_t fuel, Runtime& rt,
                       std::vector<StackedConfig>* trace = nullptr);

/// Conservative reachability check: every non-head frame's term has the
/// shape E[box_T(lift N)], the state step-in leaves behind.
bool is_reachable_shape(const StackedConfig& x);

std::vector<std::string> applicable_stacked_rules(const StackedConfig& x);

std::string to_string(const StackedConfig& x);

} // namespace pqm

#endif
