// pqm: an interpreter toolchain for a Proto-Quipper-M fragment
// Copyright 2026 The pqm Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef PQM_GEN_HPP
#define PQM_GEN_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "pqm/circuit.hpp"
#include "pqm/syntax.hpp"
#include "pqm/typecheck.hpp"

namespace pqm {

struct GenParams {
    unsigned max_depth = 6;
    unsigned label_budget = 3;
    std::uint64_t seed = 0;
    std::vector<std::string> gate_whitelist = {"H", "X", "CNOT", "Meas"};
    /// Production weights; unspecified productions use their defaults.
    std::map<std::string, double> weights;
};

struct GiveUp : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Type-directed generation: picks a rule whose conclusion matches the
/// target, splits the linear context among the premises, recurses. Every
/// linear entry of ctx is consumed. Throws GiveUp after bounded retries.
Term gen_welltyped(const GenParams& params, const TypeExpr& target, const TypingContext& ctx);

/// A corpus case: a closed program over an initial label context, typed at
/// `target`; run as the configuration (identity(labels), term).
struct GenCase {
    LabelContext labels;
    Term term;
    TypeExpr target;
};

/// Deterministic per (params.seed, index).
GenCase gen_case(const GenParams& params, std::uint64_t index);

/// Greedy shrinking: replaces the program by smaller well-typed variants
/// (subterms and redex contractions) while the predicate keeps failing.
/// The predicate receives the candidate with its restricted label context.
GenCase shrink(const GenCase& input, const std::function<bool(const GenCase&)>& still_failing);

} // namespace pqm

#endif
