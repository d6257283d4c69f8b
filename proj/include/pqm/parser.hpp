// pqm: an interpreter toolchain for a Proto-Quipper-M fragment
// Copyright 2026 The pqm Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef PQM_PARSER_HPP
#define PQM_PARSER_HPP

#include <stdexcept>
#include <string>

#include "pqm/circuit.hpp"
#include "pqm/syntax.hpp"

namespace pqm {

struct ParseError : std::runtime_error {
    int line = 0, col = 0;
    ParseError(std::string msg, int line_, int col_)
        : std::runtime_error(std::move(msg)), line(line_), col(col_) {}
};

/// Parses a `.pqm` source text. `gate NAME` sugar expands to a boxed single
/// gate circuit with labels drawn from `fresh` (advanced past every `#n`
/// literal in the source first, so expansions never collide with literals).
Term parse(const std::string& src, const GateSignature& sig, FreshSource& fresh);

/// Convenience overload using the default signature and a throwaway counter.
Term parse(const std::string& src);

} // namespace pqm

#endif
