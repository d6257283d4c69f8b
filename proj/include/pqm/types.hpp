// pqm: an interpreter toolchain for a Proto-Quipper-M fragment
// Copyright 2026 The pqm Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef PQM_TYPES_HPP
#define PQM_TYPES_HPP

#include <memory>
#include <string>

namespace pqm {

/// A wire type name, drawn from the active gate signature (default: Qubit, Bit).
using WireType = std::string;

inline const WireType kQubit = "Qubit";
inline const WireType kBit = "Bit";

/// Types: wire types, tensor, linear arrow, bang, and Circ(T,U).
class TypeExpr {
public:
    enum class Kind { Wire, Tensor, Lolli, Bang, Circ };

    TypeExpr() : TypeExpr(wire(kQubit)) {}

    static TypeExpr wire(WireType w);
    static TypeExpr tensor(TypeExpr a, TypeExpr b);
    static TypeExpr lolli(TypeExpr a, TypeExpr b);
    static TypeExpr bang(TypeExpr a);
    static TypeExpr circ(TypeExpr t, TypeExpr u);

    Kind kind() const { return node_->kind; }
    const WireType& wire_name() const { return node_->wire; }
    /// Left component (Tensor/Lolli/Circ) or the body of a Bang.
    const TypeExpr& left() const { return *node_->a; }
    const TypeExpr& right() const { return *node_->b; }

    bool operator==(const TypeExpr& other) const;
    bool operator!=(const TypeExpr& other) const { return !(*this == other); }

private:
    struct Node {
        Kind kind;
        WireType wire;               // Wire
        std::shared_ptr<TypeExpr> a; // Tensor/Lolli/Circ left, Bang body
        std::shared_ptr<TypeExpr> b; // Tensor/Lolli/Circ right
    };
    explicit TypeExpr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    std::shared_ptr<const Node> node_;
};

/// Parameter types P,R ::= P*R | !A | Circ(T,U); exempt from linearity.
bool is_parameter(const TypeExpr& a);

/// Simple M-types T,U ::= wire | T*U; the types of label tuples.
bool is_simple_m_type(const TypeExpr& a);

std::string to_string(const TypeExpr& a);

} // namespace pqm

#endif
