// pqm: an interpreter toolchain for a Proto-Quipper-M fragment
// Copyright 2026 The pqm Authors.
// SPDX-License-Identifier: Apache-2.0

#include "pqm/types.hpp"

namespace pqm {

TypeExpr TypeExpr::wire(WireType w) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Wire;
    n->wire = std::move(w);
    return TypeExpr(n);
}

TypeExpr TypeExpr::tensor(TypeExpr a, TypeExpr b) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Tensor;
    n->a = std::make_shared<TypeExpr>(std::move(a));
    n->b = std::make_shared<TypeExpr>(std::move(b));
    return TypeExpr(n);
}

TypeExpr TypeExpr::lolli(TypeExpr a, TypeExpr b) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Lolli;
    n->a = std::make_shared<TypeExpr>(std::move(a));
    n->b = std::make_shared<TypeExpr>(std::move(b));
    return TypeExpr(n);
}

TypeExpr TypeExpr::bang(TypeExpr a) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Bang;
    n->a = std::make_shared<TypeExpr>(std::move(a));
    return TypeExpr(n);
}

TypeExpr TypeExpr::circ(TypeExpr t, TypeExpr u) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Circ;
    n->a = std::make_shared<TypeExpr>(std::move(t));
    n->b = std::make_shared<TypeExpr>(std::move(u));
    return TypeExpr(n);
}

bool TypeExpr::operator==(const TypeExpr& other) const {
    if (node_ == other.node_) return true;
    if (kind() != other.kind()) return false;
    switch (kind()) {
    case Kind::Wire: return wire_name() == other.wire_name();
    case Kind::Bang: return left() == other.left();
    case Kind::Tensor:
    case Kind::Lolli:
    case Kind::Circ: return left() == other.left() && right() == other.right();
    }
    return false;
}

bool is_parameter(const TypeExpr& a) {
    switch (a.kind()) {
    case TypeExpr::Kind::Bang:
    case TypeExpr::Kind::Circ: return true;
    case TypeExpr::Kind::Tensor: return is_parameter(a.left()) && is_parameter(a.right());
    default: return false;
    }
}

bool is_simple_m_type(const TypeExpr& a) {
    switch (a.kind()) {
    case TypeExpr::Kind::Wire: return true;
    case TypeExpr::Kind::Tensor: return is_simple_m_type(a.left()) && is_simple_m_type(a.right());
    default: return false;
    }
}

namespace {

// Precedence: atoms > ! > * (right-assoc) > -o (right-assoc).
void print(const TypeExpr& a, int min_prec, std::string& out) {
    switch (a.kind()) {
    case TypeExpr::Kind::Wire:
        out += a.wire_name();
        return;
    case TypeExpr::Kind::Circ:
        out += "Circ(";
        print(a.left(), 0, out);
        out += ", ";
        print(a.right(), 0, out);
        out += ")";
        return;
    case TypeExpr::Kind::Bang:
        out += "!";
        print(a.left(), 3, out);
        return;
    case TypeExpr::Kind::Tensor: {
        bool paren = min_prec > 2;
        if (paren) out += "(";
        print(a.left(), 3, out);
        out += "*";
        print(a.right(), 2, out);
        if (paren) out += ")";
        return;
    }
    case TypeExpr::Kind::Lolli: {
        bool paren = min_prec > 1;
        if (paren) out += "(";
        print(a.left(), 2, out);
        out += " -o ";
        print(a.right(), 1, out);
        if (paren) out += ")";
        return;
    }
    }
}

} // namespace

std::string to_string(const TypeExpr& a) {
    std::string out;
    print(a, 0, out);
    return out;
}

} // namespace pqm
