// pqm: an interpreter toolchain for a Proto-Quipper-M fragment
// Copyright 2026 The pqm Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef PQM_SYNTAX_HPP
#define PQM_SYNTAX_HPP

#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "pqm/types.hpp"

namespace pqm {

/// A label: a pointer to a free wire end of the circuit under construction.
/// Rendered `#n`; the total order on labels is the numeric order.
struct LabelId {
    std::uint64_t index = 0;
    auto operator<=>(const LabelId&) const = default;
};

std::string to_string(LabelId l);

/// A nonempty tuple of labels: a tree of LabelId leaves with binary pair
/// nodes, mirroring the term-level pair structure. No duplicate leaves.
class LabelTuple {
public:
    static LabelTuple leaf(LabelId l);
    static LabelTuple pair(LabelTuple l, LabelTuple r);

    bool is_leaf() const { return node_->leaf; }
    LabelId label() const { return node_->id; }
    const LabelTuple& left() const { return *node_->l; }
    const LabelTuple& right() const { return *node_->r; }

    /// Leaves in left-to-right order.
    std::vector<LabelId> leaves() const;
    bool has_duplicate_leaves() const;
    bool same_shape(const LabelTuple& other) const;

    bool operator==(const LabelTuple& other) const;
    bool operator!=(const LabelTuple& other) const { return !(*this == other); }

private:
    struct Node {
        bool leaf;
        LabelId id;
        std::shared_ptr<LabelTuple> l, r;
    };
    explicit LabelTuple(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    std::shared_ptr<const Node> node_;
};

std::string to_string(const LabelTuple& t);

/// Handle into the process-wide circuit store (see circuit.hpp).
struct CircuitId {
    std::uint32_t index = 0;
    auto operator<=>(const CircuitId&) const = default;
};

/// Terms of the fragment. Immutable after construction; copies share nodes.
class Term {
public:
    enum class Kind { Var, Lab, Abs, App, Pair, LetPair, Lift, Force, BoxT, ApplyC, BoxedCirc };

    Term() : Term(lab(LabelId{0})) {}

    static Term var(std::string name);
    static Term lab(LabelId l);
    static Term abs(std::string x, TypeExpr ann, Term body);
    static Term app(Term f, Term a);
    static Term pair(Term l, Term r);
    static Term let_pair(std::string x, std::string y, Term bound, Term body);
    static Term lift(Term m);
    static Term force(Term m);
    static Term box(TypeExpr t, Term m);
    static Term apply(Term c, Term k);
    static Term boxed_circ(LabelTuple ins, CircuitId circ, LabelTuple outs);

    Kind kind() const;

    const std::string& name() const;  // Var, Abs binder, LetPair x
    const std::string& name2() const; // LetPair y
    LabelId label() const;            // Lab
    const TypeExpr& ann() const;      // Abs annotation, BoxT type
    const Term& sub1() const; // Abs body, App f, Pair l, LetPair bound, Lift/Force/BoxT body, ApplyC c
    const Term& sub2() const; // App a, Pair r, LetPair body, ApplyC k
    const LabelTuple& ins() const;  // BoxedCirc
    const LabelTuple& outs() const; // BoxedCirc
    CircuitId circ_id() const;      // BoxedCirc

    /// Structural equality (names compared literally, boxed circuits by
    /// their stored graphs). Source spans are ignored.
    bool operator==(const Term& other) const;
    bool operator!=(const Term& other) const { return !(*this == other); }

    std::size_t node_count() const;

    /// Source position when the term came from the parser; 0:0 otherwise.
    int line() const;
    int col() const;
    /// A copy of this term carrying a source position.
    Term at(int line, int col) const;

    struct Node;

private:
    explicit Term(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    std::shared_ptr<const Node> node_;
};

struct Term::Node {
    Kind kind;
    std::string name, name2;
    LabelId label;
    TypeExpr ann;
    std::shared_ptr<Term> t1, t2;
    std::shared_ptr<LabelTuple> ins, outs;
    CircuitId circ;
    int line = 0, col = 0;
};

inline Term::Kind Term::kind() const { return node_->kind; }
inline const std::string& Term::name() const { return node_->name; }
inline const std::string& Term::name2() const { return node_->name2; }
inline LabelId Term::label() const { return node_->label; }
inline const TypeExpr& Term::ann() const { return node_->ann; }
inline const Term& Term::sub1() const { return *node_->t1; }
inline const Term& Term::sub2() const { return *node_->t2; }
inline const LabelTuple& Term::ins() const { return *node_->ins; }
inline const LabelTuple& Term::outs() const { return *node_->outs; }
inline CircuitId Term::circ_id() const { return node_->circ; }
inline int Term::line() const { return node_->line; }
inline int Term::col() const { return node_->col; }

std::set<std::string> free_vars(const Term& m);
std::set<LabelId> free_labels(const Term& m);

/// Every label occurring syntactically in m, including the frontiers of
/// boxed-circuit literals (but not the stored circuits' internal labels).
std::set<LabelId> all_labels(const Term& m);

/// Every identifier occurring in m, free or bound.
std::set<std::string> all_vars(const Term& m);

/// V ::= label | label tuple | \x.M | <V,W> | lift M | boxed circuit.
bool is_value(const Term& m);

/// True iff m is a label or a pair tree of labels.
bool is_label_tuple(const Term& m);

/// Conversions between label tuples and the pair terms denoting them.
Term term_of_tuple(const LabelTuple& t);
/// Fails (returns false) when m is not a label tuple.
bool tuple_of_term(const Term& m, LabelTuple& out);

/// Capture-avoiding substitution m[v/x]. When free variables of v occur in m
/// (free or bound), m's offending binders are alpha-renamed first using a
/// monotone internal counter.
Term substitute(const Term& m, const Term& v, const std::string& x);

/// Alpha-equality; boxed circuits are compared by circuit equivalence
/// (renaming-quotient) with matching tuple shapes.
bool alpha_equal(const Term& a, const Term& b);

std::string pretty_print(const Term& m);

} // namespace pqm

#endif
