// pqm: an interpreter toolchain for a Proto-Quipper-M fragment
// Copyright 2026 The pqm Authors.
// SPDX-License-Identifier: Apache-2.0

#include "pqm/syntax.hpp"

#include <atomic>
#include <cassert>

#include "pqm/circuit.hpp"

namespace pqm {

std::string to_string(LabelId l) { return "#" + std::to_string(l.index); }

LabelTuple LabelTuple::leaf(LabelId l) {
    auto n = std::make_shared<Node>();
    n->leaf = true;
    n->id = l;
    return LabelTuple(n);
}

LabelTuple LabelTuple::pair(LabelTuple l, LabelTuple r) {
    auto n = std::make_shared<Node>();
    n->leaf = false;
    n->l = std::make_shared<LabelTuple>(std::move(l));
    n->r = std::make_shared<LabelTuple>(std::move(r));
    return LabelTuple(n);
}

std::vector<LabelId> LabelTuple::leaves() const {
    std::vector<LabelId> out;
    auto walk = [&](auto&& self, const LabelTuple& t) -> void {
        if (t.is_leaf()) {
            out.push_back(t.label());
        } else {
            self(self, t.left());
            self(self, t.right());
        }
    };
    walk(walk, *this);
    return out;
}

bool LabelTuple::has_duplicate_leaves() const {
    auto ls = leaves();
    std::set<LabelId> seen(ls.begin(), ls.end());
    return seen.size() != ls.size();
}

bool LabelTuple::same_shape(const LabelTuple& other) const {
    if (is_leaf() != other.is_leaf()) return false;
    if (is_leaf()) return true;
    return left().same_shape(other.left()) && right().same_shape(other.right());
}

bool LabelTuple::operator==(const LabelTuple& other) const {
    if (node_ == other.node_) return true;
    if (is_leaf() != other.is_leaf()) return false;
    if (is_leaf()) return label() == other.label();
    return left() == other.left() && right() == other.right();
}

std::string to_string(const LabelTuple& t) {
    if (t.is_leaf()) return to_string(t.label());
    return "<" + to_string(t.left()) + ", " + to_string(t.right()) + ">";
}

namespace {

std::shared_ptr<const Term::Node> make_node(Term::Node n) {
    return std::make_shared<const Term::Node>(std::move(n));
}

} // namespace

Term Term::var(std::string name) {
    Node n{};
    n.kind = Kind::Var;
    n.name = std::move(name);
    return Term(make_node(std::move(n)));
}

Term Term::lab(LabelId l) {
    Node n{};
    n.kind = Kind::Lab;
    n.label = l;
    return Term(make_node(std::move(n)));
}

Term Term::abs(std::string x, TypeExpr ann, Term body) {
    Node n{};
    n.kind = Kind::Abs;
    n.name = std::move(x);
    n.ann = std::move(ann);
    n.t1 = std::make_shared<Term>(std::move(body));
    return Term(make_node(std::move(n)));
}

Term Term::app(Term f, Term a) {
    Node n{};
    n.kind = Kind::App;
    n.t1 = std::make_shared<Term>(std::move(f));
    n.t2 = std::make_shared<Term>(std::move(a));
    return Term(make_node(std::move(n)));
}

Term Term::pair(Term l, Term r) {
    Node n{};
    n.kind = Kind::Pair;
    n.t1 = std::make_shared<Term>(std::move(l));
    n.t2 = std::make_shared<Term>(std::move(r));
    return Term(make_node(std::move(n)));
}

Term Term::let_pair(std::string x, std::string y, Term bound, Term body) {
    assert(x != y && "let binders must be distinct");
    Node n{};
    n.kind = Kind::LetPair;
    n.name = std::move(x);
    n.name2 = std::move(y);
    n.t1 = std::make_shared<Term>(std::move(bound));
    n.t2 = std::make_shared<Term>(std::move(body));
    return Term(make_node(std::move(n)));
}

Term Term::lift(Term m) {
    Node n{};
    n.kind = Kind::Lift;
    n.t1 = std::make_shared<Term>(std::move(m));
    return Term(make_node(std::move(n)));
}

Term Term::force(Term m) {
    Node n{};
    n.kind = Kind::Force;
    n.t1 = std::make_shared<Term>(std::move(m));
    return Term(make_node(std::move(n)));
}

Term Term::box(TypeExpr t, Term m) {
    Node n{};
    n.kind = Kind::BoxT;
    n.ann = std::move(t);
    n.t1 = std::make_shared<Term>(std::move(m));
    return Term(make_node(std::move(n)));
}

Term Term::apply(Term c, Term k) {
    Node n{};
    n.kind = Kind::ApplyC;
    n.t1 = std::make_shared<Term>(std::move(c));
    n.t2 = std::make_shared<Term>(std::move(k));
    return Term(make_node(std::move(n)));
}

Term Term::boxed_circ(LabelTuple ins, CircuitId circ, LabelTuple outs) {
    Node n{};
    n.kind = Kind::BoxedCirc;
    n.ins = std::make_shared<LabelTuple>(std::move(ins));
    n.outs = std::make_shared<LabelTuple>(std::move(outs));
    n.circ = circ;
    return Term(make_node(std::move(n)));
}

bool Term::operator==(const Term& other) const {
    if (node_ == other.node_) return true;
    if (kind() != other.kind()) return false;
    switch (kind()) {
    case Kind::Var: return name() == other.name();
    case Kind::Lab: return label() == other.label();
    case Kind::Abs:
        return name() == other.name() && ann() == other.ann() && sub1() == other.sub1();
    case Kind::App:
    case Kind::Pair:
    case Kind::ApplyC: return sub1() == other.sub1() && sub2() == other.sub2();
    case Kind::LetPair:
        return name() == other.name() && name2() == other.name2() && sub1() == other.sub1() &&
               sub2() == other.sub2();
    case Kind::Lift:
    case Kind::Force: return sub1() == other.sub1();
    case Kind::BoxT: return ann() == other.ann() && sub1() == other.sub1();
    case Kind::BoxedCirc: {
        if (!(ins() == other.ins()) || !(outs() == other.outs())) return false;
        if (circ_id() == other.circ_id()) return true;
        // Separately interned literals are equal when the stored graphs are.
        auto& store = CircuitStore::instance();
        return store.deref(circ_id()) == store.deref(other.circ_id());
    }
    }
    return false;
}

Term Term::at(int line, int col) const {
    Node n = *node_;
    n.line = line;
    n.col = col;
    return Term(make_node(std::move(n)));
}

std::size_t Term::node_count() const {
    switch (kind()) {
    case Kind::Var:
    case Kind::Lab:
    case Kind::BoxedCirc: return 1;
    case Kind::Abs:
    case Kind::Lift:
    case Kind::Force:
    case Kind::BoxT: return 1 + sub1().node_count();
    default: return 1 + sub1().node_count() + sub2().node_count();
    }
}

std::set<std::string> free_vars(const Term& m) {
    switch (m.kind()) {
    case Term::Kind::Var: return {m.name()};
    case Term::Kind::Lab:
    case Term::Kind::BoxedCirc: return {};
    case Term::Kind::Abs: {
        auto s = free_vars(m.sub1());
        s.erase(m.name());
        return s;
    }
    case Term::Kind::Lift:
    case Term::Kind::Force:
    case Term::Kind::BoxT: return free_vars(m.sub1());
    case Term::Kind::LetPair: {
        auto s = free_vars(m.sub2());
        s.erase(m.name());
        s.erase(m.name2());
        auto b = free_vars(m.sub1());
        s.insert(b.begin(), b.end());
        return s;
    }
    default: {
        auto s = free_vars(m.sub1());
        auto r = free_vars(m.sub2());
        s.insert(r.begin(), r.end());
        return s;
    }
    }
}

std::set<LabelId> free_labels(const Term& m) {
    switch (m.kind()) {
    case Term::Kind::Var:
    case Term::Kind::BoxedCirc: return {};
    case Term::Kind::Lab: return {m.label()};
    case Term::Kind::Abs:
    case Term::Kind::Lift:
    case Term::Kind::Force:
    case Term::Kind::BoxT: return free_labels(m.sub1());
    default: {
        auto s = free_labels(m.sub1());
        auto r = free_labels(m.sub2());
        s.insert(r.begin(), r.end());
        return s;
    }
    }
}

std::set<LabelId> all_labels(const Term& m) {
    switch (m.kind()) {
    case Term::Kind::Var: return {};
    case Term::Kind::Lab: return {m.label()};
    case Term::Kind::BoxedCirc: {
        std::set<LabelId> s;
        for (auto l : m.ins().leaves()) s.insert(l);
        for (auto l : m.outs().leaves()) s.insert(l);
        return s;
    }
    case Term::Kind::Abs:
    case Term::Kind::Lift:
    case Term::Kind::Force:
    case Term::Kind::BoxT: return all_labels(m.sub1());
    default: {
        auto s = all_labels(m.sub1());
        auto r = all_labels(m.sub2());
        s.insert(r.begin(), r.end());
        return s;
    }
    }
}

std::set<std::string> all_vars(const Term& m) {
    switch (m.kind()) {
    case Term::Kind::Var: return {m.name()};
    case Term::Kind::Lab:
    case Term::Kind::BoxedCirc: return {};
    case Term::Kind::Abs: {
        auto s = all_vars(m.sub1());
        s.insert(m.name());
        return s;
    }
    case Term::Kind::Lift:
    case Term::Kind::Force:
    case Term::Kind::BoxT: return all_vars(m.sub1());
    case Term::Kind::LetPair: {
        auto s = all_vars(m.sub1());
        auto b = all_vars(m.sub2());
        s.insert(b.begin(), b.end());
        s.insert(m.name());
        s.insert(m.name2());
        return s;
    }
    default: {
        auto s = all_vars(m.sub1());
        auto r = all_vars(m.sub2());
        s.insert(r.begin(), r.end());
        return s;
    }
    }
}

bool is_value(const Term& m) {
    switch (m.kind()) {
    case Term::Kind::Lab:
    case Term::Kind::Abs:
    case Term::Kind::Lift:
    case Term::Kind::BoxedCirc: return true;
    case Term::Kind::Pair: return is_value(m.sub1()) && is_value(m.sub2());
    default: return false;
    }
}

bool is_label_tuple(const Term& m) {
    switch (m.kind()) {
    case Term::Kind::Lab: return true;
    case Term::Kind::Pair: return is_label_tuple(m.sub1()) && is_label_tuple(m.sub2());
    default: return false;
    }
}

Term term_of_tuple(const LabelTuple& t) {
    if (t.is_leaf()) return Term::lab(t.label());
    return Term::pair(term_of_tuple(t.left()), term_of_tuple(t.right()));
}

bool tuple_of_term(const Term& m, LabelTuple& out) {
    if (m.kind() == Term::Kind::Lab) {
        out = LabelTuple::leaf(m.label());
        return true;
    }
    if (m.kind() == Term::Kind::Pair) {
        LabelTuple l = LabelTuple::leaf(LabelId{0}), r = l;
        if (!tuple_of_term(m.sub1(), l) || !tuple_of_term(m.sub2(), r)) return false;
        out = LabelTuple::pair(l, r);
        return true;
    }
    return false;
}

namespace {

std::atomic<std::uint64_t> g_rename_counter{0};

std::string fresh_ident(const std::string& base) {
    auto pos = base.find('\'');
    std::string stem = pos == std::string::npos ? base : base.substr(0, pos);
    return stem + "'" + std::to_string(++g_rename_counter);
}

// Renames every binder of m whose bound name is in `avoid`.
Term rename_binders(const Term& m, const std::set<std::string>& avoid) {
    switch (m.kind()) {
    case Term::Kind::Var:
    case Term::Kind::Lab:
    case Term::Kind::BoxedCirc: return m;
    case Term::Kind::Abs: {
        Term body = rename_binders(m.sub1(), avoid);
        if (avoid.count(m.name())) {
            std::string nx = fresh_ident(m.name());
            while (avoid.count(nx) || all_vars(body).count(nx)) nx = fresh_ident(m.name());
            body = substitute(body, Term::var(nx), m.name());
            return Term::abs(nx, m.ann(), body);
        }
        return Term::abs(m.name(), m.ann(), body);
    }
    case Term::Kind::Lift: return Term::lift(rename_binders(m.sub1(), avoid));
    case Term::Kind::Force: return Term::force(rename_binders(m.sub1(), avoid));
    case Term::Kind::BoxT: return Term::box(m.ann(), rename_binders(m.sub1(), avoid));
    case Term::Kind::App:
        return Term::app(rename_binders(m.sub1(), avoid), rename_binders(m.sub2(), avoid));
    case Term::Kind::Pair:
        return Term::pair(rename_binders(m.sub1(), avoid), rename_binders(m.sub2(), avoid));
    case Term::Kind::ApplyC:
        return Term::apply(rename_binders(m.sub1(), avoid), rename_binders(m.sub2(), avoid));
    case Term::Kind::LetPair: {
        Term bound = rename_binders(m.sub1(), avoid);
        Term body = rename_binders(m.sub2(), avoid);
        std::string x = m.name(), y = m.name2();
        if (avoid.count(x)) {
            std::string nx = fresh_ident(x);
            while (avoid.count(nx) || all_vars(body).count(nx) || nx == y) nx = fresh_ident(x);
            body = substitute(body, Term::var(nx), x);
            x = nx;
        }
        if (avoid.count(y)) {
            std::string ny = fresh_ident(y);
            while (avoid.count(ny) || all_vars(body).count(ny) || ny == x) ny = fresh_ident(y);
            body = substitute(body, Term::var(ny), y);
            y = ny;
        }
        return Term::let_pair(x, y, bound, body);
    }
    }
    return m;
}

Term subst_unchecked(const Term& m, const Term& v, const std::string& x) {
    switch (m.kind()) {
    case Term::Kind::Var: return m.name() == x ? v : m;
    case Term::Kind::Lab:
    case Term::Kind::BoxedCirc: return m;
    case Term::Kind::Abs:
        if (m.name() == x) return m; // shadowed
        return Term::abs(m.name(), m.ann(), subst_unchecked(m.sub1(), v, x));
    case Term::Kind::App:
        return Term::app(subst_unchecked(m.sub1(), v, x), subst_unchecked(m.sub2(), v, x));
    case Term::Kind::Pair:
        return Term::pair(subst_unchecked(m.sub1(), v, x), subst_unchecked(m.sub2(), v, x));
    case Term::Kind::LetPair: {
        Term bound = subst_unchecked(m.sub1(), v, x);
        if (m.name() == x || m.name2() == x) return Term::let_pair(m.name(), m.name2(), bound, m.sub2());
        return Term::let_pair(m.name(), m.name2(), bound, subst_unchecked(m.sub2(), v, x));
    }
    case Term::Kind::Lift: return Term::lift(subst_unchecked(m.sub1(), v, x));
    case Term::Kind::Force: return Term::force(subst_unchecked(m.sub1(), v, x));
    case Term::Kind::BoxT: return Term::box(m.ann(), subst_unchecked(m.sub1(), v, x));
    case Term::Kind::ApplyC:
        return Term::apply(subst_unchecked(m.sub1(), v, x), subst_unchecked(m.sub2(), v, x));
    }
    return m;
}

} // namespace

Term substitute(const Term& m, const Term& v, const std::string& x) {
    auto fv = free_vars(v);
    if (!fv.empty()) {
        auto mv = all_vars(m);
        bool clash = false;
        for (const auto& n : fv) {
            if (mv.count(n)) {
                clash = true;
                break;
            }
        }
        if (clash) return subst_unchecked(rename_binders(m, fv), v, x);
    }
    return subst_unchecked(m, v, x);
}

namespace {

bool boxed_equiv(const Term& a, const Term& b) {
    if (!a.ins().same_shape(b.ins()) || !a.outs().same_shape(b.outs())) return false;
    auto& store = CircuitStore::instance();
    const auto& ca = store.deref(a.circ_id());
    const auto& cb = store.deref(b.circ_id());
    auto fa = canonical_form(ca);
    auto fb = canonical_form(cb);
    if (!(fa == fb)) return false;
    // The interface tuples must point at corresponding wires.
    auto agree = [](const CanonicalCircuit& f, const CanonicalCircuit& g,
                    const std::vector<LabelId>& x, const std::vector<LabelId>& y) {
        for (std::size_t i = 0; i < x.size(); ++i) {
            auto ix = f.relabel.find(x[i]);
            auto iy = g.relabel.find(y[i]);
            if (ix == f.relabel.end() || iy == g.relabel.end() || ix->second != iy->second)
                return false;
        }
        return true;
    };
    return agree(fa, fb, a.ins().leaves(), b.ins().leaves()) &&
           agree(fa, fb, a.outs().leaves(), b.outs().leaves());
}

bool alpha_eq(const Term& a, const Term& b, std::map<std::string, std::string>& ab,
              std::map<std::string, std::string>& ba) {
    if (a.kind() != b.kind()) return false;
    switch (a.kind()) {
    case Term::Kind::Var: {
        auto ia = ab.find(a.name());
        auto ib = ba.find(b.name());
        if (ia != ab.end() || ib != ba.end())
            return ia != ab.end() && ib != ba.end() && ia->second == b.name() && ib->second == a.name();
        return a.name() == b.name();
    }
    case Term::Kind::Lab: return a.label() == b.label();
    case Term::Kind::BoxedCirc: return boxed_equiv(a, b);
    case Term::Kind::Abs: {
        if (a.ann() != b.ann()) return false;
        auto sa = ab, sb = ba;
        sa[a.name()] = b.name();
        sb[b.name()] = a.name();
        return alpha_eq(a.sub1(), b.sub1(), sa, sb);
    }
    case Term::Kind::LetPair: {
        if (!alpha_eq(a.sub1(), b.sub1(), ab, ba)) return false;
        auto sa = ab, sb = ba;
        sa[a.name()] = b.name();
        sb[b.name()] = a.name();
        sa[a.name2()] = b.name2();
        sb[b.name2()] = a.name2();
        return alpha_eq(a.sub2(), b.sub2(), sa, sb);
    }
    case Term::Kind::Lift:
    case Term::Kind::Force: return alpha_eq(a.sub1(), b.sub1(), ab, ba);
    case Term::Kind::BoxT:
        return a.ann() == b.ann() && alpha_eq(a.sub1(), b.sub1(), ab, ba);
    default:
        return alpha_eq(a.sub1(), b.sub1(), ab, ba) && alpha_eq(a.sub2(), b.sub2(), ab, ba);
    }
}

} // namespace

bool alpha_equal(const Term& a, const Term& b) {
    std::map<std::string, std::string> ab, ba;
    return alpha_eq(a, b, ab, ba);
}

namespace {

// Precedence levels: 0 = open (lambda/let/lift/force/box bodies),
// 1 = application, 2 = atom.
void print(const Term& m, int prec, std::string& out);

void print_open(const Term& m, std::string& out) { print(m, 0, out); }

bool single_gate_name(const Term& m, std::string& name) {
    const auto& c = CircuitStore::instance().deref(m.circ_id());
    if (c.gates.size() != 1) return false;
    // The literal must expose exactly the one gate's ports.
    if (c.inputs.size() != c.gates[0].ins.size() || c.outputs.size() != c.gates[0].outs.size())
        return false;
    name = c.gates[0].name;
    return true;
}

void print(const Term& m, int prec, std::string& out) {
    switch (m.kind()) {
    case Term::Kind::Var:
        out += m.name();
        return;
    case Term::Kind::Lab:
        out += to_string(m.label());
        return;
    case Term::Kind::Pair:
        out += "<";
        print_open(m.sub1(), out);
        out += ", ";
        print_open(m.sub2(), out);
        out += ">";
        return;
    case Term::Kind::ApplyC:
        out += "apply(";
        print_open(m.sub1(), out);
        out += ", ";
        print_open(m.sub2(), out);
        out += ")";
        return;
    case Term::Kind::BoxedCirc: {
        std::string g;
        if (single_gate_name(m, g)) {
            bool paren = prec >= 2;
            if (paren) out += "(";
            out += "gate " + g;
            if (paren) out += ")";
        } else {
            // General circuit literals have no surface syntax; this form is
            // for diagnostics only and does not re-parse.
            out += "(" + to_string(m.ins()) + ", circ:" + std::to_string(m.circ_id().index) +
                   ", " + to_string(m.outs()) + ")";
        }
        return;
    }
    case Term::Kind::App: {
        bool paren = prec >= 2;
        if (paren) out += "(";
        print(m.sub1(), 1, out);
        out += " ";
        print(m.sub2(), 2, out);
        if (paren) out += ")";
        return;
    }
    case Term::Kind::Abs: {
        bool paren = prec >= 1;
        if (paren) out += "(";
        out += "\\" + m.name() + ":" + to_string(m.ann()) + ". ";
        print_open(m.sub1(), out);
        if (paren) out += ")";
        return;
    }
    case Term::Kind::LetPair: {
        bool paren = prec >= 1;
        if (paren) out += "(";
        out += "let <" + m.name() + ", " + m.name2() + "> = ";
        print_open(m.sub1(), out);
        out += " in ";
        print_open(m.sub2(), out);
        if (paren) out += ")";
        return;
    }
    case Term::Kind::Lift:
    case Term::Kind::Force:
    case Term::Kind::BoxT: {
        bool paren = prec >= 1;
        if (paren) out += "(";
        if (m.kind() == Term::Kind::Lift) out += "lift ";
        else if (m.kind() == Term::Kind::Force) out += "force ";
        else out += "box[" + to_string(m.ann()) + "] ";
        print_open(m.sub1(), out);
        if (paren) out += ")";
        return;
    }
    }
}

} // namespace

std::string pretty_print(const Term& m) {
    std::string out;
    print(m, 0, out);
    return out;
}

} // namespace pqm
