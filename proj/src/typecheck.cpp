// pqm: an interpreter toolchain for a Proto-Quipper-M fragment
// Copyright 2026 The pqm Authors.
// SPDX-License-Identifier: Apache-2.0

#include "pqm/typecheck.hpp"

#include <algorithm>
#include <optional>
#include <vector>

namespace pqm {

const char* to_string(TypeErrorKind k) {
    switch (k) {
    case TypeErrorKind::LinearReuse: return "LinearReuse";
    case TypeErrorKind::LinearUnused: return "LinearUnused";
    case TypeErrorKind::LabelUnused: return "LabelUnused";
    case TypeErrorKind::Mismatch: return "Mismatch";
    case TypeErrorKind::NotAFunction: return "NotAFunction";
    case TypeErrorKind::NotABang: return "NotABang";
    case TypeErrorKind::NotACirc: return "NotACirc";
    case TypeErrorKind::NotATuple: return "NotATuple";
    case TypeErrorKind::UnboundVar: return "UnboundVar";
    case TypeErrorKind::UnboundLabel: return "UnboundLabel";
    case TypeErrorKind::LiftNotClosedLinear: return "LiftNotClosedLinear";
    case TypeErrorKind::BoxShape: return "BoxShape";
    case TypeErrorKind::FrontierMismatch: return "FrontierMismatch";
    }
    return "?";
}

std::string to_string(const TypeError& e) {
    std::string out = to_string(e.kind);
    out += " @ " + std::to_string(e.line) + ":" + std::to_string(e.col);
    out += " — " + e.message;
    if (!e.site.empty()) out += " in `" + e.site + "`";
    return out;
}

namespace {

struct CheckFail {
    TypeError err;
};

[[noreturn]] void bail(TypeErrorKind k, std::string msg, const Term& site) {
    throw CheckFail{TypeError{k, std::move(msg), pretty_print(site), site.line(), site.col()}};
}

// Types a label tuple against a label context: the tuple's leaves must be
// exactly the context's domain with matching wire types; the resulting
// simple M-type mirrors the tuple tree.
std::optional<TypeExpr> tuple_type(const LabelTuple& t, const LabelContext& q) {
    auto leaves = t.leaves();
    if (leaves.size() != q.size()) return std::nullopt;
    std::set<LabelId> seen;
    for (auto l : leaves) {
        if (!q.count(l) || !seen.insert(l).second) return std::nullopt;
    }
    auto build = [&](auto&& self, const LabelTuple& tt) -> TypeExpr {
        if (tt.is_leaf()) return TypeExpr::wire(q.at(tt.label()));
        return TypeExpr::tensor(self(self, tt.left()), self(self, tt.right()));
    };
    return build(build, t);
}

TypeExpr boxed_circ_type(const Term& m) {
    const auto& c = CircuitStore::instance().deref(m.circ_id());
    auto t = tuple_type(m.ins(), c.inputs);
    if (!t)
        bail(TypeErrorKind::BoxShape, "input tuple does not match the stored circuit's input frontier", m);
    auto u = tuple_type(m.outs(), c.outputs);
    if (!u)
        bail(TypeErrorKind::BoxShape, "output tuple does not match the stored circuit's output frontier", m);
    return TypeExpr::circ(*t, *u);
}

class Checker {
public:
    explicit Checker(const TypingContext& ctx) {
        for (const auto& [name, ty] : ctx.vars) vars_[name].push_back({ty, is_parameter(ty), true});
        labels_ = ctx.labels;
    }

    TypeExpr check(const Term& m) {
        switch (m.kind()) {
        case Term::Kind::Var: {
            auto it = vars_.find(m.name());
            if (it == vars_.end() || it->second.empty())
                bail(TypeErrorKind::UnboundVar, "variable " + m.name() + " is not in scope", m);
            auto& entry = it->second.back();
            if (!entry.live)
                bail(TypeErrorKind::LinearReuse, "linear variable " + m.name() + " used twice", m);
            if (!entry.param) entry.live = false;
            return entry.ty;
        }
        case Term::Kind::Lab: {
            auto it = labels_.find(m.label());
            if (it == labels_.end()) {
                if (consumed_labels_.count(m.label()))
                    bail(TypeErrorKind::LinearReuse, "label " + to_string(m.label()) + " used twice", m);
                bail(TypeErrorKind::UnboundLabel, "label " + to_string(m.label()) + " is not in scope", m);
            }
            TypeExpr ty = TypeExpr::wire(it->second);
            consumed_labels_.insert(m.label());
            labels_.erase(it);
            return ty;
        }
        case Term::Kind::Abs: {
            push(m.name(), m.ann());
            TypeExpr body = check(m.sub1());
            pop(m.name(), m);
            return TypeExpr::lolli(m.ann(), body);
        }
        case Term::Kind::App: {
            TypeExpr f = check(m.sub1());
            if (f.kind() != TypeExpr::Kind::Lolli)
                bail(TypeErrorKind::NotAFunction, "expected a linear function, got " + to_string(f), m);
            TypeExpr a = check(m.sub2());
            if (a != f.left())
                bail(TypeErrorKind::Mismatch,
                     "expected " + to_string(f.left()) + ", got " + to_string(a), m);
            return f.right();
        }
        case Term::Kind::Pair: return TypeExpr::tensor(check(m.sub1()), check(m.sub2()));
        case Term::Kind::LetPair: {
            TypeExpr bound = check(m.sub1());
            if (bound.kind() != TypeExpr::Kind::Tensor)
                bail(TypeErrorKind::NotATuple, "expected a tensor, got " + to_string(bound), m);
            push(m.name(), bound.left());
            push(m.name2(), bound.right());
            TypeExpr body = check(m.sub2());
            pop(m.name2(), m);
            pop(m.name(), m);
            return body;
        }
        case Term::Kind::Lift: {
            auto labels_before = labels_;
            auto linear_before = live_linear_names();
            TypeExpr a = check(m.sub1());
            if (labels_ != labels_before || live_linear_names() != linear_before)
                bail(TypeErrorKind::LiftNotClosedLinear,
                     "lift body consumes a linear variable or label", m);
            return TypeExpr::bang(a);
        }
        case Term::Kind::Force: {
            TypeExpr a = check(m.sub1());
            if (a.kind() != TypeExpr::Kind::Bang)
                bail(TypeErrorKind::NotABang, "expected a !-type, got " + to_string(a), m);
            return a.left();
        }
        case Term::Kind::BoxT: {
            if (!is_simple_m_type(m.ann()))
                bail(TypeErrorKind::BoxShape, "box annotation must be a simple M-type", m);
            TypeExpr a = check(m.sub1());
            if (a.kind() != TypeExpr::Kind::Bang || a.left().kind() != TypeExpr::Kind::Lolli)
                bail(TypeErrorKind::Mismatch,
                     "box expects a value of type !(T -o U), got " + to_string(a), m);
            const TypeExpr& t = a.left().left();
            const TypeExpr& u = a.left().right();
            if (t != m.ann())
                bail(TypeErrorKind::Mismatch, "box annotation " + to_string(m.ann()) +
                                                  " does not match function domain " + to_string(t), m);
            if (!is_simple_m_type(u))
                bail(TypeErrorKind::BoxShape, "boxed function codomain must be a simple M-type", m);
            return TypeExpr::circ(t, u);
        }
        case Term::Kind::ApplyC: {
            TypeExpr c = check(m.sub1());
            if (c.kind() != TypeExpr::Kind::Circ)
                bail(TypeErrorKind::NotACirc, "expected a Circ type, got " + to_string(c), m);
            TypeExpr k = check(m.sub2());
            if (k != c.left())
                bail(TypeErrorKind::Mismatch,
                     "expected " + to_string(c.left()) + ", got " + to_string(k), m);
            return c.right();
        }
        case Term::Kind::BoxedCirc: return boxed_circ_type(m);
        }
        bail(TypeErrorKind::Mismatch, "unreachable", m);
    }

    void require_empty_leftover(const Term& site) {
        for (const auto& [name, stack] : vars_) {
            if (!stack.empty() && stack.back().live && !stack.back().param)
                bail(TypeErrorKind::LinearUnused, "linear variable " + name + " goes unused", site);
        }
        if (!labels_.empty())
            bail(TypeErrorKind::LabelUnused, "labels " + to_string(labels_) + " go unused", site);
    }

private:
    struct VarEntry {
        TypeExpr ty;
        bool param;
        bool live;
    };

    void push(const std::string& x, const TypeExpr& ty) {
        vars_[x].push_back({ty, is_parameter(ty), true});
    }

    void pop(const std::string& x, const Term& site) {
        auto& stack = vars_[x];
        if (!stack.back().param && stack.back().live)
            bail(TypeErrorKind::LinearUnused, "linear variable " + x + " goes unused", site);
        stack.pop_back();
    }

    std::set<std::string> live_linear_names() const {
        std::set<std::string> out;
        for (const auto& [name, stack] : vars_)
            if (!stack.empty() && stack.back().live && !stack.back().param) out.insert(name);
        return out;
    }

    std::map<std::string, std::vector<VarEntry>> vars_;
    LabelContext labels_;
    std::set<LabelId> consumed_labels_;
};

} // namespace

TypeResult typecheck(const TypingContext& ctx, const Term& m) {
    try {
        Checker checker(ctx);
        TypeExpr ty = checker.check(m);
        checker.require_empty_leftover(m);
        return ty;
    } catch (const CheckFail& f) {
        return f.err;
    }
}

WellTypedResult welltyped_config(const LabelContext& q_in, const LabelledCircuit& c, const Term& m,
                                 const TypeExpr& a, const LabelContext& q_out) {
    if (c.inputs != q_in)
        return TypeError{TypeErrorKind::FrontierMismatch,
                         "circuit inputs " + to_string(c.inputs) + " differ from " + to_string(q_in), ""};
    LabelContext q2;
    auto fl = free_labels(m);
    for (const auto& [l, w] : c.outputs)
        if (fl.count(l)) q2[l] = w;
    // The rest of the frontier must be exactly q_out.
    LabelContext rest;
    for (const auto& [l, w] : c.outputs)
        if (!q2.count(l)) rest[l] = w;
    if (rest != q_out)
        return TypeError{TypeErrorKind::FrontierMismatch,
                         "frontier " + to_string(c.outputs) + " does not split as " + to_string(q_out) +
                             " plus the term's labels",
                         pretty_print(m)};
    TypingContext ctx;
    ctx.labels = q2;
    auto r = typecheck(ctx, m);
    if (auto* err = std::get_if<TypeError>(&r)) return *err;
    if (std::get<TypeExpr>(r) != a)
        return TypeError{TypeErrorKind::Mismatch,
                         "configuration has type " + to_string(std::get<TypeExpr>(r)) + ", expected " +
                             to_string(a),
                         pretty_print(m)};
    return true;
}

namespace {

// --- Declarative oracle -----------------------------------------------
//
// Enumerates every split of the linear portion at app/tuple/let/apply, per
// the declarative rules. Parameter variables ride along unsplit.

struct OracleCtx {
    std::vector<std::pair<std::string, TypeExpr>> params;
    std::vector<std::pair<std::string, TypeExpr>> linear; // sorted by name
    std::vector<std::pair<LabelId, WireType>> labels;     // sorted by id
};

std::optional<TypeExpr> derive(const OracleCtx& ctx, const Term& m);

// Splits indexed by bitmask over linear entries then labels.
template <typename F>
bool for_each_split(const OracleCtx& ctx, F&& f) {
    std::size_t n = ctx.linear.size() + ctx.labels.size();
    for (std::uint64_t mask = 0; mask < (1ull << n); ++mask) {
        OracleCtx a, b;
        a.params = ctx.params;
        b.params = ctx.params;
        for (std::size_t i = 0; i < ctx.linear.size(); ++i)
            ((mask >> i) & 1 ? a : b).linear.push_back(ctx.linear[i]);
        for (std::size_t i = 0; i < ctx.labels.size(); ++i)
            ((mask >> (ctx.linear.size() + i)) & 1 ? a : b).labels.push_back(ctx.labels[i]);
        if (f(a, b)) return true;
    }
    return false;
}

std::optional<TypeExpr> lookup_var(const OracleCtx& ctx, const std::string& x, bool& linear) {
    for (const auto& [n, t] : ctx.linear)
        if (n == x) {
            linear = true;
            return t;
        }
    for (const auto& [n, t] : ctx.params)
        if (n == x) {
            linear = false;
            return t;
        }
    return std::nullopt;
}

OracleCtx without_var(const OracleCtx& ctx, const std::string& x) {
    OracleCtx out = ctx;
    auto drop = [&](auto& vec) {
        vec.erase(std::remove_if(vec.begin(), vec.end(), [&](const auto& p) { return p.first == x; }),
                  vec.end());
    };
    drop(out.params);
    drop(out.linear);
    return out;
}

OracleCtx with_var(const OracleCtx& ctx, const std::string& x, const TypeExpr& ty) {
    OracleCtx out = without_var(ctx, x);
    if (is_parameter(ty)) out.params.emplace_back(x, ty);
    else out.linear.emplace_back(x, ty);
    return out;
}

std::optional<TypeExpr> derive(const OracleCtx& ctx, const Term& m) {
    switch (m.kind()) {
    case Term::Kind::Var: {
        if (!ctx.labels.empty()) return std::nullopt;
        bool linear = false;
        auto ty = lookup_var(ctx, m.name(), linear);
        if (!ty) return std::nullopt;
        if (linear && ctx.linear.size() != 1) return std::nullopt;
        if (!linear && !ctx.linear.empty()) return std::nullopt;
        return ty;
    }
    case Term::Kind::Lab: {
        if (!ctx.linear.empty()) return std::nullopt;
        if (ctx.labels.size() != 1 || ctx.labels[0].first != m.label()) return std::nullopt;
        return TypeExpr::wire(ctx.labels[0].second);
    }
    case Term::Kind::Abs: {
        auto body = derive(with_var(ctx, m.name(), m.ann()), m.sub1());
        if (!body) return std::nullopt;
        return TypeExpr::lolli(m.ann(), *body);
    }
    case Term::Kind::App: {
        std::optional<TypeExpr> result;
        for_each_split(ctx, [&](const OracleCtx& a, const OracleCtx& b) {
            auto f = derive(a, m.sub1());
            if (!f || f->kind() != TypeExpr::Kind::Lolli) return false;
            auto arg = derive(b, m.sub2());
            if (!arg || *arg != f->left()) return false;
            result = f->right();
            return true;
        });
        return result;
    }
    case Term::Kind::Pair: {
        std::optional<TypeExpr> result;
        for_each_split(ctx, [&](const OracleCtx& a, const OracleCtx& b) {
            auto l = derive(a, m.sub1());
            if (!l) return false;
            auto r = derive(b, m.sub2());
            if (!r) return false;
            result = TypeExpr::tensor(*l, *r);
            return true;
        });
        return result;
    }
    case Term::Kind::LetPair: {
        std::optional<TypeExpr> result;
        for_each_split(ctx, [&](const OracleCtx& a, const OracleCtx& b) {
            auto bound = derive(a, m.sub1());
            if (!bound || bound->kind() != TypeExpr::Kind::Tensor) return false;
            auto inner = with_var(with_var(b, m.name(), bound->left()), m.name2(), bound->right());
            auto body = derive(inner, m.sub2());
            if (!body) return false;
            result = body;
            return true;
        });
        return result;
    }
    case Term::Kind::Lift: {
        if (!ctx.linear.empty() || !ctx.labels.empty()) return std::nullopt;
        auto a = derive(ctx, m.sub1());
        if (!a) return std::nullopt;
        return TypeExpr::bang(*a);
    }
    case Term::Kind::Force: {
        auto a = derive(ctx, m.sub1());
        if (!a || a->kind() != TypeExpr::Kind::Bang) return std::nullopt;
        return a->left();
    }
    case Term::Kind::BoxT: {
        if (!is_simple_m_type(m.ann())) return std::nullopt;
        auto a = derive(ctx, m.sub1());
        if (!a || a->kind() != TypeExpr::Kind::Bang || a->left().kind() != TypeExpr::Kind::Lolli)
            return std::nullopt;
        if (a->left().left() != m.ann() || !is_simple_m_type(a->left().right())) return std::nullopt;
        return TypeExpr::circ(a->left().left(), a->left().right());
    }
    case Term::Kind::ApplyC: {
        std::optional<TypeExpr> result;
        for_each_split(ctx, [&](const OracleCtx& a, const OracleCtx& b) {
            auto c = derive(a, m.sub1());
            if (!c || c->kind() != TypeExpr::Kind::Circ) return false;
            auto k = derive(b, m.sub2());
            if (!k || *k != c->left()) return false;
            result = c->right();
            return true;
        });
        return result;
    }
    case Term::Kind::BoxedCirc: {
        if (!ctx.linear.empty() || !ctx.labels.empty()) return std::nullopt;
        try {
            return boxed_circ_type(m);
        } catch (const CheckFail&) {
            return std::nullopt;
        }
    }
    }
    return std::nullopt;
}

OracleCtx oracle_ctx(const TypingContext& ctx) {
    OracleCtx out;
    for (const auto& [name, ty] : ctx.vars) {
        if (is_parameter(ty)) out.params.emplace_back(name, ty);
        else out.linear.emplace_back(name, ty);
    }
    for (const auto& [l, w] : ctx.labels) out.labels.emplace_back(l, w);
    return out;
}

// The declarative rules never bind a name twice (alpha-convention); rename
// every binder apart so the enumeration need not deal with shadowing.
Term uniquify(const Term& m, std::map<std::string, std::string>& env, unsigned& next) {
    auto fresh = [&](const std::string& base) { return base + "#u" + std::to_string(++next); };
    switch (m.kind()) {
    case Term::Kind::Var: {
        auto it = env.find(m.name());
        return it == env.end() ? m : Term::var(it->second);
    }
    case Term::Kind::Lab:
    case Term::Kind::BoxedCirc: return m;
    case Term::Kind::Abs: {
        std::string nx = fresh(m.name());
        auto saved = env;
        env[m.name()] = nx;
        Term body = uniquify(m.sub1(), env, next);
        env = saved;
        return Term::abs(nx, m.ann(), body);
    }
    case Term::Kind::LetPair: {
        Term bound = uniquify(m.sub1(), env, next);
        std::string nx = fresh(m.name()), ny = fresh(m.name2());
        auto saved = env;
        env[m.name()] = nx;
        env[m.name2()] = ny;
        Term body = uniquify(m.sub2(), env, next);
        env = saved;
        return Term::let_pair(nx, ny, bound, body);
    }
    case Term::Kind::Lift: return Term::lift(uniquify(m.sub1(), env, next));
    case Term::Kind::Force: return Term::force(uniquify(m.sub1(), env, next));
    case Term::Kind::BoxT: return Term::box(m.ann(), uniquify(m.sub1(), env, next));
    case Term::Kind::App:
        return Term::app(uniquify(m.sub1(), env, next), uniquify(m.sub2(), env, next));
    case Term::Kind::Pair:
        return Term::pair(uniquify(m.sub1(), env, next), uniquify(m.sub2(), env, next));
    case Term::Kind::ApplyC:
        return Term::apply(uniquify(m.sub1(), env, next), uniquify(m.sub2(), env, next));
    }
    return m;
}

} // namespace

std::optional<TypeExpr> derivable_type(const TypingContext& ctx, const Term& m) {
    std::map<std::string, std::string> env;
    unsigned next = 0;
    return derive(oracle_ctx(ctx), uniquify(m, env, next));
}

bool derivable(const TypingContext& ctx, const Term& m, const TypeExpr& a) {
    auto t = derivable_type(ctx, m);
    return t && *t == a;
}

} // namespace pqm
