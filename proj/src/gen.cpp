// pqm: an interpreter toolchain for a Proto-Quipper-M fragment
// Copyright 2026 The pqm Authors.
// SPDX-License-Identifier: Apache-2.0

#include "pqm/gen.hpp"

#include <algorithm>
#include <optional>

namespace pqm {

namespace {

// One linear resource to be consumed exactly once.
struct Item {
    bool is_label;
    LabelId label;
    WireType wire;
    std::string var;
    TypeExpr ty; // the item's type (Wire(wire) for labels)
};

using Res = std::vector<Item>;

TypeExpr item_type(const Item& it) { return it.ty; }

TypeExpr bundle_type(const Res& res) {
    TypeExpr t = item_type(res.back());
    for (std::size_t i = res.size() - 1; i-- > 0;) t = TypeExpr::tensor(item_type(res[i]), t);
    return t;
}

double default_weight(const std::string& production) {
    static const std::map<std::string, double> defaults = {
        {"var", 2.0},   {"label", 2.5}, {"gate", 1.5}, {"abs", 1.5},  {"app", 1.6},
        {"pair", 1.2},  {"let", 1.2},   {"lift", 1.5}, {"force", 0.9}, {"box", 1.6},
        {"apply", 3.0},
    };
    auto it = defaults.find(production);
    return it == defaults.end() ? 1.0 : it->second;
}

class TermGen {
public:
    TermGen(const GenParams& params, const GateSignature& sig, std::uint64_t seed)
        : params_(params), sig_(sig), rng_(seed) {}

    Term generate(const TypeExpr& target, const TypingContext& ctx) {
        params_list_.clear();
        Res res;
        std::uint64_t max_label = 0;
        for (const auto& [name, ty] : ctx.vars) {
            if (is_parameter(ty)) params_list_.emplace_back(name, ty);
            else res.push_back(Item{false, {}, {}, name, ty});
        }
        for (const auto& [l, w] : ctx.labels) {
            res.push_back(Item{true, l, w, {}, TypeExpr::wire(w)});
            max_label = std::max(max_label, l.index + 1);
        }
        local_labels_ = FreshCounter(std::max<std::uint64_t>(max_label, 1000));
        attempts_ = 600;
        return gen(target, res, params_.max_depth);
    }

private:
    double weight(const std::string& p) const {
        auto it = params_.weights.find(p);
        return it == params_.weights.end() ? default_weight(p) : it->second;
    }

    std::uint64_t rand_below(std::uint64_t n) {
        return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(rng_);
    }

    bool coin(double p) { return std::uniform_real_distribution<double>(0, 1)(rng_) < p; }

    std::string fresh_var() { return "v" + std::to_string(var_counter_++); }

    [[noreturn]] void give_up(const char* why) { throw GiveUp(why); }

    void spend() {
        if (attempts_ == 0) give_up("attempt budget exhausted");
        --attempts_;
    }

    // Gate helpers -------------------------------------------------------

    static TypeExpr wires_type(const std::vector<WireType>& ws) {
        TypeExpr t = TypeExpr::wire(ws.back());
        for (std::size_t i = ws.size() - 1; i-- > 0;) t = TypeExpr::tensor(TypeExpr::wire(ws[i]), t);
        return t;
    }

    struct GateShape {
        std::string name;
        TypeExpr in, out;
    };

    std::vector<GateShape> gates_with_out(const TypeExpr& out) const {
        std::vector<GateShape> hits;
        for (const auto& name : params_.gate_whitelist) {
            const GateDecl* d = sig_.find_gate(name);
            if (!d || d->arity_in.empty() || d->arity_out.empty()) continue;
            TypeExpr o = wires_type(d->arity_out);
            if (o == out) hits.push_back(GateShape{name, wires_type(d->arity_in), o});
        }
        return hits;
    }

    std::optional<GateShape> gate_matching(const TypeExpr& in, const TypeExpr& out) const {
        for (const auto& name : params_.gate_whitelist) {
            const GateDecl* d = sig_.find_gate(name);
            if (!d || d->arity_in.empty() || d->arity_out.empty()) continue;
            if (wires_type(d->arity_in) == in && wires_type(d->arity_out) == out)
                return GateShape{name, in, out};
        }
        return std::nullopt;
    }

    Term gate_literal(const std::string& name) {
        auto g = boxed_gate(name, sig_, local_labels_);
        if (!g) give_up("gate not boxable");
        return Term::boxed_circ(g->ins, g->circ, g->outs);
    }

    // Splits -------------------------------------------------------------

    std::pair<Res, Res> random_split(const Res& res) {
        Res a, b;
        for (const auto& it : res) (coin(0.5) ? a : b).push_back(it);
        return {a, b};
    }

    // Matches the atoms of a tensor tree against the items by type; used to
    // split resources for pair targets in one guided shot.
    static void atoms_of(const TypeExpr& t, std::vector<TypeExpr>& out) {
        if (t.kind() == TypeExpr::Kind::Tensor) {
            atoms_of(t.left(), out);
            atoms_of(t.right(), out);
        } else {
            out.push_back(t);
        }
    }

    std::optional<std::pair<Res, Res>> guided_split(const TypeExpr& left, const Res& res) {
        std::vector<TypeExpr> need;
        atoms_of(left, need);
        Res a, b = res;
        for (const auto& want : need) {
            bool found = false;
            for (std::size_t i = 0; i < b.size(); ++i) {
                if (item_type(b[i]) == want) {
                    a.push_back(b[i]);
                    b.erase(b.begin() + i);
                    found = true;
                    break;
                }
            }
            if (!found) return std::nullopt;
        }
        return std::make_pair(std::move(a), std::move(b));
    }

    // Bridge types for app with an empty argument share.
    TypeExpr empty_res_bridge() {
        switch (rand_below(4)) {
        case 0: return TypeExpr::circ(TypeExpr::wire(kQubit), TypeExpr::wire(kQubit));
        case 1: return TypeExpr::bang(TypeExpr::lolli(TypeExpr::wire(kQubit), TypeExpr::wire(kQubit)));
        case 2: return TypeExpr::lolli(TypeExpr::wire(kQubit), TypeExpr::wire(kQubit));
        default:
            return TypeExpr::bang(
                TypeExpr::lolli(TypeExpr::wire(kQubit), TypeExpr::wire(kQubit)));
        }
    }

    // Generation ---------------------------------------------------------

    Term gen(const TypeExpr& target, const Res& res, unsigned depth) {
        spend();
        // Exact leaf hits are always on the menu.
        std::vector<std::pair<std::string, double>> menu;
        bool res_empty = res.empty();
        if (!res_empty && res.size() == 1) {
            if (res[0].is_label && target == item_type(res[0])) menu.emplace_back("label", weight("label"));
            if (!res[0].is_label && target == item_type(res[0])) menu.emplace_back("var", weight("var"));
        }
        if (res_empty) {
            for (const auto& [name, ty] : params_list_)
                if (ty == target) {
                    menu.emplace_back("var", weight("var"));
                    break;
                }
            if (target.kind() == TypeExpr::Kind::Circ &&
                gate_matching(target.left(), target.right()))
                menu.emplace_back("gate", weight("gate"));
        }
        if (depth > 0) {
            if (target.kind() == TypeExpr::Kind::Lolli) menu.emplace_back("abs", weight("abs"));
            if (target.kind() == TypeExpr::Kind::Tensor) menu.emplace_back("pair", weight("pair"));
            if (target.kind() == TypeExpr::Kind::Bang && res_empty)
                menu.emplace_back("lift", weight("lift"));
            if (target.kind() == TypeExpr::Kind::Circ && res_empty)
                menu.emplace_back("box", weight("box"));
            if (res_empty && depth >= 2) menu.emplace_back("force", weight("force"));
            if (is_simple_m_type(target) && !gates_with_out(target).empty())
                menu.emplace_back("apply", weight("apply"));
            if (depth >= 2) menu.emplace_back("app", weight("app"));
            if (depth >= 2) menu.emplace_back("let", weight("let"));
        }
        if (menu.empty()) give_up("no production applies");

        // Weighted choice with up to a handful of re-draws on failure.
        for (int round = 0; round < 6; ++round) {
            double total = 0;
            for (auto& [p, w] : menu) total += w;
            double pick = std::uniform_real_distribution<double>(0, total)(rng_);
            std::string chosen = menu.back().first;
            for (auto& [p, w] : menu) {
                if (pick < w) {
                    chosen = p;
                    break;
                }
                pick -= w;
            }
            try {
                return attempt(chosen, target, res, depth);
            } catch (const GiveUp&) {
                if (attempts_ == 0) throw;
                // Drop the failed production for this node and retry.
                menu.erase(std::remove_if(menu.begin(), menu.end(),
                                          [&](const auto& pw) { return pw.first == chosen; }),
                           menu.end());
                if (menu.empty()) give_up("all productions failed");
            }
        }
        give_up("no production succeeded");
    }

    Term attempt(const std::string& production, const TypeExpr& target, const Res& res,
                 unsigned depth) {
        if (production == "label") return Term::lab(res[0].label);
        if (production == "var") {
            if (!res.empty()) return Term::var(res[0].var);
            std::vector<std::string> names;
            for (const auto& [name, ty] : params_list_)
                if (ty == target) names.push_back(name);
            return Term::var(names[rand_below(names.size())]);
        }
        if (production == "gate") {
            auto g = gate_matching(target.left(), target.right());
            return gate_literal(g->name);
        }
        if (production == "abs") {
            const TypeExpr& dom = target.left();
            std::string x = fresh_var();
            if (is_parameter(dom)) {
                params_list_.emplace_back(x, dom);
                try {
                    Term body = gen(target.right(), res, depth - 1);
                    params_list_.pop_back();
                    return Term::abs(x, dom, body);
                } catch (...) {
                    params_list_.pop_back();
                    throw;
                }
            }
            Res inner = res;
            inner.push_back(Item{false, {}, {}, x, dom});
            return Term::abs(x, dom, gen(target.right(), inner, depth - 1));
        }
        if (production == "pair") {
            auto guided = guided_split(target.left(), res);
            std::pair<Res, Res> split = guided ? *guided : random_split(res);
            Term l = gen(target.left(), split.first, depth - 1);
            Term r = gen(target.right(), split.second, depth - 1);
            return Term::pair(std::move(l), std::move(r));
        }
        if (production == "lift") return Term::lift(gen(target.left(), {}, depth - 1));
        if (production == "force")
            return Term::force(gen(TypeExpr::bang(target), {}, depth - 1));
        if (production == "box")
            return Term::box(target.left(),
                             gen(TypeExpr::bang(TypeExpr::lolli(target.left(), target.right())), {},
                                 depth - 1));
        if (production == "apply") {
            auto gates = gates_with_out(target);
            const GateShape& g = gates[rand_below(gates.size())];
            Term circ = gen(TypeExpr::circ(g.in, g.out), {}, depth - 1);
            Term arg = gen(g.in, res, depth - 1);
            return Term::apply(std::move(circ), std::move(arg));
        }
        if (production == "app") {
            Res r_arg = res, r_fun;
            if (!res.empty() && coin(0.3)) {
                auto split = random_split(res);
                r_fun = std::move(split.first);
                r_arg = std::move(split.second);
            }
            TypeExpr bridge = r_arg.empty() ? empty_res_bridge() : bundle_type(r_arg);
            Term fun = gen(TypeExpr::lolli(bridge, target), r_fun, depth - 1);
            Term arg = gen(bridge, r_arg, depth - 1);
            return Term::app(std::move(fun), std::move(arg));
        }
        if (production == "let") {
            Res r_bound = res, r_body;
            if (!res.empty() && coin(0.25)) {
                auto split = random_split(res);
                r_bound = std::move(split.first);
                r_body = std::move(split.second);
            }
            TypeExpr bt = TypeExpr::tensor(TypeExpr::wire(kQubit), TypeExpr::wire(kQubit));
            if (r_bound.size() >= 2) {
                Res first(r_bound.begin(), r_bound.begin() + r_bound.size() / 2);
                Res second(r_bound.begin() + r_bound.size() / 2, r_bound.end());
                bt = TypeExpr::tensor(bundle_type(first), bundle_type(second));
            } else if (r_bound.size() == 1) {
                bt = TypeExpr::tensor(item_type(r_bound[0]), empty_res_bridge());
            } else {
                bt = TypeExpr::tensor(empty_res_bridge(), empty_res_bridge());
            }
            Term bound = gen(bt, r_bound, depth - 1);
            std::string x = fresh_var(), y = fresh_var();
            Res body_res = r_body;
            std::size_t pushed_params = 0;
            if (is_parameter(bt.left())) {
                params_list_.emplace_back(x, bt.left());
                ++pushed_params;
            } else {
                body_res.push_back(Item{false, {}, {}, x, bt.left()});
            }
            if (is_parameter(bt.right())) {
                params_list_.emplace_back(y, bt.right());
                ++pushed_params;
            } else {
                body_res.push_back(Item{false, {}, {}, y, bt.right()});
            }
            try {
                Term body = gen(target, body_res, depth - 1);
                for (std::size_t i = 0; i < pushed_params; ++i) params_list_.pop_back();
                return Term::let_pair(x, y, std::move(bound), std::move(body));
            } catch (...) {
                for (std::size_t i = 0; i < pushed_params; ++i) params_list_.pop_back();
                throw;
            }
        }
        give_up("unknown production");
    }

    const GenParams& params_;
    const GateSignature& sig_;
    std::mt19937_64 rng_;
    std::vector<std::pair<std::string, TypeExpr>> params_list_;
    FreshCounter local_labels_{1000};
    unsigned var_counter_ = 0;
    unsigned attempts_ = 0;
};

} // namespace

Term gen_welltyped(const GenParams& params, const TypeExpr& target, const TypingContext& ctx) {
    TermGen g(params, default_signature(), params.seed);
    for (int tries = 0; tries < 12; ++tries) {
        try {
            return g.generate(target, ctx);
        } catch (const GiveUp&) {
            continue;
        }
    }
    throw GiveUp("generation failed after repeated attempts");
}

GenCase gen_case(const GenParams& params, std::uint64_t index) {
    std::mt19937_64 rng(params.seed * 0x9e3779b97f4a7c15ull + index + 1);
    GenParams local = params;
    local.seed = rng();

    unsigned n_labels = std::uniform_int_distribution<unsigned>(0, params.label_budget)(rng);
    LabelContext q0;
    for (unsigned i = 0; i < n_labels; ++i)
        q0[LabelId{i}] = std::uniform_int_distribution<int>(0, 3)(rng) == 0 ? kBit : kQubit;

    TypeExpr target = TypeExpr::wire(kQubit);
    if (q0.empty()) {
        switch (std::uniform_int_distribution<int>(0, 3)(rng)) {
        case 0: target = TypeExpr::circ(TypeExpr::wire(kQubit), TypeExpr::wire(kQubit)); break;
        case 1: target = TypeExpr::bang(TypeExpr::lolli(TypeExpr::wire(kQubit), TypeExpr::wire(kQubit))); break;
        case 2: target = TypeExpr::lolli(TypeExpr::wire(kQubit), TypeExpr::wire(kQubit)); break;
        default: target = TypeExpr::circ(TypeExpr::wire(kQubit), TypeExpr::wire(kBit)); break;
        }
    } else {
        // The program transports the initial wires, some measured to bits.
        std::vector<TypeExpr> parts;
        for (const auto& [l, w] : q0) {
            if (w == kQubit && std::uniform_int_distribution<int>(0, 3)(rng) == 0)
                parts.push_back(TypeExpr::wire(kBit));
            else
                parts.push_back(TypeExpr::wire(w));
        }
        target = parts.back();
        for (std::size_t i = parts.size() - 1; i-- > 0;) target = TypeExpr::tensor(parts[i], target);
    }

    TypingContext ctx;
    ctx.labels = q0;
    for (int retry = 0;; ++retry) {
        try {
            Term m = gen_welltyped(local, target, ctx);
            return GenCase{q0, std::move(m), std::move(target)};
        } catch (const GiveUp&) {
            if (retry >= 24) throw;
            local.seed = rng();
        }
    }
}

namespace {

void contraction_candidates(const Term& m, std::vector<Term>& out);

// Rebuilds m with `child` substituted at one position; used to enumerate
// one-step rewrites.
template <typename F>
void rewrite_children(const Term& m, std::vector<Term>& out, F&& rewrite_child) {
    auto add = [&](Term t) { out.push_back(std::move(t)); };
    switch (m.kind()) {
    case Term::Kind::Abs: {
        std::vector<Term> subs;
        rewrite_child(m.sub1(), subs);
        for (auto& s : subs) add(Term::abs(m.name(), m.ann(), std::move(s)));
        break;
    }
    case Term::Kind::Lift: {
        std::vector<Term> subs;
        rewrite_child(m.sub1(), subs);
        for (auto& s : subs) add(Term::lift(std::move(s)));
        break;
    }
    case Term::Kind::Force: {
        std::vector<Term> subs;
        rewrite_child(m.sub1(), subs);
        for (auto& s : subs) add(Term::force(std::move(s)));
        break;
    }
    case Term::Kind::BoxT: {
        std::vector<Term> subs;
        rewrite_child(m.sub1(), subs);
        for (auto& s : subs) add(Term::box(m.ann(), std::move(s)));
        break;
    }
    case Term::Kind::App:
    case Term::Kind::Pair:
    case Term::Kind::ApplyC:
    case Term::Kind::LetPair: {
        std::vector<Term> l, r;
        rewrite_child(m.sub1(), l);
        rewrite_child(m.sub2(), r);
        for (auto& s : l) {
            if (m.kind() == Term::Kind::App) add(Term::app(std::move(s), m.sub2()));
            else if (m.kind() == Term::Kind::Pair) add(Term::pair(std::move(s), m.sub2()));
            else if (m.kind() == Term::Kind::ApplyC) add(Term::apply(std::move(s), m.sub2()));
            else add(Term::let_pair(m.name(), m.name2(), std::move(s), m.sub2()));
        }
        for (auto& s : r) {
            if (m.kind() == Term::Kind::App) add(Term::app(m.sub1(), std::move(s)));
            else if (m.kind() == Term::Kind::Pair) add(Term::pair(m.sub1(), std::move(s)));
            else if (m.kind() == Term::Kind::ApplyC) add(Term::apply(m.sub1(), std::move(s)));
            else add(Term::let_pair(m.name(), m.name2(), m.sub1(), std::move(s)));
        }
        break;
    }
    default: break;
    }
}

void contraction_candidates(const Term& m, std::vector<Term>& out) {
    // Root contractions; substituting a value for its variable keeps types.
    if (m.kind() == Term::Kind::App && m.sub1().kind() == Term::Kind::Abs && is_value(m.sub2()))
        out.push_back(substitute(m.sub1().sub1(), m.sub2(), m.sub1().name()));
    if (m.kind() == Term::Kind::LetPair && m.sub1().kind() == Term::Kind::Pair &&
        is_value(m.sub1())) {
        out.push_back(substitute(substitute(m.sub2(), m.sub1().sub1(), m.name()), m.sub1().sub2(),
                                 m.name2()));
    }
    if (m.kind() == Term::Kind::Force && m.sub1().kind() == Term::Kind::Lift)
        out.push_back(m.sub1().sub1());
    rewrite_children(m, out, [](const Term& c, std::vector<Term>& subs) {
        contraction_candidates(c, subs);
    });
}

void subterms(const Term& m, std::vector<Term>& out) {
    out.push_back(m);
    switch (m.kind()) {
    case Term::Kind::Var:
    case Term::Kind::Lab:
    case Term::Kind::BoxedCirc: return;
    case Term::Kind::Abs:
    case Term::Kind::Lift:
    case Term::Kind::Force:
    case Term::Kind::BoxT: subterms(m.sub1(), out); return;
    default:
        subterms(m.sub1(), out);
        subterms(m.sub2(), out);
        return;
    }
}

std::optional<GenCase> as_case(const Term& t, const LabelContext& q0) {
    if (!free_vars(t).empty()) return std::nullopt;
    LabelContext q;
    for (auto l : free_labels(t)) {
        auto it = q0.find(l);
        if (it == q0.end()) return std::nullopt;
        q[l] = it->second;
    }
    TypingContext ctx;
    ctx.labels = q;
    auto r = typecheck(ctx, t);
    if (std::holds_alternative<TypeError>(r)) return std::nullopt;
    return GenCase{std::move(q), t, std::get<TypeExpr>(r)};
}

} // namespace

GenCase shrink(const GenCase& input, const std::function<bool(const GenCase&)>& still_failing) {
    if (!still_failing(input)) return input;
    GenCase best = input;
    bool improved = true;
    while (improved) {
        improved = false;
        std::vector<Term> candidates;
        subterms(best.term, candidates);
        contraction_candidates(best.term, candidates);
        std::sort(candidates.begin(), candidates.end(),
                  [](const Term& a, const Term& b) { return a.node_count() < b.node_count(); });
        for (const auto& t : candidates) {
            if (t.node_count() >= best.term.node_count()) break;
            auto c = as_case(t, input.labels);
            if (!c) continue;
            if (still_failing(*c)) {
                best = *c;
                improved = true;
                break;
            }
        }
    }
    return best;
}

} // namespace pqm
