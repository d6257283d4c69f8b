// pqm: an interpreter toolchain for a Proto-Quipper-M fragment
// Copyright 2026 The pqm Authors.
// SPDX-License-Identifier: Apache-2.0

#include "pqm/circuit.hpp"

#include <algorithm>
#include <sstream>

#include "json.hpp"

namespace pqm {

std::string to_string(const LabelContext& q) {
    std::string out = "{";
    bool first = true;
    for (const auto& [l, w] : q) {
        if (!first) out += ", ";
        first = false;
        out += to_string(l) + ":" + w;
    }
    return out + "}";
}

bool GateSignature::has_wire_type(const WireType& w) const {
    return std::find(wire_types.begin(), wire_types.end(), w) != wire_types.end();
}

const GateDecl* GateSignature::find_gate(const std::string& name) const {
    auto it = gates.find(name);
    return it == gates.end() ? nullptr : &it->second;
}

const GateSignature& default_signature() {
    static const GateSignature sig = [] {
        GateSignature s;
        s.wire_types = {kQubit, kBit};
        s.gates["H"] = {{kQubit}, {kQubit}};
        s.gates["X"] = {{kQubit}, {kQubit}};
        s.gates["CNOT"] = {{kQubit, kQubit}, {kQubit, kQubit}};
        s.gates["Meas"] = {{kQubit}, {kBit}};
        s.gates["Init"] = {{}, {kQubit}};
        return s;
    }();
    return sig;
}

GateSignature signature_from_json(const std::string& json_text) {
    auto j = nlohmann::json::parse(json_text);
    GateSignature s;
    for (const auto& w : j.at("wire_types")) s.wire_types.push_back(w.get<std::string>());
    for (const auto& [name, decl] : j.at("gates").items()) {
        GateDecl d;
        for (const auto& w : decl.at("ins")) d.arity_in.push_back(w.get<std::string>());
        for (const auto& w : decl.at("outs")) d.arity_out.push_back(w.get<std::string>());
        for (const auto& w : d.arity_in)
            if (!s.has_wire_type(w)) throw CircuitError("gate " + name + " uses undeclared wire type " + w);
        for (const auto& w : d.arity_out)
            if (!s.has_wire_type(w)) throw CircuitError("gate " + name + " uses undeclared wire type " + w);
        s.gates[name] = std::move(d);
    }
    return s;
}

void validate(const LabelledCircuit& c, const GateSignature* sig) {
    // Wires live across the gate list: produced exactly once, consumed
    // exactly once, consumption after production.
    std::map<LabelId, WireType> live = c.inputs;
    std::set<LabelId> ever;
    for (const auto& [l, w] : c.inputs) ever.insert(l);
    for (std::size_t gi = 0; gi < c.gates.size(); ++gi) {
        const auto& g = c.gates[gi];
        const GateDecl* decl = sig ? sig->find_gate(g.name) : nullptr;
        if (sig && !decl) throw CircuitError("unknown gate " + g.name);
        if (decl && (decl->arity_in.size() != g.ins.size() || decl->arity_out.size() != g.outs.size()))
            throw CircuitError("gate " + g.name + " arity mismatch");
        for (std::size_t i = 0; i < g.ins.size(); ++i) {
            auto it = live.find(g.ins[i]);
            if (it == live.end())
                throw CircuitError("gate " + g.name + " at position " + std::to_string(gi) +
                                   " consumes unavailable label " + to_string(g.ins[i]));
            if (decl && it->second != decl->arity_in[i])
                throw CircuitError("gate " + g.name + " input " + std::to_string(i) + " has wire type " +
                                   it->second + ", expected " + decl->arity_in[i]);
            live.erase(it);
        }
        for (std::size_t i = 0; i < g.outs.size(); ++i) {
            if (ever.count(g.outs[i]) || live.count(g.outs[i]))
                throw CircuitError("label " + to_string(g.outs[i]) + " produced twice");
            ever.insert(g.outs[i]);
            live[g.outs[i]] = decl ? decl->arity_out[i] : WireType{};
        }
    }
    if (sig) {
        if (live != c.outputs)
            throw CircuitError("outputs do not match the dangling frontier: got " + to_string(c.outputs) +
                               ", expected " + to_string(live));
    } else {
        // Without a signature we cannot infer gate-output wire types; check
        // the label sets and the input-passthrough types only.
        if (live.size() != c.outputs.size())
            throw CircuitError("outputs do not match the dangling frontier");
        for (const auto& [l, w] : c.outputs) {
            auto it = live.find(l);
            if (it == live.end()) throw CircuitError("output label " + to_string(l) + " is not dangling");
            if (!it->second.empty() && it->second != w)
                throw CircuitError("output label " + to_string(l) + " wire type mismatch");
        }
    }
}

LabelledCircuit identity(const LabelContext& q) { return LabelledCircuit{q, {}, q}; }

LabelledCircuit rename(const LabelledCircuit& c, const std::map<LabelId, LabelId>& map) {
    auto ren = [&](LabelId l) {
        auto it = map.find(l);
        return it == map.end() ? l : it->second;
    };
    auto labels = circuit_labels(c);
    std::set<LabelId> image;
    for (auto l : labels)
        if (!image.insert(ren(l)).second) throw CircuitError("rename map is not injective on the circuit");
    LabelledCircuit out;
    for (const auto& [l, w] : c.inputs) {
        if (!out.inputs.emplace(ren(l), w).second) throw CircuitError("rename collides on inputs");
    }
    for (const auto& g : c.gates) {
        GateApp ng{g.name, {}, {}};
        for (auto l : g.ins) ng.ins.push_back(ren(l));
        for (auto l : g.outs) ng.outs.push_back(ren(l));
        out.gates.push_back(std::move(ng));
    }
    for (const auto& [l, w] : c.outputs) {
        if (!out.outputs.emplace(ren(l), w).second) throw CircuitError("rename collides on outputs");
    }
    return out;
}

CanonicalCircuit canonical_form(const LabelledCircuit& c) {
    CanonicalCircuit f;
    std::uint64_t next = 0;
    for (const auto& [l, w] : c.inputs) {
        f.relabel[l] = next++;
        f.input_types.push_back(w);
    }
    for (const auto& g : c.gates) {
        CanonicalCircuit::CanonGate cg{g.name, {}, {}};
        for (auto l : g.ins) {
            auto it = f.relabel.find(l);
            cg.ins.push_back(it == f.relabel.end() ? (f.relabel[l] = next++) : it->second);
        }
        for (auto l : g.outs) {
            auto it = f.relabel.find(l);
            cg.outs.push_back(it == f.relabel.end() ? (f.relabel[l] = next++) : it->second);
        }
        f.gates.push_back(std::move(cg));
    }
    for (const auto& [l, w] : c.outputs) {
        auto it = f.relabel.find(l);
        std::uint64_t id = it == f.relabel.end() ? (f.relabel[l] = next++) : it->second;
        f.outputs.emplace_back(id, w);
    }
    std::sort(f.outputs.begin(), f.outputs.end());
    return f;
}

bool equiv(const LabelledCircuit& a, const LabelledCircuit& b) {
    auto fa = canonical_form(a);
    auto fb = canonical_form(b);
    return fa.input_types == fb.input_types && fa.gates == fb.gates && fa.outputs == fb.outputs;
}

std::set<LabelId> circuit_labels(const LabelledCircuit& c) {
    std::set<LabelId> s;
    for (const auto& [l, w] : c.inputs) s.insert(l);
    for (const auto& g : c.gates) {
        s.insert(g.ins.begin(), g.ins.end());
        s.insert(g.outs.begin(), g.outs.end());
    }
    for (const auto& [l, w] : c.outputs) s.insert(l);
    return s;
}

std::vector<LabelId> FreshCounter::take(std::size_t n, std::uint64_t floor) {
    std::uint64_t start = next_.load();
    for (;;) {
        std::uint64_t base = std::max(start, floor);
        if (next_.compare_exchange_weak(start, base + n)) {
            std::vector<LabelId> out;
            out.reserve(n);
            for (std::size_t i = 0; i < n; ++i) out.push_back(LabelId{base + i});
            return out;
        }
    }
}

void FreshCounter::advance_to(std::uint64_t v) {
    std::uint64_t cur = next_.load();
    while (cur < v && !next_.compare_exchange_weak(cur, v)) {
    }
}

std::vector<LabelId> ScriptedFresh::take(std::size_t n, std::uint64_t floor) {
    // The floor encodes the counter discipline, which a replay deliberately
    // bypasses; occurrence-level freshness is still enforced by the callers.
    (void)floor;
    if (pos_ + n > ids_.size()) throw CircuitError("scripted fresh source exhausted");
    std::vector<LabelId> out(ids_.begin() + pos_, ids_.begin() + pos_ + n);
    pos_ += n;
    return out;
}

std::pair<LabelContext, LabelTuple> freshlabels(const Term& m, const TypeExpr& t, FreshSource& fresh) {
    if (!is_simple_m_type(t)) throw CircuitError("freshlabels requires a simple M-type, got " + to_string(t));
    auto occurring = all_labels(m);
    std::uint64_t floor = 0;
    for (auto l : occurring) floor = std::max(floor, l.index + 1);
    std::vector<WireType> wires;
    auto collect = [&](auto&& self, const TypeExpr& ty) -> void {
        if (ty.kind() == TypeExpr::Kind::Wire) {
            wires.push_back(ty.wire_name());
        } else {
            self(self, ty.left());
            self(self, ty.right());
        }
    };
    collect(collect, t);
    auto ids = fresh.take(wires.size(), floor);
    for (auto l : ids)
        if (occurring.count(l))
            throw CircuitError("fresh label " + to_string(l) + " occurs in the term");
    LabelContext q;
    for (std::size_t i = 0; i < ids.size(); ++i) q[ids[i]] = wires[i];
    std::size_t pos = 0;
    auto build = [&](auto&& self, const TypeExpr& ty) -> LabelTuple {
        if (ty.kind() == TypeExpr::Kind::Wire) return LabelTuple::leaf(ids[pos++]);
        auto l = self(self, ty.left());
        auto r = self(self, ty.right());
        return LabelTuple::pair(std::move(l), std::move(r));
    };
    LabelTuple tup = build(build, t);
    return {std::move(q), std::move(tup)};
}

std::pair<LabelledCircuit, LabelTuple> append(const LabelledCircuit& c, const LabelTuple& k,
                                              const LabelTuple& ins, const LabelledCircuit& d,
                                              const LabelTuple& outs, FreshSource& fresh) {
    if (!k.same_shape(ins))
        throw CircuitError("ShapeMismatch: argument tuple " + to_string(k) +
                           " does not match circuit input shape " + to_string(ins));
    auto k_leaves = k.leaves();
    auto in_leaves = ins.leaves();
    {
        std::set<LabelId> seen;
        for (auto l : k_leaves)
            if (!seen.insert(l).second)
                throw CircuitError("UnknownOutputLabel: duplicate label " + to_string(l) +
                                   " in argument tuple");
    }
    std::map<LabelId, LabelId> ren;
    for (std::size_t i = 0; i < k_leaves.size(); ++i) {
        auto ko = c.outputs.find(k_leaves[i]);
        if (ko == c.outputs.end())
            throw CircuitError("UnknownOutputLabel: " + to_string(k_leaves[i]) +
                               " (position " + std::to_string(i) + ") is not an output of the circuit");
        auto di = d.inputs.find(in_leaves[i]);
        if (di == d.inputs.end())
            throw CircuitError("ShapeMismatch: " + to_string(in_leaves[i]) +
                               " is not an input of the appended circuit");
        if (ko->second != di->second)
            throw CircuitError("TypeMismatch: position " + std::to_string(i) + " has wire type " +
                               ko->second + " on the circuit but " + di->second + " on the argument");
        ren[in_leaves[i]] = k_leaves[i];
    }
    if (in_leaves.size() != d.inputs.size())
        throw CircuitError("ShapeMismatch: input tuple does not cover the appended circuit's frontier");

    // Fresh ids must clear everything visible in either circuit.
    std::uint64_t floor = 0;
    for (auto l : circuit_labels(c)) floor = std::max(floor, l.index + 1);
    for (auto l : circuit_labels(d)) floor = std::max(floor, l.index + 1);

    std::size_t n_new = 0;
    for (const auto& g : d.gates) n_new += g.outs.size();
    auto ids = fresh.take(n_new, floor);
    std::size_t pos = 0;
    for (const auto& g : d.gates)
        for (auto l : g.outs) ren[l] = ids[pos++];

    LabelledCircuit dr = rename(d, ren);
    LabelledCircuit out;
    out.inputs = c.inputs;
    out.gates = c.gates;
    out.gates.insert(out.gates.end(), dr.gates.begin(), dr.gates.end());
    out.outputs = c.outputs;
    for (auto l : k_leaves) out.outputs.erase(l);
    for (const auto& [l, w] : dr.outputs) out.outputs[l] = w;

    std::map<LabelId, LabelId> tuple_ren;
    for (const auto& [from, to] : ren) tuple_ren[from] = to;
    auto rename_tuple = [&](auto&& self, const LabelTuple& t) -> LabelTuple {
        if (t.is_leaf()) {
            auto it = tuple_ren.find(t.label());
            return LabelTuple::leaf(it == tuple_ren.end() ? t.label() : it->second);
        }
        auto l = self(self, t.left());
        auto r = self(self, t.right());
        return LabelTuple::pair(std::move(l), std::move(r));
    };
    LabelTuple k2 = rename_tuple(rename_tuple, outs);
    validate(out);
    return {std::move(out), std::move(k2)};
}

CircuitStore& CircuitStore::instance() {
    static CircuitStore store;
    return store;
}

CircuitId CircuitStore::intern(LabelledCircuit c) {
    std::lock_guard<std::mutex> lk(mu_);
    circuits_.push_back(std::make_shared<const LabelledCircuit>(std::move(c)));
    return CircuitId{static_cast<std::uint32_t>(circuits_.size() - 1)};
}

const LabelledCircuit& CircuitStore::deref(CircuitId id) const {
    std::lock_guard<std::mutex> lk(mu_);
    if (id.index >= circuits_.size()) throw CircuitError("dangling circuit id");
    return *circuits_[id.index];
}

CircuitPtr CircuitStore::deref_ptr(CircuitId id) const {
    std::lock_guard<std::mutex> lk(mu_);
    if (id.index >= circuits_.size()) throw CircuitError("dangling circuit id");
    return circuits_[id.index];
}

namespace {

LabelTuple right_nested_tuple(const std::vector<LabelId>& ls) {
    LabelTuple t = LabelTuple::leaf(ls.back());
    for (std::size_t i = ls.size() - 1; i-- > 0;) t = LabelTuple::pair(LabelTuple::leaf(ls[i]), t);
    return t;
}

} // namespace

std::optional<BoxedGate> boxed_gate(const std::string& name, const GateSignature& sig, FreshSource& fresh) {
    const GateDecl* decl = sig.find_gate(name);
    if (!decl) return std::nullopt;
    if (decl->arity_in.empty() || decl->arity_out.empty()) return std::nullopt;
    auto ids = fresh.take(decl->arity_in.size() + decl->arity_out.size(), 0);
    std::vector<LabelId> in_ids(ids.begin(), ids.begin() + decl->arity_in.size());
    std::vector<LabelId> out_ids(ids.begin() + decl->arity_in.size(), ids.end());
    LabelledCircuit c;
    for (std::size_t i = 0; i < in_ids.size(); ++i) c.inputs[in_ids[i]] = decl->arity_in[i];
    c.gates.push_back(GateApp{name, in_ids, out_ids});
    for (std::size_t i = 0; i < out_ids.size(); ++i) c.outputs[out_ids[i]] = decl->arity_out[i];
    BoxedGate g{right_nested_tuple(in_ids), CircuitStore::instance().intern(std::move(c)),
                right_nested_tuple(out_ids)};
    return g;
}

std::string circuit_to_json(const LabelledCircuit& c) {
    nlohmann::json j;
    j["inputs"] = nlohmann::json::array();
    for (const auto& [l, w] : c.inputs) j["inputs"].push_back({{"label", l.index}, {"wire", w}});
    j["gates"] = nlohmann::json::array();
    for (const auto& g : c.gates) {
        nlohmann::json jg;
        jg["name"] = g.name;
        jg["ins"] = nlohmann::json::array();
        for (auto l : g.ins) jg["ins"].push_back(l.index);
        jg["outs"] = nlohmann::json::array();
        for (auto l : g.outs) jg["outs"].push_back(l.index);
        j["gates"].push_back(std::move(jg));
    }
    j["outputs"] = nlohmann::json::array();
    for (const auto& [l, w] : c.outputs) j["outputs"].push_back({{"label", l.index}, {"wire", w}});
    return j.dump(2);
}

LabelledCircuit circuit_from_json(const std::string& json_text, const GateSignature& sig) {
    auto j = nlohmann::json::parse(json_text);
    LabelledCircuit c;
    for (const auto& e : j.at("inputs"))
        c.inputs[LabelId{e.at("label").get<std::uint64_t>()}] = e.at("wire").get<std::string>();
    for (const auto& e : j.at("gates")) {
        GateApp g;
        g.name = e.at("name").get<std::string>();
        for (const auto& l : e.at("ins")) g.ins.push_back(LabelId{l.get<std::uint64_t>()});
        for (const auto& l : e.at("outs")) g.outs.push_back(LabelId{l.get<std::uint64_t>()});
        c.gates.push_back(std::move(g));
    }
    for (const auto& e : j.at("outputs"))
        c.outputs[LabelId{e.at("label").get<std::uint64_t>()}] = e.at("wire").get<std::string>();
    validate(c, &sig);
    return c;
}

std::string circuit_to_dot(const LabelledCircuit& c, const GateSignature* sig) {
    // Source/sink points stand in for the frontiers.
    std::ostringstream os;
    os << "digraph circuit {\n  rankdir=LR;\n";
    os << "  in [shape=point];\n  out [shape=point];\n";
    std::map<LabelId, std::string> producer;
    std::map<LabelId, WireType> wire;
    for (const auto& [l, w] : c.inputs) {
        producer[l] = "in";
        wire[l] = w;
    }
    for (const auto& [l, w] : c.outputs) wire.emplace(l, w);
    auto edge = [&](const std::string& from, const std::string& to, LabelId l) {
        os << "  " << from << " -> " << to << " [label=\"" << to_string(l);
        if (wire.count(l) && !wire[l].empty()) os << ":" << wire[l];
        os << "\"];\n";
    };
    for (std::size_t i = 0; i < c.gates.size(); ++i) {
        const auto& g = c.gates[i];
        std::string node = "g" + std::to_string(i);
        os << "  " << node << " [label=\"" << g.name << "\", shape=box];\n";
        for (auto l : g.ins) edge(producer[l], node, l);
        const GateDecl* decl = sig ? sig->find_gate(g.name) : nullptr;
        for (std::size_t p = 0; p < g.outs.size(); ++p) {
            producer[g.outs[p]] = node;
            if (decl && p < decl->arity_out.size()) wire.emplace(g.outs[p], decl->arity_out[p]);
        }
    }
    for (const auto& [l, w] : c.outputs) edge(producer[l], "out", l);
    os << "}\n";
    return os.str();
}

} // namespace pqm
