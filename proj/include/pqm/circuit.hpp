// pqm: an interpreter toolchain for a Proto-Quipper-M fragment
// Copyright 2026 The pqm Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef PQM_CIRCUIT_HPP
#define PQM_CIRCUIT_HPP

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pqm/syntax.hpp"
#include "pqm/types.hpp"

namespace pqm {

/// Ordered assignment of wire types to labels; keys strictly increasing.
/// The frontier of a labelled circuit.
using LabelContext = std::map<LabelId, WireType>;

std::string to_string(const LabelContext& q);

/// Declares the wire types and gates available to circuits.
struct GateDecl {
    std::vector<WireType> arity_in;
    std::vector<WireType> arity_out;
};

struct GateSignature {
    std::vector<WireType> wire_types;
    std::map<std::string, GateDecl> gates;

    bool has_wire_type(const WireType& w) const;
    const GateDecl* find_gate(const std::string& name) const;
};

/// H(Q->Q), X(Q->Q), CNOT(QQ->QQ), Meas(Q->Bit), Init(->Q).
const GateSignature& default_signature();
GateSignature signature_from_json(const std::string& json_text);

/// One gate application in a circuit, ports in positional order.
struct GateApp {
    std::string name;
    std::vector<LabelId> ins;
    std::vector<LabelId> outs;
    bool operator==(const GateApp&) const = default;
};

struct CircuitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A concrete gate graph with typed input/output label frontiers.
/// Invariants: every label is produced exactly once (by the inputs or one
/// gate) and consumed exactly once (by one gate or the outputs); the gate
/// list is topologically ordered; outputs = (inputs + gate outputs) - gate
/// inputs.
struct LabelledCircuit {
    LabelContext inputs;
    std::vector<GateApp> gates;
    LabelContext outputs;

    bool operator==(const LabelledCircuit&) const = default;
};

using CircuitPtr = std::shared_ptr<const LabelledCircuit>;

/// Deterministically relabelled form: inputs in label order get 0,1,...,
/// then gate outputs in list order, ports left to right. Two circuits are
/// equivalent iff their canonical forms are equal.
struct CanonicalCircuit {
    std::vector<WireType> input_types;
    struct CanonGate {
        std::string name;
        std::vector<std::uint64_t> ins, outs;
        bool operator==(const CanonGate&) const = default;
    };
    std::vector<CanonGate> gates;
    std::vector<std::pair<std::uint64_t, WireType>> outputs; // sorted by id

    /// The canonical id assigned to an original label, if it occurs.
    /// Not part of the canonical structure; ignored by equality.
    std::map<LabelId, std::uint64_t> relabel;

    bool operator==(const CanonicalCircuit& o) const {
        return input_types == o.input_types && gates == o.gates && outputs == o.outputs;
    }
};

/// Throws CircuitError when an invariant is violated. `sig` checks gate
/// ports positionally against the signature when provided.
void validate(const LabelledCircuit& c, const GateSignature* sig = nullptr);

LabelledCircuit identity(const LabelContext& q);
LabelledCircuit rename(const LabelledCircuit& c, const std::map<LabelId, LabelId>& map);
CanonicalCircuit canonical_form(const LabelledCircuit& c);
bool equiv(const LabelledCircuit& a, const LabelledCircuit& b);

std::set<LabelId> circuit_labels(const LabelledCircuit& c);

/// Source of fresh label ids. The default implementation draws from a
/// monotone counter; tests may script exact ids to replay a recorded run.
class FreshSource {
public:
    virtual ~FreshSource() = default;
    /// Returns `n` fresh ids, all of them > floor.
    virtual std::vector<LabelId> take(std::size_t n, std::uint64_t floor) = 0;
};

/// Monotone counter; fetch-and-advance is atomic.
class FreshCounter : public FreshSource {
public:
    explicit FreshCounter(std::uint64_t start = 0) : next_(start) {}
    FreshCounter(const FreshCounter& other) : next_(other.peek()) {}
    FreshCounter& operator=(const FreshCounter& other) {
        next_.store(other.peek());
        return *this;
    }
    std::vector<LabelId> take(std::size_t n, std::uint64_t floor) override;
    std::uint64_t peek() const { return next_.load(); }
    /// Ensures the next allocation is >= v.
    void advance_to(std::uint64_t v);

private:
    std::atomic<std::uint64_t> next_;
};

/// Replays a recorded allocation; throws if more ids are requested than
/// scripted or a scripted id does not clear the freshness floor.
class ScriptedFresh : public FreshSource {
public:
    explicit ScriptedFresh(std::vector<LabelId> ids) : ids_(std::move(ids)) {}
    std::vector<LabelId> take(std::size_t n, std::uint64_t floor) override;

private:
    std::vector<LabelId> ids_;
    std::size_t pos_ = 0;
};

/// Allocates a tuple of labels mirroring the tensor tree of `t`, all of them
/// fresh for `m` (no syntactic occurrence) and beyond the source's counter.
/// The returned context types each leaf by the corresponding wire type.
std::pair<LabelContext, LabelTuple> freshlabels(const Term& m, const TypeExpr& t, FreshSource& fresh);

/// Grafts a renamed copy of `d` onto `c`: the copy's inputs `ins` attach to
/// the outputs `k` of `c` (same tuple shape, same positional wire types);
/// every other label of `d` maps to a fresh id. Returns the extended circuit
/// and `outs` under the renaming. Throws CircuitError with ShapeMismatch /
/// TypeMismatch / UnknownOutputLabel diagnostics.
std::pair<LabelledCircuit, LabelTuple> append(const LabelledCircuit& c, const LabelTuple& k,
                                              const LabelTuple& ins, const LabelledCircuit& d,
                                              const LabelTuple& outs, FreshSource& fresh);

/// Append-only process-wide store backing boxed-circuit literals.
class CircuitStore {
public:
    static CircuitStore& instance();
    CircuitId intern(LabelledCircuit c);
    const LabelledCircuit& deref(CircuitId id) const;
    CircuitPtr deref_ptr(CircuitId id) const;

private:
    mutable std::mutex mu_;
    std::vector<CircuitPtr> circuits_;
};

/// Builds the single-gate circuit for `gate` sugar; the input/output tuples
/// are right-nested pairs over freshly allocated labels. Gates with an empty
/// input or output frontier have no label tuple and cannot be boxed.
struct BoxedGate {
    LabelTuple ins;
    CircuitId circ;
    LabelTuple outs;
};
std::optional<BoxedGate> boxed_gate(const std::string& name, const GateSignature& sig, FreshSource& fresh);

std::string circuit_to_json(const LabelledCircuit& c);
LabelledCircuit circuit_from_json(const std::string& json_text, const GateSignature& sig);
/// One node per gate, one edge per label, edges annotated `#n:Wire` (wire
/// types of gate outputs come from the signature when given).
std::string circuit_to_dot(const LabelledCircuit& c, const GateSignature* sig = nullptr);

} // namespace pqm

#endif
