// pqm: an interpreter toolchain for a Proto-Quipper-M fragment
// Copyright 2026 The pqm Authors.
// SPDX-License-Identifier: Apache-2.0

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "pqm/bigstep.hpp"
#include "pqm/correspond.hpp"
#include "pqm/gen.hpp"
#include "pqm/parser.hpp"
#include "pqm/typecheck.hpp"

using nlohmann::json;
using namespace pqm;

namespace {

// Exit codes: 0 success/Converged, 1 type error, 2 Deadlocked,
// 3 FuelExhausted, 4 usage error, 5 fuzz found a disagreement.
enum ExitCode { kOk = 0, kTypeError = 1, kDeadlocked = 2, kFuelExhausted = 3, kUsage = 4, kFuzzFail = 5 };

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

GateSignature active_signature() {
    if (const char* path = std::getenv("PQM_SIGNATURE")) return signature_from_json(read_file(path));
    return default_signature();
}

struct LoadedProgram {
    Term term;
    LabelContext labels; // free labels of the program, typed
    std::uint64_t counter_start = 0;
};

// Free labels of a file default to Qubit wires; --labels overrides.
LoadedProgram load_program(const std::string& path, const GateSignature& sig, FreshCounter& counter,
                           const std::string& label_spec) {
    LoadedProgram p{parse(read_file(path), sig, counter), {}, 0};
    std::map<LabelId, WireType> overrides;
    if (!label_spec.empty()) {
        std::stringstream ss(label_spec);
        std::string entry;
        while (std::getline(ss, entry, ',')) {
            auto pos = entry.find(':');
            if (pos == std::string::npos) throw std::runtime_error("bad --labels entry " + entry);
            overrides[LabelId{std::stoull(entry.substr(0, pos))}] = entry.substr(pos + 1);
        }
    }
    for (auto l : free_labels(p.term)) {
        auto it = overrides.find(l);
        p.labels[l] = it == overrides.end() ? kQubit : it->second;
    }
    for (auto l : all_labels(p.term)) counter.advance_to(l.index + 1);
    p.counter_start = counter.peek();
    return p;
}

json outcome_json(const RunOutcome& o) {
    json j;
    j["class"] = to_string(outcome_class(o));
    if (const auto* c = std::get_if<Converged>(&o)) {
        j["value"] = pretty_print(c->value);
        j["steps"] = c->steps;
        j["gates"] = c->circ->gates.size();
    } else if (const auto* d = std::get_if<Deadlocked>(&o)) {
        j["reason"] = d->reason;
        j["state"] = d->state_dump;
    } else {
        j["state"] = std::get<FuelExhausted>(o).state_dump;
    }
    return j;
}

void emit_circuit(const CircuitPtr& circ, const std::string& format, const GateSignature& sig) {
    if (format == "json") std::cout << circuit_to_json(*circ) << "\n";
    else std::cout << circuit_to_dot(*circ, &sig);
}

int run_one(const LoadedProgram& p, const GateSignature& sig, const std::string& semantics,
            std::uint64_t fuel, bool trace, bool as_json, const std::string& emit, bool unchecked) {
    TypingContext ctx;
    ctx.labels = p.labels;
    auto tr = typecheck(ctx, p.term);
    if (auto* err = std::get_if<TypeError>(&tr)) {
        if (!unchecked) {
            if (as_json) std::cout << json{{"error", to_string(*err)}}.dump() << "\n";
            std::cerr << to_string(*err) << "\n";
            return kTypeError;
        }
        std::cerr << "warning: running an ill-typed program (--unchecked)\n";
    }

    Runtime rt(p.counter_start);
    SmallConfig cfg = make_config(identity(p.labels), p.term);
    RunOutcome out{FuelExhausted{}};
    if (semantics == "big") {
        out = run_big(cfg, fuel, rt);
    } else if (semantics == "small") {
        std::vector<SmallConfig> steps;
        out = run_small(cfg, fuel, rt, trace ? &steps : nullptr);
        if (trace) {
            for (std::size_t i = 0; i + 1 < steps.size(); ++i) {
                auto dec = decompose(steps[i].term);
                std::string rule = "?";
                std::string redex;
                if (dec) {
                    redex = pretty_print(dec->focus);
                    switch (dec->focus.kind()) {
                    case Term::Kind::App: rule = "beta-reduction"; break;
                    case Term::Kind::LetPair: rule = "let"; break;
                    case Term::Kind::Force: rule = "force"; break;
                    case Term::Kind::BoxT: rule = "box"; break;
                    case Term::Kind::ApplyC: rule = "apply"; break;
                    default: rule = "stuck"; break;
                    }
                }
                std::cerr << i << "\t" << rule << "\t" << redex << "\t"
                          << steps[i].circ->gates.size() << " gates\n";
            }
        }
    } else if (semantics == "stacked") {
        std::vector<StackedConfig> steps;
        out = run_stacked(from_small_step(cfg), fuel, rt, trace ? &steps : nullptr);
        if (trace) {
            for (std::size_t i = 0; i + 1 < steps.size(); ++i) {
                auto rules = applicable_stacked_rules(steps[i]);
                std::cerr << i << "\tdepth=" << steps[i].frames.size() << "\t"
                          << (rules.empty() ? "stuck" : rules.front()) << "\n";
            }
        }
    } else { // machine
        std::vector<MachineTraceEntry> steps;
        out = run_machine(load(cfg), fuel, rt, trace ? &steps : nullptr);
        if (trace) {
            for (std::size_t i = 0; i < steps.size(); ++i)
                std::cerr << i << "\t" << steps[i].info.rule << "\tL=" << measure_L(steps[i].before)
                          << "\t|S|=" << steps[i].before.stack.size() << "\n";
        }
    }

    if (as_json) std::cout << outcome_json(out).dump() << "\n";
    switch (outcome_class(out)) {
    case OutcomeClass::Converged: {
        const auto& c = std::get<Converged>(out);
        if (!as_json) std::cout << pretty_print(c.value) << "\n";
        if (!emit.empty()) {
            // A boxed-circuit result is the program's product; export it.
            // Otherwise the underlying circuit is what was built.
            if (c.value.kind() == Term::Kind::BoxedCirc)
                emit_circuit(CircuitStore::instance().deref_ptr(c.value.circ_id()), emit, sig);
            else
                emit_circuit(c.circ, emit, sig);
        }
        return kOk;
    }
    case OutcomeClass::Deadlocked:
        if (!as_json) std::cerr << "deadlocked: " << std::get<Deadlocked>(out).reason << "\n";
        return kDeadlocked;
    default:
        if (!as_json) std::cerr << "fuel exhausted\n";
        return kFuelExhausted;
    }
}

std::uint64_t counter_start_for(const GenCase& c) {
    std::uint64_t start = 0;
    for (auto l : all_labels(c.term)) start = std::max(start, l.index + 1);
    for (const auto& [l, w] : c.labels) start = std::max(start, l.index + 1);
    return start;
}

int cmd_fuzz(std::uint64_t count, unsigned depth, std::uint64_t fuel, std::uint64_t seed, bool do_shrink,
             const std::string& corpus_dir, const std::string& mutant_name) {
    GenParams params;
    params.max_depth = depth;
    params.seed = seed;
    Mutant mutant = mutant_from_name(mutant_name);

    json report;
    report["seed"] = seed;
    report["count"] = count;
    report["cases"] = json::array();
    std::uint64_t disagreements = 0, inconclusive = 0, generated = 0;

    for (std::uint64_t i = 0; i < count; ++i) {
        GenCase c;
        try {
            c = gen_case(params, i);
        } catch (const GiveUp&) {
            continue;
        }
        ++generated;
        SmallConfig cfg = make_config(identity(c.labels), c.term);
        DifferentialReport rep = differential_run(cfg, fuel, counter_start_for(c), mutant);

        json cj;
        cj["index"] = i;
        cj["outcomes"] = {to_string(outcome_class(rep.big)), to_string(outcome_class(rep.small)),
                          to_string(outcome_class(rep.stacked)), to_string(outcome_class(rep.machine))};
        if (!rep.disagreement.empty() && !rep.inconclusive) {
            ++disagreements;
            cj["disagreement"] = rep.disagreement;
            cj["program"] = pretty_print(c.term);
            GenCase minimal = c;
            if (do_shrink) {
                minimal = shrink(c, [&](const GenCase& cand) {
                    SmallConfig cc = make_config(identity(cand.labels), cand.term);
                    auto r = differential_run(cc, fuel, counter_start_for(cand), mutant);
                    return !r.disagreement.empty() && !r.inconclusive;
                });
                cj["shrunk"] = pretty_print(minimal.term);
            }
            SmallConfig cc = make_config(identity(minimal.labels), minimal.term);
            auto rr = differential_run(cc, fuel, counter_start_for(minimal), mutant);
            cj["traces"] = {{"big", outcome_json(rr.big)},
                            {"small", outcome_json(rr.small)},
                            {"stacked", outcome_json(rr.stacked)},
                            {"machine", outcome_json(rr.machine)}};
            report["cases"].push_back(cj);
        } else if (rep.inconclusive) {
            ++inconclusive;
            cj["inconclusive"] = rep.disagreement;
            report["cases"].push_back(cj);
        }

        if (!corpus_dir.empty()) {
            std::string base = corpus_dir + "/case_" + std::to_string(i);
            std::ofstream(base + ".pqm") << pretty_print(c.term) << "\n";
            json manifest;
            manifest["seed"] = seed;
            manifest["index"] = i;
            manifest["depth"] = depth;
            manifest["fuel"] = fuel;
            manifest["expected"] = to_string(outcome_class(rep.small));
            std::ofstream(base + ".json") << manifest.dump(2) << "\n";
        }
    }
    report["generated"] = generated;
    report["disagreements"] = disagreements;
    report["inconclusive"] = inconclusive;
    std::cout << report.dump(2) << "\n";
    return disagreements == 0 ? kOk : kFuzzFail;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"pqm — parse, type-check, and evaluate circuit-building programs under four semantics"};
    app.require_subcommand(1);

    std::string file, type_ann, semantics = "machine", emit_format, labels_spec, mutant_name, corpus_dir;
    std::uint64_t fuel = 100000, seed = 0, count = 100;
    unsigned depth = 6;
    bool as_json = false, trace = false, do_shrink = false, unchecked = false;

    auto* check = app.add_subcommand("check", "type-check a program and print its type");
    check->add_option("file", file)->required();
    check->add_option("--type", type_ann, "expected type; mismatch is an error");
    check->add_option("--labels", labels_spec, "wire types for free labels, e.g. 0:Qubit,1:Bit");
    check->add_flag("--json", as_json);

    auto* run = app.add_subcommand("run", "evaluate a program");
    run->add_option("file", file)->required();
    run->add_option("--semantics", semantics)->check(CLI::IsMember({"big", "small", "stacked", "machine"}));
    run->add_option("--fuel", fuel);
    run->add_option("--emit-circuit", emit_format)->check(CLI::IsMember({"json", "dot"}));
    run->add_option("--labels", labels_spec);
    run->add_flag("--trace", trace);
    run->add_flag("--json", as_json);
    run->add_flag("--unchecked", unchecked, "skip the type checker (for stuckness experiments)");

    auto* tracecmd = app.add_subcommand("trace", "evaluate with a per-step log");
    tracecmd->add_option("file", file)->required();
    tracecmd->add_option("--semantics", semantics)
        ->check(CLI::IsMember({"big", "small", "stacked", "machine"}));
    tracecmd->add_option("--fuel", fuel);
    tracecmd->add_option("--labels", labels_spec);
    tracecmd->add_flag("--json", as_json);
    tracecmd->add_flag("--unchecked", unchecked);

    auto* fuzz = app.add_subcommand("fuzz", "differential campaign over generated programs");
    fuzz->add_option("--count", count);
    fuzz->add_option("--depth", depth);
    fuzz->add_option("--fuel", fuel);
    fuzz->add_option("--seed", seed);
    fuzz->add_flag("--shrink", do_shrink);
    fuzz->add_option("--corpus-dir", corpus_dir, "write generated cases as .pqm plus manifest JSON");
    fuzz->add_option("--mutant", mutant_name, "enable a rule mutant (testing the tests)");
    fuzz->add_flag("--json", as_json);

    auto* emitcmd = app.add_subcommand("emit", "evaluate and export the built circuit");
    emitcmd->add_option("file", file)->required();
    emitcmd->add_option("--format", emit_format)->check(CLI::IsMember({"json", "dot"}));
    emitcmd->add_option("--semantics", semantics)
        ->check(CLI::IsMember({"big", "small", "stacked", "machine"}));
    emitcmd->add_option("--fuel", fuel);
    emitcmd->add_option("--labels", labels_spec);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    try {
        GateSignature sig = active_signature();
        if (check->parsed()) {
            FreshCounter counter;
            LoadedProgram p = load_program(file, sig, counter, labels_spec);
            TypingContext ctx;
            ctx.labels = p.labels;
            auto r = typecheck(ctx, p.term);
            if (auto* err = std::get_if<TypeError>(&r)) {
                if (as_json) std::cout << json{{"error", to_string(*err)}}.dump() << "\n";
                std::cerr << to_string(*err) << "\n";
                return kTypeError;
            }
            std::string ty = to_string(std::get<TypeExpr>(r));
            if (!type_ann.empty() && ty != type_ann) {
                std::cerr << "Mismatch @ 0:0 — program has type " << ty << ", expected " << type_ann
                          << "\n";
                return kTypeError;
            }
            if (as_json) std::cout << json{{"type", ty}}.dump() << "\n";
            else std::cout << ty << "\n";
            return kOk;
        }
        if (run->parsed() || tracecmd->parsed()) {
            FreshCounter counter;
            LoadedProgram p = load_program(file, sig, counter, labels_spec);
            return run_one(p, sig, semantics, fuel, trace || tracecmd->parsed(), as_json, emit_format,
                           unchecked);
        }
        if (emitcmd->parsed()) {
            FreshCounter counter;
            LoadedProgram p = load_program(file, sig, counter, labels_spec);
            if (emit_format.empty()) emit_format = "json";
            return run_one(p, sig, semantics, fuel, false, as_json, emit_format, false);
        }
        if (fuzz->parsed())
            return cmd_fuzz(count, depth, fuel, seed, do_shrink, corpus_dir, mutant_name);
    } catch (const ParseError& e) {
        std::cerr << "syntax error @ " << e.line << ":" << e.col << " — " << e.what() << "\n";
        return kTypeError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }
    return kUsage;
}
