#pragma once

// Standard (lazy) chase over TGDs: fair scheduling, budgets, traces.

#include "grchase/query.hpp"

#include <deque>
#include <random>

namespace grchase {

// Φ(x̄,ȳ) ⇒ ∃z̄ Ψ(z̄,ȳ). The frontier ȳ is the ordered tuple of variables
// shared by body and head; head existentials are disjoint from body vars.
struct Tgd {
    std::string id;
    SignaturePtr sig;
    std::vector<Atom> body;
    std::vector<Atom> head;
    std::vector<Term> frontier;

    // built on construction
    std::shared_ptr<Structure> body_canon;
    std::shared_ptr<Structure> head_canon;
    std::vector<Term> head_existentials;

    static Tgd make(std::string id, SignaturePtr sig, std::vector<Atom> body,
                    std::vector<Atom> head, std::vector<Term> frontier);
};

struct Trigger {
    uint32_t tgd = 0;
    std::vector<Term> binding;

    friend bool operator==(const Trigger&, const Trigger&) = default;
    friend auto operator<=>(const Trigger&, const Trigger&) = default;
};

struct TriggerHash {
    size_t operator()(const Trigger& t) const {
        size_t h = std::hash<uint32_t>()(t.tgd);
        for (const Term& x : t.binding) h = h * 1000003u ^ TermHash()(x);
        return h;
    }
};

/// Condition 1: the body matches with the frontier bound to the binding.
bool trigger_matches(const Tgd& tgd, const Structure& d, const std::vector<Term>& binding);
/// Condition 2 fails: a head witness for the binding already exists.
bool trigger_satisfied(const Tgd& tgd, const Structure& d, const std::vector<Term>& binding);
bool trigger_active(const Tgd& tgd, const Structure& d, const std::vector<Term>& binding);

/// Full scan for the ToDo set: all (binding, tgd) pairs matching with no witness.
std::vector<Trigger> active_triggers(const std::vector<Tgd>& tgds, const Structure& d);

struct NullInfo {
    int32_t id;
    uint64_t step;
    std::string tgd;
    std::string head_var;
};

struct AppliedStep {
    uint64_t step = 0;
    Trigger trigger;
    std::vector<Atom> added_atoms;
    std::vector<Term> added_nulls;
};

/// Applies an active trigger: fresh copy of the head with frontier variables
/// identified with the binding, existentials replaced by fresh nulls.
/// Throws on inactive triggers (scheduler bug).
AppliedStep apply_trigger(Structure& d, const std::vector<Tgd>& tgds, const Trigger& t,
                          uint64_t step, int32_t& null_counter);

enum class ChaseVerdict { Saturated, BudgetExhausted, GoalReached };

// Fifo is the fair default; NewestFirst prefers the latest discoveries (the
// swarm layer builds its spouse-priority policy on it); Custom delegates the
// pick to ChaseOptions::custom_scheduler.
enum class SchedulerKind { Fifo, Random, NewestFirst, Custom };

struct ChaseGoal {
    ConjunctiveQuery query;
    std::vector<Term> args;
};

struct ChaseOptions {
    uint64_t budget = 0;
    SchedulerKind scheduler = SchedulerKind::Fifo;
    uint64_t seed = 0;
    std::optional<ChaseGoal> goal;
    // TGD index -> index of the opposite-direction twin, if any. When set,
    // the run asserts after each application that the twin trigger at the
    // same binding is not active, and records violations.
    std::vector<std::optional<uint32_t>> paired;
    bool check_idempotence = false;
    // Delta discovery normally seeds the body search at every added atom.
    // A caller that knows every new body match must use a new atom of one
    // of these predicates (the spider world: fresh matches always ride a
    // fresh H atom) can restrict the pins to them.
    std::optional<std::vector<PredId>> delta_pin_predicates;
    // Picks the index of the next pending trigger under SchedulerKind::Custom.
    // Fairness is the hook's responsibility.
    std::function<size_t(const std::deque<Trigger>&)> custom_scheduler;
    // Called after each application with the grown structure.
    std::function<void(const AppliedStep&, const Structure&)> observer;
};

struct ChaseTrace {
    Structure initial;
    Structure final_structure;
    ChaseVerdict verdict = ChaseVerdict::Saturated;
    uint64_t applied = 0;
    std::optional<uint64_t> goal_step; // step at which the goal first held
    std::vector<AppliedStep> steps;
    std::vector<NullInfo> nulls;
    std::vector<std::string> idempotence_violations;
    int32_t next_null = 0; // lets a follow-up phase continue the null counter
};

ChaseTrace run_chase(const std::vector<Tgd>& tgds, const Structure& d0, const ChaseOptions& opts);

struct EntailmentResult {
    enum Kind { Entailed, NotEntailed, Unknown } kind = Unknown;
    std::optional<uint64_t> step;
    uint64_t budget_used = 0;
    std::optional<Homomorphism> witness;
};

/// Semi-decision: Entailed when some finite stage models goal(args);
/// NotEntailed only on saturation; Unknown on budget exhaustion.
EntailmentResult chase_entails(const std::vector<Tgd>& tgds, const Structure& d0,
                               const ConjunctiveQuery& goal, const std::vector<Term>& goal_args,
                               uint64_t budget, const ChaseOptions& base = {});

/// One step per line: trigger id, binding, added atoms, added nulls.
std::string trace_to_jsonl(const ChaseTrace& trace, const std::vector<Tgd>& tgds);
/// Final structure as a colored graph (binary atoms become edges).
std::string structure_to_dot(const Structure& d);

} // namespace grchase
