#include "grchase/chase.hpp"

#include "json.hpp"

#include <algorithm>
#include <sstream>

namespace grchase {

Tgd Tgd::make(std::string id, SignaturePtr sig, std::vector<Atom> body,
              std::vector<Atom> head, std::vector<Term> frontier) {
    Tgd t;
    t.id = std::move(id);
    t.sig = std::move(sig);
    t.body = std::move(body);
    t.head = std::move(head);
    t.frontier = std::move(frontier);

    std::unordered_set<Term, TermHash> body_vars, head_vars;
    for (const Atom& a : t.body)
        for (const Term& x : a.args)
            if (x.is_var()) body_vars.insert(x);
    for (const Atom& a : t.head)
        for (const Term& x : a.args)
            if (x.is_var()) head_vars.insert(x);

    std::unordered_set<Term, TermHash> frontier_set;
    for (const Term& y : t.frontier) {
        if (!body_vars.count(y) || !head_vars.count(y))
            throw Error("tgd " + t.id + ": frontier variable " + to_string(y) +
                        " must occur in body and head");
        frontier_set.insert(y);
    }
    for (const Term& y : head_vars)
        if (body_vars.count(y) && !frontier_set.count(y))
            throw Error("tgd " + t.id + ": shared variable " + to_string(y) + " missing from frontier");

    std::unordered_set<Term, TermHash> seen_exist;
    for (const Atom& a : t.head)
        for (const Term& x : a.args)
            if (x.is_var() && !frontier_set.count(x) && seen_exist.insert(x).second)
                t.head_existentials.push_back(x);

    ConjunctiveQuery body_q{t.id + ".body", t.sig, {}, t.body};
    ConjunctiveQuery head_q{t.id + ".head", t.sig, {}, t.head};
    t.body_canon = std::make_shared<Structure>(canonical_structure(body_q));
    t.head_canon = std::make_shared<Structure>(canonical_structure(head_q));
    return t;
}

bool trigger_matches(const Tgd& tgd, const Structure& d, const std::vector<Term>& binding) {
    if (binding.size() != tgd.frontier.size()) throw Error("binding arity mismatch");
    Homomorphism seed;
    for (size_t i = 0; i < binding.size(); ++i)
        if (!seed.bind(tgd.frontier[i], binding[i])) return false;
    return find_one_homomorphism(*tgd.body_canon, d, seed).has_value();
}

bool trigger_satisfied(const Tgd& tgd, const Structure& d, const std::vector<Term>& binding) {
    Homomorphism seed;
    for (size_t i = 0; i < binding.size(); ++i)
        if (!seed.bind(tgd.frontier[i], binding[i])) return false;
    return find_one_homomorphism(*tgd.head_canon, d, seed).has_value();
}

bool trigger_active(const Tgd& tgd, const Structure& d, const std::vector<Term>& binding) {
    return trigger_matches(tgd, d, binding) && !trigger_satisfied(tgd, d, binding);
}

namespace {

std::vector<std::vector<Term>> body_match_bindings(const Tgd& tgd, const Structure& d,
                                                   const Homomorphism& seed) {
    std::vector<std::vector<Term>> out;
    std::set<std::vector<Term>> seen;
    find_homomorphisms(*tgd.body_canon, d, seed, [&](const Homomorphism& h) {
        std::vector<Term> binding;
        binding.reserve(tgd.frontier.size());
        for (const Term& y : tgd.frontier) binding.push_back(h.apply(y));
        if (seen.insert(binding).second) out.push_back(std::move(binding));
        return true;
    });
    return out;
}

} // namespace

std::vector<Trigger> active_triggers(const std::vector<Tgd>& tgds, const Structure& d) {
    std::vector<Trigger> out;
    for (uint32_t i = 0; i < tgds.size(); ++i) {
        for (auto& binding : body_match_bindings(tgds[i], d, {})) {
            if (!trigger_satisfied(tgds[i], d, binding))
                out.push_back(Trigger{i, std::move(binding)});
        }
    }
    return out;
}

AppliedStep apply_trigger(Structure& d, const std::vector<Tgd>& tgds, const Trigger& t,
                          uint64_t step, int32_t& null_counter) {
    const Tgd& tgd = tgds.at(t.tgd);
    if (!trigger_active(tgd, d, t.binding))
        throw Error("apply_trigger: trigger for " + tgd.id + " is not active");

    Homomorphism subst;
    for (size_t i = 0; i < t.binding.size(); ++i) subst.bind(tgd.frontier[i], t.binding[i]);

    AppliedStep rec;
    rec.step = step;
    rec.trigger = t;
    for (const Term& z : tgd.head_existentials) {
        Term n = Term::null(null_counter++);
        subst.bind(z, n);
        rec.added_nulls.push_back(n);
    }
    for (const Atom& a : tgd.head) {
        Atom grounded = subst.apply(a);
        if (d.add_atom(grounded)) rec.added_atoms.push_back(std::move(grounded));
    }
    return rec;
}

namespace {

struct Pending {
    std::deque<Trigger> queue;
    std::unordered_set<Trigger, TriggerHash> seen;

    void push_back(Trigger t) {
        if (seen.insert(t).second) queue.push_back(std::move(t));
    }
    void push_front(Trigger t) {
        if (seen.insert(t).second) queue.push_front(std::move(t));
    }
};

// Delta-driven discovery: only body matches that use at least one new atom
// can produce new triggers, so seed the search at each position carrying the
// new atom's predicate.
void discover_delta(const std::vector<Tgd>& tgds, const Structure& d,
                    const std::vector<Atom>& delta, Pending& pending, bool to_front,
                    const std::optional<std::vector<PredId>>& pins) {
    std::vector<Trigger> found;
    for (const Atom& a : delta) {
        if (pins &&
            std::find(pins->begin(), pins->end(), a.pred) == pins->end())
            continue;
        for (uint32_t ti = 0; ti < tgds.size(); ++ti) {
            const Tgd& tgd = tgds[ti];
            for (const Atom& batom : tgd.body) {
                if (batom.pred != a.pred) continue;
                Homomorphism seed;
                bool ok = true;
                for (size_t j = 0; j < batom.args.size() && ok; ++j)
                    ok = seed.bind(batom.args[j], a.args[j]);
                if (!ok) continue;
                for (auto& binding : body_match_bindings(tgd, d, seed))
                    found.push_back(Trigger{ti, std::move(binding)});
            }
        }
    }
    if (to_front) {
        for (auto it = found.rbegin(); it != found.rend(); ++it) pending.push_front(std::move(*it));
    } else {
        for (auto& t : found) pending.push_back(std::move(t));
    }
}

} // namespace

ChaseTrace run_chase(const std::vector<Tgd>& tgds, const Structure& d0, const ChaseOptions& opts) {
    ChaseTrace trace;
    trace.initial = d0;
    Structure d = d0;
    int32_t null_counter = 0;
    std::mt19937_64 rng(opts.seed);

    // A goal witness appearing after a step must use a new atom, so later
    // checks are seeded at the delta instead of rescanning.
    std::optional<Structure> goal_canon;
    Homomorphism goal_seed;
    if (opts.goal) {
        goal_canon = canonical_structure(opts.goal->query);
        for (size_t i = 0; i < opts.goal->args.size(); ++i)
            goal_seed.bind(opts.goal->query.free_vars[i], opts.goal->args[i]);
    }
    auto goal_holds_delta = [&](const std::vector<Atom>& delta) {
        if (!opts.goal) return false;
        for (const Atom& a : delta) {
            for (const Atom& batom : opts.goal->query.body) {
                if (batom.pred != a.pred) continue;
                Homomorphism seed = goal_seed;
                bool ok = true;
                for (size_t j = 0; j < batom.args.size() && ok; ++j)
                    ok = seed.bind(batom.args[j], a.args[j]);
                if (!ok) continue;
                if (find_one_homomorphism(*goal_canon, d, seed)) return true;
            }
        }
        return false;
    };

    if (opts.goal && check_models(d, opts.goal->query, opts.goal->args)) {
        trace.goal_step = 0;
        trace.verdict = ChaseVerdict::GoalReached;
        trace.final_structure = std::move(d);
        return trace;
    }

    Pending pending;
    const bool newest_first = opts.scheduler == SchedulerKind::NewestFirst;
    for (uint32_t ti = 0; ti < tgds.size(); ++ti)
        for (auto& binding : body_match_bindings(tgds[ti], d, {}))
            pending.push_back(Trigger{ti, std::move(binding)});

    while (!pending.queue.empty()) {
        Trigger t;
        if (opts.scheduler == SchedulerKind::Random) {
            std::uniform_int_distribution<size_t> dist(0, pending.queue.size() - 1);
            size_t k = dist(rng);
            t = pending.queue[k];
            pending.queue.erase(pending.queue.begin() + long(k));
        } else if (opts.scheduler == SchedulerKind::Custom) {
            if (!opts.custom_scheduler) throw Error("Custom scheduling needs a hook");
            size_t k = opts.custom_scheduler(pending.queue);
            if (k >= pending.queue.size()) throw Error("custom scheduler picked out of range");
            t = pending.queue[k];
            pending.queue.erase(pending.queue.begin() + long(k));
        } else {
            t = pending.queue.front();
            pending.queue.pop_front();
        }

        // Condition 2 is re-checked against the current structure: a witness
        // may have arrived as a side effect of other applications.
        if (trigger_satisfied(tgds[t.tgd], d, t.binding)) continue;

        if (trace.applied >= opts.budget) {
            trace.verdict = ChaseVerdict::BudgetExhausted;
            trace.final_structure = std::move(d);
            trace.next_null = null_counter;
            return trace;
        }

        AppliedStep rec = apply_trigger(d, tgds, t, trace.applied + 1, null_counter);
        trace.applied += 1;

        if (opts.check_idempotence && t.tgd < opts.paired.size() && opts.paired[t.tgd]) {
            uint32_t twin = *opts.paired[t.tgd];
            if (trigger_active(tgds[twin], d, t.binding))
                trace.idempotence_violations.push_back(
                    "twin trigger " + tgds[twin].id + " active after applying " + tgds[t.tgd].id);
        }

        discover_delta(tgds, d, rec.added_atoms, pending, newest_first, opts.delta_pin_predicates);
        if (opts.observer) opts.observer(rec, d);
        const bool goal_now = goal_holds_delta(rec.added_atoms);
        trace.steps.push_back(std::move(rec));

        if (goal_now) {
            trace.goal_step = trace.applied;
            trace.verdict = ChaseVerdict::GoalReached;
            trace.final_structure = std::move(d);
            trace.next_null = null_counter;
            return trace;
        }
    }

    trace.verdict = ChaseVerdict::Saturated;
    trace.final_structure = std::move(d);
    trace.next_null = null_counter;
    return trace;
}

EntailmentResult chase_entails(const std::vector<Tgd>& tgds, const Structure& d0,
                               const ConjunctiveQuery& goal, const std::vector<Term>& goal_args,
                               uint64_t budget, const ChaseOptions& base) {
    ChaseOptions opts = base;
    opts.budget = budget;
    opts.goal = ChaseGoal{goal, goal_args};
    ChaseTrace trace = run_chase(tgds, d0, opts);

    EntailmentResult res;
    res.budget_used = trace.applied;
    switch (trace.verdict) {
        case ChaseVerdict::GoalReached:
            res.kind = EntailmentResult::Entailed;
            res.step = trace.goal_step;
            res.witness = models_witness(trace.final_structure, goal, goal_args);
            break;
        case ChaseVerdict::Saturated:
            res.kind = EntailmentResult::NotEntailed;
            break;
        case ChaseVerdict::BudgetExhausted:
            res.kind = EntailmentResult::Unknown;
            break;
    }
    return res;
}

std::string trace_to_jsonl(const ChaseTrace& trace, const std::vector<Tgd>& tgds) {
    std::ostringstream out;
    const Signature& sig = *trace.initial.signature();
    for (const AppliedStep& s : trace.steps) {
        nlohmann::json j;
        j["step"] = s.step;
        j["tgd"] = tgds.at(s.trigger.tgd).id;
        nlohmann::json binding = nlohmann::json::array();
        for (const Term& t : s.trigger.binding) binding.push_back(to_string(t));
        j["binding"] = binding;
        nlohmann::json atoms = nlohmann::json::array();
        for (const Atom& a : s.added_atoms) atoms.push_back(to_string(a, sig));
        j["added_atoms"] = atoms;
        nlohmann::json nulls = nlohmann::json::array();
        for (const Term& n : s.added_nulls) nulls.push_back(to_string(n));
        j["added_nulls"] = nulls;
        out << j.dump() << "\n";
    }
    return out.str();
}

std::string structure_to_dot(const Structure& d) {
    const Signature& sig = *d.signature();
    std::ostringstream out;
    out << "digraph chase {\n";
    auto color_of = [&](PredId p) -> const char* {
        const std::string& n = sig.predicate_name(p);
        if (n.rfind("G_", 0) == 0) return "forestgreen";
        if (n.rfind("R_", 0) == 0) return "red3";
        return "black";
    };
    auto node = [](const Term& t) {
        std::string s = to_string(t);
        for (char& c : s)
            if (c == '!' || c == ':') c = '_';
        return "\"" + s + "\"";
    };
    int hyper = 0;
    for (const Atom& a : d.atoms()) {
        if (a.args.size() == 2) {
            out << "  " << node(a.args[0]) << " -> " << node(a.args[1]) << " [label=\""
                << sig.predicate_name(a.pred) << "\", color=" << color_of(a.pred) << "];\n";
        } else {
            std::string h = "\"#" + std::to_string(hyper++) + "\"";
            out << "  " << h << " [shape=point, color=" << color_of(a.pred) << "];\n";
            for (size_t i = 0; i < a.args.size(); ++i)
                out << "  " << h << " -> " << node(a.args[i]) << " [label=\""
                    << sig.predicate_name(a.pred) << "/" << i << "\", color=" << color_of(a.pred)
                    << "];\n";
        }
    }
    out << "}\n";
    return out.str();
}

} // namespace grchase
