#include "grchase/greenred.hpp"

namespace grchase {

ColoredSignature::ColoredSignature(SignaturePtr base) : base_(std::move(base)) {
    auto colored = std::make_shared<Signature>();
    green_.resize(base_->predicate_count());
    red_.resize(base_->predicate_count());
    back_.resize(base_->predicate_count() * 2);
    for (PredId p = 0; p < PredId(base_->predicate_count()); ++p) {
        const std::string& n = base_->predicate_name(p);
        if (n.rfind("G_", 0) == 0 || n.rfind("R_", 0) == 0)
            throw Error("base predicate name collides with color prefix: " + n);
        PredId g = colored->add_predicate("G_" + n, base_->arity(p));
        PredId r = colored->add_predicate("R_" + n, base_->arity(p));
        green_[size_t(p)] = g;
        red_[size_t(p)] = r;
        back_[size_t(g)] = {Color::Green, p};
        back_[size_t(r)] = {Color::Red, p};
    }
    for (const Term& c : base_->constants()) colored->add_constant(NameTable::instance().name(c.id));
    colored_ = std::move(colored);
}

PredId ColoredSignature::paint(PredId base_pred, Color c) const {
    return c == Color::Green ? green_.at(size_t(base_pred)) : red_.at(size_t(base_pred));
}

std::pair<Color, PredId> ColoredSignature::unpaint(PredId colored_pred) const {
    return back_.at(size_t(colored_pred));
}

std::optional<Color> ColoredSignature::color_of(PredId colored_pred) const {
    if (colored_pred < 0 || size_t(colored_pred) >= back_.size()) return std::nullopt;
    return back_[size_t(colored_pred)].first;
}

Atom ColoredSignature::paint(const Atom& a, Color c) const {
    return Atom{paint(a.pred, c), a.args};
}

Atom ColoredSignature::unpaint(const Atom& a) const {
    return Atom{unpaint(a.pred).second, a.args};
}

ConjunctiveQuery colorize(const ColoredSignature& cs, const ConjunctiveQuery& q, Color c) {
    if (q.sig == cs.colored()) throw Error("colorize: input already colored");
    ConjunctiveQuery out;
    out.name = std::string(color_name(c)) + "(" + q.name + ")";
    out.sig = cs.colored();
    out.free_vars = q.free_vars;
    for (const Atom& a : q.body) out.body.push_back(cs.paint(a, c));
    return out;
}

Structure colorize(const ColoredSignature& cs, const Structure& d, Color c) {
    if (d.signature() == cs.colored()) throw Error("colorize: input already colored");
    Structure out(cs.colored());
    for (const Atom& a : d.atoms()) out.add_atom(cs.paint(a, c));
    for (const Term& t : d.domain()) out.add_domain_element(t);
    return out;
}

ConjunctiveQuery dalt(const ColoredSignature& cs, const ConjunctiveQuery& q) {
    ConjunctiveQuery out;
    out.name = "dalt(" + q.name + ")";
    out.sig = cs.base();
    out.free_vars = q.free_vars;
    for (const Atom& a : q.body) out.body.push_back(cs.unpaint(a));
    return out;
}

Structure dalt(const ColoredSignature& cs, const Structure& d) {
    Structure out(cs.base());
    for (const Atom& a : d.atoms()) out.add_atom(cs.unpaint(a));
    for (const Term& t : d.domain()) out.add_domain_element(t);
    return out;
}

Structure swap_colors(const ColoredSignature& cs, const Structure& d) {
    Structure out(cs.colored());
    for (const Atom& a : d.atoms()) {
        auto [c, base] = cs.unpaint(a.pred);
        out.add_atom(Atom{cs.paint(base, opposite(c)), a.args});
    }
    for (const Term& t : d.domain()) out.add_domain_element(t);
    return out;
}

GeneratedTgds generate_tgds(const ColoredSignature& cs, const std::vector<ConjunctiveQuery>& views) {
    GeneratedTgds out;
    for (const ConjunctiveQuery& q : views) {
        q.validate();
        if (q.sig != cs.base()) throw Error("generate_tgds: view " + q.name + " not over the base signature");

        // Head existentials are fresh copies of the view's bound variables.
        // The tilde cannot appear in parsed identifiers, so no capture.
        Homomorphism rename;
        std::unordered_set<Term, TermHash> free_set(q.free_vars.begin(), q.free_vars.end());
        for (const Term& v : q.all_vars())
            if (!free_set.count(v)) rename.bind(v, Term::var(NameTable::instance().name(v.id) + "~"));

        for (Color c : {Color::Green, Color::Red}) {
            std::vector<Atom> body, head;
            for (const Atom& a : q.body) body.push_back(cs.paint(a, c));
            for (const Atom& a : q.body) head.push_back(rename.apply(cs.paint(a, opposite(c))));
            std::string dir = c == Color::Green ? ".GR" : ".RG";
            out.tgds.push_back(Tgd::make(q.name + dir, cs.colored(), std::move(body), std::move(head),
                                         q.free_vars));
        }
        uint32_t gr = uint32_t(out.tgds.size()) - 2, rg = gr + 1;
        out.paired.push_back(rg);
        out.paired.push_back(gr);
    }
    return out;
}

DeterminacyVerdict decide_determinacy(const DeterminacyInstance& inst, uint64_t budget,
                                      const DeterminacyOptions& opts) {
    inst.query.validate();
    ColoredSignature cs(inst.sig);

    // Fresh constants ā for Q0's free variables; fixed by all homomorphisms.
    auto run_sig = std::make_shared<Signature>();
    for (PredId p = 0; p < PredId(cs.colored()->predicate_count()); ++p)
        run_sig->add_predicate(cs.colored()->predicate_name(p), cs.colored()->arity(p));
    for (const Term& c : cs.colored()->constants())
        run_sig->add_constant(NameTable::instance().name(c.id));
    std::vector<Term> fresh;
    for (size_t i = 0; i < inst.query.free_vars.size(); ++i) {
        std::string name = "a" + std::to_string(i) + "!";
        while (run_sig->has_constant(Term::constant(name))) name = "q0" + name;
        run_sig->add_constant(name);
        fresh.push_back(Term::constant(name));
    }

    ConjunctiveQuery green_q0 = colorize(cs, inst.query, Color::Green);
    ConjunctiveQuery red_q0 = colorize(cs, inst.query, Color::Red);
    green_q0.sig = run_sig;
    red_q0.sig = run_sig;

    // Start structure A[G(Q0)(ā)]: bound variables stay as elements, free
    // variables are identified with the fresh constants.
    Homomorphism to_const;
    for (size_t i = 0; i < fresh.size(); ++i) to_const.bind(inst.query.free_vars[i], fresh[i]);
    Structure d0(run_sig);
    for (const Atom& a : green_q0.body) d0.add_atom(to_const.apply(a));

    auto generated = generate_tgds(cs, inst.views);
    std::vector<Tgd> tgds;
    tgds.reserve(generated.tgds.size());
    for (Tgd& t : generated.tgds)
        tgds.push_back(Tgd::make(t.id, run_sig, t.body, t.head, t.frontier));

    ChaseOptions copts;
    copts.scheduler = opts.scheduler;
    copts.seed = opts.seed;
    copts.paired = generated.paired;
    copts.check_idempotence = opts.check_idempotence;
    copts.observer = opts.observer;
    copts.budget = budget;
    copts.goal = ChaseGoal{red_q0, fresh};
    if (opts.delta_pin_base) {
        std::vector<PredId> pins;
        for (PredId p : *opts.delta_pin_base)
            for (Color col : {Color::Green, Color::Red}) pins.push_back(cs.paint(p, col));
        copts.delta_pin_predicates = std::move(pins);
    }

    ChaseTrace trace = run_chase(tgds, d0, copts);

    DeterminacyVerdict v;
    v.budget_used = trace.applied;
    v.idempotence_violations = trace.idempotence_violations;
    switch (trace.verdict) {
        case ChaseVerdict::GoalReached:
            v.kind = DeterminacyVerdict::Determined;
            v.step = trace.goal_step;
            v.witness = models_witness(trace.final_structure, red_q0, fresh);
            break;
        case ChaseVerdict::Saturated:
            v.kind = DeterminacyVerdict::NotDetermined;
            break;
        case ChaseVerdict::BudgetExhausted:
            v.kind = DeterminacyVerdict::Unknown;
            break;
    }
    if (opts.trace_out) *opts.trace_out = std::move(trace);
    if (opts.tgds_out) *opts.tgds_out = std::move(tgds);
    return v;
}

} // namespace grchase
