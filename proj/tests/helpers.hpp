#pragma once

// Shared fixtures for the test suites.

#include "grchase/textio.hpp"

#include <random>

namespace grchase::testing {

inline SignaturePtr simple_sig() {
    auto sig = std::make_shared<Signature>();
    sig->add_predicate("R", 2);
    sig->add_predicate("S", 2);
    sig->add_constant("a!");
    sig->add_constant("b!");
    sig->add_constant("c!");
    return sig;
}

inline Atom atom(const SignaturePtr& sig, const std::string& pred, std::vector<Term> args) {
    return Atom{*sig->predicate(pred), std::move(args)};
}

inline Term v(const std::string& name) { return Term::var(name); }
inline Term c(const std::string& name) { return Term::constant(name); }

// The canonical role assignment used across the Thue fixtures.
inline WordRoles fixture_roles() {
    WordRoles r;
    r.alpha = 10;
    r.beta1 = 11;
    r.beta0 = 12;
    r.eta1 = 13;
    r.eta0 = 14;
    r.gamma = 15;
    r.gammap = 16;
    return r;
}

/// alphabet 16, roles as above, one equal-length production {beta1.beta0, gamma.gammap}.
inline ThueSystem fixture_thue() {
    ThueSystem ts;
    ts.s = 16;
    ts.roles = fixture_roles();
    ts.productions.push_back({Word{11, 12}, Word{15, 16}});
    return ts;
}

/// The fixture with the gamma production dropped (no longer friendly).
inline ThueSystem fixture_thue_negative() {
    ThueSystem ts = fixture_thue();
    ts.productions.clear();
    return ts;
}

// Random small structure over R,S for property tests.
inline Structure random_structure(std::mt19937_64& rng, int elements, int atoms) {
    auto sig = simple_sig();
    Structure d(sig);
    std::uniform_int_distribution<int> el(0, elements - 1);
    std::uniform_int_distribution<int> pr(0, 1);
    for (int i = 0; i < atoms; ++i) {
        std::string p = pr(rng) ? "R" : "S";
        Term a = Term::var("e" + std::to_string(el(rng)));
        Term b = Term::var("e" + std::to_string(el(rng)));
        d.add_atom(atom(sig, p, {a, b}));
    }
    return d;
}

} // namespace grchase::testing

namespace grchase::testing {

// ---- shared machinery for the spider algebra vs chase comparison ----

/// Least subset of the ideal spiders containing green-full and closed under
/// the given unary queries; the independent fixpoint oracle for zoo tests.
inline std::set<IdealSpider> zoo_fixpoint(const SpiderWorld& w,
                                          const std::vector<SpiderQuery>& queries) {
    std::set<IdealSpider> zoo{IdealSpider{Color::Green, 0, 0}};
    bool changed = true;
    while (changed) {
        changed = false;
        for (const IdealSpider& s : std::vector<IdealSpider>(zoo.begin(), zoo.end()))
            for (const SpiderQuery& f : queries)
                if (auto out = spider_apply(f, s); out && zoo.insert(*out).second) changed = true;
    }
    (void)w;
    return zoo;
}

/// Classes of all real spiders in a chase structure.
inline std::set<IdealSpider> chase_classes(const SpiderWorld& w, const Structure& d) {
    std::set<IdealSpider> out;
    for (const Atom& a : d.atoms()) {
        auto [color, base] = w.colors().unpaint(a.pred);
        if (base != w.h()) continue;
        auto m = classify_real_spider(w, d, a.args[0]);
        if (!m) throw Error("unclassifiable head " + to_string(a.args[0]));
        out.insert(m->spider);
    }
    return out;
}

/// One-step chase behavior on an ideal spider vs the abstract algebra.
/// Returns an error description, or nothing when they agree.
inline std::optional<std::string> algebra_chase_mismatch(const SpiderWorld& w, const SpiderQuery& f,
                                                         const IdealSpider& s) {
    auto tag = [&]() { return to_string(f) + " on " + to_string(s); };
    ConjunctiveQuery view = spider_query(w, f);
    auto gen = generate_tgds(w.colors(), {view});
    Structure d = ideal_spider(w, s);
    auto triggers = active_triggers(gen.tgds, d);
    auto expected = spider_apply(f, s);

    if (!expected) {
        if (!triggers.empty()) return tag() + ": undefined but " + std::to_string(triggers.size()) +
                                      " active triggers";
        return std::nullopt;
    }
    if (triggers.size() != 1)
        return tag() + ": expected one active trigger, found " + std::to_string(triggers.size());
    const Tgd& tgd = gen.tgds[triggers[0].tgd];
    const bool from_green = s.color == Color::Green;
    if (tgd.id != view.name + (from_green ? ".GR" : ".RG"))
        return tag() + ": wrong direction " + tgd.id;

    int32_t nulls = 0;
    auto rec = apply_trigger(d, gen.tgds, triggers[0], 1, nulls);
    Term new_head;
    for (const Atom& a : rec.added_atoms) {
        auto [color, base] = w.colors().unpaint(a.pred);
        if (base == w.h()) new_head = a.args[0];
    }
    if (!new_head.is_null()) return tag() + ": no new head created";
    auto match = classify_real_spider(w, d, new_head);
    if (!match) return tag() + ": new head not classifiable";
    if (!(match->spider == *expected))
        return tag() + ": chase built " + to_string(match->spider) + ", algebra says " +
               to_string(*expected);
    // the spent input pair must be gone
    if (trigger_active(tgd, d, triggers[0].binding)) return tag() + ": trigger still active";
    return std::nullopt;
}

/// Rebuilds stage k (atoms of the initial structure plus the first k steps).
inline Structure stage_of(const ChaseTrace& trace, size_t k) {
    Structure d = trace.initial;
    for (size_t i = 0; i < k && i < trace.steps.size(); ++i)
        for (const Atom& a : trace.steps[i].added_atoms) d.add_atom(a);
    return d;
}

} // namespace grchase::testing
