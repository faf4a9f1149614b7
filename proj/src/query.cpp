#include "grchase/query.hpp"

#include <algorithm>
#include <sstream>

namespace grchase {

std::vector<Term> ConjunctiveQuery::all_vars() const {
    std::vector<Term> out;
    std::unordered_set<Term, TermHash> seen;
    for (const Atom& a : body)
        for (const Term& t : a.args)
            if (t.is_var() && seen.insert(t).second) out.push_back(t);
    return out;
}

void ConjunctiveQuery::validate() const {
    if (!sig) throw Error("query " + name + " has no signature");
    std::unordered_set<Term, TermHash> body_vars;
    for (const Atom& a : body) {
        if (int(a.args.size()) != sig->arity(a.pred))
            throw Error("query " + name + ": arity mismatch on " + sig->predicate_name(a.pred));
        for (const Term& t : a.args) {
            if (t.is_null()) throw Error("query " + name + ": null in body");
            if (t.is_var()) body_vars.insert(t);
        }
    }
    std::unordered_set<Term, TermHash> seen_free;
    for (const Term& v : free_vars) {
        if (!v.is_var()) throw Error("query " + name + ": free list holds a non-variable");
        if (body_vars.count(v) == 0)
            throw Error("query " + name + ": free variable " + to_string(v) + " not in body");
        if (!seen_free.insert(v).second)
            throw Error("query " + name + ": duplicate free variable " + to_string(v));
    }
}

Structure canonical_structure(const ConjunctiveQuery& q) {
    q.validate();
    Structure d(q.sig);
    for (const Atom& a : q.body) d.add_atom(a);
    for (const Term& v : q.free_vars) d.add_domain_element(v);
    return d;
}

ConjunctiveQuery query_of(const Structure& d, const std::vector<Term>& free_elements,
                          const std::string& name) {
    auto as_var = [](const Term& t) -> Term {
        if (t.is_null()) return Term::var("n" + std::to_string(t.id));
        return t;
    };
    ConjunctiveQuery q;
    q.name = name;
    q.sig = d.signature();
    for (const Atom& a : d.atoms()) {
        Atom b{a.pred, {}};
        b.args.reserve(a.args.size());
        for (const Term& t : a.args) b.args.push_back(as_var(t));
        q.body.push_back(std::move(b));
    }
    for (const Term& t : free_elements) {
        if (t.is_constant()) throw Error("query_of: constants cannot be free variables");
        q.free_vars.push_back(as_var(t));
    }
    q.validate();
    return q;
}

bool Homomorphism::bind(const Term& from, const Term& to) {
    if (from.is_constant() && from != to) return false;
    auto [it, inserted] = map_.emplace(from, to);
    return inserted || it->second == to;
}

std::optional<Term> Homomorphism::lookup(const Term& t) const {
    if (t.is_constant()) return t;
    auto it = map_.find(t);
    if (it == map_.end()) return std::nullopt;
    return it->second;
}

Term Homomorphism::apply(const Term& t) const {
    auto v = lookup(t);
    return v ? *v : t;
}

Atom Homomorphism::apply(const Atom& a) const {
    Atom out{a.pred, {}};
    out.args.reserve(a.args.size());
    for (const Term& t : a.args) out.args.push_back(apply(t));
    return out;
}

Homomorphism Homomorphism::compose(const Homomorphism& first, const Homomorphism& second) {
    Homomorphism out;
    for (const auto& [from, mid] : first.map_) out.bind(from, second.apply(mid));
    return out;
}

namespace {

struct SearchState {
    const Structure& src;
    const Structure& dst;
    const HomCallback& cb;
    bool injective;
    std::unordered_map<Term, Term, TermHash> assign;
    std::unordered_set<Term, TermHash> used; // injective mode only
    std::vector<const Atom*> atoms;          // ordered source atoms
    std::vector<Term> loose;                 // domain elements in no atom
    bool stopped = false;

    bool bound(const Term& t) const { return t.is_constant() || assign.count(t) > 0; }
    Term value(const Term& t) const {
        if (t.is_constant()) return t;
        return assign.at(t);
    }
};

// Candidate target atoms for a partially bound source atom: the positional
// index with the fewest entries, or the whole predicate bucket.
const std::vector<uint32_t>& candidates(const SearchState& st, const Atom& a) {
    const std::vector<uint32_t>* best = &st.dst.atoms_with_pred(a.pred);
    for (int i = 0; i < int(a.args.size()); ++i) {
        const Term& t = a.args[size_t(i)];
        if (st.bound(t)) {
            const auto& idx = st.dst.atoms_with(a.pred, i, st.value(t));
            if (idx.size() < best->size()) best = &idx;
        }
    }
    return *best;
}

void match_loose(SearchState& st, size_t i) {
    if (st.stopped) return;
    if (i == st.loose.size()) {
        Homomorphism h;
        for (const auto& [from, to] : st.assign) h.bind(from, to);
        for (const Term& c : st.src.domain())
            if (c.is_constant()) h.bind(c, c);
        if (!st.cb(h)) st.stopped = true;
        return;
    }
    const Term& e = st.loose[i];
    if (st.bound(e)) {
        match_loose(st, i + 1);
        return;
    }
    for (const Term& t : st.dst.domain()) {
        if (st.injective && st.used.count(t)) continue;
        st.assign.emplace(e, t);
        if (st.injective) st.used.insert(t);
        match_loose(st, i + 1);
        if (st.injective) st.used.erase(t);
        st.assign.erase(e);
        if (st.stopped) return;
    }
}

void match_atom(SearchState& st, size_t i) {
    if (st.stopped) return;
    if (i == st.atoms.size()) {
        match_loose(st, 0);
        return;
    }
    const Atom& a = *st.atoms[i];
    for (uint32_t cand : candidates(st, a)) {
        const Atom& t = st.dst.atoms()[cand];
        std::vector<Term> newly;
        bool ok = true;
        for (size_t j = 0; j < a.args.size(); ++j) {
            const Term& s = a.args[j];
            const Term& d = t.args[j];
            if (s.is_constant()) {
                if (s != d) { ok = false; break; }
            } else if (auto v = st.assign.find(s); v != st.assign.end()) {
                if (v->second != d) { ok = false; break; }
            } else {
                if (st.injective && st.used.count(d)) { ok = false; break; }
                st.assign.emplace(s, d);
                if (st.injective) st.used.insert(d);
                newly.push_back(s);
            }
        }
        if (ok) match_atom(st, i + 1);
        for (auto it = newly.rbegin(); it != newly.rend(); ++it) {
            if (st.injective) st.used.erase(st.assign.at(*it));
            st.assign.erase(*it);
        }
        if (st.stopped) return;
    }
}

} // namespace

void find_homomorphisms(const Structure& source, const Structure& target,
                        const Homomorphism& seed, const HomCallback& cb,
                        const HomOptions& opts) {
    SearchState st{source, target, cb, opts.injective, {}, {}, {}, {}};

    for (const auto& [from, to] : seed.mapping()) {
        if (from.is_constant()) {
            if (from != to) return; // constant remapped: empty stream
            continue;
        }
        auto [it, inserted] = st.assign.emplace(from, to);
        if (!inserted && it->second != to) return;
    }
    if (opts.injective) {
        for (const auto& [from, to] : st.assign) {
            if (!st.used.insert(to).second) return;
        }
        for (const Term& c : source.domain())
            if (c.is_constant() && !st.used.insert(c).second) return;
    }

    // Greedy static atom order: most bound endpoints first, ties by file
    // order. Bound counts are maintained incrementally as elements get
    // covered, keeping the ordering cheap on spider-sized bodies.
    const auto& src_atoms = source.atoms();
    const size_t n = src_atoms.size();
    std::unordered_map<Term, std::vector<uint32_t>, TermHash> occurrences;
    std::vector<int> bound(n, 0);
    std::vector<bool> placed(n, false);
    std::unordered_set<Term, TermHash> covered;
    for (uint32_t i = 0; i < n; ++i) {
        for (const Term& t : src_atoms[i].args) {
            if (t.is_constant())
                bound[i] += 1;
            else
                occurrences[t].push_back(i);
        }
    }
    // Lazily promoted buckets by bound count; stale entries are skipped.
    std::vector<std::vector<uint32_t>> buckets;
    auto bucket_push = [&](uint32_t i) {
        size_t level = size_t(bound[i]);
        if (buckets.size() <= level) buckets.resize(level + 1);
        buckets[level].push_back(i);
    };
    auto cover = [&](const Term& t) {
        if (t.is_constant() || !covered.insert(t).second) return;
        for (uint32_t j : occurrences[t]) {
            bound[j] += 1;
            if (!placed[j]) bucket_push(j);
        }
    };
    for (const auto& [from, to] : st.assign) {
        if (!from.is_constant() && covered.insert(from).second)
            for (uint32_t j : occurrences[from]) bound[j] += 1;
    }
    for (uint32_t i = 0; i < n; ++i) bucket_push(i);
    for (size_t round = 0; round < n; ++round) {
        uint32_t best = uint32_t(n);
        for (size_t level = buckets.size(); level-- > 0 && best == n;) {
            auto& bucket = buckets[level];
            while (!bucket.empty()) {
                uint32_t i = bucket.back();
                bucket.pop_back();
                if (placed[i] || size_t(bound[i]) != level) continue; // stale
                best = i;
                break;
            }
        }
        placed[best] = true;
        st.atoms.push_back(&src_atoms[best]);
        for (const Term& t : src_atoms[best].args) cover(t);
    }

    for (const Term& e : source.domain()) {
        if (e.is_constant()) continue;
        if (covered.count(e) == 0) st.loose.push_back(e);
    }

    match_atom(st, 0);
}

std::optional<Homomorphism> find_one_homomorphism(const Structure& source, const Structure& target,
                                                  const Homomorphism& seed, const HomOptions& opts) {
    std::optional<Homomorphism> out;
    find_homomorphisms(source, target, seed, [&](const Homomorphism& h) {
        out = h;
        return false;
    }, opts);
    return out;
}

std::set<std::vector<Term>> evaluate(const ConjunctiveQuery& q, const Structure& d) {
    Structure canon = canonical_structure(q);
    std::set<std::vector<Term>> out;
    find_homomorphisms(canon, d, {}, [&](const Homomorphism& h) {
        std::vector<Term> row;
        row.reserve(q.free_vars.size());
        for (const Term& v : q.free_vars) row.push_back(h.apply(v));
        out.insert(std::move(row));
        return true;
    });
    return out;
}

std::optional<Homomorphism> models_witness(const Structure& d, const ConjunctiveQuery& q,
                                           const std::vector<Term>& args) {
    if (args.size() != q.free_vars.size())
        throw Error("check_models: argument count mismatch for " + q.name);
    Homomorphism seed;
    for (size_t i = 0; i < args.size(); ++i) {
        if (!d.in_domain(args[i])) return std::nullopt;
        if (!seed.bind(q.free_vars[i], args[i])) return std::nullopt;
    }
    Structure canon = canonical_structure(q);
    return find_one_homomorphism(canon, d, seed);
}

bool check_models(const Structure& d, const ConjunctiveQuery& q, const std::vector<Term>& args) {
    return models_witness(d, q, args).has_value();
}

bool isomorphic(const Structure& a, const Structure& b) {
    if (a.atoms().size() != b.atoms().size()) return false;
    if (a.domain().size() != b.domain().size()) return false;
    HomOptions inj{.injective = true};
    if (!find_one_homomorphism(a, b, {}, inj)) return false;
    return find_one_homomorphism(b, a, {}, inj).has_value();
}

std::string to_string(const ConjunctiveQuery& q) {
    std::ostringstream out;
    out << q.name << "(";
    for (size_t i = 0; i < q.free_vars.size(); ++i) {
        if (i) out << ",";
        out << to_string(q.free_vars[i]);
    }
    out << ") :- ";
    for (size_t i = 0; i < q.body.size(); ++i) {
        if (i) out << ", ";
        out << to_string(q.body[i], *q.sig);
    }
    out << ".";
    return out.str();
}

} // namespace grchase
