#include "grchase/spider.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace grchase {

std::string to_string(const IdealSpider& s) {
    std::string out = color_name(s.color);
    if (s.upper) out += "^" + std::to_string(s.upper);
    if (s.lower) out += "_" + std::to_string(s.lower);
    return out;
}

std::string to_string(const SpiderQuery& f) {
    std::string out = "f";
    if (f.upper) out += "^" + std::to_string(f.upper);
    if (f.lower) out += "_" + std::to_string(f.lower);
    return out;
}

std::string to_string(const BinaryQuery& q) {
    return to_string(q.left) + (q.mode == CombineMode::Wedge ? " wedge " : " vee ") +
           to_string(q.right);
}

SpiderWorld::SpiderWorld(int s) : s_(s) {
    if (s < 1) throw Error("spider world needs s >= 1");
    auto sig = std::make_shared<Signature>();
    h_ = sig->add_predicate("H", 3);
    for (int i = 1; i <= s; ++i) {
        tl_.push_back(sig->add_predicate("Tl" + std::to_string(i), 2));
        tu_.push_back(sig->add_predicate("Tu" + std::to_string(i), 2));
        cl_.push_back(sig->add_predicate("Cl" + std::to_string(i), 2));
        cu_.push_back(sig->add_predicate("Cu" + std::to_string(i), 2));
    }
    for (int i = 1; i <= s; ++i) {
        std::string lo = "cl" + std::to_string(i) + "!";
        std::string hi = "cu" + std::to_string(i) + "!";
        sig->add_constant(lo);
        sig->add_constant(hi);
        cl_const_.push_back(Term::constant(lo));
        cu_const_.push_back(Term::constant(hi));
    }

    z_ = Term::var("z");
    z1_ = Term::var("z1");
    z2_ = Term::var("z2");
    for (int i = 1; i <= s; ++i) {
        x_.push_back(Term::var("x" + std::to_string(i)));
        y_.push_back(Term::var("y" + std::to_string(i)));
    }

    phi_.push_back(Atom{h_, {z_, z1_, z2_}});
    for (int i = 1; i <= s; ++i) {
        phi_.push_back(Atom{lower_thigh(i), {z_, lower_knee_var(i)}});
        phi_.push_back(Atom{upper_thigh(i), {z_, upper_knee_var(i)}});
        phi_.push_back(Atom{lower_calf(i), {lower_knee_var(i), lower_const(i)}});
        phi_.push_back(Atom{upper_calf(i), {upper_knee_var(i), upper_const(i)}});
    }

    colors_ = ColoredSignature(sig);
}

std::vector<IdealSpider> SpiderWorld::all_spiders() const {
    std::vector<IdealSpider> out;
    for (Color c : {Color::Green, Color::Red}) {
        out.push_back(IdealSpider{c, 0, 0});
        for (int i = 1; i <= s_; ++i) out.push_back(IdealSpider{c, i, 0});
        for (int j = 1; j <= s_; ++j) out.push_back(IdealSpider{c, 0, j});
        for (int i = 1; i <= s_; ++i)
            for (int j = 1; j <= s_; ++j) out.push_back(IdealSpider{c, i, j});
    }
    return out;
}

std::vector<SpiderQuery> SpiderWorld::all_queries() const {
    std::vector<SpiderQuery> out;
    for (int i = 1; i <= s_; ++i)
        for (int j = 1; j <= s_; ++j) out.push_back(SpiderQuery{i, j});
    for (int i = 1; i <= s_; ++i) out.push_back(SpiderQuery{i, 0});
    for (int j = 1; j <= s_; ++j) out.push_back(SpiderQuery{0, j});
    return out;
}

namespace {

void check_index(const SpiderWorld& w, int idx, const char* side) {
    if (idx < 0 || idx > w.s())
        throw Error(std::string("spider ") + side + " index outside 1..s: " + std::to_string(idx));
}

} // namespace

Structure ideal_spider(const SpiderWorld& w, const IdealSpider& sp) {
    check_index(w, sp.upper, "upper");
    check_index(w, sp.lower, "lower");
    Structure d(w.colored());
    for (const Atom& a : w.phi()) {
        Color c = sp.color;
        if (sp.lower && a.pred == w.lower_calf(sp.lower)) c = opposite(sp.color);
        if (sp.upper && a.pred == w.upper_calf(sp.upper)) c = opposite(sp.color);
        d.add_atom(w.colors().paint(a, c));
    }
    return d;
}

ConjunctiveQuery spider_query(const SpiderWorld& w, const SpiderQuery& f) {
    check_index(w, f.upper, "upper");
    check_index(w, f.lower, "lower");
    if (!f.upper && !f.lower) throw Error("spider query needs at least one removed calf");
    ConjunctiveQuery q;
    q.name = to_string(f);
    q.sig = w.base();
    for (const Atom& a : w.phi()) {
        if (f.lower && a.pred == w.lower_calf(f.lower)) continue;
        if (f.upper && a.pred == w.upper_calf(f.upper)) continue;
        q.body.push_back(a);
    }
    if (f.lower) q.free_vars.push_back(w.lower_knee_var(f.lower));
    if (f.upper) q.free_vars.push_back(w.upper_knee_var(f.upper));
    q.validate();
    return q;
}

ConjunctiveQuery combine(const SpiderWorld& w, const SpiderQuery& f, const SpiderQuery& g,
                         CombineMode mode, const std::string& name) {
    ConjunctiveQuery left = spider_query(w, f);
    ConjunctiveQuery right = spider_query(w, g);

    const Term shared = mode == CombineMode::Wedge ? w.antenna_var() : w.tail_var();
    Homomorphism rename;
    for (const Term& v : right.all_vars()) {
        if (v == shared)
            rename.bind(v, v); // identified across the two copies
        else
            rename.bind(v, Term::var(NameTable::instance().name(v.id) + "'"));
    }

    ConjunctiveQuery q;
    q.name = name.empty() ? to_string(f) + (mode == CombineMode::Wedge ? "^" : "v") + to_string(g)
                          : name;
    q.sig = w.base();
    q.body = left.body;
    for (const Atom& a : right.body) q.body.push_back(rename.apply(a));

    q.free_vars = left.free_vars;
    for (const Term& v : right.free_vars) q.free_vars.push_back(rename.apply(v));
    if (mode == CombineMode::Wedge) {
        q.free_vars.push_back(w.tail_var());
        q.free_vars.push_back(rename.apply(Term::var("z1")));
    } else {
        q.free_vars.push_back(w.antenna_var());
        q.free_vars.push_back(rename.apply(Term::var("z2")));
    }
    q.validate();
    return q;
}

ConjunctiveQuery to_query(const SpiderWorld& w, const BinaryQuery& q) {
    return combine(w, q.left, q.right, q.mode, q.name);
}

std::optional<IdealSpider> spider_apply(const SpiderQuery& f, const IdealSpider& s) {
    if (s.upper != 0 && s.upper != f.upper) return std::nullopt; // I' ⊆ I
    if (s.lower != 0 && s.lower != f.lower) return std::nullopt; // J' ⊆ J
    IdealSpider out;
    out.color = opposite(s.color);
    out.upper = s.upper == 0 ? f.upper : 0;
    out.lower = s.lower == 0 ? f.lower : 0;
    return out;
}

namespace {

struct LegProbe {
    Term knee;
    Color calf_color;
};

// The unique same-colored thigh and its knee's unique calf; throws when the
// leg is missing or duplicated.
LegProbe probe_leg(const SpiderWorld& w, const Structure& d, const Term& head, Color head_color,
                   PredId thigh, PredId calf, const Term& expected_const) {
    const ColoredSignature& cs = w.colors();
    std::vector<std::pair<Color, const Atom*>> thighs;
    for (Color c : {Color::Green, Color::Red}) {
        for (uint32_t id : d.atoms_with(cs.paint(thigh, c), 0, head))
            thighs.emplace_back(c, &d.atoms()[id]);
    }
    if (thighs.size() != 1)
        throw StructuralViolation("head " + to_string(head) + " has " +
                                  std::to_string(thighs.size()) + " thighs for " +
                                  w.base()->predicate_name(thigh));
    if (thighs[0].first != head_color)
        throw StructuralViolation("thigh color differs from head color at " + to_string(head));
    Term knee = thighs[0].second->args[1];

    std::vector<std::pair<Color, const Atom*>> calves;
    for (Color c : {Color::Green, Color::Red}) {
        for (uint32_t id : d.atoms_with(cs.paint(calf, c), 0, knee))
            calves.emplace_back(c, &d.atoms()[id]);
    }
    if (calves.size() != 1)
        throw StructuralViolation("knee " + to_string(knee) + " has " +
                                  std::to_string(calves.size()) + " calves for " +
                                  w.base()->predicate_name(calf));
    if (calves[0].second->args[1] != expected_const)
        throw StructuralViolation("calf at knee " + to_string(knee) + " ends in the wrong constant");
    return LegProbe{knee, calves[0].first};
}

} // namespace

std::optional<SpiderMatch> classify_real_spider(const SpiderWorld& w, const Structure& d,
                                                const Term& head) {
    const ColoredSignature& cs = w.colors();
    std::vector<std::pair<Color, const Atom*>> h_atoms;
    for (Color c : {Color::Green, Color::Red}) {
        for (uint32_t id : d.atoms_with(cs.paint(w.h(), c), 0, head))
            h_atoms.emplace_back(c, &d.atoms()[id]);
    }
    if (h_atoms.empty()) return std::nullopt;
    if (h_atoms.size() > 1)
        throw StructuralViolation("element " + to_string(head) + " heads " +
                                  std::to_string(h_atoms.size()) + " H atoms");

    SpiderMatch m;
    Color hc = h_atoms[0].first;
    m.head = head;
    m.tail = h_atoms[0].second->args[1];
    m.antenna = h_atoms[0].second->args[2];
    m.lower_knees.resize(size_t(w.s()) + 1);
    m.upper_knees.resize(size_t(w.s()) + 1);

    int lame_upper = 0, lame_lower = 0;
    for (int i = 1; i <= w.s(); ++i) {
        LegProbe lo = probe_leg(w, d, head, hc, w.lower_thigh(i), w.lower_calf(i), w.lower_const(i));
        LegProbe hi = probe_leg(w, d, head, hc, w.upper_thigh(i), w.upper_calf(i), w.upper_const(i));
        m.lower_knees[size_t(i)] = lo.knee;
        m.upper_knees[size_t(i)] = hi.knee;
        if (lo.calf_color != hc) {
            if (lame_lower) throw StructuralViolation("two lame lower legs at head " + to_string(head));
            lame_lower = i;
        }
        if (hi.calf_color != hc) {
            if (lame_upper) throw StructuralViolation("two lame upper legs at head " + to_string(head));
            lame_upper = i;
        }
    }

    m.spider = IdealSpider{hc, lame_upper, lame_lower};
    m.embedding.bind(w.head_var(), m.head);
    m.embedding.bind(w.tail_var(), m.tail);
    m.embedding.bind(w.antenna_var(), m.antenna);
    for (int i = 1; i <= w.s(); ++i) {
        m.embedding.bind(w.lower_knee_var(i), m.lower_knees[size_t(i)]);
        m.embedding.bind(w.upper_knee_var(i), m.upper_knees[size_t(i)]);
    }
    return m;
}

std::vector<std::string> audit_spider_structure(const SpiderWorld& w, const Structure& d) {
    std::vector<std::string> out;
    const ColoredSignature& cs = w.colors();
    const Signature& sig = *w.colored();

    std::map<std::pair<Term, PredId>, int> outdeg;
    std::unordered_set<Term, TermHash> heads, knees;
    std::map<std::pair<Term, Term>, std::vector<Color>> pair_heads;

    for (const Atom& a : d.atoms()) {
        if (a.args.size() == 2) outdeg[{a.args[0], a.pred}] += 1;
        auto [color, base] = cs.unpaint(a.pred);
        if (base == w.h()) {
            heads.insert(a.args[0]);
            pair_heads[{a.args[1], a.args[2]}].push_back(color);
        }
        for (int i = 1; i <= w.s(); ++i) {
            if (base == w.lower_thigh(i) || base == w.upper_thigh(i)) knees.insert(a.args[1]);
        }
    }

    for (const Term& k : knees) {
        int total = 0;
        for (PredId p = 0; p < PredId(sig.predicate_count()); ++p)
            if (sig.arity(p) == 2) total += outdeg.count({k, p}) ? outdeg[{k, p}] : 0;
        if (total != 1)
            out.push_back("knee " + to_string(k) + " has out-degree " + std::to_string(total));
    }

    for (const Term& h : heads) {
        std::optional<SpiderMatch> m;
        try {
            m = classify_real_spider(w, d, h);
        } catch (const StructuralViolation& e) {
            out.push_back(e.what());
            continue;
        }
        Color hc = m->spider.color;
        for (PredId p = 0; p < PredId(sig.predicate_count()); ++p) {
            if (sig.arity(p) != 2) continue;
            int deg = outdeg.count({h, p}) ? outdeg[{h, p}] : 0;
            auto [color, base] = cs.unpaint(p);
            bool own_thigh = color == hc;
            if (own_thigh) {
                own_thigh = false;
                for (int i = 1; i <= w.s(); ++i)
                    own_thigh |= base == w.lower_thigh(i) || base == w.upper_thigh(i);
            }
            int want = own_thigh ? 1 : 0;
            if (deg != want)
                out.push_back("head " + to_string(h) + " has out-degree " + std::to_string(deg) +
                              " for " + sig.predicate_name(p));
        }
    }

    for (const auto& [pair, colors] : pair_heads) {
        if (colors.size() > 2)
            out.push_back("pair (" + to_string(pair.first) + "," + to_string(pair.second) +
                          ") carries " + std::to_string(colors.size()) + " H atoms");
        for (size_t i = 1; i < colors.size(); ++i)
            if (colors[i] != colors[0])
                out.push_back("pair (" + to_string(pair.first) + "," + to_string(pair.second) +
                              ") carries H atoms of both colors");
    }
    return out;
}

SpiderQuery parse_spider_query(const std::string& text) {
    size_t i = 0;
    auto fail = [&]() -> SpiderQuery { throw Error("bad spider query: " + text); };
    if (i >= text.size() || text[i] != 'f') return fail();
    ++i;
    SpiderQuery f;
    auto read_int = [&]() {
        size_t start = i;
        while (i < text.size() && isdigit(uint8_t(text[i]))) ++i;
        if (start == i) fail();
        return std::stoi(text.substr(start, i - start));
    };
    if (i < text.size() && text[i] == '^') {
        ++i;
        f.upper = read_int();
    }
    if (i < text.size() && text[i] == '_') {
        ++i;
        f.lower = read_int();
    }
    if (i != text.size()) fail();
    return f;
}

IdealSpider parse_spider_label(const std::string& text) {
    std::string t;
    for (char c : text)
        if (!isspace(uint8_t(c))) t += c;
    if (t.empty() || (t[0] != 'G' && t[0] != 'R')) throw Error("bad spider label: " + text);
    IdealSpider s;
    s.color = t[0] == 'G' ? Color::Green : Color::Red;
    size_t i = 1;
    auto read_int = [&]() {
        size_t start = i;
        while (i < t.size() && isdigit(uint8_t(t[i]))) ++i;
        if (start == i) throw Error("bad spider label: " + text);
        return std::stoi(t.substr(start, i - start));
    };
    if (i < t.size() && t[i] == '^') {
        ++i;
        s.upper = read_int();
    }
    if (i < t.size() && t[i] == '_') {
        ++i;
        s.lower = read_int();
    }
    if (i != t.size()) throw Error("bad spider label: " + text);
    return s;
}

} // namespace grchase
