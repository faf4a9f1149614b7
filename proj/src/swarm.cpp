#include "grchase/swarm.hpp"

#include "json.hpp"

#include <algorithm>
#include <deque>
#include <random>
#include <sstream>

namespace grchase {

namespace {
uint64_t label_key(const IdealSpider& s) {
    return (uint64_t(uint8_t(s.color)) << 42) | (uint64_t(uint32_t(s.upper)) << 21) |
           uint64_t(uint32_t(s.lower));
}
const std::vector<uint32_t> kEmpty;
} // namespace

uint32_t Swarm::add_edge(const IdealSpider& label, Vertex tail, Vertex antenna) {
    SwarmEdge e{label, tail, antenna};
    if (edge_set_.count(e)) {
        // set semantics: the triple is already present
        for (uint32_t id : by_pair_.at({tail, antenna}))
            if (edges_[id] == e) return id;
    }
    auto& pair_edges = by_pair_[{tail, antenna}];
    if (pair_edges.size() >= 2)
        throw StructuralViolation("pair (" + std::to_string(tail) + "," + std::to_string(antenna) +
                                  ") would carry three labels");
    for (uint32_t id : pair_edges)
        if (edges_[id].label.color != label.color)
            throw StructuralViolation("pair (" + std::to_string(tail) + "," +
                                      std::to_string(antenna) + ") would mix colors");

    uint32_t id = uint32_t(edges_.size());
    edges_.push_back(e);
    edge_set_.insert(e);
    pair_edges.push_back(id);
    tails_[tail].push_back(id);
    antennas_[antenna].push_back(id);
    label_tail_[{label_key(label), tail}].push_back(id);
    label_antenna_[{label_key(label), antenna}].push_back(id);
    ensure_vertex(tail);
    ensure_vertex(antenna);
    return id;
}

void Swarm::ensure_vertex(Vertex v) {
    if (v >= next_vertex_) next_vertex_ = v + 1;
}

bool Swarm::has_edge(const IdealSpider& label, Vertex tail, Vertex antenna) const {
    return edge_set_.count(SwarmEdge{label, tail, antenna}) > 0;
}

const std::vector<uint32_t>& Swarm::by_tail(Vertex v) const {
    auto it = tails_.find(v);
    return it == tails_.end() ? kEmpty : it->second;
}

const std::vector<uint32_t>& Swarm::by_antenna(Vertex v) const {
    auto it = antennas_.find(v);
    return it == antennas_.end() ? kEmpty : it->second;
}

const std::vector<uint32_t>& Swarm::by_label_tail(const IdealSpider& label, Vertex tail) const {
    auto it = label_tail_.find({label_key(label), tail});
    return it == label_tail_.end() ? kEmpty : it->second;
}

const std::vector<uint32_t>& Swarm::by_label_antenna(const IdealSpider& label, Vertex antenna) const {
    auto it = label_antenna_.find({label_key(label), antenna});
    return it == label_antenna_.end() ? kEmpty : it->second;
}

Swarm initial_swarm() {
    Swarm w;
    w.add_edge(IdealSpider{Color::Green, 0, 0}, 0, 1);
    return w;
}

Ruleset Ruleset::make(std::vector<BinaryQuery> rules) {
    Ruleset rs;
    rs.rules = std::move(rules);
    rs.assoc.assign(rs.rules.size(), std::nullopt);
    std::unordered_map<std::string, uint32_t> by_name;
    for (uint32_t i = 0; i < rs.rules.size(); ++i) {
        if (!by_name.emplace(rs.rules[i].name, i).second)
            throw Error("duplicate rule name: " + rs.rules[i].name);
    }
    for (uint32_t i = 0; i < rs.rules.size(); ++i) {
        if (!rs.rules[i].assoc) continue;
        auto it = by_name.find(*rs.rules[i].assoc);
        if (it == by_name.end())
            throw Error("rule " + rs.rules[i].name + " names unknown associate " +
                        *rs.rules[i].assoc);
        rs.assoc[i] = it->second;
    }
    return rs;
}

bool rewrite_matches(const Ruleset& rs, const Swarm& w, const RewriteInput& in) {
    const BinaryQuery& q = rs.rules.at(in.rule);
    const SwarmEdge& a = w.edges().at(in.e1);
    const SwarmEdge& b = w.edges().at(in.e2);
    if (a.label.color != b.label.color) return false;
    if (q.mode == CombineMode::Wedge) {
        if (a.antenna != b.antenna) return false;
    } else {
        if (a.tail != b.tail) return false;
    }
    return spider_apply(q.left, a.label).has_value() && spider_apply(q.right, b.label).has_value();
}

bool rewrite_satisfied(const Ruleset& rs, const Swarm& w, const RewriteInput& in) {
    const BinaryQuery& q = rs.rules.at(in.rule);
    const SwarmEdge& a = w.edges().at(in.e1);
    const SwarmEdge& b = w.edges().at(in.e2);
    auto lao = spider_apply(q.left, a.label);
    auto lbo = spider_apply(q.right, b.label);
    if (!lao || !lbo) throw Error("rewrite_satisfied: labels outside the rule's domain");
    IdealSpider la = *lao;
    IdealSpider lb = *lbo;
    if (q.mode == CombineMode::Wedge) {
        // some v with (la, a.tail, v) and (lb, b.tail, v)
        for (uint32_t id : w.by_label_tail(la, a.tail)) {
            Vertex v = w.edges()[id].antenna;
            if (w.has_edge(lb, b.tail, v)) return true;
        }
    } else {
        for (uint32_t id : w.by_label_antenna(la, a.antenna)) {
            Vertex v = w.edges()[id].tail;
            if (w.has_edge(lb, v, b.antenna)) return true;
        }
    }
    return false;
}

bool rewrite_active(const Ruleset& rs, const Swarm& w, const RewriteInput& in) {
    return rewrite_matches(rs, w, in) && !rewrite_satisfied(rs, w, in);
}

std::vector<RewriteInput> active_rewrites(const Ruleset& rs, const Swarm& w) {
    std::vector<RewriteInput> out;
    for (uint32_t r = 0; r < rs.rules.size(); ++r) {
        for (uint32_t e1 = 0; e1 < w.edges().size(); ++e1) {
            const SwarmEdge& a = w.edges()[e1];
            const auto& partners = rs.rules[r].mode == CombineMode::Wedge
                                       ? w.by_antenna(a.antenna)
                                       : w.by_tail(a.tail);
            for (uint32_t e2 : partners) {
                RewriteInput in{r, e1, e2};
                if (rewrite_active(rs, w, in)) out.push_back(in);
            }
        }
    }
    return out;
}

SwarmStep rewrite_step(const Ruleset& rs, Swarm& w, const RewriteInput& in, uint64_t step) {
    if (!rewrite_active(rs, w, in))
        throw Error("rewrite_step: input for rule " + rs.rules.at(in.rule).name + " is not active");
    const BinaryQuery& q = rs.rules[in.rule];
    const SwarmEdge a = w.edges()[in.e1];
    const SwarmEdge b = w.edges()[in.e2];
    IdealSpider la = *spider_apply(q.left, a.label);
    IdealSpider lb = *spider_apply(q.right, b.label);

    SwarmStep rec;
    rec.step = step;
    rec.input = in;
    rec.out_color = la.color;
    rec.new_vertex = w.fresh_vertex();
    if (q.mode == CombineMode::Wedge) {
        rec.out1 = w.add_edge(la, a.tail, rec.new_vertex);
        rec.out2 = w.add_edge(lb, b.tail, rec.new_vertex);
    } else {
        rec.out1 = w.add_edge(la, rec.new_vertex, a.antenna);
        rec.out2 = w.add_edge(lb, rec.new_vertex, b.antenna);
    }
    return rec;
}

namespace {

struct PendingRewrites {
    std::deque<RewriteInput> queue;
    std::set<RewriteInput> seen;

    void push_back(const RewriteInput& in) {
        if (seen.insert(in).second) queue.push_back(in);
    }
    void force_front(const RewriteInput& in) {
        seen.insert(in);
        queue.push_front(in); // duplicates are harmless: pops re-validate
    }
};

// All candidate inputs that involve edge `e`.
std::vector<RewriteInput> discover_for_edge(const Ruleset& rs, const Swarm& w, uint32_t e) {
    std::vector<RewriteInput> out;
    const SwarmEdge& edge = w.edges()[e];
    for (uint32_t r = 0; r < rs.rules.size(); ++r) {
        const bool wedge = rs.rules[r].mode == CombineMode::Wedge;
        const auto& partners = wedge ? w.by_antenna(edge.antenna) : w.by_tail(edge.tail);
        for (uint32_t p : partners) {
            RewriteInput first{r, e, p};
            if (rewrite_matches(rs, w, first)) out.push_back(first);
            if (p != e) {
                RewriteInput second{r, p, e};
                if (rewrite_matches(rs, w, second)) out.push_back(second);
            }
        }
    }
    return out;
}

} // namespace

SwarmTrace swarm_chase(const Ruleset& rs, const Swarm& w0, const SwarmChaseOptions& opts) {
    SwarmTrace trace;
    trace.swarm = w0;
    trace.initial_edges = uint32_t(w0.edges().size());
    Swarm& w = trace.swarm;
    std::mt19937_64 rng(opts.seed);

    auto goal_hit = [&](uint32_t lo, uint32_t hi) {
        if (!opts.goal_label) return false;
        for (uint32_t i = lo; i < hi; ++i)
            if (w.edges()[i].label == *opts.goal_label) return true;
        return false;
    };

    if (goal_hit(0, uint32_t(w.edges().size()))) {
        trace.goal_step = 0;
        trace.verdict = ChaseVerdict::GoalReached;
        return trace;
    }

    PendingRewrites pending;
    const bool newest = opts.scheduler == SchedulerKind::NewestFirst;
    {
        auto initial = active_rewrites(rs, w);
        for (const auto& in : initial) pending.push_back(in);
    }

    while (!pending.queue.empty()) {
        RewriteInput in;
        if (opts.scheduler == SchedulerKind::Random) {
            std::uniform_int_distribution<size_t> dist(0, pending.queue.size() - 1);
            size_t k = dist(rng);
            in = pending.queue[k];
            pending.queue.erase(pending.queue.begin() + long(k));
        } else {
            in = pending.queue.front();
            pending.queue.pop_front();
        }

        if (rewrite_satisfied(rs, w, in)) continue; // condition 5 re-checked

        if (trace.applied >= opts.budget) {
            trace.verdict = ChaseVerdict::BudgetExhausted;
            return trace;
        }

        SwarmStep rec = rewrite_step(rs, w, in, trace.applied + 1);
        trace.applied += 1;

        if (opts.check_idempotence && rewrite_active(rs, w, in))
            trace.idempotence_violations.push_back("input of rule " + rs.rules[in.rule].name +
                                                   " still active after execution");

        std::vector<RewriteInput> batch;
        for (uint32_t e : {rec.out1, rec.out2})
            for (const auto& found : discover_for_edge(rs, w, e)) batch.push_back(found);
        // both outputs touch only the fresh vertex, so dedup pairwise overlap
        std::vector<RewriteInput> uniq;
        for (const auto& b : batch)
            if (std::find(uniq.begin(), uniq.end(), b) == uniq.end()) uniq.push_back(b);

        if (newest) {
            for (auto it = uniq.rbegin(); it != uniq.rend(); ++it) pending.force_front(*it);
            // spouse priority: a fresh couple's associated rewriting runs next
            if (auto assoc = rs.assoc[in.rule]) {
                RewriteInput spouse{*assoc, rec.out1, rec.out2};
                if (rewrite_active(rs, w, spouse)) pending.force_front(spouse);
            }
        } else {
            for (const auto& b : uniq) pending.push_back(b);
        }

        if (opts.observer) opts.observer(rec, w);
        trace.steps.push_back(rec);

        if (goal_hit(rec.out1, uint32_t(w.edges().size()))) {
            trace.goal_step = trace.applied;
            trace.verdict = ChaseVerdict::GoalReached;
            return trace;
        }
    }

    trace.verdict = ChaseVerdict::Saturated;
    return trace;
}

SwarmOfResult swarm_of(const SpiderWorld& world, const Structure& d) {
    SwarmOfResult res;
    const ColoredSignature& cs = world.colors();
    auto vertex = [&](const Term& t) {
        auto it = res.vertex_of.find(t);
        if (it != res.vertex_of.end()) return it->second;
        Vertex v = Vertex(res.term_of.size());
        res.vertex_of.emplace(t, v);
        res.term_of.push_back(t);
        return v;
    };
    for (const Atom& a : d.atoms()) {
        auto [color, base] = cs.unpaint(a.pred);
        if (base != world.h()) continue;
        auto m = classify_real_spider(world, d, a.args[0]);
        if (!m)
            throw StructuralViolation("H atom head " + to_string(a.args[0]) + " not classifiable");
        res.swarm.add_edge(m->spider, vertex(a.args[1]), vertex(a.args[2]));
    }
    return res;
}

std::set<Word> word_set(const Swarm& w, int max_len) {
    std::set<Word> words;
    words.insert(Word{});
    if (max_len <= 0) return words;

    // walk indexes over green 1-lame upper edges
    std::map<Vertex, std::vector<std::pair<int, Vertex>>> forward, backward;
    for (const SwarmEdge& e : w.edges()) {
        if (e.label.color != Color::Green || !e.label.is_upper() || e.label.is_lower()) continue;
        if (e.label.upper % 2 == 0)
            forward[e.tail].push_back({e.label.upper, e.antenna});
        else
            backward[e.antenna].push_back({e.label.upper, e.tail});
    }

    std::set<std::pair<Vertex, Word>> frontier;
    for (Vertex v = 0; v < w.vertex_count(); ++v) frontier.insert({v, {}});
    for (int len = 1; len <= max_len && !frontier.empty(); ++len) {
        std::set<std::pair<Vertex, Word>> next;
        for (const auto& [v, word] : frontier) {
            auto extend = [&](int letter, Vertex to) {
                Word w2 = word;
                w2.push_back(letter);
                words.insert(w2);
                next.insert({to, std::move(w2)});
            };
            if (auto it = forward.find(v); it != forward.end())
                for (auto [letter, to] : it->second) extend(letter, to);
            if (auto it = backward.find(v); it != backward.end())
                for (auto [letter, to] : it->second) extend(letter, to);
        }
        frontier = std::move(next);
    }
    return words;
}

std::string word_to_string(const Word& w) {
    if (w.empty()) return "eps";
    std::string out;
    for (size_t i = 0; i < w.size(); ++i) {
        if (i) out += ".";
        out += std::to_string(w[i]);
    }
    return out;
}

bool word_correct(const Word& w, const WordRoles& r) {
    for (size_t k = 0; k < w.size(); ++k) {
        if (k != 0 && w[k] == r.alpha) return false;
        if (k + 1 != w.size() && (w[k] == r.eta0 || w[k] == r.eta1)) return false;
    }
    return true;
}

bool word_maximal_correct(const Word& w, const WordRoles& r) {
    if (w.empty() || !word_correct(w, r)) return false;
    return w.front() == r.alpha && (w.back() == r.eta0 || w.back() == r.eta1);
}

StructuralReport check_structural(const Ruleset& rs, const SwarmTrace& trace,
                                  const StructuralCheckOptions& opts) {
    StructuralReport rep;
    const Swarm& w = trace.swarm;

    // (a) every vertex is a tail or an antenna, never both
    for (Vertex v = 0; v < w.vertex_count(); ++v) {
        if (!w.by_tail(v).empty() && !w.by_antenna(v).empty())
            rep.violations.push_back("(a) vertex " + std::to_string(v) +
                                     " has both in- and out-edges");
    }

    // couple bookkeeping over the trace
    struct Couple {
        uint64_t step;
        uint32_t rule;
        uint32_t n1, n2;
        Vertex knot;
        bool red;
        bool two_lame;
    };
    std::vector<Couple> couples;
    std::map<uint32_t, size_t> couple_of_edge;
    for (const SwarmStep& s : trace.steps) {
        Couple c;
        c.step = s.step;
        c.rule = s.input.rule;
        c.n1 = s.out1;
        c.n2 = s.out2;
        c.knot = s.new_vertex;
        c.red = s.out_color == Color::Red;
        c.two_lame = w.edges()[s.out1].label.two_lame() || w.edges()[s.out2].label.two_lame();
        couple_of_edge[s.out1] = couples.size();
        couple_of_edge[s.out2] = couples.size();
        couples.push_back(c);
    }

    // (b) knots (fresh vertices of red couples) have degree 2
    for (const Couple& c : couples) {
        if (!c.red) continue;
        size_t deg = w.by_tail(c.knot).size() + w.by_antenna(c.knot).size();
        if (deg != 2)
            rep.violations.push_back("(b) knot " + std::to_string(c.knot) + " has degree " +
                                     std::to_string(deg));
    }

    // (c) a red couple member is only ever rewritten with its spouse under
    // the associated rule; (d) couples with a 2-lame red are sterile
    for (const SwarmStep& s : trace.steps) {
        for (uint32_t e : {s.input.e1, s.input.e2}) {
            auto it = couple_of_edge.find(e);
            if (it == couple_of_edge.end()) continue;
            const Couple& c = couples[it->second];
            if (!c.red || c.step >= s.step) continue;
            if (c.two_lame) {
                rep.violations.push_back("(d) sterile red couple from step " +
                                         std::to_string(c.step) + " used at step " +
                                         std::to_string(s.step));
                continue;
            }
            bool spouse_input = s.input.e1 == c.n1 && s.input.e2 == c.n2;
            bool associated = rs.assoc[c.rule] && *rs.assoc[c.rule] == s.input.rule;
            if (!spouse_input || !associated)
                rep.violations.push_back("(c) red couple member from step " +
                                         std::to_string(c.step) +
                                         " rewritten out of wedlock at step " +
                                         std::to_string(s.step));
        }
    }

    // (e) dangerous vertices: endpoints of green full edges. A green 1-lame
    // upper edge has a dangerous tail iff its letter is alpha or eta1, and a
    // dangerous antenna iff its letter is eta0.
    std::set<Vertex> dangerous;
    for (const SwarmEdge& e : w.edges()) {
        if (e.label == IdealSpider{Color::Green, 0, 0}) {
            dangerous.insert(e.tail);
            dangerous.insert(e.antenna);
        }
    }
    for (const SwarmEdge& e : w.edges()) {
        if (e.label.color != Color::Green || !e.label.is_upper() || e.label.is_lower()) continue;
        int i = e.label.upper;
        bool tail_expected = i == opts.roles.alpha || i == opts.roles.eta1;
        bool ant_expected = i == opts.roles.eta0;
        if (dangerous.count(e.tail) != size_t(tail_expected))
            rep.violations.push_back("(e) tail of " + to_string(e.label) + " edge at " +
                                     std::to_string(e.tail) +
                                     (tail_expected ? " should be dangerous" : " is dangerous"));
        if (dangerous.count(e.antenna) != size_t(ant_expected))
            rep.violations.push_back("(e) antenna of " + to_string(e.label) + " edge at " +
                                     std::to_string(e.antenna) +
                                     (ant_expected ? " should be dangerous" : " is dangerous"));
    }

    // (f) maximal correct words reduce to alpha.eta1
    if (opts.reduces_to_goal) {
        for (const Word& word : word_set(w, opts.max_word_len)) {
            if (!word_maximal_correct(word, opts.roles)) continue;
            auto verdict = opts.reduces_to_goal(word);
            if (!verdict)
                rep.inconclusive.push_back("(f) " + word_to_string(word) + ": oracle budget");
            else if (!*verdict)
                rep.violations.push_back("(f) maximal correct word " + word_to_string(word) +
                                         " does not reduce");
        }
    }

    // (g) no green gamma labels
    for (const SwarmEdge& e : w.edges()) {
        if (e.label.color != Color::Green) continue;
        if (e.label.upper == opts.roles.gamma || e.label.upper == opts.roles.gammap ||
            e.label.lower == opts.roles.gamma || e.label.lower == opts.roles.gammap)
            rep.violations.push_back("(g) green gamma label " + to_string(e.label));
    }

    return rep;
}

std::vector<std::string> red_iff_lower_violations(const Swarm& w) {
    std::vector<std::string> out;
    for (const SwarmEdge& e : w.edges()) {
        bool red = e.label.color == Color::Red;
        if (red != e.label.is_lower())
            out.push_back("label " + to_string(e.label) + " at (" + std::to_string(e.tail) + "," +
                          std::to_string(e.antenna) + ")");
    }
    return out;
}

std::string swarm_to_text(const Swarm& w) {
    std::ostringstream out;
    for (const SwarmEdge& e : w.edges())
        out << "H " << to_string(e.label) << " " << e.tail << " " << e.antenna << "\n";
    return out.str();
}

Swarm swarm_from_text(const std::string& text) {
    Swarm w;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string tag, label;
        uint32_t tail, antenna;
        if (!(ls >> tag)) continue;
        if (tag[0] == '#') continue;
        if (tag != "H" || !(ls >> label >> tail >> antenna))
            throw ParseError("expected 'H <label> <tail> <antenna>'", lineno, 1);
        w.add_edge(parse_spider_label(label), tail, antenna);
    }
    return w;
}

std::string swarm_to_dot(const Swarm& w) {
    std::ostringstream out;
    out << "digraph swarm {\n";
    for (const SwarmEdge& e : w.edges())
        out << "  " << e.tail << " -> " << e.antenna << " [label=\"" << to_string(e.label)
            << "\", color=" << (e.label.color == Color::Green ? "forestgreen" : "red3") << "];\n";
    out << "}\n";
    return out.str();
}

std::string swarm_trace_to_jsonl(const Ruleset& rs, const SwarmTrace& trace) {
    std::ostringstream out;
    auto edge_json = [&](uint32_t id) {
        const SwarmEdge& e = trace.swarm.edges()[id];
        return nlohmann::json::array({to_string(e.label), e.tail, e.antenna});
    };
    for (const SwarmStep& s : trace.steps) {
        nlohmann::json j;
        j["step"] = s.step;
        j["rule"] = rs.rules[s.input.rule].name;
        j["input"] = nlohmann::json::array({edge_json(s.input.e1), edge_json(s.input.e2)});
        j["new_vertex"] = s.new_vertex;
        j["output"] = nlohmann::json::array({edge_json(s.out1), edge_json(s.out2)});
        out << j.dump() << "\n";
    }
    return out.str();
}

} // namespace grchase
