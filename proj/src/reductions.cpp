#include "grchase/reductions.hpp"

#include <algorithm>
#include <deque>

namespace grchase {

void Graph::validate() const {
    if (vertices < 2) throw Error("graph needs at least v1 and v2");
    for (auto [a, b] : edges) {
        if (a < 1 || a > vertices || b < 1 || b > vertices || a == b)
            throw Error("edge endpoints out of range");
    }
    int deg1 = 0;
    for (size_t k = 0; k < edges.size(); ++k) {
        if (edges[k].first == 1 || edges[k].second == 1) {
            deg1 += 1;
            if (k != 0) throw Error("v1 must only appear in e1");
        }
    }
    if (deg1 != 1) throw Error("v1 must have degree exactly 1");
}

bool bfs_reachable(const Graph& g, int from, int to) {
    if (from == to) return true;
    std::vector<std::vector<int>> adj(size_t(g.vertices) + 1);
    for (auto [a, b] : g.edges) {
        adj[size_t(a)].push_back(b);
        adj[size_t(b)].push_back(a);
    }
    std::vector<bool> seen(size_t(g.vertices) + 1, false);
    std::deque<int> queue{from};
    seen[size_t(from)] = true;
    while (!queue.empty()) {
        int v = queue.front();
        queue.pop_front();
        for (int u : adj[size_t(v)]) {
            if (seen[size_t(u)]) continue;
            if (u == to) return true;
            seen[size_t(u)] = true;
            queue.push_back(u);
        }
    }
    return false;
}

ReachabilityEncoding encode_reachability(const Graph& g) {
    g.validate();
    ReachabilityEncoding enc;
    int s = std::max({g.vertices, int(g.edges.size()), 2});
    enc.world = std::make_shared<SpiderWorld>(s);
    enc.ruleset.push_back(SpiderQuery{0, 1}); // f_1
    enc.ruleset.push_back(SpiderQuery{2, 0}); // f^2
    for (size_t k = 0; k < g.edges.size(); ++k) {
        auto [i, j] = g.edges[k];
        enc.ruleset.push_back(SpiderQuery{i, int(k) + 1});
        enc.ruleset.push_back(SpiderQuery{j, int(k) + 1});
    }
    return enc;
}

std::vector<std::pair<Word, Word>> ThueSystem::all_productions() const {
    std::vector<std::pair<Word, Word>> out;
    out.push_back({Word{roles.eta0}, Word{roles.beta0, roles.eta1}});
    out.push_back({Word{roles.eta1}, Word{roles.beta1, roles.eta0}});
    for (const auto& p : productions) out.push_back(p);
    return out;
}

std::vector<std::string> validate_friendly(const ThueSystem& ts) {
    std::vector<std::string> out;
    const WordRoles& r = ts.roles;

    std::vector<std::pair<const char*, int>> named = {
        {"alpha", r.alpha}, {"beta0", r.beta0}, {"beta1", r.beta1}, {"eta0", r.eta0},
        {"eta1", r.eta1},   {"gamma", r.gamma}, {"gammap", r.gammap}};
    for (auto [name, v] : named)
        if (v < 1 || v > ts.s) out.push_back(std::string("role ") + name + " outside 1..s");
    for (size_t i = 0; i < named.size(); ++i)
        for (size_t j = i + 1; j < named.size(); ++j)
            if (named[i].second == named[j].second)
                out.push_back(std::string("roles ") + named[i].first + " and " + named[j].first +
                              " coincide");

    auto even = [](int v) { return v % 2 == 0; };
    if (!even(r.alpha)) out.push_back("alpha must be even");
    if (!even(r.beta0)) out.push_back("beta0 must be even");
    if (!even(r.eta0)) out.push_back("eta0 must be even");
    if (even(r.beta1)) out.push_back("beta1 must be odd");
    if (even(r.eta1)) out.push_back("eta1 must be odd");
    if (even(r.gamma)) out.push_back("gamma must be odd");
    if (!even(r.gammap)) out.push_back("gammap must be even");

    auto uses = [](const std::pair<Word, Word>& p, int letter) {
        return std::count(p.first.begin(), p.first.end(), letter) +
               std::count(p.second.begin(), p.second.end(), letter);
    };

    int gamma_uses = 0, gammap_uses = 0;
    bool gamma_shape_ok = false;
    for (const auto& p : ts.productions) {
        if (p.first.size() != 2 || p.second.size() != 2) {
            out.push_back("equal-length production is not two letters against two letters");
            continue;
        }
        int i = p.first[0], j = p.first[1], i2 = p.second[0], j2 = p.second[1];
        for (int v : {i, j, i2, j2})
            if (v < 1 || v > ts.s) out.push_back("production letter outside 1..s");
        bool odd_even = !even(i) && !even(i2) && even(j) && even(j2);
        bool even_odd = even(i) && even(i2) && !even(j) && !even(j2);
        if (!odd_even && !even_odd)
            out.push_back("production {" + word_to_string(p.first) + "," +
                          word_to_string(p.second) + "} breaks the parity pattern");
        if (i == i2 || j == j2)
            out.push_back("production {" + word_to_string(p.first) + "," +
                          word_to_string(p.second) + "} shares a first or second letter");
        if (uses(p, r.eta0) || uses(p, r.eta1))
            out.push_back("equal-length production involves eta0 or eta1");

        long gu = uses(p, r.gamma), gpu = uses(p, r.gammap);
        gamma_uses += int(gu);
        gammap_uses += int(gpu);
        if (gu || gpu) {
            bool shape = (p.first == Word{r.gamma, r.gammap} && gu == 1 && gpu == 1) ||
                         (p.second == Word{r.gamma, r.gammap} && gu == 1 && gpu == 1);
            if (shape) gamma_shape_ok = true;
        }
    }
    for (const auto& p : ts.all_productions())
        if (uses(p, r.alpha)) out.push_back("a production involves alpha");
    if (gamma_uses != 1 || gammap_uses != 1)
        out.push_back("gamma and gammap must each occur in exactly one production");
    else if (!gamma_shape_ok)
        out.push_back("the gamma production must have the form {ii', gamma.gammap}");

    int total = int(ts.all_productions().size());
    if (ts.s <= 2 * total)
        out.push_back("need s > 2|Pi| = " + std::to_string(2 * total));
    return out;
}

std::vector<BinaryQuery> qeta_ruleset(const SpiderWorld& w, const WordRoles& r) {
    for (int letter : {r.alpha, r.beta0, r.beta1, r.eta0, r.eta1})
        if (letter >= 1 && letter <= 6)
            throw Error("role letter " + std::to_string(letter) +
                        " collides with core subscripts 1..6");
    if (w.s() < 6) throw Error("core rules need s >= 6");

    std::vector<BinaryQuery> rules;
    auto add = [&](const std::string& name, SpiderQuery a, SpiderQuery b, CombineMode m,
                   const std::string& assoc) {
        rules.push_back(BinaryQuery{name, a, b, m, assoc});
    };
    add("q1A", {0, 1}, {0, 2}, CombineMode::Wedge, "q1B");
    add("q1B", {r.alpha, 1}, {r.eta1, 2}, CombineMode::Wedge, "q1A");
    add("q2A", {r.eta0, 3}, {0, 4}, CombineMode::Wedge, "q2B");
    add("q2B", {r.beta0, 3}, {r.eta1, 4}, CombineMode::Wedge, "q2A");
    add("q3A", {r.eta1, 5}, {0, 6}, CombineMode::Vee, "q3B");
    add("q3B", {r.beta1, 5}, {r.eta0, 6}, CombineMode::Vee, "q3A");
    return rules;
}

CompiledRuleset compile_thue(const ThueSystem& ts, const CompileOptions& opts) {
    if (opts.require_friendly) {
        auto violations = validate_friendly(ts);
        if (!violations.empty()) {
            std::string msg = "system is not friendly:";
            for (const auto& v : violations) msg += "\n  - " + v;
            throw Error(msg);
        }
    }

    // Subscripts share 1..s with the role letters; keep them disjoint.
    std::unordered_set<int> taken = {ts.roles.alpha, ts.roles.beta0, ts.roles.beta1,
                                     ts.roles.eta0,  ts.roles.eta1,  ts.roles.gamma,
                                     ts.roles.gammap};
    int next = 1;
    int needed = 6 + 2 * int(ts.productions.size()) + 1;
    auto fresh = [&]() {
        while (next <= ts.s && taken.count(next)) ++next;
        if (next > ts.s)
            throw Error("subscripts exhausted: need " + std::to_string(needed) +
                        " subscripts disjoint from the 7 role letters; s = " +
                        std::to_string(ts.s) + " is too small");
        return next++;
    };
    for (int k = 1; k <= 6; ++k) {
        if (taken.count(k))
            throw Error("role letters collide with core subscripts 1..6");
        fresh();
    }

    CompiledRuleset out;
    out.roles = ts.roles;
    out.world = std::make_shared<SpiderWorld>(ts.s);
    std::vector<BinaryQuery> rules = qeta_ruleset(*out.world, ts.roles);

    for (size_t pi = 0; pi < ts.productions.size(); ++pi) {
        const auto& [lhs, rhs] = ts.productions[pi];
        if (lhs.size() != 2 || rhs.size() != 2)
            throw Error("equal-length production expected");
        int l = fresh(), rr = fresh();
        out.production_subscripts.push_back({l, rr});
        CombineMode mode = lhs[0] % 2 == 0 ? CombineMode::Wedge : CombineMode::Vee;
        std::string a = "p" + std::to_string(pi + 1) + "A";
        std::string b = "p" + std::to_string(pi + 1) + "B";
        rules.push_back(BinaryQuery{a, {lhs[0], l}, {lhs[1], rr}, mode, b});
        rules.push_back(BinaryQuery{b, {rhs[0], l}, {rhs[1], rr}, mode, a});
    }
    out.q0 = Ruleset::make(rules);

    out.closing_subscript = fresh();
    rules.push_back(BinaryQuery{"q7",
                                {ts.roles.gamma, 0},
                                {ts.roles.gammap, out.closing_subscript},
                                CombineMode::Vee,
                                std::nullopt});
    out.q = Ruleset::make(rules);
    return out;
}

ClosureResult thue_step_closure(const ThueSystem& ts, const Word& start, const ClosureOptions& opts) {
    std::vector<std::pair<Word, Word>> prods =
        opts.equal_length_only ? ts.productions : ts.all_productions();
    // symmetric closure of the production set
    std::vector<std::pair<Word, Word>> rules;
    for (const auto& [a, b] : prods) {
        rules.push_back({a, b});
        rules.push_back({b, a});
    }

    ClosureResult res;
    res.words.insert(start);
    std::deque<Word> frontier{start};
    for (int depth = 0; depth < opts.max_steps && !frontier.empty(); ++depth) {
        std::deque<Word> next;
        for (const Word& w : frontier) {
            for (const auto& [from, to] : rules) {
                if (from.size() > w.size()) continue;
                for (size_t pos = 0; pos + from.size() <= w.size(); ++pos) {
                    if (!std::equal(from.begin(), from.end(), w.begin() + long(pos))) continue;
                    Word rewritten(w.begin(), w.begin() + long(pos));
                    rewritten.insert(rewritten.end(), to.begin(), to.end());
                    rewritten.insert(rewritten.end(), w.begin() + long(pos + from.size()), w.end());
                    if (int(rewritten.size()) > opts.max_len) {
                        res.exhausted = false;
                        continue;
                    }
                    if (res.words.size() >= opts.max_words) {
                        res.exhausted = false;
                        return res;
                    }
                    if (res.words.insert(rewritten).second) next.push_back(std::move(rewritten));
                }
            }
        }
        if (depth + 1 == opts.max_steps && !next.empty()) res.exhausted = false;
        frontier = std::move(next);
    }
    return res;
}

std::optional<bool> certify_positive(const ThueSystem& ts, const ClosureOptions& opts) {
    ClosureResult res = thue_step_closure(ts, Word{ts.roles.alpha, ts.roles.eta1}, opts);
    Word pattern{ts.roles.gamma, ts.roles.gammap};
    for (const Word& w : res.words) {
        auto it = std::search(w.begin(), w.end(), pattern.begin(), pattern.end());
        if (it != w.end()) return true;
    }
    if (!res.exhausted) return std::nullopt; // bounds hit first
    return false;
}

} // namespace grchase
