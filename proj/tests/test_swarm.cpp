#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "helpers.hpp"

#include "grchase/reductions.hpp"
#include "grchase/swarm.hpp"

using namespace grchase;
using namespace grchase::testing;

namespace {

Ruleset qeta16() {
    SpiderWorld w(16);
    return Ruleset::make(qeta_ruleset(w, fixture_roles()));
}

struct ExpectedStep {
    std::string rule;
    SwarmEdge out1, out2;
};

IdealSpider G(int up = 0, int lo = 0) { return IdealSpider{Color::Green, up, lo}; }
IdealSpider R(int up = 0, int lo = 0) { return IdealSpider{Color::Red, up, lo}; }

// The construction-order prefix of the rewriting chase from one green edge:
// vertices 0 (tail) and 1 (antenna) initial, fresh vertices numbered from 2.
const std::vector<ExpectedStep> kTable = {
    {"q1A", {R(0, 1), 0, 2}, {R(0, 2), 0, 2}},
    {"q1B", {G(10), 0, 3}, {G(13), 0, 3}},
    {"q3A", {R(0, 5), 4, 3}, {R(0, 6), 4, 1}},
    {"q3B", {G(11), 5, 3}, {G(14), 5, 1}},
    {"q2A", {R(0, 3), 5, 6}, {R(0, 4), 0, 6}},
    {"q2B", {G(12), 5, 7}, {G(13), 0, 7}},
    {"q3A", {R(0, 5), 8, 7}, {R(0, 6), 8, 1}},
};

} // namespace

TEST_CASE("swarm pair law: at most two labels, same color") {
    Swarm w;
    w.add_edge(G(), 0, 1);
    CHECK(w.edges().size() == 1);
    w.add_edge(G(), 0, 1); // set semantics
    CHECK(w.edges().size() == 1);
    w.add_edge(G(10), 0, 1);
    CHECK_THROWS_AS(w.add_edge(R(0, 1), 0, 1), StructuralViolation); // color mix
    CHECK_THROWS_AS(w.add_edge(G(11), 0, 1), StructuralViolation);   // third label
}

TEST_CASE("the one-edge swarm activates every core rule on the doubled edge") {
    Ruleset rs = qeta16();
    Swarm w0 = initial_swarm();
    auto active = active_rewrites(rs, w0);
    CHECK(active.size() == 6);
    for (const auto& in : active) {
        CHECK(in.e1 == 0);
        CHECK(in.e2 == 0);
    }
    CHECK(rs.rules[active.front().rule].name == "q1A");
}

TEST_CASE("a fired rewriting deactivates its own input") {
    Ruleset rs = qeta16();
    Swarm w = initial_swarm();
    RewriteInput in{0, 0, 0}; // q1A on the doubled edge
    REQUIRE(rewrite_active(rs, w, in));
    auto rec = rewrite_step(rs, w, in, 1);
    CHECK(w.edges()[rec.out1] == SwarmEdge{R(0, 1), 0, 2});
    CHECK(w.edges()[rec.out2] == SwarmEdge{R(0, 2), 0, 2});
    CHECK(rec.out_color == Color::Red);
    CHECK_FALSE(rewrite_active(rs, w, in));
    CHECK_THROWS_AS(rewrite_step(rs, w, in, 2), Error);
}

TEST_CASE("mismatched two-lame labels never match") {
    Ruleset rs = Ruleset::make({BinaryQuery{"r", {1, 2}, {0, 3}, CombineMode::Wedge, {}}});
    Swarm w;
    w.add_edge(G(0, 1), 0, 1); // lower-1 but the rule wants lower-2
    w.add_edge(G(), 2, 1);
    CHECK_FALSE(rewrite_matches(rs, w, RewriteInput{0, 0, 1}));
    // the full edge still pairs with itself, but never with the lame one
    for (const auto& in : active_rewrites(rs, w)) {
        CHECK(in.e1 != 0);
        CHECK(in.e2 != 0);
    }
}

TEST_CASE("the construction-order scheduler replays the seven-row prefix") {
    Ruleset rs = qeta16();
    SwarmChaseOptions opts;
    opts.budget = 7;
    opts.scheduler = SchedulerKind::NewestFirst;
    auto trace = swarm_chase(rs, initial_swarm(), opts);
    REQUIRE(trace.steps.size() == 7);
    CHECK(trace.idempotence_violations.empty());
    for (size_t k = 0; k < kTable.size(); ++k) {
        CAPTURE(k);
        CHECK(rs.rules[trace.steps[k].input.rule].name == kTable[k].rule);
        CHECK(trace.swarm.edges()[trace.steps[k].out1] == kTable[k].out1);
        CHECK(trace.swarm.edges()[trace.steps[k].out2] == kTable[k].out2);
    }
}

TEST_CASE("the tape pattern reaches level three within forty steps") {
    Ruleset rs = qeta16();
    SwarmChaseOptions opts;
    opts.budget = 40;
    auto trace = swarm_chase(rs, initial_swarm(), opts);
    const Swarm& w = trace.swarm;
    const WordRoles roles = fixture_roles();

    // H(g^alpha, 0, t1) names t1
    const auto& alpha_edges = w.by_label_tail(G(roles.alpha), 0);
    REQUIRE(alpha_edges.size() == 1);
    Vertex t = w.edges()[alpha_edges[0]].antenna;

    for (int k = 1; k <= 3; ++k) {
        CAPTURE(k);
        // s_k via H(g^beta1, s_k, t_k)
        const auto& b1 = w.by_label_antenna(G(roles.beta1), t);
        REQUIRE(b1.size() == 1);
        Vertex s = w.edges()[b1[0]].tail;
        // H(g^eta1, 0, t_k)
        CHECK(w.has_edge(G(roles.eta1), 0, t));
        // t_{k+1} via H(g^beta0, s_k, t_{k+1})
        const auto& b0 = w.by_label_tail(G(roles.beta0), s);
        REQUIRE(b0.size() == 1);
        t = w.edges()[b0[0]].antenna;
    }
}

TEST_CASE("tails and antennas stay disjoint along rewriting runs") {
    Ruleset rs = qeta16();
    SwarmChaseOptions opts;
    opts.budget = 60;
    auto trace = swarm_chase(rs, initial_swarm(), opts);
    for (Vertex v = 0; v < trace.swarm.vertex_count(); ++v)
        CHECK((trace.swarm.by_tail(v).empty() || trace.swarm.by_antenna(v).empty()));
}

TEST_CASE("core-rule runs color labels red exactly on the lower side") {
    Ruleset rs = qeta16();
    SwarmChaseOptions opts;
    opts.budget = 200;
    auto trace = swarm_chase(rs, initial_swarm(), opts);
    CHECK(red_iff_lower_violations(trace.swarm).empty());

    Swarm bad = initial_swarm();
    bad.add_edge(R(), 5, 6);
    CHECK(red_iff_lower_violations(bad).size() == 1);
}

TEST_CASE("swarm_of abstracts spider structures") {
    SpiderWorld w(3);
    Structure d = ideal_spider(w, IdealSpider{Color::Green, 0, 0});
    auto res = swarm_of(w, d);
    REQUIRE(res.swarm.edges().size() == 1);
    CHECK(res.swarm.edges()[0].label == G());
    CHECK(res.term_of[res.swarm.edges()[0].tail] == w.tail_var());
    CHECK(res.term_of[res.swarm.edges()[0].antenna] == w.antenna_var());

    Structure empty(w.colored());
    CHECK(swarm_of(w, empty).swarm.edges().empty());

    // an H atom whose head carries no spider is a structural violation
    Structure broken(w.colored());
    broken.add_atom(Atom{w.colors().paint(w.h(), Color::Green), {v("h"), v("t"), v("a")}});
    CHECK_THROWS_AS(swarm_of(w, broken), StructuralViolation);
}

TEST_CASE("word sets walk green one-lame upper edges with parity") {
    Swarm empty;
    CHECK(word_set(empty, 4) == std::set<Word>{{}});

    Ruleset rs = qeta16();
    SwarmChaseOptions opts;
    opts.budget = 2;
    auto two = swarm_chase(rs, initial_swarm(), opts);
    auto words2 = word_set(two.swarm, 2);
    CHECK(words2.count({10, 13}) == 1); // alpha.eta1
    CHECK(words2.count({13, 10}) == 1);
    CHECK(words2.count({10}) == 1);
    CHECK(words2.count({}) == 1);
    CHECK(words2.count({10, 10}) == 0);

    opts.budget = 14;
    auto tape = swarm_chase(rs, initial_swarm(), opts);
    auto words = word_set(tape.swarm, 6);
    CHECK(words.count({10, 13}) == 1);                 // alpha.eta1
    CHECK(words.count({10, 11, 12, 13}) == 1);         // alpha.beta1.beta0.eta1
    CHECK(words.count({10, 11, 12, 11, 12, 13}) == 1); // m = 2
}

TEST_CASE("correct and maximal-correct words") {
    WordRoles r = fixture_roles();
    CHECK(word_correct({10, 11, 12, 13}, r));
    CHECK(word_maximal_correct({10, 11, 12, 13}, r));
    CHECK_FALSE(word_correct({10, 10}, r));        // interior alpha
    CHECK_FALSE(word_correct({10, 13, 12}, r));    // interior eta
    CHECK(word_correct({11}, r));                  // single letters are correct
    CHECK_FALSE(word_maximal_correct({11}, r));    // but never maximal
    CHECK_FALSE(word_maximal_correct({}, r));
    CHECK(word_correct({10}, r));
    CHECK_FALSE(word_maximal_correct({10}, r));
}

TEST_CASE("structural checks pass on core-rule traces") {
    Ruleset rs = qeta16();
    SwarmChaseOptions opts;
    opts.budget = 50;
    auto trace = swarm_chase(rs, initial_swarm(), opts);

    ThueSystem core = fixture_thue_negative();
    StructuralCheckOptions copts;
    copts.roles = fixture_roles();
    copts.max_word_len = 8;
    copts.reduces_to_goal = [&](const Word& word) -> std::optional<bool> {
        ClosureOptions cl;
        cl.max_len = int(word.size()) + 2;
        ClosureResult res = thue_step_closure(core, word, cl);
        if (res.words.count({copts.roles.alpha, copts.roles.eta1})) return true;
        return res.exhausted ? std::optional<bool>(false) : std::nullopt;
    };
    auto report = check_structural(rs, trace, copts);
    CHECK(report.violations.empty());
}

TEST_CASE("a degree-three knot is flagged") {
    Ruleset rs = qeta16();
    SwarmChaseOptions opts;
    opts.budget = 1;
    auto trace = swarm_chase(rs, initial_swarm(), opts); // knot vertex 2
    trace.swarm.add_edge(R(0, 3), 5, 2);                 // third edge at the knot

    StructuralCheckOptions copts;
    copts.roles = fixture_roles();
    auto report = check_structural(rs, trace, copts);
    bool found = false;
    for (const auto& viol : report.violations) found |= viol.find("(b)") == 0;
    CHECK(found);
}

TEST_CASE("swarm text and trace exports") {
    Ruleset rs = qeta16();
    SwarmChaseOptions opts;
    opts.budget = 3;
    auto trace = swarm_chase(rs, initial_swarm(), opts);
    Swarm parsed = swarm_from_text(swarm_to_text(trace.swarm));
    CHECK(parsed.edges() == trace.swarm.edges());
    CHECK(swarm_to_dot(trace.swarm).find("digraph") == 0);

    std::string jsonl = swarm_trace_to_jsonl(rs, trace);
    CHECK(std::count(jsonl.begin(), jsonl.end(), '\n') == 3);

    CHECK_THROWS_AS(swarm_from_text("H X 0 1"), Error);
}

TEST_CASE("goal labels stop the rewriting chase") {
    SpiderWorld w(16);
    // f^13 vee f^13_9 jumps straight to a full red edge from two eta1 greens
    Ruleset rs = Ruleset::make({BinaryQuery{"jump", {13, 0}, {13, 9}, CombineMode::Vee, {}}});
    Swarm w0;
    w0.add_edge(G(13), 0, 1);
    w0.add_edge(G(13), 0, 2);
    SwarmChaseOptions opts;
    opts.budget = 10;
    opts.goal_label = R();
    auto trace = swarm_chase(rs, w0, opts);
    CHECK(trace.verdict == ChaseVerdict::GoalReached);
    CHECK(trace.goal_step == 1);
}
