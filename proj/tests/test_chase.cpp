#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "helpers.hpp"

#include "grchase/chase.hpp"
#include "grchase/greenred.hpp"
#include "grchase/spider.hpp"

#include <sstream>

using namespace grchase;
using namespace grchase::testing;

namespace {

// R(x,y) => ∃z S(y,z)
Tgd r_to_s(const SignaturePtr& sig) {
    return Tgd::make("r2s", sig, {atom(sig, "R", {v("x"), v("y")})},
                     {atom(sig, "S", {v("y"), v("z")})}, {v("y")});
}

} // namespace

TEST_CASE("active_triggers finds pairs waiting for a witness") {
    auto sig = simple_sig();
    std::vector<Tgd> tgds{r_to_s(sig)};
    Structure d(sig);
    d.add_atom(atom(sig, "R", {v("a"), v("b")}));

    auto active = active_triggers(tgds, d);
    REQUIRE(active.size() == 1);
    CHECK(active[0].binding == std::vector<Term>{v("b")});

    d.add_atom(atom(sig, "S", {v("b"), v("cc")}));
    CHECK(active_triggers(tgds, d).empty());
}

TEST_CASE("on a red 1-lame upper spider only the red-to-green twin fires") {
    SpiderWorld w(2);
    ConjunctiveQuery f = spider_query(w, SpiderQuery{1, 2}); // f^1_2
    auto gen = generate_tgds(w.colors(), {f});
    Structure spider = ideal_spider(w, IdealSpider{Color::Red, 1, 0});
    auto active = active_triggers(gen.tgds, spider);
    REQUIRE(active.size() == 1);
    CHECK(gen.tgds[active[0].tgd].id == "f^1_2.RG");
}

TEST_CASE("apply_trigger adds a fresh head copy") {
    auto sig = simple_sig();
    std::vector<Tgd> tgds{r_to_s(sig)};
    Structure d(sig);
    d.add_atom(atom(sig, "R", {v("a"), v("b")}));
    int32_t nulls = 0;
    auto rec = apply_trigger(d, tgds, Trigger{0, {v("b")}}, 1, nulls);
    REQUIRE(rec.added_atoms.size() == 1);
    CHECK(rec.added_atoms[0].pred == *sig->predicate("S"));
    CHECK(rec.added_atoms[0].args[0] == v("b"));
    CHECK(rec.added_atoms[0].args[1].is_null());
    CHECK(rec.added_nulls.size() == 1);

    // lazy-chase soundness: the applied pair is no longer active
    CHECK_FALSE(trigger_active(tgds[0], d, {v("b")}));
    CHECK_THROWS_AS(apply_trigger(d, tgds, Trigger{0, {v("b")}}, 2, nulls), Error);
}

TEST_CASE("applying f^i_j to a red upper spider creates the green lower spider") {
    SpiderWorld w(2);
    const int i = 1, j = 2;
    ConjunctiveQuery f = spider_query(w, SpiderQuery{i, j});
    auto gen = generate_tgds(w.colors(), {f});
    Structure d = ideal_spider(w, IdealSpider{Color::Red, i, 0});
    auto active = active_triggers(gen.tgds, d);
    REQUIRE(active.size() == 1);
    int32_t nulls = 0;
    auto rec = apply_trigger(d, gen.tgds, active[0], 1, nulls);

    // the new copy shares the i-th upper and j-th lower knee
    Term new_head;
    for (const Atom& a : rec.added_atoms) {
        auto [color, base] = w.colors().unpaint(a.pred);
        if (base == w.h()) new_head = a.args[0];
    }
    REQUIRE(new_head.is_null());
    auto match = classify_real_spider(w, d, new_head);
    REQUIRE(match);
    CHECK(match->spider == IdealSpider{Color::Green, 0, j});
    CHECK(match->upper_knees[i] == w.upper_knee_var(i));
    CHECK(match->lower_knees[j] == w.lower_knee_var(j));
}

TEST_CASE("run_chase with no TGDs saturates immediately") {
    auto sig = simple_sig();
    Structure d(sig);
    d.add_atom(atom(sig, "R", {v("a"), v("b")}));
    ChaseOptions opts;
    opts.budget = 100;
    auto trace = run_chase({}, d, opts);
    CHECK(trace.verdict == ChaseVerdict::Saturated);
    CHECK(trace.applied == 0);
    CHECK(trace.final_structure.atoms().size() == 1);
}

TEST_CASE("chase stages grow monotonically and saturation is genuine") {
    auto sig = simple_sig();
    // R(x,y) => ∃z S(y,z);  S(x,y) => R(y,x) — saturates
    std::vector<Tgd> tgds{r_to_s(sig),
                          Tgd::make("s2r", sig, {atom(sig, "S", {v("x"), v("y")})},
                                    {atom(sig, "R", {v("y"), v("x")})}, {v("x"), v("y")})};
    Structure d(sig);
    d.add_atom(atom(sig, "R", {v("a"), v("b")}));
    ChaseOptions opts;
    opts.budget = 1000;
    size_t last = 0;
    opts.observer = [&](const AppliedStep& s, const Structure& now) {
        CHECK(now.atoms().size() >= last);
        CHECK(!s.added_atoms.empty());
        last = now.atoms().size();
    };
    auto trace = run_chase(tgds, d, opts);
    CHECK(trace.verdict == ChaseVerdict::Saturated);
    // fairness audit: a full rescan of the final structure finds nothing
    CHECK(active_triggers(tgds, trace.final_structure).empty());
}

TEST_CASE("budget exhaustion is a verdict, not an error") {
    auto sig = simple_sig();
    // R(x,y) => ∃z R(y,z) never terminates
    std::vector<Tgd> tgds{Tgd::make("grow", sig, {atom(sig, "R", {v("x"), v("y")})},
                                    {atom(sig, "R", {v("y"), v("z")})}, {v("y")})};
    Structure d(sig);
    d.add_atom(atom(sig, "R", {v("a"), v("b")}));
    ChaseOptions opts;
    opts.budget = 17;
    auto trace = run_chase(tgds, d, opts);
    CHECK(trace.verdict == ChaseVerdict::BudgetExhausted);
    CHECK(trace.applied == 17);
}

TEST_CASE("delta discovery agrees with full rescans") {
    std::mt19937_64 rng(99);
    auto sig = simple_sig();
    std::vector<Tgd> tgds{
        r_to_s(sig),
        Tgd::make("join", sig, {atom(sig, "R", {v("x"), v("y")}), atom(sig, "S", {v("y"), v("u")})},
                  {atom(sig, "S", {v("x"), v("u")})}, {v("x"), v("u")}),
    };
    for (int round = 0; round < 15; ++round) {
        Structure d = random_structure(rng, 3, 4);
        ChaseOptions opts;
        opts.budget = 5000;
        // validate condition 2 of every applied trigger against a rescan
        opts.observer = [&](const AppliedStep&, const Structure& now) {
            for (const Trigger& t : active_triggers(tgds, now))
                CHECK(trigger_active(tgds[t.tgd], now, t.binding));
        };
        auto trace = run_chase(tgds, d, opts);
        REQUIRE(trace.verdict == ChaseVerdict::Saturated);
        CHECK(active_triggers(tgds, trace.final_structure).empty());
    }
}

TEST_CASE("universality smoke test: the chase maps into every model") {
    auto sig = simple_sig();
    std::vector<Tgd> tgds{r_to_s(sig)};
    Structure d0(sig);
    d0.add_atom(atom(sig, "R", {c("a!"), c("b!")}));

    ChaseOptions opts;
    opts.budget = 100;
    auto trace = run_chase(tgds, d0, opts);
    REQUIRE(trace.verdict == ChaseVerdict::Saturated);

    // hand model: R(a,b), S(b,b) satisfies the TGD and contains d0
    Structure m(sig);
    m.add_atom(atom(sig, "R", {c("a!"), c("b!")}));
    m.add_atom(atom(sig, "S", {c("b!"), c("b!")}));
    REQUIRE(active_triggers(tgds, m).empty());
    CHECK(find_one_homomorphism(trace.final_structure, m).has_value());
}

TEST_CASE("chase_entails verdicts") {
    auto sig = simple_sig();
    ConjunctiveQuery goal{"G", sig, {}, {atom(sig, "S", {v("x"), v("y")})}};

    Structure holds(sig);
    holds.add_atom(atom(sig, "S", {v("a"), v("b")}));
    auto r0 = chase_entails({}, holds, goal, {}, 10);
    CHECK(r0.kind == EntailmentResult::Entailed);
    CHECK(r0.step == 0);

    Structure empty_r(sig);
    empty_r.add_atom(atom(sig, "R", {v("a"), v("b")}));
    auto r1 = chase_entails({}, empty_r, goal, {}, 10);
    CHECK(r1.kind == EntailmentResult::NotEntailed);

    std::vector<Tgd> tgds{r_to_s(sig)};
    auto r2 = chase_entails(tgds, empty_r, goal, {}, 10);
    CHECK(r2.kind == EntailmentResult::Entailed);
    CHECK(r2.step == 1);
    CHECK(r2.witness.has_value());
}

TEST_CASE("entailment verdicts agree between fifo and randomized runs") {
    auto sig = simple_sig();
    std::vector<Tgd> tgds{
        r_to_s(sig),
        Tgd::make("s2r", sig, {atom(sig, "S", {v("x"), v("y")})},
                  {atom(sig, "R", {v("y"), v("y")})}, {v("y")}),
    };
    ConjunctiveQuery goal{"G", sig, {}, {atom(sig, "R", {v("q"), v("q")})}};
    std::mt19937_64 rng(5);
    for (int round = 0; round < 10; ++round) {
        Structure d = random_structure(rng, 3, 3);
        auto fifo = chase_entails(tgds, d, goal, {}, 1000);
        for (uint64_t seed : {1ull, 2ull, 3ull}) {
            ChaseOptions base;
            base.scheduler = SchedulerKind::Random;
            base.seed = seed;
            auto random = chase_entails(tgds, d, goal, {}, 1000, base);
            CHECK(fifo.kind == random.kind);
        }
    }
}

TEST_CASE("a custom scheduler hook drives the pick") {
    auto sig = simple_sig();
    std::vector<Tgd> tgds{r_to_s(sig)};
    Structure d(sig);
    d.add_atom(atom(sig, "R", {v("a"), v("b")}));
    d.add_atom(atom(sig, "R", {v("b"), v("cc")}));
    ChaseOptions opts;
    opts.budget = 10;
    opts.scheduler = SchedulerKind::Custom;
    opts.custom_scheduler = [](const std::deque<Trigger>& pending) {
        return pending.size() - 1; // youngest first
    };
    auto trace = run_chase(tgds, d, opts);
    CHECK(trace.verdict == ChaseVerdict::Saturated);
    REQUIRE(trace.steps.size() == 2);
    CHECK(trace.steps[0].trigger.binding == std::vector<Term>{v("cc")});

    ChaseOptions missing;
    missing.budget = 10;
    missing.scheduler = SchedulerKind::Custom;
    CHECK_THROWS_AS(run_chase(tgds, d, missing), Error);
}

TEST_CASE("trace exports one json line per step") {
    auto sig = simple_sig();
    std::vector<Tgd> tgds{r_to_s(sig)};
    Structure d(sig);
    d.add_atom(atom(sig, "R", {v("a"), v("b")}));
    d.add_atom(atom(sig, "R", {v("b"), v("c")}));
    ChaseOptions opts;
    opts.budget = 100;
    auto trace = run_chase(tgds, d, opts);
    std::string jsonl = trace_to_jsonl(trace, tgds);
    size_t lines = 0;
    std::istringstream in(jsonl);
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) ++lines;
    CHECK(lines == trace.steps.size());
    CHECK(structure_to_dot(trace.final_structure).find("digraph") == 0);
}

TEST_CASE("chained phases continue a trace") {
    auto sig = simple_sig();
    std::vector<Tgd> first{r_to_s(sig)};
    std::vector<Tgd> second{Tgd::make("s2r", sig, {atom(sig, "S", {v("x"), v("y")})},
                                      {atom(sig, "R", {v("y"), v("y")})}, {v("y")})};
    Structure d(sig);
    d.add_atom(atom(sig, "R", {v("a"), v("b")}));
    ChaseOptions opts;
    opts.budget = 100;
    auto t1 = run_chase(first, d, opts);
    REQUIRE(t1.verdict == ChaseVerdict::Saturated);
    auto t2 = run_chase(second, t1.final_structure, opts);
    CHECK(t2.verdict == ChaseVerdict::Saturated);
    CHECK(t2.final_structure.atoms().size() > t1.final_structure.atoms().size());
}
