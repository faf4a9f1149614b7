#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "helpers.hpp"

#include "grchase/textio.hpp"

using namespace grchase;
using namespace grchase::testing;

TEST_CASE("programs parse and round-trip") {
    const std::string text =
        "# two views over R and S\n"
        "V1(x,y) :- R(x,z), S(z,y).\n"
        "V2(x) :- R(x,x).\n"
        "query: Q0(x) :- R(x,z), S(z,c1!).\n";
    Program p = parse_program(text);
    REQUIRE(p.views.size() == 2);
    REQUIRE(p.query.has_value());
    CHECK(p.views[0].name == "V1");
    CHECK(p.views[0].free_vars.size() == 2);
    CHECK(p.query->body[1].args[1] == c("c1!"));
    CHECK(p.sig->has_constant(c("c1!")));

    Program again = parse_program(program_to_text(p));
    CHECK(again.views.size() == 2);
    CHECK(program_to_text(again) == program_to_text(p));
}

TEST_CASE("parse errors carry positions") {
    try {
        parse_program("V1(x) :- R(x,y)\nV2(x) :- R(x,x).\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line == 2); // the missing dot is discovered at the next token
    }

    CHECK_THROWS_AS(parse_program("V(x) :- R(x,y), R(x,y,z).\n"), ParseError);
    CHECK_THROWS_AS(parse_program("V(q) :- R(x,y).\n"), ParseError);       // free var not in body
    CHECK_THROWS_AS(parse_program("V(x) :- R(x,C1!).\n"), ParseError);     // uppercase constant
}

TEST_CASE("facts parse against an inferred or given signature") {
    Structure d = parse_facts("R(a,b). S(b,c1!).\n");
    CHECK(d.atoms().size() == 2);
    CHECK(d.in_domain(c("c1!")));
    Structure again = parse_facts(facts_to_text(d), d.signature());
    CHECK(again.atoms() == d.atoms());

    CHECK_THROWS_AS(parse_facts("R(a,b). R(a).\n"), ParseError);
}

TEST_CASE("ruleset files round-trip with roles") {
    WordRoles roles = fixture_roles();
    std::vector<BinaryQuery> binary{
        BinaryQuery{"q1A", {0, 1}, {0, 2}, CombineMode::Wedge, "q1B"},
        BinaryQuery{"q1B", {10, 1}, {13, 2}, CombineMode::Wedge, "q1A"},
        BinaryQuery{"q7", {15, 0}, {16, 9}, CombineMode::Vee, std::nullopt},
    };
    std::vector<std::pair<std::string, SpiderQuery>> unary{{"f_1", {0, 1}}};
    std::string text = ruleset_to_text(16, binary, unary, roles);
    ParsedRuleset parsed = parse_ruleset(text);
    CHECK(parsed.s == 16);
    REQUIRE(parsed.roles.has_value());
    CHECK(parsed.roles->gamma == 15);
    REQUIRE(parsed.binary.size() == 3);
    CHECK(parsed.binary[0].assoc == "q1B");
    CHECK(parsed.binary[2].mode == CombineMode::Vee);
    REQUIRE(parsed.unary.size() == 1);
    CHECK(parsed.unary[0].second == SpiderQuery{0, 1});

    CHECK_THROWS_AS(parse_ruleset("rule a: f_1\n"), ParseError);   // missing world line
    CHECK_THROWS_AS(parse_ruleset("world 4\nrule a: f_1 wedge\n"), ParseError);
}

TEST_CASE("thue files round-trip") {
    ThueSystem ts = fixture_thue();
    ThueSystem again = parse_thue(thue_to_text(ts));
    CHECK(again.s == ts.s);
    CHECK(again.roles.eta1 == ts.roles.eta1);
    CHECK(again.productions == ts.productions);

    CHECK_THROWS_AS(parse_thue("alphabet 4\n"), ParseError);                 // roles missing
    CHECK_THROWS_AS(parse_thue("roles alpha=2\nprod 1 <-> 2\n"), ParseError); // alphabet missing
    CHECK_THROWS_AS(parse_thue("alphabet 4\nroles alpha=2\nprod 1 2\n"), ParseError);
}

TEST_CASE("graph files round-trip and validate") {
    Graph g{4, {{1, 2}, {2, 3}, {3, 4}}};
    Graph again = parse_graph(graph_to_text(g));
    CHECK(again.vertices == 4);
    CHECK(again.edges == g.edges);

    CHECK_THROWS_AS(parse_graph("vertices 3\nedge 2 3\nedge 1 2\n"), ParseError);
}
