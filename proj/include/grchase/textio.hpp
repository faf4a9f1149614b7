#pragma once

// Text formats: conjunctive queries and instances, determinacy programs,
// spider rulesets, Thue systems and graphs.
//
// CQ grammar:      Q(x,y) :- R(x,z), S(z,y).
// Instance:        R(a,b). S(b,c1!).
// Identifiers ending in '!' (lowercase start) are constants; all other
// identifiers in term position are variables / anonymous elements.
// '#' starts a comment. A determinacy program is a list of view definitions
// followed by 'query:' and one more CQ.

#include "grchase/reductions.hpp"

namespace grchase {

struct Program {
    SignaturePtr sig;
    std::vector<ConjunctiveQuery> views;
    std::optional<ConjunctiveQuery> query;
};

Program parse_program(const std::string& text);

/// Facts over an inferred signature (or a given one, validated).
Structure parse_facts(const std::string& text, SignaturePtr sig = nullptr);

std::string program_to_text(const Program& p);
std::string facts_to_text(const Structure& d);

// Ruleset file:
//   world 16
//   roles alpha=10 beta0=12 beta1=11 eta0=14 eta1=13 gamma=15 gammap=16
//   rule q1A: f_1 wedge f_2 assoc q1B
//   rule f^2: f^2
struct ParsedRuleset {
    int s = 0;
    std::optional<WordRoles> roles;
    std::vector<BinaryQuery> binary;
    std::vector<std::pair<std::string, SpiderQuery>> unary;
};

ParsedRuleset parse_ruleset(const std::string& text);
std::string ruleset_to_text(int s, const std::vector<BinaryQuery>& binary,
                            const std::vector<std::pair<std::string, SpiderQuery>>& unary,
                            const std::optional<WordRoles>& roles = std::nullopt);

WordRoles parse_roles_items(const std::string& spec, int lineno);

// Thue file:
//   alphabet 16
//   roles alpha=10 beta1=11 beta0=12 eta1=13 eta0=14 gamma=15 gammap=16
//   prod 11 12 <-> 15 16
ThueSystem parse_thue(const std::string& text);
std::string thue_to_text(const ThueSystem& ts);

// Graph file:
//   vertices 6
//   edge 1 3
Graph parse_graph(const std::string& text);
std::string graph_to_text(const Graph& g);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

} // namespace grchase
