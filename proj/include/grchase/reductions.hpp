#pragma once

// The two encodings feeding the workbench: undirected-graph reachability as
// a unary spider ruleset, and friendly Thue systems compiled to binary
// rewriting rulesets, plus the independent word-rewriting oracle.

#include "grchase/swarm.hpp"

namespace grchase {

// Undirected graph with 1-based vertices; edges[0] is e1. Convention: v1 has
// degree exactly 1 and e1 is its only edge.
struct Graph {
    int vertices = 0;
    std::vector<std::pair<int, int>> edges;

    void validate() const; // range + degree convention
};

/// Plain BFS between two vertices; the independent oracle.
bool bfs_reachable(const Graph& g, int from, int to);

struct ReachabilityEncoding {
    std::shared_ptr<SpiderWorld> world; // s >= max(|V|, |E|)
    std::vector<SpiderQuery> ruleset;   // f_1, f^2, then f^i_k / f^j_k per edge
};

ReachabilityEncoding encode_reachability(const Graph& g);

// Symmetric word rewriting system over 1..s with the friendly role letters.
// `productions` holds the equal-length pairs; the two unequal-length pairs
// {eta0, beta0.eta1} and {eta1, beta1.eta0} are implied by the roles.
struct ThueSystem {
    int s = 0;
    WordRoles roles;
    std::vector<std::pair<Word, Word>> productions;

    /// All productions including the two implied role pairs.
    std::vector<std::pair<Word, Word>> all_productions() const;
};

/// Checks the friendliness checklist; returns the violated bullets.
std::vector<std::string> validate_friendly(const ThueSystem& ts);

// The six core rules (three associated pairs) using subscripts 1..6:
//   1A f_1 ^ f_2            1B f^alpha_1 ^ f^eta1_2
//   2A f^eta0_3 ^ f_4       2B f^beta0_3 ^ f^eta1_4
//   3A f^eta1_5 v f_6       3B f^beta1_5 v f^eta0_6
std::vector<BinaryQuery> qeta_ruleset(const SpiderWorld& w, const WordRoles& roles);

struct CompiledRuleset {
    std::shared_ptr<SpiderWorld> world;
    WordRoles roles;
    Ruleset q0; // core rules + one associated pair per equal-length production
    Ruleset q;  // q0 plus the closing rule f^gamma v f^gammap_r
    std::vector<std::pair<int, int>> production_subscripts; // (l_p, r_p) per production
    int closing_subscript = 0;                              // r of the closing rule
};

struct CompileOptions {
    bool require_friendly = true;
};

/// Lays out subscripts 1..6 for the core rules, a fresh (l_p, r_p) pair per
/// equal-length production (wedge pair for even first letters, vee pair for
/// odd), and one fresh r for the closing rule. Throws when 1..s cannot hold
/// all subscripts and role letters disjointly.
CompiledRuleset compile_thue(const ThueSystem& ts, const CompileOptions& opts = {});

struct ClosureOptions {
    int max_steps = 64;       // BFS depth
    int max_len = 12;         // words longer than this are not expanded
    size_t max_words = 200000;
    bool equal_length_only = false; // restrict to the explicit productions
};

struct ClosureResult {
    std::set<Word> words;
    bool exhausted = true; // false: some frontier was cut by the bounds
};

/// Bounded BFS over single rewrites; the independent oracle for the word
/// problem side of the reduction.
ClosureResult thue_step_closure(const ThueSystem& ts, const Word& start, const ClosureOptions& opts);

/// Does some word containing gamma.gammap rewrite to alpha.eta1? Bounded;
/// nullopt when the bounds were hit without an answer.
std::optional<bool> certify_positive(const ThueSystem& ts, const ClosureOptions& opts);

} // namespace grchase
