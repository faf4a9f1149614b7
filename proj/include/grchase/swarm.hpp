#pragma once

// S-warms: the high-level abstraction of chase stages. Vertices are opaque
// ids; edges are H triples labeled by ideal spiders. Binary queries act as
// rewriting rules; the swarm chase mirrors the TGD chase one level up.

#include "grchase/spider.hpp"

#include <map>

namespace grchase {

using Vertex = uint32_t;

struct SwarmEdge {
    IdealSpider label;
    Vertex tail = 0;
    Vertex antenna = 0;

    friend bool operator==(const SwarmEdge&, const SwarmEdge&) = default;
    friend auto operator<=>(const SwarmEdge&, const SwarmEdge&) = default;
};

// Append-only edge store. Enforces the pair law on insert: at most two
// labels per (tail, antenna) pair, and when two, of the same color.
class Swarm {
  public:
    /// Returns the edge index; throws StructuralViolation on a pair-law break.
    uint32_t add_edge(const IdealSpider& label, Vertex tail, Vertex antenna);
    Vertex fresh_vertex() { return next_vertex_++; }
    void ensure_vertex(Vertex v);

    const std::vector<SwarmEdge>& edges() const { return edges_; }
    Vertex vertex_count() const { return next_vertex_; }
    bool has_edge(const IdealSpider& label, Vertex tail, Vertex antenna) const;

    const std::vector<uint32_t>& by_tail(Vertex v) const;
    const std::vector<uint32_t>& by_antenna(Vertex v) const;
    /// Antennas v such that (label, tail, v) is an edge.
    const std::vector<uint32_t>& by_label_tail(const IdealSpider& label, Vertex tail) const;
    const std::vector<uint32_t>& by_label_antenna(const IdealSpider& label, Vertex antenna) const;

  private:
    std::vector<SwarmEdge> edges_;
    std::set<SwarmEdge> edge_set_;
    std::map<std::pair<Vertex, Vertex>, std::vector<uint32_t>> by_pair_;
    std::map<Vertex, std::vector<uint32_t>> tails_, antennas_;
    std::map<std::pair<uint64_t, Vertex>, std::vector<uint32_t>> label_tail_, label_antenna_;
    Vertex next_vertex_ = 0;
};

/// The one-edge swarm H(G, 0, 1) every chase here starts from.
Swarm initial_swarm();

// A ruleset with resolved association between paired rules.
struct Ruleset {
    std::vector<BinaryQuery> rules;
    std::vector<std::optional<uint32_t>> assoc; // index of the associated rule

    static Ruleset make(std::vector<BinaryQuery> rules);
};

// Ordered pair of edges feeding a rule; the first edge is matched by the
// rule's left query.
struct RewriteInput {
    uint32_t rule = 0;
    uint32_t e1 = 0, e2 = 0;

    friend bool operator==(const RewriteInput&, const RewriteInput&) = default;
    friend auto operator<=>(const RewriteInput&, const RewriteInput&) = default;
};

/// Condition 4: shared vertex per mode, same color, both labels in the
/// component queries' domains. (e1 may equal e2.)
bool rewrite_matches(const Ruleset& rs, const Swarm& w, const RewriteInput& in);
/// Condition 5 fails: the output pattern already exists.
bool rewrite_satisfied(const Ruleset& rs, const Swarm& w, const RewriteInput& in);
bool rewrite_active(const Ruleset& rs, const Swarm& w, const RewriteInput& in);

std::vector<RewriteInput> active_rewrites(const Ruleset& rs, const Swarm& w);

struct SwarmStep {
    uint64_t step = 0;
    RewriteInput input;
    Vertex new_vertex = 0;
    uint32_t out1 = 0, out2 = 0; // edge indexes
    Color out_color = Color::Green;
};

/// Executes an active rewriting: one fresh vertex, two new edges. Throws on
/// inactive inputs.
SwarmStep rewrite_step(const Ruleset& rs, Swarm& w, const RewriteInput& in, uint64_t step);

struct SwarmChaseOptions {
    uint64_t budget = 0;
    SchedulerKind scheduler = SchedulerKind::NewestFirst;
    uint64_t seed = 0;
    std::optional<IdealSpider> goal_label;
    bool check_idempotence = true; // executed inputs must be inactive afterwards
    std::function<void(const SwarmStep&, const Swarm&)> observer;
};

struct SwarmTrace {
    Swarm swarm; // final
    uint32_t initial_edges = 0;
    std::vector<SwarmStep> steps;
    ChaseVerdict verdict = ChaseVerdict::Saturated;
    uint64_t applied = 0;
    std::optional<uint64_t> goal_step;
    std::vector<std::string> idempotence_violations;

    uint32_t stage_edge_count(uint64_t k) const { return initial_edges + uint32_t(2 * k); }
};

// NewestFirst prioritizes the most recent discoveries and fires the
// associated rule on a fresh couple immediately; this reproduces the
// spouse-priority construction order.
SwarmTrace swarm_chase(const Ruleset& rs, const Swarm& w0, const SwarmChaseOptions& opts);

struct SwarmOfResult {
    Swarm swarm;
    std::unordered_map<Term, Vertex, TermHash> vertex_of; // tail/antenna elements
    std::vector<Term> term_of;                            // inverse
};

/// Abstraction map: vertices are the tails/antennas of H atoms (numbered by
/// first appearance); edges are the classified head spiders.
SwarmOfResult swarm_of(const SpiderWorld& w, const Structure& d);

using Word = std::vector<int>;

/// W(D) up to max_len: words read along walks over green 1-lame upper edges,
/// even letters forward, odd letters backward. The empty word is always in.
std::set<Word> word_set(const Swarm& w, int max_len);

std::string word_to_string(const Word& w);

struct WordRoles {
    int alpha = 0, beta0 = 0, beta1 = 0, eta0 = 0, eta1 = 0, gamma = 0, gammap = 0;
};

/// No interior alpha, no eta before the last position.
bool word_correct(const Word& w, const WordRoles& roles);
/// Correct, starts with alpha and ends with one of the etas.
bool word_maximal_correct(const Word& w, const WordRoles& roles);

struct StructuralReport {
    std::vector<std::string> violations;
    std::vector<std::string> inconclusive;
    bool ok() const { return violations.empty(); }
};

struct StructuralCheckOptions {
    WordRoles roles;
    int max_word_len = 8;
    // Bounded oracle for the reduces-to-alpha.eta1 check; nullopt = out of
    // budget (reported inconclusive, not a violation).
    std::function<std::optional<bool>(const Word&)> reduces_to_goal;
};

// Runs the trace-level structural laws: (a) tails/antennas bipartite,
// (b) knots have degree 2, (c) red couples only rewrite with their spouse
// under the associated rule, (d) couples with a 2-lame red are sterile,
// (e) dangerous-vertex characterization, (f) maximal correct words reduce
// to alpha.eta1, (g) no green gamma labels.
StructuralReport check_structural(const Ruleset& rs, const SwarmTrace& trace,
                                  const StructuralCheckOptions& opts);

/// Edge labels red iff lower (holds for lower-only rulesets).
std::vector<std::string> red_iff_lower_violations(const Swarm& w);

std::string swarm_to_text(const Swarm& w);
Swarm swarm_from_text(const std::string& text);
std::string swarm_to_dot(const Swarm& w);
std::string swarm_trace_to_jsonl(const Ruleset& rs, const SwarmTrace& trace);

} // namespace grchase
