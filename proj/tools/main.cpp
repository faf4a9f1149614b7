// Batch front-end: determinacy runs, raw chases, swarm rewriting, ruleset
// compilation and word-language enumeration.
//
// Exit codes: 0 positive verdict / success, 1 negative verdict or failed
// checks, 2 budget exhausted, 3 parse error, 4 validation error, 5 internal.

#include "CLI11.hpp"
#include "json.hpp"

#include "grchase/textio.hpp"

#include <iostream>

using namespace grchase;

namespace {

SchedulerKind scheduler_of(const std::string& name) {
    if (name == "fifo") return SchedulerKind::Fifo;
    if (name == "random") return SchedulerKind::Random;
    if (name == "spouse") return SchedulerKind::NewestFirst;
    throw Error("unknown scheduler " + name);
}

struct CommonOpts {
    uint64_t budget = 0;
    std::string scheduler = "fifo";
    uint64_t seed = 0;
    std::string out;
};

void add_common(CLI::App* cmd, CommonOpts& opts, const char* default_sched) {
    opts.scheduler = default_sched;
    cmd->add_option("--budget", opts.budget, "maximum number of applications")->required();
    cmd->add_option("--scheduler", opts.scheduler, "fifo|random|spouse");
    cmd->add_option("--seed", opts.seed, "seed for the randomized scheduler");
    cmd->add_option("--out", opts.out, "write the trace here (json lines)");
}

// Views from a ruleset file: unary queries plus the binary combinations.
std::pair<std::shared_ptr<SpiderWorld>, std::vector<ConjunctiveQuery>>
views_of_ruleset(const ParsedRuleset& rs) {
    auto world = std::make_shared<SpiderWorld>(rs.s);
    std::vector<ConjunctiveQuery> views;
    for (const auto& [name, f] : rs.unary) {
        ConjunctiveQuery q = spider_query(*world, f);
        q.name = name;
        views.push_back(std::move(q));
    }
    for (const BinaryQuery& q : rs.binary) views.push_back(to_query(*world, q));
    return {world, views};
}

int cmd_determinacy(const std::string& instance_path, const std::string& ruleset_path,
                    const CommonOpts& common) {
    DeterminacyInstance inst;
    DeterminacyOptions opts;
    if (!instance_path.empty()) {
        Program p = parse_program(read_file(instance_path));
        if (!p.query) throw Error("instance file has no 'query:' line");
        inst = DeterminacyInstance{p.sig, p.views, *p.query};
    } else {
        ParsedRuleset rs = parse_ruleset(read_file(ruleset_path));
        auto [world, views] = views_of_ruleset(rs);
        ConjunctiveQuery full{"Q0", world->base(), {}, world->phi()};
        inst = DeterminacyInstance{world->base(), views, full};
        // fresh spider matches always ride a fresh H atom
        opts.delta_pin_base = std::vector<PredId>{world->h()};
    }

    opts.scheduler = scheduler_of(common.scheduler);
    opts.seed = common.seed;
    auto trace = std::make_shared<ChaseTrace>();
    auto tgds = std::make_shared<std::vector<Tgd>>();
    if (!common.out.empty()) {
        opts.trace_out = trace;
        opts.tgds_out = tgds;
    }
    DeterminacyVerdict verdict = decide_determinacy(inst, common.budget, opts);

    nlohmann::json j;
    j["verdict"] = verdict.kind == DeterminacyVerdict::Determined      ? "Determined"
                   : verdict.kind == DeterminacyVerdict::NotDetermined ? "NotDetermined"
                                                                       : "Unknown";
    if (verdict.step) j["step"] = *verdict.step;
    j["budget_used"] = verdict.budget_used;
    j["idempotence_violations"] = verdict.idempotence_violations.size();
    std::cout << j.dump() << "\n";
    if (!common.out.empty()) write_file(common.out, trace_to_jsonl(*trace, *tgds));

    switch (verdict.kind) {
        case DeterminacyVerdict::Determined: return 0;
        case DeterminacyVerdict::NotDetermined: return 1;
        case DeterminacyVerdict::Unknown: return 2;
    }
    return 5;
}

int cmd_chase(const std::string& views_path, const std::string& data_path,
              const std::string& goal_name, const CommonOpts& common, const std::string& dot) {
    Program p = parse_program(read_file(views_path));
    ColoredSignature cs(p.sig);
    auto gen = generate_tgds(cs, p.views);
    Structure d0 = parse_facts(read_file(data_path), cs.colored());

    ChaseOptions opts;
    opts.budget = common.budget;
    opts.scheduler = scheduler_of(common.scheduler);
    opts.seed = common.seed;
    opts.paired = gen.paired;
    opts.check_idempotence = true;

    int code = 0;
    ChaseTrace trace;
    if (!goal_name.empty()) {
        // goal: a view name painted red, asked as a Boolean query
        const ConjunctiveQuery* goal = nullptr;
        for (const ConjunctiveQuery& q : p.views)
            if (q.name == goal_name) goal = &q;
        if (!goal) throw Error("goal names no view: " + goal_name);
        ConjunctiveQuery red_goal = colorize(cs, *goal, Color::Red);
        red_goal.free_vars.clear();
        opts.goal = ChaseGoal{red_goal, {}};
        trace = run_chase(gen.tgds, d0, opts);
        code = trace.verdict == ChaseVerdict::GoalReached  ? 0
               : trace.verdict == ChaseVerdict::Saturated ? 1
                                                           : 2;
    } else {
        trace = run_chase(gen.tgds, d0, opts);
        code = trace.verdict == ChaseVerdict::BudgetExhausted ? 2 : 0;
    }

    nlohmann::json j;
    j["verdict"] = trace.verdict == ChaseVerdict::Saturated         ? "Saturated"
                   : trace.verdict == ChaseVerdict::BudgetExhausted ? "BudgetExhausted"
                                                                    : "GoalReached";
    j["applied"] = trace.applied;
    if (trace.goal_step) j["goal_step"] = *trace.goal_step;
    j["atoms"] = trace.final_structure.atoms().size();
    j["idempotence_violations"] = trace.idempotence_violations.size();
    std::cout << j.dump() << "\n";
    if (!common.out.empty()) write_file(common.out, trace_to_jsonl(trace, gen.tgds));
    if (!dot.empty()) write_file(dot, structure_to_dot(trace.final_structure));
    return code;
}

int cmd_swarm(const std::string& ruleset_path, const std::string& swarm_path, bool check,
              const std::string& goal_label, const CommonOpts& common, const std::string& dot) {
    ParsedRuleset parsed = parse_ruleset(read_file(ruleset_path));
    if (!parsed.unary.empty()) throw Error("swarm rewriting needs binary rules");
    Ruleset rs = Ruleset::make(parsed.binary);
    Swarm w0 = swarm_path.empty() ? initial_swarm() : swarm_from_text(read_file(swarm_path));

    SwarmChaseOptions opts;
    opts.budget = common.budget;
    opts.scheduler = scheduler_of(common.scheduler);
    opts.seed = common.seed;
    if (!goal_label.empty()) opts.goal_label = parse_spider_label(goal_label);
    SwarmTrace trace = swarm_chase(rs, w0, opts);

    nlohmann::json j;
    j["verdict"] = trace.verdict == ChaseVerdict::Saturated         ? "Saturated"
                   : trace.verdict == ChaseVerdict::BudgetExhausted ? "BudgetExhausted"
                                                                    : "GoalReached";
    j["applied"] = trace.applied;
    if (trace.goal_step) j["goal_step"] = *trace.goal_step;
    j["edges"] = trace.swarm.edges().size();

    int code = 0;
    if (trace.verdict == ChaseVerdict::BudgetExhausted && !goal_label.empty()) code = 2;
    if (check) {
        StructuralCheckOptions copts;
        if (parsed.roles) copts.roles = *parsed.roles;
        auto report = check_structural(rs, trace, copts);
        j["violations"] = report.violations;
        j["inconclusive"] = report.inconclusive.size();
        if (!report.ok()) code = 1;
    }
    std::cout << j.dump() << "\n";
    if (!common.out.empty()) write_file(common.out, swarm_trace_to_jsonl(rs, trace));
    if (!dot.empty()) write_file(dot, swarm_to_dot(trace.swarm));
    return code;
}

int cmd_compile(const std::string& kind, const std::string& input, const std::string& out) {
    std::string text;
    if (kind == "reach") {
        Graph g = parse_graph(read_file(input));
        ReachabilityEncoding enc = encode_reachability(g);
        std::vector<std::pair<std::string, SpiderQuery>> unary;
        for (const SpiderQuery& f : enc.ruleset) unary.push_back({to_string(f), f});
        text = ruleset_to_text(enc.world->s(), {}, unary);
    } else if (kind == "thue") {
        ThueSystem ts = parse_thue(read_file(input));
        auto violations = validate_friendly(ts);
        if (!violations.empty()) {
            for (const auto& item : violations) std::cerr << "not friendly: " << item << "\n";
            return 4;
        }
        CompiledRuleset cr = compile_thue(ts);
        text = ruleset_to_text(cr.world->s(), cr.q.rules, {}, cr.roles);
    } else {
        throw Error("--kind must be reach or thue");
    }
    if (out.empty())
        std::cout << text;
    else
        write_file(out, text);
    return 0;
}

int cmd_words(const std::string& swarm_path, int max_len) {
    Swarm w = swarm_from_text(read_file(swarm_path));
    for (const Word& word : word_set(w, max_len)) std::cout << word_to_string(word) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"green-red chase workbench for conjunctive query determinacy"};
    app.require_subcommand(1);

    CommonOpts det_common, chase_common, swarm_common;

    auto* det = app.add_subcommand("determinacy", "semi-decide view determinacy");
    std::string det_instance, det_ruleset;
    det->add_option("--instance", det_instance, "view definitions plus a query: line");
    det->add_option("--ruleset", det_ruleset, "spider ruleset; the query is the full-body one");
    add_common(det, det_common, "fifo");

    auto* chase = app.add_subcommand("chase", "run the green-red chase over view TGDs");
    std::string chase_views, chase_data, chase_goal, chase_dot;
    chase->add_option("--views", chase_views, "view definitions")->required();
    chase->add_option("--data", chase_data, "initial facts over colored predicates")->required();
    chase->add_option("--goal", chase_goal, "stop when this view holds in red");
    chase->add_option("--dot", chase_dot, "write the final structure as dot");
    add_common(chase, chase_common, "fifo");

    auto* swarm = app.add_subcommand("swarm", "run the swarm rewriting chase");
    std::string swarm_ruleset, swarm_init, swarm_goal, swarm_dot;
    bool swarm_check = false;
    swarm->add_option("--ruleset", swarm_ruleset, "binary rewriting rules")->required();
    swarm->add_option("--swarm", swarm_init, "initial swarm (default: one green edge)");
    swarm->add_option("--goal-label", swarm_goal, "stop when an edge carries this label");
    swarm->add_flag("--check", swarm_check, "run the structural report");
    swarm->add_option("--dot", swarm_dot, "write the final swarm as dot");
    add_common(swarm, swarm_common, "spouse");

    auto* compile = app.add_subcommand("compile", "compile graphs or word systems to rulesets");
    std::string compile_kind, compile_input, compile_out;
    compile->add_option("--kind", compile_kind, "reach|thue")->required();
    compile->add_option("--input", compile_input, "graph or thue file")->required();
    compile->add_option("--out", compile_out, "ruleset output path (default: stdout)");

    auto* words = app.add_subcommand("words", "enumerate the walk language of a swarm");
    std::string words_swarm;
    int words_max_len = 6;
    words->add_option("--swarm", words_swarm, "swarm file")->required();
    words->add_option("--max-len", words_max_len, "maximum word length");

    CLI11_PARSE(app, argc, argv);

    try {
        if (det->parsed()) {
            if (det_instance.empty() == det_ruleset.empty())
                throw Error("pass exactly one of --instance / --ruleset");
            return cmd_determinacy(det_instance, det_ruleset, det_common);
        }
        if (chase->parsed())
            return cmd_chase(chase_views, chase_data, chase_goal, chase_common, chase_dot);
        if (swarm->parsed())
            return cmd_swarm(swarm_ruleset, swarm_init, swarm_check, swarm_goal, swarm_common,
                             swarm_dot);
        if (compile->parsed()) return cmd_compile(compile_kind, compile_input, compile_out);
        if (words->parsed()) return cmd_words(words_swarm, words_max_len);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 3;
    } catch (const StructuralViolation& e) {
        std::cerr << "structural violation: " << e.what() << "\n";
        return 4;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 5;
    }
    return 5;
}
