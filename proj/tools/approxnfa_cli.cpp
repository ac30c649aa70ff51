#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "approxnfa/approxnfa.hpp"
#include "approxnfa/parallel.hpp"

namespace fs = std::filesystem;
using namespace approxnfa;
using Json = nlohmann::ordered_json;

namespace {

bool g_json = false;

void emit(const Json& j, const std::string& human) {
    if (g_json) std::cout << j.dump(2) << '\n';
    else std::cout << human;
}

std::string printable(std::string_view w, std::size_t limit = 64) {
    std::string out;
    for (std::size_t i = 0; i < w.size() && i < limit; ++i) {
        auto c = static_cast<unsigned char>(w[i]);
        if (c >= 0x20 && c < 0x7f && c != '\\') {
            out += static_cast<char>(c);
        } else {
            char buf[8];
            std::snprintf(buf, sizeof buf, "\\x%02x", c);
            out += buf;
        }
    }
    if (w.size() > limit) out += "...";
    return out;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path.string());
    out << text;
    if (!out) throw InputError("write failed for " + path.string());
}

// --------------------------------------------------------------------------

struct CompileArgs {
    std::string rules, regex, out;
    bool icase = false, dot_all = false;
    std::size_t cap = 64;
};

void run_compile(const CompileArgs& a) {
    CompileOptions opts;
    opts.case_insensitive = a.icase;
    opts.dot_all = a.dot_all;
    opts.repetition_cap = a.cap;
    if (a.rules.empty() == a.regex.empty()) throw ParameterError("give exactly one of --rules or --regex");
    std::size_t rule_count = 1;
    Nfa nfa;
    if (!a.rules.empty()) {
        auto rules = read_rules(a.rules);
        rule_count = rules.size();
        nfa = compile_ruleset(rules, opts);
    } else {
        nfa = compile_regex(a.regex, opts);
    }
    write_nfa(nfa, fs::path(a.out));
    Json j{{"output", a.out},          {"rules", rule_count},          {"states", nfa.num_states()},
           {"transitions", nfa.num_transitions()}, {"finals", nfa.num_finals()}, {"nfa_hash", nfa_hash_hex(nfa)}};
    emit(j, "compiled " + std::to_string(rule_count) + " rule(s): " + std::to_string(nfa.num_states()) +
                " states, " + std::to_string(nfa.num_transitions()) + " transitions -> " + a.out + "\n");
}

// --------------------------------------------------------------------------

struct TraceArgs {
    std::optional<std::uint64_t> max_packets;
    std::optional<std::size_t> truncate;

    void add_to(CLI::App* app) {
        app->add_option("--max-packets", max_packets, "Read at most this many payloads from a pcap");
        app->add_option("--truncate", truncate, "Keep only the first N payload bytes");
    }
    TrafficSample load(const std::string& path) const {
        PcapOptions o;
        o.max_packets = max_packets;
        o.truncate_length = truncate;
        auto s = load_trace(path, o);
        return s;
    }
};

struct LabelArgs {
    std::string nfa, trace, out;
    TraceArgs trace_opts;
};

void run_label(const LabelArgs& a) {
    auto nfa = read_nfa(a.nfa);
    auto sample = a.trace_opts.load(a.trace);
    auto l = label(nfa, sample, default_workers());
    write_labeling(l, nfa, fs::path(a.out));
    std::size_t unseen = 0;
    for (auto c : l.counts) unseen += c == 0;
    Json j{{"output", a.out},       {"states", nfa.num_states()}, {"sample_size", l.sample_size},
           {"unreached_states", unseen}, {"nfa_hash", nfa_hash_hex(nfa)}};
    emit(j, "labelled " + std::to_string(nfa.num_states()) + " states over " + std::to_string(l.sample_size) +
                " packets (" + std::to_string(unseen) + " never reached) -> " + a.out + "\n");
}

// --------------------------------------------------------------------------

struct ReduceArgs {
    std::string nfa, labels, out, report, method = "prune", external, trace;
    double theta = 1.0, distance = 1.0, frequency = 1.0;
    TraceArgs trace_opts;
};

void run_reduce(const ReduceArgs& a) {
    auto precise = read_nfa(a.nfa);
    if (!a.external.empty()) {
        // Substitution of an automaton reduced by another tool: spot-check
        // that it still accepts everything the precise one does.
        if (a.trace.empty()) throw ParameterError("--external needs --trace for the inclusion check");
        auto candidate = read_nfa(a.external);
        auto sample = a.trace_opts.load(a.trace);
        if (auto w = find_inclusion_violation(precise, candidate, sample))
            throw InvariantViolation("external automaton rejects packet '" + printable(*w) +
                                     "' accepted by the precise automaton");
        write_nfa(candidate, fs::path(a.out));
        Json j{{"output", a.out}, {"external", a.external}, {"states_before", precise.num_states()},
               {"states_after", candidate.num_states()}, {"checked_packets", sample.total_packets()}};
        emit(j, "external automaton passed the inclusion check on " + std::to_string(sample.total_packets()) +
                    " packets -> " + a.out + "\n");
        return;
    }
    ReductionParams p{parse_method(a.method), a.theta, a.distance, a.frequency};
    std::optional<Labeling> labels;
    if (!a.labels.empty()) labels = read_labeling(a.labels, precise);
    Reduction r = [&] {
        if (p.method == ReductionMethod::bfs) return bfs_reduce(precise, p.theta, labels ? &*labels : nullptr);
        if (!labels) throw ParameterError(a.method + " needs --labels");
        return reduce(precise, *labels, p);
    }();
    write_nfa(r.nfa, fs::path(a.out));
    if (!a.report.empty()) write_text_file(a.report, r.report.to_json() + "\n");
    Json j = Json::parse(r.report.to_json());
    j["output"] = a.out;
    std::string human = to_string(p.method) + ": " + std::to_string(r.report.states_before) + " -> " +
                        std::to_string(r.report.states_after) + " states";
    if (r.report.error_bound) human += ", error bound " + std::to_string(*r.report.error_bound) + " packets";
    emit(j, human + " -> " + a.out + "\n");
}

// --------------------------------------------------------------------------

struct EvalArgs {
    std::string precise, reduced, trace;
    TraceArgs trace_opts;
};

void run_eval(const EvalArgs& a) {
    auto precise = read_nfa(a.precise);
    auto reduced = read_nfa(a.reduced);
    auto sample = a.trace_opts.load(a.trace);
    auto e = evaluate(precise, reduced, sample, default_workers());
    Json j = Json::parse(e.to_json());
    std::ostringstream human;
    human << "a_tp=" << e.a_tp << " a_fp=" << e.a_fp << " a_fn=" << e.a_fn << " packets=" << e.sample_size
          << " ap=" << fmt(e.ap) << " prob=" << fmt(e.prob) << (e.no_acceptances ? " (no acceptances)" : "") << '\n';
    emit(j, human.str());
    if (e.violates_inclusion())
        throw InvariantViolation(std::to_string(e.a_fn) + " packet(s) accepted by the precise automaton were rejected");
}

// --------------------------------------------------------------------------

std::vector<double> parse_list(const std::string& text, const char* what) {
    std::vector<double> out;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ',');) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ParameterError(std::string("bad value '") + item + "' in " + what + " list");
        }
    }
    return out;
}

struct ParetoArgs {
    std::string nfa, labels, train, test, out, out_dir, cost_model, overrides;
    std::string methods = "prune,merge,merge-prune,bfs";
    std::string thetas = "0.2,0.5,0.8", distances = "1.5,3", frequencies = "0.05,0.2";
    bool no_precise = false, all_rows = false;
    TraceArgs trace_opts;
};

void run_pareto(const ParetoArgs& a) {
    auto precise = read_nfa(a.nfa);
    if (a.labels.empty() == a.train.empty()) throw ParameterError("give exactly one of --labels or --train");
    Labeling training = a.labels.empty() ? label(precise, a.trace_opts.load(a.train), default_workers())
                                         : read_labeling(a.labels, precise);
    auto test = a.trace_opts.load(a.test);

    SweepGrid grid;
    std::stringstream ms(a.methods);
    for (std::string m; std::getline(ms, m, ',');) grid.methods.push_back(parse_method(m));
    grid.thetas = parse_list(a.thetas, "theta");
    grid.distances = parse_list(a.distances, "distance");
    grid.frequencies = parse_list(a.frequencies, "frequency");
    grid.include_precise = !a.no_precise;

    CostModel cost = a.cost_model.empty() ? CostModel{} : read_cost_model(a.cost_model);
    if (!a.overrides.empty()) read_overrides(fs::path(a.overrides), cost);

    auto entries = sweep(precise, training, test, grid, cost, default_workers());
    for (const auto& e : entries)
        if (e.eval.violates_inclusion())
            throw InvariantViolation("candidate " + e.id + " rejects " + std::to_string(e.eval.a_fn) +
                                     " packet(s) accepted by the precise automaton");

    auto front = pareto_front(entries);
    std::vector<std::size_t> rows = front;
    if (a.all_rows) {
        rows.clear();
        for (std::size_t i = 0; i < entries.size(); ++i) rows.push_back(i);
    }
    std::ostringstream csv;
    write_sweep_csv(entries, rows, csv);
    write_text_file(a.out, csv.str());
    if (!a.out_dir.empty()) {
        fs::create_directories(a.out_dir);
        for (std::size_t i : rows) write_nfa(entries[i].nfa, fs::path(a.out_dir) / (entries[i].id + ".nfa"));
    }

    Json j{{"output", a.out}, {"evaluated", entries.size()}, {"pareto", front.size()}};
    Json cands = Json::array();
    for (std::size_t i : front)
        cands.push_back({{"id", entries[i].id},
                         {"states", entries[i].nfa.num_states()},
                         {"cost", entries[i].cost},
                         {"prob", entries[i].eval.prob},
                         {"ap", entries[i].eval.ap}});
    j["candidates"] = cands;
    std::string human = "evaluated " + std::to_string(entries.size()) + " automata, " +
                        std::to_string(front.size()) + " Pareto-optimal -> " + a.out + "\n";
    for (std::size_t i : front)
        human += "  " + entries[i].id + "  states=" + std::to_string(entries[i].nfa.num_states()) +
                 " cost=" + fmt(entries[i].cost) + " prob=" + fmt(entries[i].eval.prob) + "\n";
    emit(j, human);
}

// --------------------------------------------------------------------------

struct PlanArgs {
    std::string candidates, problem, objective;
    std::optional<double> max_output, budget, input_rate, throughput;
    std::optional<std::size_t> stages;
    bool exact_stages = false, enumerate = false;
};

void run_plan(const PlanArgs& a) {
    PlanProblem p;
    if (a.candidates.empty() == a.problem.empty()) throw ParameterError("give exactly one of --candidates or --problem");
    if (!a.problem.empty()) {
        p = read_problem(a.problem);
    } else {
        p.candidates = read_candidates_csv(a.candidates);
        if (!a.input_rate || !a.throughput) throw ParameterError("--input-rate and --throughput are required");
    }
    if (a.input_rate) p.input_rate = *a.input_rate;
    if (a.throughput) p.engine_throughput = *a.throughput;
    if (a.stages) p.max_stages = *a.stages;
    if (a.exact_stages) p.exact_stages = true;
    if (a.max_output) p.max_output = *a.max_output;
    if (a.budget) p.budget = *a.budget;
    if (a.objective == "rsc") p.objective = Objective::min_resources;
    else if (a.objective == "out") p.objective = Objective::min_output;
    else if (!a.objective.empty()) throw ParameterError("--objective must be rsc or out");

    auto outcome = solve(p);
    if (a.enumerate && !g_json) std::cout << format_plan_table(enumerate_plans(p), p) << '\n';
    if (!outcome.feasible())
        throw InfeasibleError("no plan satisfies the bounds (binding constraint: " + outcome.binding_constraint + ")");
    const auto& plan = *outcome.plan;
    Json j = Json::parse(plan.to_json());
    j["objective"] = p.objective == Objective::min_resources ? "rsc" : "out";
    j["explored"] = outcome.explored;
    emit(j, format_plan_table({plan}, p));
}

// --------------------------------------------------------------------------

struct DotArgs {
    std::string nfa, labels, out;
};

void run_dot(const DotArgs& a) {
    auto nfa = read_nfa(a.nfa);
    std::optional<Labeling> l;
    if (!a.labels.empty()) l = read_labeling(a.labels, nfa);
    export_dot(nfa, l ? &*l : nullptr, fs::path(a.out));
    emit(Json{{"output", a.out}, {"states", nfa.num_states()}, {"labelled", l.has_value()}},
         "wrote " + a.out + "\n");
}

int fail(const std::string& code, const std::string& message, int exit_code) {
    std::cerr << "error: " << code << ": " << message << '\n';
    return exit_code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Traffic-aware approximate reduction of packet-matching NFAs"};
    app.require_subcommand(1);
    app.add_flag("--json", g_json, "Machine-readable output on stdout");

    CompileArgs ca;
    auto* compile = app.add_subcommand("compile", "Compile a rule file or a single regex into an NFA");
    compile->add_option("--rules", ca.rules, "Rule file: one '<id><TAB><pattern>' per line");
    compile->add_option("--regex", ca.regex, "A single pattern");
    compile->add_flag("-i,--case-insensitive", ca.icase);
    compile->add_flag("-s,--dot-all", ca.dot_all, "'.' also matches newline");
    compile->add_option("--repetition-cap", ca.cap, "Largest bound allowed in {m,n}");
    compile->add_option("-o,--output", ca.out, "Output NFA file")->required();

    LabelArgs la;
    auto* lab = app.add_subcommand("label", "Compute state significance over a training trace");
    lab->add_option("--nfa", la.nfa)->required();
    lab->add_option("--trace", la.trace, "pcap or raw trace")->required();
    lab->add_option("-o,--output", la.out, "Labeling CSV")->required();
    la.trace_opts.add_to(lab);

    ReduceArgs ra;
    auto* red = app.add_subcommand("reduce", "Reduce an NFA");
    red->add_option("--nfa", ra.nfa, "Precise NFA")->required();
    red->add_option("--labels", ra.labels, "Labeling CSV of --nfa");
    red->add_option("--method", ra.method, "prune | merge | merge-prune | bfs");
    red->add_option("--theta", ra.theta, "Target state ratio in (0, 1]");
    red->add_option("-D,--distance", ra.distance, "Merge distance ceiling (>= 1)");
    red->add_option("-F,--frequency", ra.frequency, "Merge frequency ceiling in (0, 1]");
    red->add_option("--external", ra.external, "Adopt an externally reduced NFA after an inclusion check")
        ;
    red->add_option("--trace", ra.trace, "Trace for the --external inclusion check");
    red->add_option("--report", ra.report, "Write the reduction report as JSON");
    red->add_option("-o,--output", ra.out, "Output NFA file")->required();
    ra.trace_opts.add_to(red);

    EvalArgs ea;
    auto* ev = app.add_subcommand("eval", "Compare a reduced NFA against the precise one on a test trace");
    ev->add_option("--precise", ea.precise)->required();
    ev->add_option("--reduced", ea.reduced)->required();
    ev->add_option("--trace", ea.trace)->required();
    ea.trace_opts.add_to(ev);

    ParetoArgs pa;
    auto* par = app.add_subcommand("pareto", "Sweep reductions and keep the Pareto-optimal candidates");
    par->add_option("--nfa", pa.nfa, "Precise NFA")->required();
    par->add_option("--labels", pa.labels, "Labeling CSV of --nfa");
    par->add_option("--train", pa.train, "Training trace (instead of --labels)");
    par->add_option("--test", pa.test, "Test trace")->required();
    par->add_option("--methods", pa.methods, "Comma-separated methods");
    par->add_option("--theta", pa.thetas, "Comma-separated ratios");
    par->add_option("-D,--distance", pa.distances, "Comma-separated distance ceilings");
    par->add_option("-F,--frequency", pa.frequencies, "Comma-separated frequency ceilings");
    par->add_option("--cost-model", pa.cost_model, "key=value cost model");
    par->add_option("--overrides", pa.overrides, "candidate_id,luts table");
    par->add_flag("--no-precise", pa.no_precise, "Leave the precise automaton out of the candidates");
    par->add_flag("--all", pa.all_rows, "Write every evaluated candidate, not only the front");
    par->add_option("--out-dir", pa.out_dir, "Also write each listed candidate NFA here");
    par->add_option("-o,--output", pa.out, "Candidate CSV")->required();
    pa.trace_opts.add_to(par);

    PlanArgs pl;
    auto* plan = app.add_subcommand("plan", "Choose a multi-stage deployment");
    plan->add_option("--candidates", pl.candidates, "Candidate CSV (from pareto)");
    plan->add_option("--problem", pl.problem, "Problem JSON");
    plan->add_option("--objective", pl.objective, "rsc (minimise LUTs) or out (minimise output)");
    plan->add_option("-X,--max-output", pl.max_output, "Output bound, Gbps");
    plan->add_option("-Y,--budget", pl.budget, "LUT budget");
    plan->add_option("--input-rate", pl.input_rate, "Unit input rate, Gbps");
    plan->add_option("--throughput", pl.throughput, "Throughput of one automaton instance, Gbps");
    plan->add_option("--stages", pl.stages, "Maximum number of stages");
    plan->add_flag("--exact-stages", pl.exact_stages, "Use exactly --stages stages");
    plan->add_flag("--enumerate", pl.enumerate, "Also print every admissible configuration");

    DotArgs da;
    auto* dot = app.add_subcommand("export-dot", "Render an NFA, optionally as a significance heat map");
    dot->add_option("--nfa", da.nfa)->required();
    dot->add_option("--labels", da.labels);
    dot->add_option("-o,--output", da.out)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail("E_USAGE", e.what(), 2);
    }

    try {
        if (compile->parsed()) run_compile(ca);
        else if (lab->parsed()) run_label(la);
        else if (red->parsed()) run_reduce(ra);
        else if (ev->parsed()) run_eval(ea);
        else if (par->parsed()) run_pareto(pa);
        else if (plan->parsed()) run_plan(pl);
        else if (dot->parsed()) run_dot(da);
    } catch (const Error& e) {
        return fail(e.code(), e.what(), e.exit_code());
    } catch (const std::exception& e) {
        return fail("E_INTERNAL", e.what(), 1);
    }
    return 0;
}
