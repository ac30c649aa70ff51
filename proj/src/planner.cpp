#include "approxnfa/planner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "approxnfa/error.hpp"
#include "json.hpp"

namespace approxnfa {
namespace {

constexpr double kRelTol = 1e-9;

bool approx_equal(double a, double b) { return std::abs(a - b) <= kRelTol * std::max({1.0, std::abs(a), std::abs(b)}); }
bool at_most(double a, double bound) { return a <= bound + kRelTol * std::max(1.0, std::abs(bound)); }

} // namespace

void PlanProblem::validate() const {
    if (candidates.empty()) throw ParameterError("planner needs at least one candidate");
    std::set<std::string> ids;
    std::size_t flagged = 0;
    for (const auto& c : candidates) {
        if (!ids.insert(c.id).second) throw ParameterError("duplicate candidate id '" + c.id + "'");
        if (!(c.lut > 0)) throw ParameterError("candidate '" + c.id + "' must have lut > 0");
        if (!(c.accpt >= 0 && c.accpt <= 1)) throw ParameterError("candidate '" + c.id + "' accpt must lie in [0, 1]");
        flagged += c.precise;
    }
    if (flagged > 1) throw ParameterError("more than one candidate is marked precise");
    if (!(input_rate > 0)) throw ParameterError("input rate must be positive");
    if (!(engine_throughput > 0)) throw ParameterError("engine throughput must be positive");
    if (max_stages < 1) throw ParameterError("at least one stage is required");
    if (max_output && !(*max_output > 0)) throw ParameterError("output bound X must be positive");
    if (budget && !(*budget > 0)) throw ParameterError("resource budget Y must be positive");
    if (objective == Objective::min_resources && !max_output)
        throw ParameterError("resource minimisation needs an output bound X");
    if (objective == Objective::min_output && !budget)
        throw ParameterError("output minimisation needs a resource budget Y");
}

std::size_t PlanProblem::precise_index() const {
    for (std::size_t i = 0; i < candidates.size(); ++i)
        if (candidates[i].precise) return i;
    std::size_t best = 0;
    for (std::size_t i = 1; i < candidates.size(); ++i) {
        const auto& c = candidates[i];
        const auto& b = candidates[best];
        if (c.accpt < b.accpt || (c.accpt == b.accpt && c.lut > b.lut)) best = i;
    }
    return best;
}

std::uint64_t replicas_needed(double rate, double throughput) {
    double x = rate / throughput;
    if (x <= 0) return 0;
    double nearest = std::round(x);
    if (std::abs(x - nearest) <= kRelTol * std::max(1.0, x)) return static_cast<std::uint64_t>(nearest);
    return static_cast<std::uint64_t>(std::ceil(x));
}

std::vector<std::string> StagePlan::candidate_ids() const {
    std::vector<std::string> ids;
    for (const auto& s : stages) ids.push_back(s.candidate_id);
    return ids;
}

std::string StagePlan::to_json() const {
    nlohmann::ordered_json j;
    j["total_resources"] = total_resources;
    j["output_rate"] = output_rate;
    auto arr = nlohmann::ordered_json::array();
    for (const auto& s : stages) {
        nlohmann::ordered_json st;
        st["candidate"] = s.candidate_id;
        st["replicas"] = s.replicas;
        st["input_rate"] = s.input_rate;
        st["output_rate"] = s.output_rate;
        st["resources"] = s.resources;
        arr.push_back(st);
    }
    j["stages"] = arr;
    return j.dump(2);
}

StagePlan evaluate_assignment(const PlanProblem& problem, const std::vector<std::size_t>& assignment) {
    StagePlan plan;
    double rate = problem.input_rate;
    for (std::size_t idx : assignment) {
        const auto& c = problem.candidates.at(idx);
        Stage s;
        s.candidate = idx;
        s.candidate_id = c.id;
        s.input_rate = rate;
        s.replicas = replicas_needed(rate, problem.engine_throughput);
        s.resources = static_cast<double>(s.replicas) * c.lut;
        // Each stage's language contains the next one's, so its output is a
        // fraction of the unit's input, not of the previous stage's output.
        s.output_rate = problem.input_rate * c.accpt;
        plan.total_resources += s.resources;
        rate = s.output_rate;
        plan.stages.push_back(std::move(s));
    }
    plan.output_rate = plan.stages.empty() ? problem.input_rate : rate;
    return plan;
}

StagePlan evaluate_assignment(const PlanProblem& problem, const std::vector<std::string>& ids) {
    std::vector<std::size_t> idx;
    for (const auto& id : ids) {
        auto it = std::find_if(problem.candidates.begin(), problem.candidates.end(),
                               [&](const Candidate& c) { return c.id == id; });
        if (it == problem.candidates.end()) throw ParameterError("unknown candidate '" + id + "'");
        idx.push_back(static_cast<std::size_t>(it - problem.candidates.begin()));
    }
    return evaluate_assignment(problem, idx);
}

bool within_bounds(const PlanProblem& problem, const StagePlan& plan) {
    if (problem.max_output && !at_most(plan.output_rate, *problem.max_output)) return false;
    if (problem.budget && !at_most(plan.total_resources, *problem.budget)) return false;
    return true;
}

bool plan_better(const PlanProblem& problem, const StagePlan& a, const StagePlan& b) {
    double pa = a.total_resources, pb = b.total_resources;
    double sa = a.output_rate, sb = b.output_rate;
    if (problem.objective == Objective::min_output) {
        std::swap(pa, sa);
        std::swap(pb, sb);
    }
    if (!approx_equal(pa, pb)) return pa < pb;
    if (!approx_equal(sa, sb)) return sa < sb;
    if (a.stages.size() != b.stages.size()) return a.stages.size() < b.stages.size();
    double fa = problem.candidates[a.stages.back().candidate].accpt;
    double fb = problem.candidates[b.stages.back().candidate].accpt;
    if (fa != fb) return fa < fb;
    return a.candidate_ids() < b.candidate_ids();
}

namespace {

class Search {
public:
    explicit Search(const PlanProblem& p) : p_(p), order_(p.candidates.size()) {
        std::iota(order_.begin(), order_.end(), std::size_t{0});
        std::sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
            if (p.candidates[a].accpt != p.candidates[b].accpt) return p.candidates[a].accpt > p.candidates[b].accpt;
            return p.candidates[a].id < p.candidates[b].id;
        });
    }

    PlanOutcome run() {
        std::vector<std::size_t> prefix;
        dfs(prefix, p_.input_rate, 0.0, 2.0);
        PlanOutcome out;
        out.plan = std::move(best_);
        out.explored = explored_;
        return out;
    }

private:
    void dfs(std::vector<std::size_t>& prefix, double rate, double rsc, double last_accpt) {
        for (std::size_t idx : order_) {
            const auto& c = p_.candidates[idx];
            if (c.accpt > last_accpt) continue;
            ++explored_;
            double total = rsc + static_cast<double>(replicas_needed(rate, p_.engine_throughput)) * c.lut;
            // Later stages never reduce the resource total.
            if (p_.budget && !at_most(total, *p_.budget)) continue;
            if (p_.objective == Objective::min_resources && best_ &&
                total > best_->total_resources && !approx_equal(total, best_->total_resources))
                continue;
            prefix.push_back(idx);
            bool length_ok = p_.exact_stages ? prefix.size() == p_.max_stages : true;
            if (length_ok) {
                StagePlan plan = evaluate_assignment(p_, prefix);
                if (within_bounds(p_, plan) && (!best_ || plan_better(p_, plan, *best_))) best_ = std::move(plan);
            }
            if (prefix.size() < p_.max_stages) dfs(prefix, p_.input_rate * c.accpt, total, c.accpt);
            prefix.pop_back();
        }
    }

    const PlanProblem& p_;
    std::vector<std::size_t> order_;
    std::optional<StagePlan> best_;
    std::size_t explored_ = 0;
};

template <class Visit>
void for_each_assignment(const PlanProblem& p, Visit&& visit) {
    std::vector<std::size_t> prefix;
    auto rec = [&](auto& self, double last_accpt) -> void {
        for (std::size_t idx = 0; idx < p.candidates.size(); ++idx) {
            if (p.candidates[idx].accpt > last_accpt) continue;
            prefix.push_back(idx);
            if (!p.exact_stages || prefix.size() == p.max_stages) visit(prefix);
            if (prefix.size() < p.max_stages) self(self, p.candidates[idx].accpt);
            prefix.pop_back();
        }
    };
    rec(rec, 2.0);
}

} // namespace

PlanOutcome solve(const PlanProblem& problem) {
    problem.validate();
    PlanOutcome out = Search(problem).run();
    if (!out.plan) {
        bool output_reachable = false;
        for_each_assignment(problem, [&](const std::vector<std::size_t>& a) {
            auto plan = evaluate_assignment(problem, a);
            if (!problem.max_output || at_most(plan.output_rate, *problem.max_output)) output_reachable = true;
        });
        out.binding_constraint = output_reachable ? "resources" : "output";
    }
    return out;
}

std::vector<StagePlan> enumerate_plans(const PlanProblem& problem) {
    problem.validate();
    std::vector<StagePlan> plans;
    for_each_assignment(problem, [&](const std::vector<std::size_t>& a) { plans.push_back(evaluate_assignment(problem, a)); });
    return plans;
}

std::string format_plan_table(const std::vector<StagePlan>& plans, const PlanProblem& problem) {
    std::size_t width = 0, stage_col = 14;
    for (const auto& p : plans) {
        width = std::max(width, p.stages.size());
        for (const auto& s : p.stages)
            stage_col = std::max(stage_col, std::to_string(s.replicas).size() + s.candidate_id.size() + 3);
    }
    std::ostringstream os;
    auto cell = [&](const std::string& s, std::size_t w) {
        os << s;
        for (std::size_t i = s.size(); i < w; ++i) os << ' ';
    };
    cell("#", 4);
    for (std::size_t i = 0; i < width; ++i) cell("Stg. " + std::to_string(i + 1), stage_col);
    cell("LUTs", 12);
    os << "out (Gbps)\n";
    for (std::size_t r = 0; r < plans.size(); ++r) {
        const auto& p = plans[r];
        cell(std::to_string(r + 1), 4);
        for (std::size_t i = 0; i < width; ++i)
            cell(i < p.stages.size() ? std::to_string(p.stages[i].replicas) + "x" + p.stages[i].candidate_id : "---",
                 stage_col);
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.10g", p.total_resources);
        std::string luts = buf;
        if (problem.budget && !at_most(p.total_resources, *problem.budget)) luts += '*';
        cell(luts, 12);
        std::snprintf(buf, sizeof buf, "%.10g", p.output_rate);
        os << buf << '\n';
    }
    return os.str();
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    for (auto& s : out) {
        auto b = s.find_first_not_of(" \t");
        auto e = s.find_last_not_of(" \t");
        s = b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    }
    return out;
}

double to_number(const std::string& s, std::size_t line) {
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw ParseError(line, "bad number '" + s + "'");
    }
    if (used != s.size()) throw ParseError(line, "bad number '" + s + "'");
    return v;
}

} // namespace

std::vector<Candidate> parse_candidates_csv(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    std::vector<std::string> header;
    while (header.empty() && std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        header = split_csv(line);
    }
    auto column = [&](std::initializer_list<const char*> names) -> std::optional<std::size_t> {
        for (const char* n : names) {
            auto it = std::find(header.begin(), header.end(), n);
            if (it != header.end()) return static_cast<std::size_t>(it - header.begin());
        }
        return std::nullopt;
    };
    auto id_col = column({"id", "candidate_id"});
    auto lut_col = column({"cost", "lut", "luts"});
    auto acc_col = column({"prob", "accpt"});
    auto precise_col = column({"precise"});
    if (!id_col || !lut_col || !acc_col) throw ParseError(lineno, "candidate CSV needs id, cost and prob columns");
    std::vector<Candidate> out;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        auto f = split_csv(line);
        if (f.size() != header.size()) throw ParseError(lineno, "expected " + std::to_string(header.size()) + " fields");
        Candidate c;
        c.id = f[*id_col];
        c.lut = to_number(f[*lut_col], lineno);
        c.accpt = to_number(f[*acc_col], lineno);
        if (precise_col) c.precise = f[*precise_col] == "1" || f[*precise_col] == "true";
        out.push_back(std::move(c));
    }
    return out;
}

std::vector<Candidate> read_candidates_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open candidate file " + path.string());
    return parse_candidates_csv(in);
}

PlanProblem parse_problem_json(const std::string& text, const std::filesystem::path& base_dir) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(0, std::string("problem JSON: ") + e.what());
    }
    PlanProblem p;
    try {
        if (j.contains("candidates")) {
            for (const auto& c : j.at("candidates"))
                p.candidates.push_back({c.at("id").get<std::string>(), c.at("lut").get<double>(),
                                        c.at("accpt").get<double>(), c.value("precise", false)});
        } else if (j.contains("candidates_csv")) {
            std::filesystem::path csv = j.at("candidates_csv").get<std::string>();
            if (csv.is_relative()) csv = base_dir / csv;
            p.candidates = read_candidates_csv(csv);
        }
        p.input_rate = j.at("input_rate").get<double>();
        p.engine_throughput = j.at("throughput").get<double>();
        p.max_stages = j.value("stages", std::size_t{1});
        p.exact_stages = j.value("exact_stages", false);
        std::string obj = j.value("objective", std::string("rsc"));
        if (obj == "rsc") p.objective = Objective::min_resources;
        else if (obj == "out") p.objective = Objective::min_output;
        else throw ParameterError("objective must be 'rsc' or 'out'");
        if (j.contains("max_output")) p.max_output = j.at("max_output").get<double>();
        if (j.contains("budget")) p.budget = j.at("budget").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(0, std::string("problem JSON: ") + e.what());
    }
    p.validate();
    return p;
}

PlanProblem read_problem(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open problem file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_problem_json(ss.str(), path.parent_path());
}

} // namespace approxnfa
