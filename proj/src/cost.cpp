#include "approxnfa/cost.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "approxnfa/error.hpp"

namespace approxnfa {
namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& s, std::size_t line) {
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw ParseError(line, "bad number '" + s + "'");
    }
    if (used != s.size() || !std::isfinite(v)) throw ParseError(line, "bad number '" + s + "'");
    return v;
}

} // namespace

void CostModel::validate() const {
    if (per_state < 0 || per_transition < 0 || overhead < 0) throw ParameterError("cost weights must be non-negative");
    for (const auto& [id, luts] : overrides)
        if (!(luts > 0)) throw ParameterError("override for '" + id + "' must be positive");
}

double lut_estimate(const CostModel& model, const Nfa& nfa, std::string_view candidate_id) {
    if (!candidate_id.empty()) {
        auto it = model.overrides.find(candidate_id);
        if (it != model.overrides.end()) return it->second;
    }
    return model.overhead + model.per_state * static_cast<double>(nfa.num_states()) +
           model.per_transition * static_cast<double>(nfa.num_transitions());
}

CostModel parse_cost_model(std::istream& in) {
    CostModel m;
    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = trim(raw.substr(0, raw.find('#')));
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError(lineno, "expected key=value");
        std::string key = trim(line.substr(0, eq));
        double value = parse_number(trim(line.substr(eq + 1)), lineno);
        if (key == "per_state") m.per_state = value;
        else if (key == "per_transition") m.per_transition = value;
        else if (key == "overhead") m.overhead = value;
        else throw ParseError(lineno, "unknown cost model key '" + key + "'");
    }
    m.validate();
    return m;
}

CostModel read_cost_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open cost model " + path.string());
    return parse_cost_model(in);
}

void read_overrides(std::istream& in, CostModel& model) {
    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = trim(raw);
        if (line.empty() || line[0] == '#') continue;
        auto comma = line.find(',');
        if (comma == std::string::npos) throw ParseError(lineno, "expected candidate_id,luts");
        std::string id = trim(line.substr(0, comma));
        std::string value = trim(line.substr(comma + 1));
        if (lineno == 1 && id == "candidate_id") continue;
        double luts = parse_number(value, lineno);
        if (!(luts > 0)) throw ParseError(lineno, "LUT override must be positive");
        model.overrides[id] = luts;
    }
}

void read_overrides(const std::filesystem::path& path, CostModel& model) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open override table " + path.string());
    read_overrides(in, model);
}

} // namespace approxnfa
