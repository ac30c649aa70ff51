#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "approxnfa/approxnfa.hpp"

namespace py = pybind11;
using namespace approxnfa;

namespace {

std::string as_bytes(const py::bytes& b) { return static_cast<std::string>(b); }

TrafficSample sample_from(const py::iterable& packets) {
    TrafficSample s;
    for (const auto& p : packets) s.add(as_bytes(py::reinterpret_borrow<py::bytes>(p)));
    return s;
}

py::dict report_dict(const ReductionReport& r) {
    py::dict d;
    d["method"] = to_string(r.method);
    d["states_before"] = r.states_before;
    d["states_after"] = r.states_after;
    d["error_bound"] = r.error_bound ? py::cast(*r.error_bound) : py::none();
    d["theta"] = r.theta ? py::cast(*r.theta) : py::none();
    d["distance_ceiling"] = r.distance_ceiling ? py::cast(*r.distance_ceiling) : py::none();
    d["frequency_ceiling"] = r.frequency_ceiling ? py::cast(*r.frequency_ceiling) : py::none();
    d["removed"] = r.removed;
    d["border"] = r.border;
    return d;
}

PyObject* base_error = nullptr;
PyObject* parameter_error = nullptr;
PyObject* input_error = nullptr;
PyObject* parse_error = nullptr;
PyObject* unsupported_error = nullptr;
PyObject* infeasible_error = nullptr;
PyObject* invariant_error = nullptr;

py::tuple reduction_tuple(const Reduction& r) { return py::make_tuple(r.nfa, report_dict(r.report)); }

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Approximate reduction of packet-matching automata";

    auto make = [&](const char* name, PyObject* parent) {
        return py::exception<Error>(m, name, parent).release().ptr();
    };
    base_error = make("Error", PyExc_Exception);
    parameter_error = make("ParameterError", base_error);
    input_error = make("InputError", base_error);
    parse_error = make("ParseError", input_error);
    unsupported_error = make("UnsupportedFeature", base_error);
    infeasible_error = make("InfeasibleError", base_error);
    invariant_error = make("InvariantViolation", base_error);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const ParameterError& e) {
            PyErr_SetString(parameter_error, e.what());
        } catch (const ParseError& e) {
            PyErr_SetString(parse_error, e.what());
        } catch (const InputError& e) {
            PyErr_SetString(input_error, e.what());
        } catch (const UnsupportedFeature& e) {
            PyErr_SetString(unsupported_error, e.what());
        } catch (const InfeasibleError& e) {
            PyErr_SetString(infeasible_error, e.what());
        } catch (const InvariantViolation& e) {
            PyErr_SetString(invariant_error, e.what());
        } catch (const Error& e) {
            PyErr_SetString(base_error, e.what());
        }
    });

    py::class_<Nfa>(m, "Nfa")
        .def(py::init<>())
        .def(py::init([](std::size_t n, StateId initial, const std::vector<StateId>& finals,
                         const std::vector<std::tuple<StateId, StateId, py::bytes>>& edges) {
                 std::vector<Transition> ts;
                 for (const auto& [src, dst, syms] : edges) ts.push_back({src, dst, ByteClass::of(as_bytes(syms))});
                 return Nfa(n, initial, finals, std::move(ts));
             }),
             py::arg("num_states"), py::arg("initial"), py::arg("finals"), py::arg("transitions"),
             "transitions are (src, dst, bytes) triples; each byte of the string is one symbol")
        .def_property_readonly("num_states", &Nfa::num_states)
        .def_property_readonly("initial", &Nfa::initial)
        .def_property_readonly("num_transitions", &Nfa::num_transitions)
        .def_property_readonly("finals", [](const Nfa& a) { return a.finals().ids(); })
        .def("is_final", &Nfa::is_final)
        .def("name", &Nfa::display_name)
        .def("tags", [](const Nfa& a, StateId q) { return a.info(q).tags; })
        .def("accepts", [](const Nfa& a, const py::bytes& w) { return accepts_prefix(a, as_bytes(w)); })
        .def("to_text", [](const Nfa& a) { return to_text(a); })
        .def("to_dot",
             [](const Nfa& a, const std::optional<std::vector<std::uint64_t>>& counts, std::uint64_t sample_size) {
                 std::ostringstream os;
                 if (counts) {
                     Labeling l{*counts, sample_size};
                     export_dot(a, &l, os);
                 } else {
                     export_dot(a, nullptr, os);
                 }
                 return os.str();
             },
             py::arg("counts") = py::none(), py::arg("sample_size") = 0)
        .def("hash", [](const Nfa& a) { return nfa_hash_hex(a); })
        .def("__eq__", [](const Nfa& a, const Nfa& b) { return a == b; })
        .def("__repr__", [](const Nfa& a) {
            return "<Nfa states=" + std::to_string(a.num_states()) + " transitions=" +
                   std::to_string(a.num_transitions()) + " finals=" + std::to_string(a.num_finals()) + ">";
        });

    m.def("parse_nfa", [](const std::string& text) { return parse_nfa(text); });
    m.def("read_nfa", &read_nfa);
    m.def("write_nfa", py::overload_cast<const Nfa&, const std::filesystem::path&>(&write_nfa));

    m.def(
        "compile_regex",
        [](const std::string& pattern, bool ignore_case, bool dot_all, std::size_t cap) {
            return compile_regex(pattern, {ignore_case, dot_all, cap});
        },
        py::arg("pattern"), py::arg("ignore_case") = false, py::arg("dot_all") = false,
        py::arg("repetition_cap") = 64);
    m.def(
        "compile_rules",
        [](const std::vector<std::pair<std::string, std::string>>& rules, bool ignore_case, bool dot_all) {
            RuleSet rs;
            for (const auto& [id, pat] : rules) rs.push_back({id, pat});
            return compile_ruleset(rs, {ignore_case, dot_all, 64});
        },
        py::arg("rules"), py::arg("ignore_case") = false, py::arg("dot_all") = false,
        "rules is a list of (id, pattern) pairs");

    py::class_<TrafficSample>(m, "TrafficSample")
        .def(py::init<>())
        .def(py::init(&sample_from), py::arg("packets"))
        .def("add", [](TrafficSample& s, const py::bytes& p, std::uint64_t n) { s.add(as_bytes(p), n); },
             py::arg("packet"), py::arg("count") = 1)
        .def("count", [](const TrafficSample& s, const py::bytes& p) { return s.count(as_bytes(p)); })
        .def_property_readonly("total_packets", &TrafficSample::total_packets)
        .def_property_readonly("distinct", &TrafficSample::distinct)
        .def("__len__", &TrafficSample::total_packets);
    m.def("load_trace", [](const std::filesystem::path& p) { return load_trace(p); });
    m.def("write_raw", &write_raw);

    m.def(
        "label",
        [](const Nfa& a, const TrafficSample& s, unsigned workers) { return label(a, s, workers).counts; },
        py::arg("nfa"), py::arg("sample"), py::arg("workers") = 1,
        "significance count of every state");

    auto labels_of = [](const Nfa& a, const std::vector<std::uint64_t>& counts, std::uint64_t n) {
        Labeling l{counts, n};
        check_labeling(a, l);
        return l;
    };
    m.def(
        "prune",
        [=](const Nfa& a, const std::vector<std::uint64_t>& counts, std::uint64_t n, double theta) {
            return reduction_tuple(prune(a, labels_of(a, counts, n), theta));
        },
        py::arg("nfa"), py::arg("counts"), py::arg("sample_size"), py::arg("theta"));
    m.def(
        "merge",
        [=](const Nfa& a, const std::vector<std::uint64_t>& counts, std::uint64_t n, double d, double f) {
            return reduction_tuple(merge(a, labels_of(a, counts, n), d, f));
        },
        py::arg("nfa"), py::arg("counts"), py::arg("sample_size"), py::arg("distance"), py::arg("frequency"));
    m.def(
        "merge_prune",
        [=](const Nfa& a, const std::vector<std::uint64_t>& counts, std::uint64_t n, double d, double f,
            double theta) { return reduction_tuple(merge_prune(a, labels_of(a, counts, n), d, f, theta)); },
        py::arg("nfa"), py::arg("counts"), py::arg("sample_size"), py::arg("distance"), py::arg("frequency"),
        py::arg("theta"));
    m.def(
        "bfs_reduce", [](const Nfa& a, double theta) { return reduction_tuple(bfs_reduce(a, theta)); },
        py::arg("nfa"), py::arg("theta"));

    m.def(
        "evaluate",
        [](const Nfa& precise, const Nfa& reduced, const TrafficSample& test) {
            auto r = evaluate(precise, reduced, test);
            py::dict d;
            d["a_tp"] = r.a_tp;
            d["a_fp"] = r.a_fp;
            d["a_fn"] = r.a_fn;
            d["sample_size"] = r.sample_size;
            d["ap"] = r.ap;
            d["prob"] = r.prob;
            return d;
        },
        py::arg("precise"), py::arg("reduced"), py::arg("test"));
    m.def(
        "lut_estimate",
        [](const Nfa& a, double per_state, double per_transition, double overhead) {
            CostModel c{per_state, per_transition, overhead, {}};
            c.validate();
            return lut_estimate(c, a);
        },
        py::arg("nfa"), py::arg("per_state") = 2.0, py::arg("per_transition") = 0.25, py::arg("overhead") = 50.0);

    m.def(
        "plan",
        [](const std::vector<std::tuple<std::string, double, double>>& candidates, double input_rate,
           double throughput, std::size_t stages, std::optional<double> max_output, std::optional<double> budget,
           const std::string& objective, bool exact_stages) -> py::object {
            PlanProblem p;
            for (const auto& [id, lut, accpt] : candidates) p.candidates.push_back({id, lut, accpt, false});
            p.input_rate = input_rate;
            p.engine_throughput = throughput;
            p.max_stages = stages;
            p.exact_stages = exact_stages;
            if (objective == "rsc")
                p.objective = Objective::min_resources;
            else if (objective == "out")
                p.objective = Objective::min_output;
            else
                throw ParameterError("objective must be 'rsc' or 'out'");
            p.max_output = max_output;
            p.budget = budget;
            auto outcome = solve(p);
            if (!outcome.plan) throw InfeasibleError("no feasible plan; binding constraint: " + outcome.binding_constraint);
            py::list stages_out;
            for (const auto& s : outcome.plan->stages)
                stages_out.append(py::dict(py::arg("candidate") = s.candidate_id, py::arg("replicas") = s.replicas,
                                           py::arg("input_rate") = s.input_rate,
                                           py::arg("output_rate") = s.output_rate,
                                           py::arg("resources") = s.resources));
            return py::dict(py::arg("stages") = stages_out,
                            py::arg("total_resources") = outcome.plan->total_resources,
                            py::arg("output_rate") = outcome.plan->output_rate);
        },
        py::arg("candidates"), py::arg("input_rate"), py::arg("throughput"), py::arg("stages") = 1,
        py::arg("max_output") = py::none(), py::arg("budget") = py::none(), py::arg("objective") = "rsc",
        py::arg("exact_stages") = false, "candidates is a list of (id, luts, accept probability) triples");
}
