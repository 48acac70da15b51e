#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "loqc/compile.hpp"
#include "loqc/fock.hpp"
#include "loqc/qubit.hpp"
#include "loqc/shallow.hpp"

namespace py = pybind11;
using namespace loqc;

namespace {

CMat to_cmat(const std::vector<std::vector<cx>>& rows) {
    int r = int(rows.size());
    int c = r ? int(rows[0].size()) : 0;
    CMat m(r, c);
    for (int i = 0; i < r; ++i) {
        if (int(rows[std::size_t(i)].size()) != c)
            throw DimensionError("ragged matrix");
        for (int j = 0; j < c; ++j) m.at(i, j) = rows[std::size_t(i)][std::size_t(j)];
    }
    return m;
}

std::vector<std::vector<cx>> from_cmat(const CMat& m) {
    std::vector<std::vector<cx>> rows(std::size_t(m.rows()));
    for (int i = 0; i < m.rows(); ++i) {
        rows[std::size_t(i)].resize(std::size_t(m.cols()));
        for (int j = 0; j < m.cols(); ++j) rows[std::size_t(i)][std::size_t(j)] = m.at(i, j);
    }
    return rows;
}

py::dict fock_dict(const Distribution& d) {
    py::dict out;
    for (const auto& [state, p] : d.entries) out[py::tuple(py::cast(state.occ))] = p;
    return out;
}

py::dict logical_dict(const LogicalDistribution& d) {
    py::dict out;
    for (const auto& [key, p] : d.entries) out[py::cast(key)] = p;
    return out;
}

std::vector<std::string> violation_strings(const std::vector<Violation>& v) {
    std::vector<std::string> out;
    out.reserve(v.size());
    for (const auto& viol : v) out.push_back(viol.str());
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Constant-depth linear-optical compilation and exact simulation";

    py::register_exception<ParseError>(m, "FormatError", PyExc_ValueError);
    py::register_exception<ValidationError>(m, "ValidationFailure", PyExc_ValueError);
    py::register_exception<ResourceLimitError>(m, "ResourceLimit", PyExc_RuntimeError);
    py::register_exception<UnsupportedDepthError>(m, "UnsupportedDepth", PyExc_ValueError);
    py::register_exception<InfeasiblePostselectionError>(m, "InfeasiblePostselection",
                                                         PyExc_ValueError);

    m.attr("CZ_SUCCESS_PROBABILITY") = kCzSuccessProbability;

    m.def(
        "permanent",
        [](const std::vector<std::vector<cx>>& rows) { return permanent(to_cmat(rows)); },
        py::arg("matrix"), "Permanent of a square complex matrix (Ryser, Gray-code order).");

    m.def(
        "transition_amplitude",
        [](const std::vector<std::vector<cx>>& u, const std::vector<int>& in_occ,
           const std::vector<int>& out_occ) {
            return transition_amplitude(to_cmat(u), FockState(in_occ), FockState(out_occ));
        },
        py::arg("unitary"), py::arg("input"), py::arg("output"));

    py::class_<OpticalCircuit>(m, "Circuit")
        .def_static("parse", [](const std::string& text) { return parse_circuit(text); },
                    py::arg("text"))
        .def("serialize", [](const OpticalCircuit& c) { return serialize_circuit(c); })
        .def_property_readonly("modes", [](const OpticalCircuit& c) { return c.modes; })
        .def_property_readonly("input",
                               [](const OpticalCircuit& c) { return c.input.occ; })
        .def_property_readonly("output_modes",
                               [](const OpticalCircuit& c) { return c.output_modes; })
        .def("depth", [](const OpticalCircuit& c) { return depth(c); })
        .def("validate", [](const OpticalCircuit& c) { return violation_strings(validate(c)); })
        .def("interferometer",
             [](const OpticalCircuit& c) { return from_cmat(interferometer(c)); })
        .def("sparsity",
             [](const OpticalCircuit& c, double threshold) {
                 return sparsity(interferometer(c), threshold);
             },
             py::arg("threshold") = kSparsityThreshold)
        .def("occupancy_support",
             [](const OpticalCircuit& c, int after_layer) {
                 return occupancy_support(c, after_layer);
             },
             py::arg("after_layer"))
        .def("__repr__", [](const OpticalCircuit& c) {
            return "<Circuit modes=" + std::to_string(c.modes) +
                   " depth=" + std::to_string(depth(c)) + ">";
        });

    m.def(
        "output_distribution",
        [](const OpticalCircuit& c, std::uint64_t cap) {
            auto d = output_distribution(c, cap);
            return py::make_tuple(fock_dict(d), d.success_probability);
        },
        py::arg("circuit"), py::arg("cap") = kDefaultBasisCap,
        "Exact distribution over the full Fock basis; returns (probs, success).");

    m.def(
        "postselected_distribution",
        [](const OpticalCircuit& c, std::uint64_t cap) {
            auto d = postselected_distribution(c, cap);
            return py::make_tuple(fock_dict(d), d.success_probability);
        },
        py::arg("circuit"), py::arg("cap") = kDefaultBasisCap);

    m.def(
        "sample",
        [](const OpticalCircuit& c, long long shots, std::uint64_t seed, std::uint64_t cap) {
            std::vector<std::vector<int>> out;
            for (auto& s : sample(c, shots, seed, cap)) out.push_back(std::move(s.occ));
            return out;
        },
        py::arg("circuit"), py::arg("shots"), py::arg("seed"), py::arg("cap") = kDefaultBasisCap);

    py::class_<GraphProgram>(m, "GraphProgram")
        .def_static("parse", [](const std::string& text) { return parse_graph(text); },
                    py::arg("text"))
        .def("serialize", [](const GraphProgram& g) { return serialize_graph(g); })
        .def_property_readonly("vertices", [](const GraphProgram& g) { return g.vertices; })
        .def_property_readonly("output_vertices",
                               [](const GraphProgram& g) { return g.output_vertices; })
        .def("validate", [](const GraphProgram& g) { return violation_strings(validate(g)); })
        .def("__repr__", [](const GraphProgram& g) {
            return "<GraphProgram vertices=" + std::to_string(g.vertices) +
                   " edges=" + std::to_string(g.edges.size()) + ">";
        });

    m.def("brickwork_graph", &brickwork_graph, py::arg("rows"), py::arg("columns"));

    m.def(
        "logical_distribution",
        [](const GraphProgram& g) {
            auto d = logical_distribution(g);
            return py::make_tuple(logical_dict(d), d.success_probability);
        },
        py::arg("graph"), "Statevector oracle; returns (probs over bitstrings, success).");

    py::class_<CompiledArtifact>(m, "Artifact")
        .def_property_readonly("pipeline", [](const CompiledArtifact& a) { return a.pipeline; })
        .def_property_readonly("depth", [](const CompiledArtifact& a) { return a.depth; })
        .def_property_readonly("circuit", [](const CompiledArtifact& a) { return a.circuit; })
        .def_property_readonly("output_rails",
                               [](const CompiledArtifact& a) { return a.output_rails.rails; })
        .def("metadata", [](const CompiledArtifact& a) { return serialize_artifact_metadata(a); })
        .def(
            "logical_distribution",
            [](const CompiledArtifact& a, std::uint64_t cap) {
                auto d = artifact_logical_distribution(a, cap);
                return py::make_tuple(logical_dict(d), d.success_probability);
            },
            py::arg("cap") = kDefaultBasisCap)
        .def("__repr__", [](const CompiledArtifact& a) {
            return "<Artifact pipeline=" + a.pipeline + " depth=" + std::to_string(a.depth) + ">";
        });

    m.def("compile_naive", &compile_naive, py::arg("graph"));
    m.def("compile_depth4", &compile_depth4, py::arg("graph"));

    m.def(
        "exact_distribution_depth2",
        [](const OpticalCircuit& c) {
            auto d = exact_distribution_depth2(c);
            return py::make_tuple(fock_dict(d), d.success_probability);
        },
        py::arg("circuit"), "Chain-decomposition exact distribution for depth <= 2.");

    m.def(
        "sample_depth2",
        [](const OpticalCircuit& c, long long shots, std::uint64_t seed) {
            std::vector<std::vector<int>> out;
            for (auto& s : simulate_depth2_optical(c, shots, seed)) out.push_back(std::move(s.occ));
            return out;
        },
        py::arg("circuit"), py::arg("shots"), py::arg("seed"));
}
