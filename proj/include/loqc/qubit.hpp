#pragma once

#include "loqc/types.hpp"

namespace loqc {

inline constexpr int kStatevectorCapQubits = 20;

// Measurement angle as a multiple of pi/4, restricted to {0, +-1, +-2}.
struct VertexPattern {
    int angle_q = 0;
    bool plus = true;  // postselected outcome, '+' by default

    bool operator==(const VertexPattern& rhs) const {
        return angle_q == rhs.angle_q && plus == rhs.plus;
    }
};

struct GraphEdge {
    int u = 0, v = 0;
    int layer = 1;  // 1..3, a valid 3-edge-coloring

    bool operator==(const GraphEdge& rhs) const {
        return u == rhs.u && v == rhs.v && layer == rhs.layer;
    }
};

// The compiler's source language: a degree-<=3 graph with a 3-layer edge
// coloring, a measurement angle and postselected outcome per vertex, and a
// designated output register.
struct GraphProgram {
    int vertices = 0;
    std::vector<GraphEdge> edges;
    std::vector<VertexPattern> pattern;  // one per vertex
    std::vector<int> output_vertices;    // reported in the computational basis

    bool is_output(int v) const {
        for (int o : output_vertices)
            if (o == v) return true;
        return false;
    }
    bool operator==(const GraphProgram& rhs) const {
        return vertices == rhs.vertices && edges == rhs.edges && pattern == rhs.pattern &&
               output_vertices == rhs.output_vertices;
    }
};

std::vector<Violation> validate(const GraphProgram& g);
void require_valid(const GraphProgram& g);

// Brickwork-style layout: `rows` horizontal paths of `columns` vertices.
// Path edges alternate between layers 1 and 2; vertical rungs sit in layer
// 3 with a column period of 4, staggered between adjacent row pairs so no
// vertex gets more than one rung. rows = 1 degenerates to a bare path.
// Pattern defaults to (angle 0, +); the last column is the output register.
GraphProgram brickwork_graph(int rows, int columns);

std::string serialize_graph(const GraphProgram& g);
GraphProgram parse_graph(const std::string& text);

// |G>: one |+> per vertex, one CZ per edge. Basis index bit of vertex v is
// (index >> (n-1-v)) & 1.
std::vector<cx> graph_state(const GraphProgram& g, int cap = kStatevectorCapQubits);

struct TwoQubitGate {
    int q1 = 0, q2 = 0;
    CMat u;  // 4x4 over |b_{q1} b_{q2}>, index 2*b_{q1} + b_{q2}
};

enum class QubitRole : std::uint8_t { Report, PostselectZero, PostselectOne };

// Layered two-qubit circuit on |0...0>. Per-qubit preparation and
// measurement-basis rotations are single-qubit gates absorbed into the
// neighbouring layers, so they never count toward the depth.
struct QubitCircuit {
    int qubits = 0;
    std::vector<CMat> prep;            // 2x2 per qubit, applied first
    std::vector<std::vector<TwoQubitGate>> layers;
    std::vector<CMat> basis_rotation;  // 2x2 per qubit, applied last
    std::vector<QubitRole> roles;

    int depth() const {
        int d = 0;
        for (const auto& l : layers)
            if (!l.empty()) ++d;
        return d;
    }
};

std::vector<Violation> validate(const QubitCircuit& c);
void require_valid(const QubitCircuit& c);

struct LogicalDistribution {
    std::vector<std::pair<std::string, double>> entries;  // bitstring -> probability
    double success_probability = 1.0;

    double total_mass() const {
        double s = 0;
        for (const auto& e : entries) s += e.second;
        return s;
    }
    double probability_of(const std::string& key) const {
        for (const auto& e : entries)
            if (e.first == key) return e.second;
        return 0.0;
    }
};

CMat hadamard();
CMat rz(double theta);  // diag(1, e^{i theta})
CMat cz_gate();         // 4x4 diag(1,1,1,-1)

// Flattens the program into its postselected circuit: one CZ layer per
// nonempty edge layer, measurement-basis rotations H * Rz(-theta) on the
// measured vertices, computational-basis readout on the outputs, and
// postselection '+' -> bit 0 on every measured vertex.
QubitCircuit flatten_postselect(const GraphProgram& g);

// Dense statevector evolution plus postselection; the distribution runs
// over the Report qubits in ascending index order.
LogicalDistribution simulate(const QubitCircuit& c, int cap = kStatevectorCapQubits);

LogicalDistribution logical_distribution(const GraphProgram& g, int cap = kStatevectorCapQubits);

}  // namespace loqc
