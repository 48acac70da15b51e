#pragma once

#include "loqc/circuit.hpp"
#include "loqc/fock.hpp"
#include "loqc/qubit.hpp"
#include "loqc/types.hpp"

namespace loqc {

// Success probability of the postselected controlled-Z block, and the
// uniform conditional amplitude it applies. The gate parameters behind
// these are derived in tools/solve_knill.py and committed in compile.cpp.
inline constexpr double kCzSuccessProbability = 2.0 / 27.0;

// One dual-rail qubit per entry: (mode_zero, mode_one) with the logical
// states photon-in-mode_zero and photon-in-mode_one.
struct DualRailMap {
    std::vector<std::pair<int, int>> rails;
};

// A reusable circuit fragment in local mode indices. input_ports are wired
// to existing modes, output_ports carry state onward; every other local
// mode is an ancilla with a fixed input occupation and (optionally) a
// postselected output occupation.
struct GateBlock {
    std::string name;
    int modes = 0;
    std::vector<int> input_ports;
    std::vector<int> output_ports;
    std::vector<std::pair<int, int>> ancilla_inputs;  // (local mode, photons)
    std::vector<std::pair<int, int>> postselect;      // (local mode, photons)
    std::vector<Layer> layers;
};

// The 4-mode postselected controlled-Z: ports on local modes 0 and 3, one
// single-photon ancilla on each of 1 and 2, two layers of beam splitters,
// postselected on one photon per ancilla. Conditioned on success it acts as
// sqrt(2/27) * diag(1,1,1,-1) on the port occupations {00,01,10,11}.
GateBlock knill_cz();

// knill_cz preceded by pi phase shifters on both ports; conditioned on
// success it phases only the photonic |00> port state (up to a global
// phase), so applied to the mode_zero rails of two qubits it is a logical
// controlled-Z.
GateBlock cz_on_zero_rails();

// Three-mode teleport: an ancilla pair prepared as (|01>+|10>)/sqrt(2) by a
// balanced beam splitter, then a balanced beam splitter across the input
// port and the first ancilla mode, postselected on (1, 0) there. The second
// ancilla mode then carries the input mode's state exactly; the success
// amplitude is 1/2 for any input.
GateBlock teleport_mode();

// Standalone circuit for a block: its ports take the given input
// occupations, ancillas and postselection come from the block.
OpticalCircuit block_circuit(const GateBlock& b, const std::vector<int>& port_occupations);

// The two-mode gate on (mode_zero, mode_one) whose single-photon action is
// u on the logical basis.
TwoModeGate encode_single_qubit(const CMat& u, int qubit, const DualRailMap& map);

struct CompiledArtifact {
    OpticalCircuit circuit;
    std::vector<int> output_vertices;  // ascending
    DualRailMap output_rails;          // rails of output_vertices, same order
    PostselectionSpec postselection;   // equals circuit.postselection
    std::string pipeline;              // "naive8" or "depth4"
    int depth = 0;
    std::uint64_t source_digest = 0;
};

// Reference pipeline: one preparation layer, two beam-splitter layers per
// nonempty edge layer (all controlled-Z blocks on the mode_one rails), one
// measurement-basis layer. Depth 8 when all three edge layers are nonempty.
CompiledArtifact compile_naive(const GraphProgram& g);

// Constant-depth pipeline: layer 1 prepares |+>_L states and teleport
// ancilla pairs; layers 2-3 run every controlled-Z block in parallel,
// alternating which rail of a qubit hosts each round (mode_one first, then
// mode_zero via the pi-phase variant, then a teleported copy of mode_one
// for degree-3 vertices); layer 4 merges the teleport projections with the
// measurement-basis preparation. Depth is always <= 4.
CompiledArtifact compile_depth4(const GraphProgram& g);

// Postselected output distribution of the artifact mapped to logical
// bitstrings over its output qubits: rail pattern (1,0) reads 0 and (0,1)
// reads 1. Mass on invalid rail patterns must be numerical dust.
LogicalDistribution artifact_logical_distribution(const CompiledArtifact& a,
                                                  std::uint64_t cap = kDefaultBasisCap);

std::uint64_t fnv1a64(const std::string& s);

std::string serialize_artifact_metadata(const CompiledArtifact& a);

struct ArtifactMetadata {
    std::string pipeline;
    int depth = 0;
    int modes = 0;
    int photons = 0;
    std::uint64_t source_digest = 0;
    std::vector<int> output_vertices;
    DualRailMap output_rails;
    PostselectionSpec postselection;
};
ArtifactMetadata parse_artifact_metadata(const std::string& text);

}  // namespace loqc
