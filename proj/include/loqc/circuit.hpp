#pragma once

#include <optional>

#include "loqc/types.hpp"

namespace loqc {

// A two-mode transformation. `u` acts on the single-photon amplitudes of
// (mode_a, mode_b): column 0 is the image of a photon entering mode_a.
struct TwoModeGate {
    int mode_a = 0;
    int mode_b = 0;
    CMat u;             // 2x2, unitary within kUnitaryTol
    std::string label;  // optional single token, e.g. "bs"

    bool operator==(const TwoModeGate& rhs) const {
        return mode_a == rhs.mode_a && mode_b == rhs.mode_b && u == rhs.u && label == rhs.label;
    }
};

struct PhaseShifter {
    int mode = 0;
    double phase = 0.0;  // in [0, 2*pi)

    bool operator==(const PhaseShifter& rhs) const {
        return mode == rhs.mode && phase == rhs.phase;
    }
};

// One circuit layer: a set of two-mode gates on pairwise disjoint modes,
// plus free phase shifters. Within a layer the phase shifters act after the
// gates.
struct Layer {
    std::vector<TwoModeGate> gates;
    std::vector<PhaseShifter> phases;

    bool operator==(const Layer& rhs) const {
        return gates == rhs.gates && phases == rhs.phases;
    }
};

struct OpticalCircuit {
    int modes = 0;
    FockState input;
    std::vector<Layer> layers;
    PostselectionSpec postselection;
    std::vector<int> output_modes;

    bool operator==(const OpticalCircuit& rhs) const {
        return modes == rhs.modes && input == rhs.input && layers == rhs.layers &&
               postselection == rhs.postselection && output_modes == rhs.output_modes;
    }
};

CMat mat2(cx a, cx b, cx c, cx d);
CMat balanced_beam_splitter();  // (1/sqrt2) [[1, 1], [1, -1]]
bool is_identity_gate(const TwoModeGate& g, double tol = kAmpEpsilon);

// Number of layers containing at least one non-identity two-mode gate.
// Phase shifters never contribute: each one is absorbed into an adjacent
// gate on its mode (the preceding gate when there is one, the following
// gate otherwise), and a phase shifter on a mode touched by no gate is free.
int depth(const OpticalCircuit& c);

// The m x m unitary of the whole circuit. Column j is the output-mode
// amplitude vector of a photon entering mode j; layers compose in order.
CMat interferometer(const OpticalCircuit& c);

inline constexpr double kSparsityThreshold = 1e-12;

// Max over rows and columns of the number of entries with modulus above
// the threshold.
int sparsity(const CMat& u, double threshold = kSparsityThreshold);

std::vector<Violation> validate(const OpticalCircuit& c);
void require_valid(const OpticalCircuit& c);  // throws ValidationError

// Rewrites the circuit so that every absorbable phase shifter is folded
// into its adjacent gate (preceding preferred). Free phase shifters stay.
// The interferometer and the depth are unchanged.
OpticalCircuit absorb_phases(const OpticalCircuit& c);

// Bit-exact text format: UTF-8, LF line endings, 17-significant-digit
// decimals. parse(serialize(c)) == c holds exactly.
std::string serialize_circuit(const OpticalCircuit& c);
OpticalCircuit parse_circuit(const std::string& text);

}  // namespace loqc
