#pragma once

#include "loqc/circuit.hpp"
#include "loqc/qubit.hpp"
#include "loqc/types.hpp"

namespace loqc {

// The state of one or two not-yet-measured sites (qubits or modes),
// conditioned on every outcome fixed so far. Optical amplitudes are stored
// with three levels per mode; a collapsed mode never holds more than two
// photons, which execution re-checks at runtime.
struct ConditionalState {
    std::vector<int> sites;  // global ids, tensor order, first site most significant
    std::vector<cx> amp;
};

// One measurement in the chain walk: a final-layer pair (or a lone site),
// the slots it reads, and the slot it writes for the collapsed partners.
struct ChainStep {
    int site_a = -1;
    int site_b = -1;  // -1 when a single site is measured
    int op_index = -1;               // which final-round measurement this is
    int slot_read_a = -1;
    int slot_read_b = -1;            // -1 when site_b is -1 or both share a slot
    int slot_written = -1;           // -1 when nothing is left to collapse
    std::vector<int> partners;       // sites the written slot holds
};

struct ChainPlan {
    std::vector<ChainStep> steps;
    std::vector<std::vector<int>> components;  // step indices per independent chain
    int initial_slots = 0;                     // slots 0..initial_slots-1 are layer-1 units
};

struct ShallowOptions {
    bool reverse_tie_break = false;        // walk chains highest-site-first (testing aid)
    std::uint64_t enumeration_cap = std::uint64_t(1) << 20;
};

// Decomposes a depth<=2 circuit into preparation units (first gate round)
// and chained two-site measurements (second gate round), lowest-index
// first. Throws UnsupportedDepthError naming the offending layer for
// anything deeper.
ChainPlan chain_plan(const QubitCircuit& c, bool reverse_tie_break = false);
ChainPlan chain_plan(const OpticalCircuit& c, bool reverse_tie_break = false);

// Weak simulation: walks the chain plan once per shot, sampling each
// two-site outcome from its conditional distribution. Per-shot work is
// linear in the number of sites.
std::vector<std::string> simulate_depth2_qubits(const QubitCircuit& c, long long shots,
                                                std::uint64_t seed);
std::vector<FockState> simulate_depth2_optical(const OpticalCircuit& c, long long shots,
                                               std::uint64_t seed);

// Deterministic strengthening of the samplers: enumerates the outcomes of
// each chain, multiplying the step conditionals, and takes the product over
// independent chains.
LogicalDistribution exact_distribution_depth2(const QubitCircuit& c,
                                              const ShallowOptions& opt = {});
Distribution exact_distribution_depth2(const OpticalCircuit& c, const ShallowOptions& opt = {});

// Stream seed for shot-partitioned sampling: worker w of a run seeded with
// s must use derive_worker_seed(s, w).
std::uint64_t derive_worker_seed(std::uint64_t seed, int worker);

}  // namespace loqc
