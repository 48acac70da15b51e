#pragma once

#include "loqc/circuit.hpp"
#include "loqc/types.hpp"

namespace loqc {

// Permanent of a square complex matrix by Ryser's inclusion-exclusion
// formula with Gray-code subset iteration, O(2^k * k). Per of the empty
// matrix is 1.
cx permanent(const CMat& m);

// <output| U |input> = Per(U_{S,T}) / sqrt(prod s_i! prod t_j!), where
// U_{S,T} repeats column j of U input.occ[j] times and row i of U
// output.occ[i] times, in ascending mode order.
cx transition_amplitude(const CMat& u, const FockState& input, const FockState& output);

// Number of Fock states with n photons in m modes: C(n+m-1, n).
// Saturates at a large sentinel instead of overflowing.
std::uint64_t fock_basis_size(int photons, int modes);

// All occupation vectors with the given photon count, lexicographically
// ascending with mode 0 most significant.
std::vector<FockState> enumerate_fock_basis(int photons, int modes,
                                            std::uint64_t cap = kDefaultBasisCap);

// Exact output distribution over the full n-photon Fock basis (no
// postselection applied). Entries come out lexicographically sorted.
Distribution output_distribution(const OpticalCircuit& c, std::uint64_t cap = kDefaultBasisCap);

// Conditional distribution over the non-postselected modes, in ascending
// mode order. The matched mass multiplies into the incoming
// success_probability.
Distribution postselect(const Distribution& d, const PostselectionSpec& spec);

// output_distribution followed by the circuit's own postselection spec
// (identity when the spec is empty).
Distribution postselected_distribution(const OpticalCircuit& c,
                                       std::uint64_t cap = kDefaultBasisCap);

// Seeded exact sampling by inverse CDF over the lexicographically ordered
// distribution. Identical (circuit, shots, seed) yield identical sequences.
std::vector<FockState> sample(const OpticalCircuit& c, long long shots, std::uint64_t seed,
                              std::uint64_t cap = kDefaultBasisCap);
std::vector<FockState> sample(const Distribution& d, long long shots, std::uint64_t seed);

// Maximum photon count in any single mode over all basis states with
// amplitude above kAmpEpsilon in the state after `after_layer` layers.
int occupancy_support(const OpticalCircuit& c, int after_layer,
                      std::uint64_t cap = kDefaultBasisCap);

// Action of a two-mode gate on the N-photon sector of two modes. Entry
// (j, k) is <j, N-j| u |k, N-k>.
CMat two_mode_sector_matrix(const CMat& u, int total_photons);

// 53-bit uniform double in [0, 1) from a raw 64-bit word; the sampling
// primitive used everywhere so sequences are identical across platforms.
inline double uniform_from_bits(std::uint64_t word) {
    return double(word >> 11) * 0x1.0p-53;
}

}  // namespace loqc
