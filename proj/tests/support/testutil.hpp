#pragma once

// Shared test helpers: independent oracles and random instance generators.
// Everything here stays outside the library so the oracles cannot share a
// code path with what they check.

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <utility>
#include <vector>

#include "loqc/circuit.hpp"
#include "loqc/qubit.hpp"
#include "loqc/types.hpp"

namespace testutil {

using loqc::CMat;
using loqc::cx;

// O(k! * k) permanent by direct sum over permutations.
inline cx naive_permanent(const CMat& m) {
    const int k = m.rows();
    if (k == 0) return 1.0;
    std::vector<int> perm(static_cast<std::size_t>(k));
    std::iota(perm.begin(), perm.end(), 0);
    cx total{};
    do {
        cx prod = 1.0;
        for (int i = 0; i < k; ++i) prod *= m.at(i, perm[std::size_t(i)]);
        total += prod;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return total;
}

inline double uniform(std::mt19937_64& rng) { return double(rng() >> 11) * 0x1.0p-53; }

inline cx gaussian(std::mt19937_64& rng) {
    double u1 = uniform(rng), u2 = uniform(rng);
    while (u1 <= 1e-300) u1 = uniform(rng);
    double r = std::sqrt(-2.0 * std::log(u1));
    return {r * std::cos(2 * M_PI * u2), r * std::sin(2 * M_PI * u2)};
}

// Haar-random unitary: complex Ginibre matrix, Gram-Schmidt, phase fix.
inline CMat haar_unitary(int n, std::mt19937_64& rng) {
    CMat a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a.at(i, j) = gaussian(rng);
    for (int c = 0; c < n; ++c) {
        for (int prev = 0; prev < c; ++prev) {
            cx dot{};
            for (int r = 0; r < n; ++r) dot += std::conj(a.at(r, prev)) * a.at(r, c);
            for (int r = 0; r < n; ++r) a.at(r, c) -= dot * a.at(r, prev);
        }
        double norm = 0;
        for (int r = 0; r < n; ++r) norm += std::norm(a.at(r, c));
        norm = std::sqrt(norm);
        for (int r = 0; r < n; ++r) a.at(r, c) /= norm;
        cx ph = a.at(c, c);
        if (std::abs(ph) > 1e-12) {
            ph /= std::abs(ph);
            for (int r = 0; r < n; ++r) a.at(r, c) /= ph;
        }
    }
    return a;
}

// Upper regularized incomplete gamma Q(a, x) by series / continued fraction.
inline double igamc(double a, double x) {
    if (x <= 0 || a <= 0) return 1.0;
    auto lgamma_a = std::lgamma(a);
    if (x < a + 1.0) {
        // P(a,x) series, then Q = 1 - P
        double sum = 1.0 / a, term = sum, ap = a;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if (std::abs(term) < std::abs(sum) * 1e-15) break;
        }
        double p = sum * std::exp(-x + a * std::log(x) - lgamma_a);
        return 1.0 - p;
    }
    // Lentz continued fraction for Q(a,x)
    double tiny = 1e-300;
    double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
    for (int i = 1; i <= 500; ++i) {
        double an = -double(i) * (double(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-15) break;
    }
    return std::exp(-x + a * std::log(x) - lgamma_a) * h;
}

// Chi-square goodness-of-fit p-value. Outcomes with expected count below 5
// are pooled into one bucket.
inline double chi_square_pvalue(const std::vector<long long>& observed,
                                const std::vector<double>& expected_probs, long long shots) {
    double pooled_obs = 0, pooled_exp = 0;
    double stat = 0;
    int bins = 0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        double e = expected_probs[i] * double(shots);
        if (e < 5.0) {
            pooled_obs += double(observed[i]);
            pooled_exp += e;
            continue;
        }
        double diff = double(observed[i]) - e;
        stat += diff * diff / e;
        ++bins;
    }
    if (pooled_exp > 0) {
        double diff = pooled_obs - pooled_exp;
        stat += diff * diff / std::max(pooled_exp, 1e-9);
        ++bins;
    }
    if (bins < 2) return 1.0;
    return igamc(0.5 * double(bins - 1), 0.5 * stat);
}

// random disjoint pairings of {0..n-1}; coverage fraction per layer < 1
inline std::vector<std::pair<int, int>> random_pairing(int n, std::mt19937_64& rng,
                                                       double keep = 0.9) {
    std::vector<int> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i + 1 < n; i += 2)
        if (uniform(rng) < keep) pairs.emplace_back(idx[std::size_t(i)], idx[std::size_t(i + 1)]);
    return pairs;
}

inline loqc::OpticalCircuit random_optical_circuit(int modes, int depth_layers, int max_photons,
                                                   std::mt19937_64& rng) {
    loqc::OpticalCircuit c;
    c.modes = modes;
    c.input.occ.assign(std::size_t(modes), 0);
    std::vector<int> order(static_cast<std::size_t>(modes));
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    int photons = 1 + int(rng() % std::uint64_t(std::max(max_photons, 1)));
    for (int i = 0; i < std::min(photons, modes); ++i) c.input.occ[std::size_t(order[std::size_t(i)])] = 1;
    for (int d = 0; d < depth_layers; ++d) {
        loqc::Layer layer;
        for (auto [a, b] : random_pairing(modes, rng))
            layer.gates.push_back({a, b, haar_unitary(2, rng), ""});
        if (layer.gates.empty())
            layer.gates.push_back({0, 1, haar_unitary(2, rng), ""});
        c.layers.push_back(std::move(layer));
    }
    return c;
}

inline loqc::QubitCircuit random_depth2_qubit_circuit(int qubits, std::mt19937_64& rng) {
    loqc::QubitCircuit c;
    c.qubits = qubits;
    c.prep.reserve(std::size_t(qubits));
    c.basis_rotation.reserve(std::size_t(qubits));
    for (int q = 0; q < qubits; ++q) {
        c.prep.push_back(haar_unitary(2, rng));
        c.basis_rotation.push_back(haar_unitary(2, rng));
    }
    for (int d = 0; d < 2; ++d) {
        std::vector<loqc::TwoQubitGate> layer;
        for (auto [a, b] : random_pairing(qubits, rng))
            layer.push_back({a, b, haar_unitary(4, rng)});
        c.layers.push_back(std::move(layer));
    }
    c.roles.assign(std::size_t(qubits), loqc::QubitRole::Report);
    return c;
}

inline double tvd(const loqc::Distribution& a, const loqc::Distribution& b) {
    std::map<std::vector<int>, double> diff;
    for (const auto& e : a.entries) diff[e.first.occ] += e.second;
    for (const auto& e : b.entries) diff[e.first.occ] -= e.second;
    double d = 0;
    for (const auto& [k, v] : diff) d += std::abs(v);
    return d / 2;
}

inline double tvd(const loqc::LogicalDistribution& a, const loqc::LogicalDistribution& b) {
    std::map<std::string, double> diff;
    for (const auto& e : a.entries) diff[e.first] += e.second;
    for (const auto& e : b.entries) diff[e.first] -= e.second;
    double d = 0;
    for (const auto& [k, v] : diff) d += std::abs(v);
    return d / 2;
}

inline double max_entry_diff(const loqc::Distribution& a, const loqc::Distribution& b) {
    std::map<std::vector<int>, double> diff;
    for (const auto& e : a.entries) diff[e.first.occ] += e.second;
    for (const auto& e : b.entries) diff[e.first.occ] -= e.second;
    double d = 0;
    for (const auto& [k, v] : diff) d = std::max(d, std::abs(v));
    return d;
}

inline double max_entry_diff(const loqc::LogicalDistribution& a,
                             const loqc::LogicalDistribution& b) {
    std::map<std::string, double> diff;
    for (const auto& e : a.entries) diff[e.first] += e.second;
    for (const auto& e : b.entries) diff[e.first] -= e.second;
    double d = 0;
    for (const auto& [k, v] : diff) d = std::max(d, std::abs(v));
    return d;
}

}  // namespace testutil
