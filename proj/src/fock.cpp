#include "loqc/fock.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>

namespace loqc {

namespace {

double factorial(int n) {
    static const auto table = [] {
        std::array<double, 171> t{};
        t[0] = 1.0;
        for (int i = 1; i < 171; ++i) t[i] = t[i - 1] * i;
        return t;
    }();
    return table[std::size_t(n)];
}

}  // namespace

cx permanent(const CMat& m) {
    if (m.rows() != m.cols()) throw DimensionError("permanent requires a square matrix");
    const int k = m.rows();
    if (k == 0) return 1.0;
    if (k == 1) return m.at(0, 0);
    if (k > 62) throw ResourceLimitError("permanent dimension too large", std::uint64_t(k));

    // Ryser: Per(M) = (-1)^k sum_S (-1)^|S| prod_i sum_{j in S} M_ij,
    // walking subsets in Gray-code order so each step updates one column.
    std::vector<cx> rowsum(std::size_t(k), cx{});
    cx total{};
    const std::uint64_t count = std::uint64_t(1) << k;
    std::uint64_t gray = 0;
    for (std::uint64_t i = 1; i < count; ++i) {
        std::uint64_t new_gray = i ^ (i >> 1);
        std::uint64_t changed = gray ^ new_gray;
        int j = std::countr_zero(changed);
        bool added = new_gray & changed;
        gray = new_gray;
        if (added)
            for (int r = 0; r < k; ++r) rowsum[std::size_t(r)] += m.at(r, j);
        else
            for (int r = 0; r < k; ++r) rowsum[std::size_t(r)] -= m.at(r, j);
        cx prod = 1.0;
        for (int r = 0; r < k; ++r) prod *= rowsum[std::size_t(r)];
        if (std::popcount(gray) & 1)
            total -= prod;
        else
            total += prod;
    }
    if (k & 1) total = -total;
    return total;
}

cx transition_amplitude(const CMat& u, const FockState& input, const FockState& output) {
    if (u.rows() != u.cols()) throw DimensionError("interferometer matrix must be square");
    const int m = u.rows();
    if (input.modes() != m || output.modes() != m)
        throw DimensionError("mode count mismatch between states and matrix");
    if (!input.valid() || !output.valid()) throw ConservationError("negative occupation");
    const int n = input.total_photons();
    if (output.total_photons() != n)
        throw ConservationError("photon number mismatch: " + std::to_string(n) + " vs " +
                                std::to_string(output.total_photons()));

    std::vector<int> cols, rows;
    cols.reserve(std::size_t(n));
    rows.reserve(std::size_t(n));
    for (int j = 0; j < m; ++j)
        for (int r = 0; r < input.occ[std::size_t(j)]; ++r) cols.push_back(j);
    for (int i = 0; i < m; ++i)
        for (int r = 0; r < output.occ[std::size_t(i)]; ++r) rows.push_back(i);

    CMat sub(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            sub.at(i, j) = u.at(rows[std::size_t(i)], cols[std::size_t(j)]);

    double norm = 1.0;
    for (int v : input.occ) norm *= factorial(v);
    for (int v : output.occ) norm *= factorial(v);
    return permanent(sub) / std::sqrt(norm);
}

std::uint64_t fock_basis_size(int photons, int modes) {
    if (modes <= 0) return photons == 0 ? 1 : 0;
    // C(photons + modes - 1, photons) with saturation
    unsigned __int128 acc = 1;
    const unsigned __int128 limit = (unsigned __int128)1 << 100;
    for (int i = 1; i <= photons; ++i) {
        acc = acc * (unsigned __int128)(modes - 1 + i) / (unsigned __int128)i;
        if (acc > limit) return UINT64_MAX;
    }
    return acc > UINT64_MAX ? UINT64_MAX : std::uint64_t(acc);
}

std::vector<FockState> enumerate_fock_basis(int photons, int modes, std::uint64_t cap) {
    std::uint64_t size = fock_basis_size(photons, modes);
    if (size > cap)
        throw ResourceLimitError("Fock basis has " + std::to_string(size) +
                                     " states, above the cap of " + std::to_string(cap),
                                 size);
    std::vector<FockState> out;
    out.reserve(size);
    if (modes == 0) {
        if (photons == 0) out.emplace_back(std::vector<int>{});
        return out;
    }
    std::vector<int> occ(std::size_t(modes), 0);
    occ[std::size_t(modes - 1)] = photons;
    for (;;) {
        out.emplace_back(occ);
        // next composition in lexicographic order: bump the rightmost slot
        // that still has photons strictly to its right
        int i = modes - 2;
        int suffix = occ[std::size_t(modes - 1)];
        while (i >= 0 && suffix == 0) {
            suffix += occ[std::size_t(i)];
            --i;
        }
        if (i < 0) break;
        ++occ[std::size_t(i)];
        int rest = suffix - 1;
        for (int j = i + 1; j < modes; ++j) occ[std::size_t(j)] = 0;
        occ[std::size_t(modes - 1)] = rest;
    }
    return out;
}

Distribution output_distribution(const OpticalCircuit& c, std::uint64_t cap) {
    require_valid(c);
    const int n = c.input.total_photons();
    auto basis = enumerate_fock_basis(n, c.modes, cap);
    CMat u = interferometer(c);

    Distribution d;
    d.entries.reserve(basis.size());
    double sum = 0.0;
    for (auto& state : basis) {
        cx a = transition_amplitude(u, c.input, state);
        double p = std::norm(a);
        sum += p;
        d.entries.emplace_back(std::move(state), p);
    }
    if (std::abs(sum - 1.0) > kProbTol)
        throw Error("output distribution sums to " + format_double(sum) +
                    "; circuit is not photon-number-conserving unitary evolution");
    return d;
}

Distribution postselect(const Distribution& d, const PostselectionSpec& spec) {
    if (spec.empty()) return d;
    if (d.entries.empty()) throw InfeasiblePostselectionError("empty distribution");
    const int modes = d.entries.front().first.modes();
    for (const auto& [m, k] : spec.required) {
        if (m < 0 || m >= modes)
            throw DimensionError("postselected mode " + std::to_string(m) + " out of range");
        if (k < 0) throw DimensionError("negative required photon count");
    }

    Distribution out;
    double matched = 0.0;
    for (const auto& [state, p] : d.entries) {
        bool ok = true;
        for (const auto& [m, k] : spec.required)
            if (state.occ[std::size_t(m)] != k) {
                ok = false;
                break;
            }
        if (!ok) continue;
        matched += p;
        std::vector<int> rest;
        rest.reserve(std::size_t(modes) - spec.required.size());
        for (int m = 0; m < modes; ++m)
            if (!spec.required.count(m)) rest.push_back(state.occ[std::size_t(m)]);
        out.entries.emplace_back(FockState(std::move(rest)), p);
    }
    if (matched < kProbTol)
        throw InfeasiblePostselectionError(
            "postselection success probability " + format_double(matched) +
            " is below tolerance; the circuit/spec pair has no support");
    for (auto& e : out.entries) e.second /= matched;
    std::sort(out.entries.begin(), out.entries.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    out.success_probability = d.success_probability * matched;
    return out;
}

Distribution postselected_distribution(const OpticalCircuit& c, std::uint64_t cap) {
    Distribution d = output_distribution(c, cap);
    if (c.postselection.empty()) return d;
    return postselect(d, c.postselection);
}

std::vector<FockState> sample(const OpticalCircuit& c, long long shots, std::uint64_t seed,
                              std::uint64_t cap) {
    return sample(postselected_distribution(c, cap), shots, seed);
}

std::vector<FockState> sample(const Distribution& d, long long shots, std::uint64_t seed) {
    std::vector<double> cdf;
    cdf.reserve(d.entries.size());
    double acc = 0.0;
    for (const auto& e : d.entries) {
        acc += e.second;
        cdf.push_back(acc);
    }
    std::mt19937_64 rng(seed);
    std::vector<FockState> out;
    out.reserve(std::size_t(std::max<long long>(shots, 0)));
    for (long long s = 0; s < shots; ++s) {
        double u = uniform_from_bits(rng()) * acc;
        std::size_t idx = std::size_t(
            std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
        if (idx >= d.entries.size()) idx = d.entries.size() - 1;
        out.push_back(d.entries[idx].first);
    }
    return out;
}

int occupancy_support(const OpticalCircuit& c, int after_layer, std::uint64_t cap) {
    if (after_layer < 0 || after_layer > int(c.layers.size()))
        throw Error("layer index " + std::to_string(after_layer) + " out of range [0, " +
                    std::to_string(c.layers.size()) + "]");
    OpticalCircuit prefix = c;
    prefix.layers.resize(std::size_t(after_layer));
    prefix.postselection = {};
    prefix.output_modes = {};
    require_valid(prefix);

    const int n = c.input.total_photons();
    auto basis = enumerate_fock_basis(n, c.modes, cap);
    CMat u = interferometer(prefix);
    int best = 0;
    for (const auto& state : basis) {
        cx a = transition_amplitude(u, c.input, state);
        if (std::abs(a) <= kAmpEpsilon) continue;
        for (int v : state.occ) best = std::max(best, v);
    }
    return best;
}

CMat two_mode_sector_matrix(const CMat& u, int total_photons) {
    if (u.rows() != 2 || u.cols() != 2) throw DimensionError("expected a 2x2 gate");
    const int n = total_photons;
    CMat out(n + 1, n + 1);
    for (int j = 0; j <= n; ++j) {
        FockState in(std::vector<int>{j, n - j});
        for (int i = 0; i <= n; ++i)
            out.at(i, j) = transition_amplitude(u, in, FockState(std::vector<int>{i, n - i}));
    }
    return out;
}

}  // namespace loqc
