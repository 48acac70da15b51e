#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "loqc/fock.hpp"
#include "support/testutil.hpp"

using namespace loqc;
using testutil::haar_unitary;

namespace {

OpticalCircuit balanced_circuit(std::vector<int> input) {
    OpticalCircuit c;
    c.modes = int(input.size());
    c.input.occ = std::move(input);
    Layer l;
    l.gates.push_back({0, 1, balanced_beam_splitter(), "bs"});
    c.layers.push_back(std::move(l));
    return c;
}

}  // namespace

TEST_CASE("permanent: small closed forms") {
    CHECK(std::abs(permanent(CMat::identity(2)) - cx(1.0)) < 1e-15);
    CHECK(std::abs(permanent(CMat::identity(5)) - cx(1.0)) < 1e-15);

    CMat ones(3, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) ones.at(i, j) = 1.0;
    CHECK(std::abs(permanent(ones) - cx(6.0)) < 1e-12);  // 3!

    // balanced beam splitter: m00*m11 + m01*m10 = -1/2 + 1/2
    CHECK(std::abs(permanent(balanced_beam_splitter())) < 1e-15);

    CMat empty(0, 0);
    CHECK(permanent(empty) == cx(1.0));

    CMat rect(2, 3);
    CHECK_THROWS_AS((void)permanent(rect), DimensionError);
}

TEST_CASE("permanent: multilinearity in rows") {
    std::mt19937_64 rng(11);
    for (int dim : {3, 4}) {
        for (int rep = 0; rep < 20; ++rep) {
            CMat m = haar_unitary(dim, rng);
            cx base = permanent(m);
            cx scale(0.3 + testutil::uniform(rng), testutil::uniform(rng) - 0.5);
            int row = int(rng() % std::uint64_t(dim));
            CMat scaled = m;
            for (int j = 0; j < dim; ++j) scaled.at(row, j) *= scale;
            CHECK(std::abs(permanent(scaled) - scale * base) < 1e-12);
        }
    }
}

TEST_CASE("permanent: Gray-code vs permutation-sum oracle") {
    std::mt19937_64 rng(12);
    for (int dim = 1; dim <= 6; ++dim) {
        for (int rep = 0; rep < 8; ++rep) {
            CMat m(dim, dim);
            for (int i = 0; i < dim; ++i)
                for (int j = 0; j < dim; ++j) m.at(i, j) = testutil::gaussian(rng);
            CHECK(std::abs(permanent(m) - testutil::naive_permanent(m)) < 1e-10);
        }
    }
}

TEST_CASE("transition amplitudes: identity and Hong-Ou-Mandel") {
    CMat id = CMat::identity(2);
    FockState oneone(std::vector<int>{1, 1});
    CHECK(std::abs(transition_amplitude(id, oneone, oneone) - cx(1.0)) < 1e-15);

    CMat bs = balanced_beam_splitter();
    CHECK(std::abs(transition_amplitude(bs, oneone, oneone)) < 1e-15);
    cx bunched = transition_amplitude(bs, oneone, FockState(std::vector<int>{2, 0}));
    CHECK(std::abs(std::abs(bunched) - 1.0 / std::sqrt(2.0)) < 1e-15);

    CHECK_THROWS_AS((void)transition_amplitude(bs, oneone, FockState(std::vector<int>{1, 0})),
                    ConservationError);
    CHECK_THROWS_AS(
        (void)transition_amplitude(bs, FockState(std::vector<int>{1, 1, 0}), oneone),
        DimensionError);
}

TEST_CASE("fock basis: lexicographic order and size") {
    auto basis = enumerate_fock_basis(2, 3);
    REQUIRE(basis.size() == 6);  // C(4,2)
    CHECK(basis.front().occ == std::vector<int>{0, 0, 2});
    CHECK(basis[1].occ == std::vector<int>{0, 1, 1});
    CHECK(basis.back().occ == std::vector<int>{2, 0, 0});
    for (std::size_t i = 1; i < basis.size(); ++i) CHECK(basis[i - 1] < basis[i]);

    CHECK(fock_basis_size(0, 4) == 1);
    CHECK(fock_basis_size(4, 8) == 330);
    CHECK_THROWS_AS((void)enumerate_fock_basis(30, 30, 1000), ResourceLimitError);
    try {
        enumerate_fock_basis(3, 4, 10);
    } catch (const ResourceLimitError& e) {
        CHECK(e.computed_size == 20);
    }
}

TEST_CASE("output distribution: beam splitter cases") {
    auto single = output_distribution(balanced_circuit({1, 0}));
    REQUIRE(single.entries.size() == 2);
    CHECK(single.entries[0].first.occ == std::vector<int>{0, 1});
    CHECK(single.entries[0].second == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(single.entries[1].second == doctest::Approx(0.5).epsilon(1e-12));

    auto hom = output_distribution(balanced_circuit({1, 1}));
    std::map<std::vector<int>, double> p;
    for (const auto& e : hom.entries) p[e.first.occ] = e.second;
    CHECK(p[{2, 0}] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(p[{0, 2}] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(p[{1, 1}] < 1e-12);

    OpticalCircuit empty;
    empty.modes = 2;
    empty.input.occ = {1, 0};
    auto d = output_distribution(empty);
    REQUIRE(d.entries.size() == 2);
    CHECK(d.probability_of(FockState(std::vector<int>{1, 0})) == doctest::Approx(1.0));
}

TEST_CASE("output distribution: unitarity means normalization, photons conserved") {
    std::mt19937_64 rng(13);
    for (int rep = 0; rep < 10; ++rep) {
        auto c = testutil::random_optical_circuit(5, 3, 3, rng);
        auto d = output_distribution(c);
        CHECK(std::abs(d.total_mass() - 1.0) < 1e-9);
        int n = c.input.total_photons();
        for (const auto& e : d.entries)
            if (e.second > 0) CHECK(e.first.total_photons() == n);
    }
}

TEST_CASE("postselect: renormalization and failure modes") {
    Distribution d;
    d.entries.emplace_back(FockState(std::vector<int>{0, 1}), 0.5);
    d.entries.emplace_back(FockState(std::vector<int>{1, 0}), 0.5);

    PostselectionSpec spec;
    spec.required[1] = 0;
    auto cond = postselect(d, spec);
    REQUIRE(cond.entries.size() == 1);
    CHECK(cond.entries[0].first.occ == std::vector<int>{1});
    CHECK(cond.entries[0].second == doctest::Approx(1.0));
    CHECK(cond.success_probability == doctest::Approx(0.5));

    PostselectionSpec none;
    none.required[0] = 7;
    CHECK_THROWS_AS((void)postselect(d, none), InfeasiblePostselectionError);

    // success probabilities accumulate multiplicatively
    Distribution pre = d;
    pre.success_probability = 0.25;
    CHECK(postselect(pre, spec).success_probability == doctest::Approx(0.125));
}

TEST_CASE("sampling: determinism, trivial cases, goodness of fit") {
    auto c = balanced_circuit({1, 0});
    CHECK(sample(c, 0, 7).empty());

    auto a = sample(c, 200, 42);
    auto b = sample(c, 200, 42);
    CHECK(a == b);
    auto other = sample(c, 200, 43);
    CHECK(a != other);

    OpticalCircuit id;
    id.modes = 3;
    id.input.occ = {1, 0, 1};
    for (const auto& s : sample(id, 25, 1)) CHECK(s.occ == std::vector<int>{1, 0, 1});

    // chi-square against the exact distribution, significance 0.001
    const long long shots = 100000;
    auto samples = sample(c, shots, 2024);
    auto exact = output_distribution(c);
    std::map<std::vector<int>, long long> counts;
    for (const auto& s : samples) ++counts[s.occ];
    std::vector<long long> obs;
    std::vector<double> expp;
    for (const auto& e : exact.entries) {
        obs.push_back(counts[e.first.occ]);
        expp.push_back(e.second);
    }
    CHECK(testutil::chi_square_pvalue(obs, expp, shots) > 0.001);
    double freq = double(counts[{1, 0}]) / double(shots);
    CHECK(std::abs(freq - 0.5) < 0.01);
}

TEST_CASE("occupancy support: inputs, bunching, reachability bound") {
    auto hom = balanced_circuit({1, 1});
    CHECK(occupancy_support(hom, 0) == 1);
    CHECK(occupancy_support(hom, 1) == 2);
    CHECK_THROWS(occupancy_support(hom, 2));

    std::mt19937_64 rng(14);
    for (int rep = 0; rep < 5; ++rep) {
        auto c = testutil::random_optical_circuit(6, 3, 4, rng);
        for (int k = 0; k <= 3; ++k) CHECK(occupancy_support(c, k) <= (1 << k));
    }
}

TEST_CASE("two-mode sector matrices are unitary per sector") {
    std::mt19937_64 rng(15);
    for (int n = 0; n <= 4; ++n) {
        CMat u = haar_unitary(2, rng);
        CHECK(two_mode_sector_matrix(u, n).is_unitary(1e-10));
    }
}
