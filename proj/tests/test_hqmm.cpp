#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hqmm/builtin_models.hpp"
#include "hqmm/conversion.hpp"
#include "hqmm/kraus.hpp"
#include "hqmm/serialize.hpp"
#include "hqmm/stacked_kraus.hpp"
#include "oracles.hpp"

using namespace hqmm;

namespace {

KrausSet identity_channel() {
    KrausSet ks = KrausSet::zeros(2, 1, 1);
    ks.ops[0][0] = ComplexMatrix::identity(2);
    return ks;
}

KrausSet random_kraus(std::size_t n, std::size_t s, std::size_t w, Rng& rng) {
    return unstack(random_stacked_kraus(n, s, w, rng));
}

}  // namespace

TEST_CASE("builtin models satisfy completeness tightly") {
    CHECK(probability_clock().completeness_defect() <= 1e-12);
    CHECK(monras_2x4().completeness_defect() <= 1e-12);
    CHECK(fully_quantum_2x6().completeness_defect() <= 1e-12);
    CHECK(handwritten_hmm_6x6().is_valid(1e-12));
}

TEST_CASE("filtering steps with hand-computed values") {
    const KrausSet clock = probability_clock();
    HqmmState state{DensityMatrix::from_diagonal({0.5, 0.5}), 0.0};

    SUBCASE("probability clock, symbol 2") {
        const HqmmState next = hqmm_step(state, clock, 1);
        CHECK(std::exp(next.log_scale) == doctest::Approx(0.32).epsilon(1e-12));
        CHECK(approx_equal(next.rho.mat, DensityMatrix::from_diagonal({1.0, 0.0}).mat, 1e-12));
    }
    SUBCASE("identity channel leaves the state alone") {
        const KrausSet id = identity_channel();
        HqmmState s0{DensityMatrix::from_diagonal({0.3, 0.7}), 0.0};
        const HqmmState next = hqmm_step(s0, id, 0);
        CHECK(next.log_scale == doctest::Approx(0.0).epsilon(1e-15));
        CHECK(approx_equal(next.rho.mat, s0.rho.mat, 1e-15));
    }
    SUBCASE("first operator of the 2x4 model collapses to the ground state") {
        const HqmmState next = hqmm_step(state, monras_2x4(), 0);
        CHECK(std::exp(next.log_scale) == doctest::Approx(0.25).epsilon(1e-12));
        CHECK(approx_equal(next.rho.mat, DensityMatrix::from_diagonal({1.0, 0.0}).mat, 1e-12));
    }
    SUBCASE("invalid symbol and impossible observation") {
        CHECK_THROWS_AS(hqmm_step(state, clock, 2), std::invalid_argument);
        const KrausSet diag = hmm_to_hqmm_sqrt([] {
            HmmParams p;
            p.n = 2;
            p.s = 2;
            p.A = {{1.0, 0.0}, {0.0, 1.0}};
            p.C = {{1.0, 0.0}, {0.0, 1.0}};
            p.prior = {1.0, 0.0};
            return p;
        }());
        HqmmState ground{DensityMatrix::basis_state(2, 0), 0.0};
        CHECK_THROWS_AS(hqmm_step(ground, diag, 1), impossible_observation);
    }
}

TEST_CASE("output probabilities") {
    const KrausSet clock = probability_clock();
    const auto at_ground = hqmm_output_probs(clock, DensityMatrix::basis_state(2, 0));
    CHECK(at_ground[0] == doctest::Approx(0.36).epsilon(1e-12));
    CHECK(at_ground[1] == doctest::Approx(0.64).epsilon(1e-12));

    const auto monras = hqmm_output_probs(monras_2x4(), DensityMatrix::maximally_mixed(2));
    for (double p : monras) CHECK(p == doctest::Approx(0.25).epsilon(1e-12));

    // A converted HMM emits with the classical one-step distribution C A x.
    Rng rng(8);
    const HmmParams hp = random_hmm(3, 2, rng);
    const KrausSet converted = hmm_to_hqmm_sqrt(hp);
    std::vector<double> x{0.2, 0.5, 0.3};
    const auto probs = hqmm_output_probs(converted, DensityMatrix::from_diagonal(x));
    for (std::size_t y = 0; y < 2; ++y) {
        double expected = 0.0;
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j) expected += hp.C[y][i] * hp.A[i][j] * x[j];
        CHECK(probs[y] == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("output probabilities sum to one whenever the set is complete") {
    Rng rng(21);
    for (int trial = 0; trial < 20; ++trial) {
        const KrausSet ks = random_kraus(2 + trial % 3, 2 + trial % 2, 1 + trial % 3, rng);
        const auto rho = oracles::random_density(ks.n, rng);
        const auto probs = hqmm_output_probs(ks, rho);
        double total = 0.0;
        for (double p : probs) {
            CHECK(p >= 0.0);
            total += p;
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("log-likelihood: identities and exhaustive normalization") {
    const KrausSet id = identity_channel();
    CHECK(hqmm_loglik(id, SymbolSequence(10, 0)) == doctest::Approx(0.0).epsilon(1e-14));

    const KrausSet clock = probability_clock();
    double total = 0.0;
    for (const auto& seq : oracles::all_sequences(2, 4))
        total += std::exp(hqmm_loglik(clock, seq));
    CHECK(total == doctest::Approx(1.0).epsilon(1e-10));

    Rng rng(5);
    for (int trial = 0; trial < 6; ++trial) {
        const std::size_t s = 2 + trial % 2;
        const KrausSet ks = random_kraus(2, s, 1 + trial % 2, rng);
        double sum = 0.0;
        for (const auto& seq : oracles::all_sequences(s, 4))
            sum += std::exp(hqmm_loglik(ks, seq));
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-8));
    }
}

TEST_CASE("log-likelihood matches the classical forward pass after conversion") {
    Rng rng(77);
    const HmmParams hp = random_hmm(3, 3, rng);
    const KrausSet converted = hmm_to_hqmm_sqrt(hp);
    const DensityMatrix rho0 = DensityMatrix::from_diagonal(hp.prior);
    for (int trial = 0; trial < 10; ++trial) {
        const auto seq = oracles::random_sequence(3, 12, rng);
        CHECK(hqmm_loglik(converted, seq, rho0) ==
              doctest::Approx(hmm_forward(hp, seq).loglik).epsilon(1e-10));
    }
}

TEST_CASE("single-branch fast path agrees with the generic filter") {
    Rng rng(13);
    for (int trial = 0; trial < 10; ++trial) {
        const KrausSet ks = random_kraus(3, 2, 1, rng);
        const auto rho0 = oracles::random_density(3, rng);
        const auto seq = oracles::random_sequence(2, 30, rng);
        const double fast = detail::loglik_single_branch(ks, seq, rho0);
        const double generic = detail::loglik_generic(ks, seq, rho0);
        CHECK(fast == doctest::Approx(generic).epsilon(1e-12));
    }
}

TEST_CASE("the state stays a density matrix through long random filtering") {
    Rng rng(6);
    const KrausSet ks = random_kraus(3, 3, 2, rng);
    HqmmState state{DensityMatrix::maximally_mixed(3), 0.0};
    for (int t = 0; t < 1000; ++t) {
        const auto probs = hqmm_output_probs(ks, state.rho);
        state = hqmm_step(state, ks, static_cast<Symbol>(rng.categorical(probs)));
        state.log_scale = 0.0;
    }
    CHECK(state.rho.is_valid(1e-8, 1e-8, 1e-8));
}

TEST_CASE("sampling: identity alphabet, clock statistics, determinism") {
    const auto ones = hqmm_sample(identity_channel(), 25, 5, 3);
    for (Symbol y : ones) CHECK(y == 0);

    // After emitting symbol 2 the clock state is diag(1, 0), where
    // p(2) = 0.64; check the conditional frequency empirically.
    const KrausSet clock = probability_clock();
    const auto seq = hqmm_sample(clock, 100000, 100, 17);
    std::size_t after_two = 0, two_after_two = 0;
    for (std::size_t t = 1; t < seq.size(); ++t) {
        if (seq[t - 1] == 1) {
            ++after_two;
            if (seq[t] == 1) ++two_after_two;
        }
    }
    const double cond = static_cast<double>(two_after_two) / static_cast<double>(after_two);
    CHECK(std::abs(cond - 0.64) <= 0.01);

    CHECK(hqmm_sample(clock, 100, 10, 9) == hqmm_sample(clock, 100, 10, 9));
}

TEST_CASE("model JSON round-trip is bit-faithful") {
    Rng rng(31);
    const KrausSet ks = random_kraus(3, 2, 2, rng);
    const KrausSet back = kraus_from_json(nlohmann::json::parse(kraus_to_json(ks).dump()));
    REQUIRE(back.n == ks.n);
    REQUIRE(back.s == ks.s);
    REQUIRE(back.w == ks.w);
    for (std::size_t y = 0; y < ks.s; ++y)
        for (std::size_t k = 0; k < ks.w; ++k)
            for (std::size_t i = 0; i < ks.n; ++i)
                for (std::size_t j = 0; j < ks.n; ++j)
                    CHECK(back.ops[y][k](i, j) == ks.ops[y][k](i, j));

    const HmmParams hp = random_hmm(3, 4, rng);
    const HmmParams hback = hmm_from_json(nlohmann::json::parse(hmm_to_json(hp).dump()));
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) CHECK(hback.A[i][j] == hp.A[i][j]);
    for (std::size_t y = 0; y < 4; ++y)
        for (std::size_t j = 0; j < 3; ++j) CHECK(hback.C[y][j] == hp.C[y][j]);
}

TEST_CASE("parameter counting") {
    CHECK(KrausSet::zeros(2, 4, 1).param_count() == 16);
    CHECK(KrausSet::zeros(2, 2, 1).param_count() == 8);
    CHECK(KrausSet::zeros(5, 6, 3).param_count() == 450);
    CHECK(hmm_param_count(3, 4) == 21);
    CHECK(hmm_param_count(8, 2) == 80);
}
