#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hqmm/builtin_models.hpp"
#include "hqmm/learner.hpp"
#include "hqmm/metrics.hpp"
#include "hqmm/serialize.hpp"
#include "oracles.hpp"

using namespace hqmm;

namespace {

SequenceDataset dataset_from(const KrausSet& model, std::size_t m, std::size_t len,
                             std::uint64_t seed) {
    SequenceDataset ds;
    ds.s = model.s;
    for (std::size_t i = 0; i < m; ++i)
        ds.sequences.push_back(hqmm_sample(model, len, 100, derive_seed(seed, i)));
    return ds;
}

std::vector<const SymbolSequence*> batch_view(const SequenceDataset& ds) {
    std::vector<const SymbolSequence*> out;
    for (const auto& seq : ds.sequences) out.push_back(&seq);
    return out;
}

}  // namespace

TEST_CASE("stack and unstack are exact inverses") {
    Rng rng(3);
    const StackedKraus sk = random_stacked_kraus(3, 2, 2, rng);
    const StackedKraus back = stack(unstack(sk));
    for (std::size_t i = 0; i < sk.kappa.rows(); ++i)
        for (std::size_t j = 0; j < sk.kappa.cols(); ++j)
            CHECK(back.kappa(i, j) == sk.kappa(i, j));
}

TEST_CASE("stacking the probability clock gives orthonormal columns") {
    const StackedKraus sk = stack(probability_clock());
    CHECK(sk.kappa.rows() == 4);
    CHECK(sk.kappa.cols() == 2);
    CHECK(sk.orthonormality_defect() <= 1e-12);
}

TEST_CASE("unstacking a random orthonormal matrix yields a complete Kraus set") {
    Rng rng(7);
    for (int trial = 0; trial < 5; ++trial) {
        const StackedKraus sk = random_stacked_kraus(2 + trial % 3, 2, 1 + trial % 3, rng);
        CHECK(unstack(sk).completeness_defect() <= 1e-12);
    }
}

TEST_CASE("apply_rotation on rows") {
    Rng rng(19);
    StackedKraus sk = random_stacked_kraus(2, 2, 1, rng);

    SUBCASE("zero angles change nothing") {
        const StackedKraus out = apply_rotation(sk, {0, 1, 0.0, 0.0, 0.0, 0.0});
        CHECK(max_abs_diff(out.kappa, sk.kappa) == 0.0);
    }
    SUBCASE("quarter turn swaps rows with a sign") {
        const StackedKraus out = apply_rotation(sk, {0, 1, M_PI / 2.0, 0.0, 0.0, 0.0});
        for (std::size_t c = 0; c < 2; ++c) {
            CHECK(std::abs(out.kappa(0, c) - sk.kappa(1, c)) <= 1e-15);
            CHECK(std::abs(out.kappa(1, c) + sk.kappa(0, c)) <= 1e-15);
        }
    }
    SUBCASE("orthonormality survives long rotation chains") {
        for (int k = 0; k < 100; ++k) {
            const std::size_t i = rng.next_u64() % 3;
            const std::size_t j = i + 1 + rng.next_u64() % (4 - i - 1);
            sk = apply_rotation(sk, {i, j, rng.uniform(-M_PI, M_PI), rng.uniform(-M_PI, M_PI),
                                     rng.uniform(-M_PI, M_PI), rng.uniform(-M_PI, M_PI)});
        }
        CHECK(sk.orthonormality_defect() <= 1e-8);
    }
    SUBCASE("out-of-range pairs are rejected") {
        CHECK_THROWS_AS(apply_rotation(sk, {1, 4, 0, 0, 0, 0}), std::invalid_argument);
    }
}

TEST_CASE("inner_optimize recovers a planted rotation") {
    const KrausSet truth = probability_clock();
    const SequenceDataset data = dataset_from(truth, 4, 400, 77);
    const auto batch = batch_view(data);
    const DensityMatrix rho0 = DensityMatrix::maximally_mixed(2);

    const StackedKraus sk_star = stack(truth);
    const double ll_star = detail::batch_loglik(sk_star, batch, rho0);

    // Hide the optimum behind one known rotation on rows (1, 2).
    const HRotation planted{1, 2, 0.8, 0.5, -0.9, 0.4};
    const StackedKraus sk = apply_rotation(sk_star, planted);
    const double ll_start = detail::batch_loglik(sk, batch, rho0);
    REQUIRE(ll_start < ll_star);

    TrainConfig cfg;
    cfg.nm_max_evals = 600;
    cfg.nm_restarts = 5;
    Rng rng(5);
    const InnerOptimizeResult res =
        inner_optimize(sk, 1, 2, batch, ll_start, cfg, rho0, rng);
    CHECK(res.improved);
    CHECK(res.loglik >= ll_star - 1e-3 * std::abs(ll_star));

    // Rotation-exactness: replaying the returned angles reproduces the
    // reported objective value.
    const double replay = detail::batch_loglik(apply_rotation(sk, res.rotation), batch, rho0);
    CHECK(replay == doctest::Approx(res.loglik).epsilon(1e-9));
}

TEST_CASE("inner_optimize never reports a decrease") {
    Rng rng(31);
    const KrausSet truth = probability_clock();
    const SequenceDataset data = dataset_from(truth, 2, 100, 13);
    const auto batch = batch_view(data);
    const DensityMatrix rho0 = DensityMatrix::maximally_mixed(2);
    TrainConfig cfg;
    for (int trial = 0; trial < 5; ++trial) {
        const StackedKraus sk = random_stacked_kraus(2, 2, 1, rng);
        const double current = detail::batch_loglik(sk, batch, rho0);
        const InnerOptimizeResult res = inner_optimize(sk, 0, 2, batch, current, cfg, rho0, rng);
        CHECK(res.loglik >= current - 1e-12);
        if (!res.improved) CHECK(res.rotation.is_identity());
    }
}

TEST_CASE("train on a memoryless emitter recovers symbol frequencies") {
    // One hidden state, two symbols, 30/70 emission.
    KrausSet emitter = KrausSet::zeros(1, 2, 1);
    emitter.ops[0][0](0, 0) = std::sqrt(0.3);
    emitter.ops[1][0](0, 0) = std::sqrt(0.7);
    SequenceDataset data = dataset_from(emitter, 6, 400, 3);

    double freq1 = 0.0, total = 0.0;
    for (const auto& seq : data.sequences)
        for (Symbol y : seq) {
            freq1 += (y == 1);
            total += 1.0;
        }
    freq1 /= total;

    TrainConfig cfg = default_train_config(9);
    cfg.total_batches = 20;
    const TrainResult res = train(data, 1, 2, 1, cfg);
    res.model.validate(1e-8);
    const double p1 = std::norm(res.model.ops[1][0](0, 0));
    CHECK(std::abs(p1 - freq1) <= 0.01);
}

TEST_CASE("training is deterministic given the seed") {
    const SequenceDataset data = dataset_from(probability_clock(), 5, 120, 21);
    TrainConfig cfg = default_train_config(123);
    cfg.total_batches = 6;
    const TrainResult a = train(data, 2, 2, 1, cfg);
    const TrainResult b = train(data, 2, 2, 1, cfg);
    REQUIRE(a.report.batches.size() == b.report.batches.size());
    CHECK(a.report.accepted == b.report.accepted);
    CHECK(a.report.rejected == b.report.rejected);
    for (std::size_t k = 0; k < a.report.batches.size(); ++k) {
        CHECK(a.report.batches[k].initial_loglik == b.report.batches[k].initial_loglik);
        CHECK(a.report.batches[k].accepted_logliks == b.report.batches[k].accepted_logliks);
    }
    CHECK(max_abs_diff(stack(a.model).kappa, stack(b.model).kappa) == 0.0);
}

TEST_CASE("accepted log-likelihoods are non-decreasing within each batch") {
    const SequenceDataset data = dataset_from(monras_2x4(), 6, 150, 40);
    TrainConfig cfg = default_train_config(7);
    cfg.total_batches = 8;
    cfg.check_invariants = true;  // also verifies orthonormality continuously
    const TrainResult res = train(data, 2, 4, 1, cfg);
    for (const auto& batch : res.report.batches) {
        double last = batch.initial_loglik;
        for (double ll : batch.accepted_logliks) {
            CHECK(ll >= last - 1e-9);
            last = ll;
        }
    }
    CHECK(res.model.completeness_defect() <= 1e-8);
}

TEST_CASE("training with several branches per output keeps completeness") {
    const SequenceDataset data = dataset_from(probability_clock(), 4, 80, 55);
    TrainConfig cfg = default_train_config(11);
    cfg.total_batches = 4;
    const TrainResult res = train(data, 2, 2, 2, cfg);
    CHECK(res.model.completeness_defect() <= 1e-8);
    CHECK(res.model.w == 2);
}

TEST_CASE("train validates its inputs") {
    SequenceDataset empty;
    empty.s = 2;
    TrainConfig cfg;
    CHECK_THROWS_AS(train(empty, 2, 2, 1, cfg), std::invalid_argument);

    SequenceDataset mismatched;
    mismatched.s = 3;
    mismatched.sequences = {{0, 1, 2}};
    CHECK_THROWS_AS(train(mismatched, 2, 2, 1, cfg), std::invalid_argument);
}

TEST_CASE("checkpoint JSON round-trip preserves the variable bitwise") {
    const SequenceDataset data = dataset_from(probability_clock(), 3, 60, 70);
    TrainConfig cfg = default_train_config(17);
    cfg.total_batches = 2;
    TrainCheckpoint ck;
    train(data, 2, 2, 1, cfg, nullptr, &ck);

    const auto j = nlohmann::json::parse(checkpoint_to_json(ck, cfg).dump());
    const auto [back, back_cfg] = checkpoint_from_json(j);
    CHECK(back.batches_done == ck.batches_done);
    CHECK(back.rng_state == ck.rng_state);
    CHECK(max_abs_diff(back.sk.kappa, ck.sk.kappa) == 0.0);
    CHECK(back_cfg.total_batches == cfg.total_batches);
    CHECK(back_cfg.schedule.size() == cfg.schedule.size());
}

TEST_CASE("checkpointing splits a run without changing its outcome") {
    const SequenceDataset data = dataset_from(probability_clock(), 5, 100, 60);
    // Single-phase schedule so a truncated run consumes the same RNG stream
    // prefix as the full one.
    TrainConfig cfg;
    cfg.rng_seed = 31;
    cfg.schedule = {{1, 4}};
    cfg.total_batches = 6;

    const TrainResult whole = train(data, 2, 2, 1, cfg);

    TrainCheckpoint ck;
    TrainConfig truncated = cfg;
    truncated.total_batches = 3;
    train(data, 2, 2, 1, truncated, nullptr, &ck);
    REQUIRE(ck.batches_done == 3);
    const TrainResult resumed = train(data, 2, 2, 1, cfg, nullptr, &ck);

    CHECK(max_abs_diff(stack(resumed.model).kappa, stack(whole.model).kappa) == 0.0);
}
