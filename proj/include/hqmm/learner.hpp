// learner.hpp
// Maximum-likelihood learning of a Kraus set by iterated two-row complex
// Givens rotations on the stacked-operator matrix: random batches, random row
// pairs, and a derivative-free search over the four rotation angles, keeping
// a rotation only when it improves the batch log-likelihood. The unitarity of
// every applied rotation keeps the completeness constraint satisfied exactly.

#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "hqmm/dataset.hpp"
#include "hqmm/givens.hpp"
#include "hqmm/kraus.hpp"
#include "hqmm/metrics.hpp"
#include "hqmm/nelder_mead.hpp"
#include "hqmm/rng.hpp"
#include "hqmm/stacked_kraus.hpp"

namespace hqmm {

struct TrainPhase {
    std::size_t batch_size = 1;
    std::size_t num_iterations = 1;  // rotations attempted per batch
};

struct TrainConfig {
    std::size_t batch_size = 1;
    std::size_t total_batches = 40;
    std::size_t num_iterations = 6;
    std::uint64_t rng_seed = 0;

    // When non-empty the schedule overrides batch_size/num_iterations; the
    // total batch budget is split across phases in order, as evenly as
    // possible with earlier phases taking the remainder.
    std::vector<TrainPhase> schedule;

    // Inner optimizer: Nelder-Mead over (theta, phi, psi, delta), seeded at
    // zero plus nm_restarts random starts in [-pi, pi]^4, with a shared
    // evaluation budget; a rotation is kept only when it improves the batch
    // log-likelihood by more than min_improvement.
    std::size_t nm_max_evals = 200;
    std::size_t nm_restarts = 4;
    double min_improvement = 1e-10;

    bool check_invariants = false;  // verify kappa^dag kappa = I after each accepted rotation

    void validate() const {
        if (batch_size < 1 || total_batches < 1 || num_iterations < 1)
            throw std::invalid_argument("TrainConfig: counts must be >= 1");
        for (const auto& ph : schedule)
            if (ph.batch_size < 1 || ph.num_iterations < 1)
                throw std::invalid_argument("TrainConfig: schedule counts must be >= 1");
    }

    std::vector<TrainPhase> expanded_schedule() const {
        std::vector<TrainPhase> phases =
            schedule.empty() ? std::vector<TrainPhase>{{batch_size, num_iterations}} : schedule;
        std::vector<TrainPhase> per_batch;
        per_batch.reserve(total_batches);
        const std::size_t base = total_batches / phases.size();
        std::size_t extra = total_batches % phases.size();
        for (const auto& ph : phases) {
            std::size_t count = base + (extra > 0 ? 1 : 0);
            if (extra > 0) --extra;
            for (std::size_t k = 0; k < count; ++k) per_batch.push_back(ph);
        }
        return per_batch;
    }
};

// The schedule reported to work well on these models: batch size 1 with 6
// iterations to approach a local maximum, then batch size 4 with 3.
inline TrainConfig default_train_config(std::uint64_t seed = 0) {
    TrainConfig cfg;
    cfg.rng_seed = seed;
    cfg.total_batches = 40;
    cfg.schedule = {{1, 6}, {4, 3}};
    return cfg;
}

struct BatchRecord {
    std::size_t batch_index = 0;
    std::size_t batch_size = 0;
    double initial_loglik = 0.0;
    std::vector<double> accepted_logliks;  // non-decreasing within the batch
};

struct TrainReport {
    std::vector<BatchRecord> batches;
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    double wall_seconds = 0.0;
    double final_train_da = std::numeric_limits<double>::quiet_NaN();
    double final_validation_da = std::numeric_limits<double>::quiet_NaN();
};

struct TrainResult {
    KrausSet model;
    TrainReport report;
};

// Mid-run snapshot sufficient to resume: the variable, the RNG stream, and
// how many batches were consumed.
struct TrainCheckpoint {
    StackedKraus sk;
    std::string rng_state;
    std::size_t batches_done = 0;
    TrainReport report;
};

struct InnerOptimizeResult {
    HRotation rotation;       // zero angles when rejected
    double loglik = 0.0;      // batch log-likelihood after applying `rotation`
    bool improved = false;
};

namespace detail {

inline double batch_loglik(const StackedKraus& sk,
                           const std::vector<const SymbolSequence*>& batch,
                           const DensityMatrix& rho0) {
    const KrausSet model = unstack(sk);
    double total = 0.0;
    for (const SymbolSequence* seq : batch) {
        const double ll = hqmm_loglik_or_neg_inf(model, *seq, rho0);
        if (!std::isfinite(ll)) return -std::numeric_limits<double>::infinity();
        total += ll;
    }
    return total;
}

}  // namespace detail

// Searches the four angles of a rotation on rows (i, j) for the largest batch
// log-likelihood. Never returns a decrease: when nothing beats the current
// value by min_improvement the zero-angle rotation comes back unchanged.
inline InnerOptimizeResult inner_optimize(const StackedKraus& sk, std::size_t i, std::size_t j,
                                          const std::vector<const SymbolSequence*>& batch,
                                          double current_loglik, const TrainConfig& cfg,
                                          const DensityMatrix& rho0, Rng& rng) {
    if (i >= j || j >= sk.num_rows())
        throw std::invalid_argument("inner_optimize: row pair out of range");

    const auto objective = [&](const std::vector<double>& angles) {
        const HRotation rot{i, j, angles[0], angles[1], angles[2], angles[3]};
        return -detail::batch_loglik(apply_rotation(sk, rot), batch, rho0);
    };

    std::vector<std::vector<double>> starts;
    starts.push_back({0.0, 0.0, 0.0, 0.0});
    for (std::size_t r = 0; r < cfg.nm_restarts; ++r) {
        std::vector<double> start(4);
        for (double& a : start) a = rng.uniform(-M_PI, M_PI);
        starts.push_back(std::move(start));
    }

    const std::size_t budget_per_start =
        std::max<std::size_t>(cfg.nm_max_evals / starts.size(), 8);
    std::vector<double> best_angles{0.0, 0.0, 0.0, 0.0};
    double best_value = -current_loglik;
    for (const auto& start : starts) {
        const NelderMeadResult res = nelder_mead(objective, start, 0.3, budget_per_start);
        if (res.value < best_value) {
            best_value = res.value;
            best_angles = res.x;
        }
    }

    InnerOptimizeResult out;
    if (-best_value > current_loglik + cfg.min_improvement) {
        out.rotation = HRotation{i, j, best_angles[0], best_angles[1], best_angles[2],
                                 best_angles[3]};
        out.loglik = -best_value;
        out.improved = true;
    } else {
        out.rotation = HRotation{i, j, 0.0, 0.0, 0.0, 0.0};
        out.loglik = current_loglik;
        out.improved = false;
    }
    return out;
}

inline TrainResult train(const SequenceDataset& data, std::size_t n, std::size_t s,
                         std::size_t w, const TrainConfig& cfg,
                         const SequenceDataset* validation = nullptr,
                         TrainCheckpoint* checkpoint = nullptr) {
    cfg.validate();
    if (data.sequences.empty()) throw std::invalid_argument("train: empty dataset");
    if (data.s != s)
        throw std::invalid_argument("train: dataset alphabet size " + std::to_string(data.s) +
                                    " does not match s = " + std::to_string(s));
    data.validate();

    const auto t_start = std::chrono::steady_clock::now();
    const DensityMatrix rho0 = DensityMatrix::maximally_mixed(n);

    Rng rng(derive_seed(cfg.rng_seed, 0x6b617070));
    StackedKraus sk;
    TrainReport report;
    std::size_t first_batch = 0;
    if (checkpoint && checkpoint->batches_done > 0) {
        sk = checkpoint->sk;
        rng.load_state(checkpoint->rng_state);
        first_batch = checkpoint->batches_done;
        report = checkpoint->report;
    } else {
        sk = random_stacked_kraus(n, s, w, rng);
    }

    const std::vector<TrainPhase> plan = cfg.expanded_schedule();
    const std::size_t num_rows = sk.num_rows();
    const std::size_t num_pairs = num_rows >= 2 ? num_rows * (num_rows - 1) / 2 : 0;

    for (std::size_t batch_idx = first_batch; batch_idx < plan.size(); ++batch_idx) {
        const TrainPhase& phase = plan[batch_idx];
        const std::size_t b = std::min(phase.batch_size, data.sequences.size());
        const auto chosen = rng.sample_without_replacement(data.sequences.size(), b);
        std::vector<const SymbolSequence*> batch;
        batch.reserve(b);
        for (std::size_t idx : chosen) batch.push_back(&data.sequences[idx]);

        BatchRecord record;
        record.batch_index = batch_idx;
        record.batch_size = b;
        double current_ll = detail::batch_loglik(sk, batch, rho0);
        record.initial_loglik = current_ll;

        if (num_pairs > 0) {
            // Row pairs for this sweep, drawn uniformly without replacement.
            const auto pair_ids =
                rng.sample_without_replacement(num_pairs, phase.num_iterations);
            for (std::size_t pair_id : pair_ids) {
                // Decode the lexicographic pair index into (i, j), i < j.
                std::size_t i = 0;
                std::size_t remaining = pair_id;
                std::size_t row_span = num_rows - 1;
                while (remaining >= row_span) {
                    remaining -= row_span;
                    ++i;
                    --row_span;
                }
                const std::size_t j = i + 1 + remaining;

                const InnerOptimizeResult res =
                    inner_optimize(sk, i, j, batch, current_ll, cfg, rho0, rng);
                if (res.improved) {
                    sk = apply_rotation(sk, res.rotation);
                    current_ll = res.loglik;
                    record.accepted_logliks.push_back(current_ll);
                    ++report.accepted;
                    if (cfg.check_invariants) sk.validate(1e-8);
                } else {
                    ++report.rejected;
                }
            }
        }
        report.batches.push_back(std::move(record));

        if (checkpoint) {
            checkpoint->sk = sk;
            checkpoint->rng_state = rng.save_state();
            checkpoint->batches_done = batch_idx + 1;
            checkpoint->report = report;
        }
    }

    TrainResult result;
    result.model = unstack(sk);
    report.final_train_da = da(result.model, data.sequences, rho0).mean;
    if (validation)
        report.final_validation_da = da(result.model, validation->sequences, rho0).mean;
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    result.report = std::move(report);
    if (checkpoint) checkpoint->report = result.report;
    return result;
}

}  // namespace hqmm
