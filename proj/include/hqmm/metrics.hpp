// metrics.hpp
// Description accuracy: a nonlinear rescaling of per-symbol log-likelihood
// into (-1, 1], where 1 is perfect prediction and 0 is random-guess level.

#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "hqmm/density.hpp"
#include "hqmm/errors.hpp"
#include "hqmm/hmm.hpp"
#include "hqmm/kraus.hpp"

namespace hqmm {

// f(x) = x for x >= 0, (1 - e^{-x/4}) / (1 + e^{-x/4}) for x < 0; maps
// (-inf, 1] to (-1, 1] and is continuous at 0.
inline double da_transfer(double x) {
    if (x >= 0.0) return x;
    const double e = std::exp(-0.25 * x);
    return (1.0 - e) / (1.0 + e);
}

inline constexpr double kDaFloor = -1.0 + 1e-12;

// DA of one sequence from its natural-log likelihood. An impossible sequence
// (loglik = -inf) saturates at the floor just above -1.
inline double da_value(double loglik, std::size_t s, std::size_t len) {
    if (len == 0 || s <= 1) return 1.0;  // only one sequence exists; P = 1
    if (!std::isfinite(loglik)) return kDaFloor;
    const double log_s_prob = loglik / std::log(static_cast<double>(s));
    const double x = 1.0 + log_s_prob / static_cast<double>(len);
    const double v = da_transfer(x);
    return v <= -1.0 ? kDaFloor : v;
}

struct DaScore {
    double mean = 0.0;
    double stddev = 0.0;
    std::vector<double> per_sequence;
};

inline DaScore da_from_logliks(const std::vector<double>& logliks, std::size_t s,
                               const std::vector<std::size_t>& lengths) {
    DaScore score;
    score.per_sequence.reserve(logliks.size());
    for (std::size_t i = 0; i < logliks.size(); ++i)
        score.per_sequence.push_back(da_value(logliks[i], s, lengths[i]));
    if (score.per_sequence.empty()) return score;
    double sum = 0.0;
    for (double v : score.per_sequence) sum += v;
    score.mean = sum / static_cast<double>(score.per_sequence.size());
    if (score.per_sequence.size() > 1) {
        double ss = 0.0;
        for (double v : score.per_sequence) ss += (v - score.mean) * (v - score.mean);
        score.stddev = std::sqrt(ss / static_cast<double>(score.per_sequence.size() - 1));
    }
    return score;
}

// Generic entry point: any model that scores sequences by log-likelihood
// (reporting -inf for impossible ones) can be measured.
inline DaScore da(const std::function<double(const SymbolSequence&)>& loglik,
                  const std::vector<SymbolSequence>& sequences, std::size_t s) {
    std::vector<double> lls;
    std::vector<std::size_t> lens;
    lls.reserve(sequences.size());
    lens.reserve(sequences.size());
    for (const auto& seq : sequences) {
        lls.push_back(loglik(seq));
        lens.push_back(seq.size());
    }
    return da_from_logliks(lls, s, lens);
}

inline DaScore da(const KrausSet& model, const std::vector<SymbolSequence>& sequences,
                  const DensityMatrix& rho0) {
    return da([&](const SymbolSequence& seq) { return hqmm_loglik_or_neg_inf(model, seq, rho0); },
              sequences, model.s);
}

inline DaScore da(const KrausSet& model, const std::vector<SymbolSequence>& sequences) {
    return da(model, sequences, DensityMatrix::maximally_mixed(model.n));
}

inline DaScore da(const HmmParams& model, const std::vector<SymbolSequence>& sequences) {
    return da(
        [&](const SymbolSequence& seq) {
            try {
                return hmm_loglik(model, seq);
            } catch (const impossible_observation&) {
                return -std::numeric_limits<double>::infinity();
            }
        },
        sequences, model.s);
}

}  // namespace hqmm
