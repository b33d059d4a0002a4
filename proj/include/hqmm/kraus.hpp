// kraus.hpp
// Hidden quantum Markov models: a Kraus-operator parameter set, the
// density-matrix forward filter, sequence log-likelihood, per-step output
// probabilities, and sampling.

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "hqmm/complex_matrix.hpp"
#include "hqmm/density.hpp"
#include "hqmm/errors.hpp"
#include "hqmm/hmm.hpp"
#include "hqmm/rng.hpp"

namespace hqmm {

// w*s complex n x n operators indexed by (output y, branch k), forming a
// complete set: sum of K^dag K over all operators equals the identity.
struct KrausSet {
    std::size_t n = 0;  // hidden dimension
    std::size_t s = 0;  // output symbols
    std::size_t w = 0;  // branches per output
    std::vector<std::vector<ComplexMatrix>> ops;  // ops[y][k]

    static KrausSet zeros(std::size_t n, std::size_t s, std::size_t w) {
        KrausSet ks;
        ks.n = n;
        ks.s = s;
        ks.w = w;
        ks.ops.assign(s, std::vector<ComplexMatrix>(w, ComplexMatrix(n, n)));
        return ks;
    }

    // sum_{y,k} K^dag K, which completeness pins to the identity.
    ComplexMatrix completeness_gram() const {
        ComplexMatrix acc(n, n);
        for (const auto& branch : ops)
            for (const auto& k : branch) acc += k.adjoint() * k;
        return acc;
    }

    double completeness_defect() const {
        return max_abs_diff(completeness_gram(), ComplexMatrix::identity(n));
    }

    bool is_complete(double tol = 1e-8) const { return completeness_defect() <= tol; }

    void validate(double tol = 1e-8) const {
        if (ops.size() != s)
            throw std::invalid_argument("KrausSet: wrong number of outputs");
        for (const auto& branch : ops) {
            if (branch.size() != w)
                throw std::invalid_argument("KrausSet: wrong branch count");
            for (const auto& k : branch)
                if (k.rows() != n || k.cols() != n)
                    throw std::invalid_argument("KrausSet: operator has wrong shape");
        }
        if (!is_complete(tol))
            throw std::invalid_argument("KrausSet: completeness violated (defect " +
                                        std::to_string(completeness_defect()) + ")");
    }

    // Number of real parameters reported in result tables.
    std::size_t param_count() const { return n * n * s * w; }
};

inline std::size_t hmm_param_count(std::size_t n, std::size_t s) { return n * n + n * s; }

struct HqmmState {
    DensityMatrix rho;
    double log_scale = 0.0;  // accumulated log-probability of the sequence so far
};

// One filtering step: rho <- sum_k K rho K^dag, renormalized; returns the new
// state with the log of the step probability folded into log_scale. The state
// is re-hermitized each step to stop float asymmetry from accumulating.
inline HqmmState hqmm_step(const HqmmState& state, const KrausSet& kraus, Symbol y) {
    if (y < 0 || static_cast<std::size_t>(y) >= kraus.s)
        throw std::invalid_argument("hqmm_step: symbol out of range");
    const std::size_t n = kraus.n;
    ComplexMatrix numerator(n, n);
    for (const auto& k : kraus.ops[y]) numerator += (k * state.rho.mat) * k.adjoint();
    const double prob = numerator.trace().real();
    if (prob < kZeroProbability)
        throw impossible_observation("hqmm_step: observation has zero probability");
    numerator *= cdouble{1.0 / prob, 0.0};
    HqmmState next;
    next.rho = DensityMatrix(std::move(numerator));
    next.rho.rehermitize();
    next.log_scale = state.log_scale + std::log(prob);
    return next;
}

// p(y | rho) for every output; sums to one by completeness.
inline std::vector<double> hqmm_output_probs(const KrausSet& kraus, const DensityMatrix& rho) {
    std::vector<double> probs(kraus.s, 0.0);
    for (std::size_t y = 0; y < kraus.s; ++y) {
        double p = 0.0;
        for (const auto& k : kraus.ops[y]) p += ((k * rho.mat) * k.adjoint()).trace().real();
        probs[y] = std::max(p, 0.0);
    }
    return probs;
}

namespace detail {

// w = 1 shortcut: the sequence probability is tr(M rho M^dag) with M the
// ordered product of the per-symbol operators, so one matrix product per step
// replaces the two-sided channel application. The running product is
// renormalized to dodge underflow. Returns -infinity instead of throwing.
inline double loglik_single_branch(const KrausSet& kraus, const SymbolSequence& seq,
                                   const DensityMatrix& rho0) {
    const std::size_t n = kraus.n;
    ComplexMatrix m = ComplexMatrix::identity(n);
    double log_scale = 0.0;
    for (Symbol y : seq) {
        m = kraus.ops[y][0] * m;
        const double norm = m.frobenius_norm();
        if (norm < kZeroProbability) return -std::numeric_limits<double>::infinity();
        m *= cdouble{1.0 / norm, 0.0};
        log_scale += 2.0 * std::log(norm);
    }
    const double tail = ((m * rho0.mat) * m.adjoint()).trace().real();
    if (tail < kZeroProbability) return -std::numeric_limits<double>::infinity();
    return log_scale + std::log(tail);
}

inline double loglik_generic(const KrausSet& kraus, const SymbolSequence& seq,
                             const DensityMatrix& rho0) {
    HqmmState state{rho0, 0.0};
    const std::size_t n = kraus.n;
    for (Symbol y : seq) {
        ComplexMatrix numerator(n, n);
        for (const auto& k : kraus.ops[y]) numerator += (k * state.rho.mat) * k.adjoint();
        const double prob = numerator.trace().real();
        if (prob < kZeroProbability) return -std::numeric_limits<double>::infinity();
        numerator *= cdouble{1.0 / prob, 0.0};
        state.rho = DensityMatrix(std::move(numerator));
        state.rho.rehermitize();
        state.log_scale += std::log(prob);
    }
    return state.log_scale;
}

}  // namespace detail

// Log-likelihood that reports impossible sequences as -infinity; the learner
// and the DA metric both want that form.
inline double hqmm_loglik_or_neg_inf(const KrausSet& kraus, const SymbolSequence& seq,
                                     const DensityMatrix& rho0) {
    for (Symbol y : seq)
        if (y < 0 || static_cast<std::size_t>(y) >= kraus.s)
            throw std::invalid_argument("hqmm_loglik: symbol out of range");
    if (kraus.w == 1) return detail::loglik_single_branch(kraus, seq, rho0);
    return detail::loglik_generic(kraus, seq, rho0);
}

inline double hqmm_loglik(const KrausSet& kraus, const SymbolSequence& seq,
                          const DensityMatrix& rho0) {
    const double ll = hqmm_loglik_or_neg_inf(kraus, seq, rho0);
    if (!std::isfinite(ll))
        throw impossible_observation("hqmm_loglik: sequence impossible under model");
    return ll;
}

inline double hqmm_loglik(const KrausSet& kraus, const SymbolSequence& seq) {
    return hqmm_loglik(kraus, seq, DensityMatrix::maximally_mixed(kraus.n));
}

// Draw y proportional to hqmm_output_probs, then filter; the first burn_in
// symbols are discarded.
inline SymbolSequence hqmm_sample(const KrausSet& kraus, const DensityMatrix& rho0,
                                  std::size_t length, std::size_t burn_in,
                                  std::uint64_t rng_seed) {
    if (length < 1) throw std::invalid_argument("hqmm_sample: length must be >= 1");
    Rng rng(rng_seed);
    HqmmState state{rho0, 0.0};
    SymbolSequence out;
    out.reserve(length);
    for (std::size_t t = 0; t < burn_in + length; ++t) {
        const auto probs = hqmm_output_probs(kraus, state.rho);
        const Symbol y = static_cast<Symbol>(rng.categorical(probs));
        state = hqmm_step(state, kraus, y);
        state.log_scale = 0.0;  // only the state matters while sampling
        if (t >= burn_in) out.push_back(y);
    }
    return out;
}

inline SymbolSequence hqmm_sample(const KrausSet& kraus, std::size_t length,
                                  std::size_t burn_in, std::uint64_t rng_seed) {
    return hqmm_sample(kraus, DensityMatrix::maximally_mixed(kraus.n), length, burn_in,
                       rng_seed);
}

}  // namespace hqmm
