// hmm.hpp
// Classical hidden Markov models: forward filtering in observable-operator
// form, ancestral sampling, and a Baum-Welch EM baseline.
//
// Conventions: A and C are column-stochastic (A[i][j] = P(i_t | j_{t-1}),
// C[y][i] = P(y | i)); the belief starts at the prior and every step applies
// a transition before emitting, so P(y_1..y_l) = 1^T T_{y_l} ... T_{y_1} pi.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "hqmm/errors.hpp"
#include "hqmm/rng.hpp"

namespace hqmm {

using Symbol = int;                       // 0-based output symbol
using SymbolSequence = std::vector<Symbol>;

using RealMatrix = std::vector<std::vector<double>>;  // [row][col]

struct HmmParams {
    std::size_t n = 0;            // hidden states
    std::size_t s = 0;            // output symbols
    RealMatrix A;                 // n x n, column-stochastic
    RealMatrix C;                 // s x n, column-stochastic
    std::vector<double> prior;    // length n

    bool is_valid(double tol = 1e-10) const {
        if (A.size() != n || C.size() != s || prior.size() != n) return false;
        for (std::size_t j = 0; j < n; ++j) {
            double col_a = 0.0, col_c = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (A[i].size() != n || A[i][j] < 0.0) return false;
                col_a += A[i][j];
            }
            for (std::size_t y = 0; y < s; ++y) {
                if (C[y].size() != n || C[y][j] < 0.0) return false;
                col_c += C[y][j];
            }
            if (std::abs(col_a - 1.0) > tol || std::abs(col_c - 1.0) > tol) return false;
        }
        double p = 0.0;
        for (double v : prior) {
            if (v < 0.0) return false;
            p += v;
        }
        return std::abs(p - 1.0) <= tol;
    }

    void validate(double tol = 1e-10) const {
        if (!is_valid(tol))
            throw std::invalid_argument("HmmParams: columns must be stochastic, prior a distribution");
    }

    static std::vector<double> uniform_prior(std::size_t n) {
        return std::vector<double>(n, 1.0 / static_cast<double>(n));
    }
};

// T_y = diag(C[y,:]) A; one operator per output symbol.
struct ObservableOperatorSet {
    std::size_t n = 0;
    std::size_t s = 0;
    std::vector<RealMatrix> T;  // s operators, each n x n
};

inline ObservableOperatorSet observable_operators(const HmmParams& params) {
    ObservableOperatorSet ops;
    ops.n = params.n;
    ops.s = params.s;
    ops.T.assign(params.s, RealMatrix(params.n, std::vector<double>(params.n, 0.0)));
    for (std::size_t y = 0; y < params.s; ++y)
        for (std::size_t i = 0; i < params.n; ++i)
            for (std::size_t j = 0; j < params.n; ++j)
                ops.T[y][i][j] = params.C[y][i] * params.A[i][j];
    return ops;
}

struct HmmForwardResult {
    double loglik = 0.0;
    std::vector<double> belief;  // filtered distribution after the last symbol
};

// Underflow-safe forward pass: renormalize the belief each step and accumulate
// the log of the normalizer.
inline HmmForwardResult hmm_forward(const HmmParams& params, const SymbolSequence& seq) {
    const std::size_t n = params.n;
    std::vector<double> x = params.prior;
    std::vector<double> next(n);
    double loglik = 0.0;
    for (std::size_t t = 0; t < seq.size(); ++t) {
        const Symbol y = seq[t];
        if (y < 0 || static_cast<std::size_t>(y) >= params.s)
            throw std::invalid_argument("hmm_forward: symbol out of range at position " +
                                        std::to_string(t));
        double norm = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) acc += params.A[i][j] * x[j];
            next[i] = params.C[y][i] * acc;
            norm += next[i];
        }
        if (norm < kZeroProbability)
            throw impossible_observation("hmm_forward: sequence impossible under model (step " +
                                         std::to_string(t) + ")");
        for (std::size_t i = 0; i < n; ++i) x[i] = next[i] / norm;
        loglik += std::log(norm);
    }
    return {loglik, std::move(x)};
}

inline double hmm_loglik(const HmmParams& params, const SymbolSequence& seq) {
    return hmm_forward(params, seq).loglik;
}

// Ancestral sampling; the first burn_in emissions are discarded.
inline SymbolSequence hmm_sample(const HmmParams& params, std::size_t length,
                                 std::size_t burn_in, std::uint64_t rng_seed) {
    if (length < 1) throw std::invalid_argument("hmm_sample: length must be >= 1");
    Rng rng(rng_seed);
    const std::size_t n = params.n;
    std::size_t state = rng.categorical(params.prior);
    SymbolSequence out;
    out.reserve(length);
    std::vector<double> col(n);
    for (std::size_t t = 0; t < burn_in + length; ++t) {
        for (std::size_t i = 0; i < n; ++i) col[i] = params.A[i][state];
        state = rng.categorical(col);
        std::vector<double> emit(params.s);
        for (std::size_t y = 0; y < params.s; ++y) emit[y] = params.C[y][state];
        const Symbol sym = static_cast<Symbol>(rng.categorical(emit));
        if (t >= burn_in) out.push_back(sym);
    }
    return out;
}

// Long-run state distribution of A via Cesaro-averaged power iteration, which
// also converges for periodic chains.
inline std::vector<double> stationary_distribution(const RealMatrix& A, std::size_t n,
                                                   std::size_t iters = 20000) {
    std::vector<double> x(n, 1.0 / static_cast<double>(n));
    std::vector<double> avg(n, 0.0);
    std::vector<double> next(n);
    for (std::size_t t = 0; t < iters; ++t) {
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) acc += A[i][j] * x[j];
            next[i] = acc;
        }
        x = next;
        for (std::size_t i = 0; i < n; ++i) avg[i] += x[i];
    }
    double total = 0.0;
    for (double v : avg) total += v;
    for (double& v : avg) v /= total;
    return avg;
}

inline HmmParams random_hmm(std::size_t n, std::size_t s, Rng& rng) {
    auto dirichlet_column = [&rng](std::size_t len) {
        std::vector<double> col(len);
        double total = 0.0;
        for (double& v : col) {
            double u = rng.uniform();
            if (u < 1e-300) u = 1e-300;
            v = -std::log(u);
            total += v;
        }
        for (double& v : col) v /= total;
        return col;
    };
    HmmParams p;
    p.n = n;
    p.s = s;
    p.A.assign(n, std::vector<double>(n, 0.0));
    p.C.assign(s, std::vector<double>(n, 0.0));
    for (std::size_t j = 0; j < n; ++j) {
        const auto a_col = dirichlet_column(n);
        for (std::size_t i = 0; i < n; ++i) p.A[i][j] = a_col[i];
        const auto c_col = dirichlet_column(s);
        for (std::size_t y = 0; y < s; ++y) p.C[y][j] = c_col[y];
    }
    p.prior = dirichlet_column(n);
    return p;
}

struct SequenceDatasetView {
    const std::vector<SymbolSequence>* sequences = nullptr;
};

struct BaumWelchReport {
    // One log-likelihood trace per restart (training set, per EM iteration).
    std::vector<std::vector<double>> loglik_traces;
    std::size_t best_restart = 0;
    double best_loglik = -std::numeric_limits<double>::infinity();
};

// EM re-estimation with scaled forward-backward, matching the filtering
// convention above (hidden state at "time 0" carries no emission). Restarts
// use Dirichlet(1) random columns; the restart with the best training
// log-likelihood wins.
inline HmmParams baum_welch(const std::vector<SymbolSequence>& data, std::size_t n,
                            std::size_t s, std::size_t restarts, std::size_t max_iters,
                            double tol, std::uint64_t rng_seed,
                            BaumWelchReport* report = nullptr) {
    if (data.empty()) throw std::invalid_argument("baum_welch: empty dataset");
    if (n < 1) throw std::invalid_argument("baum_welch: n must be >= 1");
    if (restarts < 1 || max_iters < 1)
        throw std::invalid_argument("baum_welch: restarts and max_iters must be >= 1");
    for (const auto& seq : data)
        for (Symbol y : seq)
            if (y < 0 || static_cast<std::size_t>(y) >= s)
                throw std::invalid_argument("baum_welch: symbol out of range");

    HmmParams best;
    double best_ll = -std::numeric_limits<double>::infinity();
    if (report) {
        report->loglik_traces.clear();
        report->best_restart = 0;
    }

    for (std::size_t r = 0; r < restarts; ++r) {
        Rng rng(derive_seed(rng_seed, r));
        HmmParams p = random_hmm(n, s, rng);
        std::vector<double> trace;
        double prev_ll = -std::numeric_limits<double>::infinity();

        for (std::size_t iter = 0; iter < max_iters; ++iter) {
            // Accumulators for the M-step.
            RealMatrix a_num(n, std::vector<double>(n, 0.0));
            std::vector<double> a_den(n, 0.0);
            RealMatrix c_num(s, std::vector<double>(n, 0.0));
            std::vector<double> c_den(n, 0.0);
            std::vector<double> pi_acc(n, 0.0);
            double total_ll = 0.0;

            for (const auto& seq : data) {
                const std::size_t len = seq.size();
                // Scaled forward: alpha[t] is the filtered belief after t
                // symbols; scale[t] the per-step normalizer.
                std::vector<std::vector<double>> alpha(len + 1, std::vector<double>(n));
                std::vector<double> scale(len + 1, 1.0);
                alpha[0] = p.prior;
                for (std::size_t t = 1; t <= len; ++t) {
                    const Symbol y = seq[t - 1];
                    double norm = 0.0;
                    for (std::size_t i = 0; i < n; ++i) {
                        double acc = 0.0;
                        for (std::size_t j = 0; j < n; ++j) acc += p.A[i][j] * alpha[t - 1][j];
                        alpha[t][i] = p.C[y][i] * acc;
                        norm += alpha[t][i];
                    }
                    if (norm < kZeroProbability)
                        throw impossible_observation("baum_welch: training sequence impossible");
                    for (std::size_t i = 0; i < n; ++i) alpha[t][i] /= norm;
                    scale[t] = norm;
                    total_ll += std::log(norm);
                }
                // Scaled backward.
                std::vector<std::vector<double>> beta(len + 1, std::vector<double>(n, 1.0));
                for (std::size_t t = len; t-- > 0;) {
                    const Symbol y = seq[t];
                    for (std::size_t j = 0; j < n; ++j) {
                        double acc = 0.0;
                        for (std::size_t i = 0; i < n; ++i)
                            acc += p.A[i][j] * p.C[y][i] * beta[t + 1][i];
                        beta[t][j] = acc / scale[t + 1];
                    }
                }
                // Posteriors.
                for (std::size_t t = 0; t <= len; ++t) {
                    const bool for_a = t < len;
                    const bool for_c = t >= 1;
                    for (std::size_t j = 0; j < n; ++j) {
                        const double gamma = alpha[t][j] * beta[t][j];
                        if (for_a) a_den[j] += gamma;
                        if (for_c) {
                            c_num[seq[t - 1]][j] += gamma;
                            c_den[j] += gamma;
                        }
                        if (t == 0) pi_acc[j] += gamma;
                    }
                    if (for_a) {
                        const Symbol y = seq[t];
                        for (std::size_t i = 0; i < n; ++i)
                            for (std::size_t j = 0; j < n; ++j)
                                a_num[i][j] += alpha[t][j] * p.A[i][j] * p.C[y][i] *
                                               beta[t + 1][i] / scale[t + 1];
                    }
                }
            }

            trace.push_back(total_ll);
            // M-step.
            for (std::size_t j = 0; j < n; ++j) {
                if (a_den[j] > 0.0)
                    for (std::size_t i = 0; i < n; ++i) p.A[i][j] = a_num[i][j] / a_den[j];
                if (c_den[j] > 0.0)
                    for (std::size_t y = 0; y < s; ++y) p.C[y][j] = c_num[y][j] / c_den[j];
            }
            double pi_total = 0.0;
            for (double v : pi_acc) pi_total += v;
            if (pi_total > 0.0)
                for (std::size_t j = 0; j < n; ++j) p.prior[j] = pi_acc[j] / pi_total;

            if (iter > 0 && std::abs(total_ll - prev_ll) <
                                tol * std::max(1.0, std::abs(prev_ll))) {
                prev_ll = total_ll;
                break;
            }
            prev_ll = total_ll;
        }

        if (report) report->loglik_traces.push_back(trace);
        const double final_ll = trace.empty() ? -std::numeric_limits<double>::infinity()
                                              : trace.back();
        if (final_ll > best_ll) {
            best_ll = final_ll;
            best = p;
            if (report) report->best_restart = r;
        }
    }
    if (report) report->best_loglik = best_ll;
    return best;
}

}  // namespace hqmm
