// builtin_models.hpp
// The four benchmark generators: the probability clock, the 2-state 4-output
// model, its fully quantum 6-output extension, and a hand-written 6-state
// HMM with full-rank transition and emission matrices.

#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "hqmm/hmm.hpp"
#include "hqmm/kraus.hpp"

namespace hqmm {

using BuiltinModel = std::variant<KrausSet, HmmParams>;

// 2-state, 2-output model with one operator per output; the probability of
// emitting symbol 1 oscillates with the length of the preceding run of 1s,
// which no finite-dimensional HMM reproduces.
inline KrausSet probability_clock() {
    KrausSet ks = KrausSet::zeros(2, 2, 1);
    const double c = std::cos(0.6), s = std::sin(0.6);
    ks.ops[0][0](0, 0) = 0.6 * c;
    ks.ops[0][0](0, 1) = -s;
    ks.ops[0][0](1, 0) = 0.6 * s;
    ks.ops[0][0](1, 1) = c;
    ks.ops[1][0](0, 0) = 0.8;
    return ks;
}

// 2-state, 4-output model needing at least 3 classical states.
inline KrausSet monras_2x4() {
    KrausSet ks = KrausSet::zeros(2, 4, 1);
    const double a = 1.0 / std::sqrt(2.0);
    const double b = 1.0 / (2.0 * std::sqrt(2.0));
    ks.ops[0][0](0, 0) = a;
    ks.ops[1][0](1, 1) = a;
    ks.ops[2][0](0, 0) = b;
    ks.ops[2][0](0, 1) = b;
    ks.ops[2][0](1, 0) = b;
    ks.ops[2][0](1, 1) = b;
    ks.ops[3][0](0, 0) = b;
    ks.ops[3][0](0, 1) = -b;
    ks.ops[3][0](1, 0) = -b;
    ks.ops[3][0](1, 1) = b;
    return ks;
}

// Spin-measurement process: outputs 1..6 encode up/down along z, x, y. The
// two extra operators carry the complex entries; no equivalent-sized HMM,
// NOOM, or OOM is known.
inline KrausSet fully_quantum_2x6() {
    KrausSet ks = KrausSet::zeros(2, 6, 1);
    const double a = 1.0 / std::sqrt(3.0);
    const double b = 1.0 / (2.0 * std::sqrt(3.0));
    const cdouble ib{0.0, 1.0 / (2.0 * std::sqrt(3.0))};
    ks.ops[0][0](0, 0) = a;
    ks.ops[1][0](1, 1) = a;
    ks.ops[2][0](0, 0) = b;
    ks.ops[2][0](0, 1) = b;
    ks.ops[2][0](1, 0) = b;
    ks.ops[2][0](1, 1) = b;
    ks.ops[3][0](0, 0) = b;
    ks.ops[3][0](0, 1) = -b;
    ks.ops[3][0](1, 0) = -b;
    ks.ops[3][0](1, 1) = b;
    ks.ops[4][0](0, 0) = b;
    ks.ops[4][0](0, 1) = -ib;
    ks.ops[4][0](1, 0) = ib;
    ks.ops[4][0](1, 1) = b;
    ks.ops[5][0](0, 0) = b;
    ks.ops[5][0](0, 1) = ib;
    ks.ops[5][0](1, 0) = -ib;
    ks.ops[5][0](1, 1) = b;
    return ks;
}

inline HmmParams handwritten_hmm_6x6() {
    HmmParams p;
    p.n = 6;
    p.s = 6;
    p.A = {
        {0.8, 0.01, 0.0, 0.1, 0.3, 0.0},
        {0.02, 0.02, 0.1, 0.15, 0.05, 0.0},
        {0.08, 0.03, 0.1, 0.4, 0.05, 0.5},
        {0.05, 0.04, 0.5, 0.35, 0.0, 0.5},
        {0.03, 0.5, 0.03, 0.0, 0.6, 0.0},
        {0.02, 0.4, 0.27, 0.0, 0.0, 0.0},
    };
    p.C = {
        {0.2, 0.0, 0.05, 0.95, 0.01, 0.05},
        {0.7, 0.1, 0.05, 0.01, 0.05, 0.05},
        {0.05, 0.8, 0.1, 0.02, 0.05, 0.04},
        {0.04, 0.04, 0.02, 0.0, 0.84, 0.11},
        {0.01, 0.03, 0.7, 0.01, 0.02, 0.2},
        {0.0, 0.03, 0.08, 0.01, 0.03, 0.55},
    };
    p.prior = HmmParams::uniform_prior(6);
    return p;
}

inline BuiltinModel builtin_model(const std::string& name) {
    if (name == "prob_clock") return probability_clock();
    if (name == "monras_2x4") return monras_2x4();
    if (name == "fully_quantum_2x6") return fully_quantum_2x6();
    if (name == "handwritten_hmm_6x6") return handwritten_hmm_6x6();
    throw std::invalid_argument("builtin_model: unknown name '" + name +
                                "' (expected prob_clock, monras_2x4, fully_quantum_2x6, "
                                "handwritten_hmm_6x6)");
}

inline bool is_builtin_model(const std::string& name) {
    return name == "prob_clock" || name == "monras_2x4" || name == "fully_quantum_2x6" ||
           name == "handwritten_hmm_6x6";
}

}  // namespace hqmm
