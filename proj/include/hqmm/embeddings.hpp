// embeddings.hpp
// Fixed matrices that express ancilla tensoring and partial traces as plain
// matrix products, for a joint system of an n-state and an s-state particle.
//
//   W            (ns x n): rho -> W rho W^dag equals rho (x) e1 e1^dag.
//   v_measured[y] (n x ns): after projecting the second particle onto y,
//                           V_y P_y rho P_y^dag V_y^dag traces it out.
//   v_trace[w]   (s x ns):  sum_w V_w rho V_w^dag traces out the first
//                           particle with no measurement; one matrix per
//                           basis state of the first particle.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "hqmm/complex_matrix.hpp"

namespace hqmm {

struct EmbeddingMatrices {
    std::size_t n = 0;  // dimension kept by W (first particle)
    std::size_t s = 0;  // ancilla dimension (second particle)
    ComplexMatrix W;
    std::vector<ComplexMatrix> v_measured;
    std::vector<ComplexMatrix> v_trace;
};

inline EmbeddingMatrices build_embeddings(std::size_t n, std::size_t s) {
    if (n < 1 || s < 1) throw std::invalid_argument("build_embeddings: dims must be >= 1");
    EmbeddingMatrices em;
    em.n = n;
    em.s = s;

    em.W = ComplexMatrix(n * s, n);
    for (std::size_t i = 0; i < n; ++i) em.W(i * s, i) = 1.0;

    em.v_measured.reserve(s);
    for (std::size_t y = 0; y < s; ++y) {
        ComplexMatrix v(n, n * s);
        for (std::size_t i = 0; i < n; ++i) v(i, i * s + y) = 1.0;
        em.v_measured.push_back(std::move(v));
    }

    em.v_trace.reserve(n);
    for (std::size_t w = 0; w < n; ++w) {
        ComplexMatrix v(s, n * s);
        for (std::size_t r = 0; r < s; ++r) v(r, w * s + r) = 1.0;
        em.v_trace.push_back(std::move(v));
    }
    return em;
}

}  // namespace hqmm
