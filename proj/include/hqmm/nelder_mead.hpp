// nelder_mead.hpp
// Plain Nelder-Mead simplex minimization for very small dimensions.

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

namespace hqmm {

struct NelderMeadResult {
    std::vector<double> x;
    double value = std::numeric_limits<double>::infinity();
    std::size_t evaluations = 0;
};

// Minimizes f starting from a simplex around x0 with the given edge step.
// Stops when the function spread over the simplex drops below f_tol or the
// evaluation budget is spent.
inline NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                    std::vector<double> x0, double step,
                                    std::size_t max_evals, double f_tol = 1e-10) {
    const std::size_t dim = x0.size();
    const double alpha = 1.0, gamma = 2.0, beta = 0.5, sigma = 0.5;

    std::vector<std::vector<double>> pts(dim + 1, x0);
    for (std::size_t k = 0; k < dim; ++k) pts[k + 1][k] += step;

    std::size_t evals = 0;
    std::vector<double> vals(dim + 1);
    for (std::size_t k = 0; k <= dim && evals < max_evals; ++k) {
        vals[k] = f(pts[k]);
        ++evals;
    }

    std::vector<std::size_t> order(dim + 1);
    auto sort_simplex = [&]() {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
    };

    while (evals < max_evals) {
        sort_simplex();
        const std::size_t best = order[0], worst = order[dim];
        if (std::isfinite(vals[best]) && std::isfinite(vals[worst]) &&
            vals[worst] - vals[best] < f_tol)
            break;

        std::vector<double> centroid(dim, 0.0);
        for (std::size_t k = 0; k <= dim; ++k) {
            if (k == worst) continue;
            for (std::size_t d = 0; d < dim; ++d) centroid[d] += pts[k][d];
        }
        for (double& c : centroid) c /= static_cast<double>(dim);

        auto along = [&](double t) {
            std::vector<double> p(dim);
            for (std::size_t d = 0; d < dim; ++d)
                p[d] = centroid[d] + t * (centroid[d] - pts[worst][d]);
            return p;
        };

        const std::vector<double> reflected = along(alpha);
        const double f_reflected = f(reflected);
        ++evals;

        if (f_reflected < vals[order[0]]) {
            if (evals < max_evals) {
                const std::vector<double> expanded = along(gamma);
                const double f_expanded = f(expanded);
                ++evals;
                if (f_expanded < f_reflected) {
                    pts[worst] = expanded;
                    vals[worst] = f_expanded;
                    continue;
                }
            }
            pts[worst] = reflected;
            vals[worst] = f_reflected;
            continue;
        }
        if (f_reflected < vals[order[dim - 1]]) {
            pts[worst] = reflected;
            vals[worst] = f_reflected;
            continue;
        }
        if (evals < max_evals) {
            const std::vector<double> contracted = along(-beta);
            const double f_contracted = f(contracted);
            ++evals;
            if (f_contracted < vals[worst]) {
                pts[worst] = contracted;
                vals[worst] = f_contracted;
                continue;
            }
        }
        // Shrink toward the best vertex.
        for (std::size_t k = 0; k <= dim && evals < max_evals; ++k) {
            if (k == order[0]) continue;
            for (std::size_t d = 0; d < dim; ++d)
                pts[k][d] = pts[order[0]][d] + sigma * (pts[k][d] - pts[order[0]][d]);
            vals[k] = f(pts[k]);
            ++evals;
        }
    }

    sort_simplex();
    return {pts[order[0]], vals[order[0]], evals};
}

}  // namespace hqmm
