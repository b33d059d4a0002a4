// serialize.hpp
// JSON encodings for models, unitaries, rotation lists, train configs and
// checkpoints. Complex matrices are stored as interleaved (re, im) row-major
// arrays; JSON number printing round-trips doubles exactly, so save/load is
// bit-faithful.

#pragma once

#include <fstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "hqmm/builtin_models.hpp"
#include "hqmm/complex_matrix.hpp"
#include "hqmm/conversion.hpp"
#include "hqmm/givens.hpp"
#include "hqmm/hmm.hpp"
#include "hqmm/kraus.hpp"
#include "hqmm/learner.hpp"
#include "hqmm/stacked_kraus.hpp"

namespace hqmm {

inline nlohmann::json complex_matrix_to_json(const ComplexMatrix& m) {
    std::vector<double> flat;
    flat.reserve(2 * m.rows() * m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) {
            flat.push_back(m(i, j).real());
            flat.push_back(m(i, j).imag());
        }
    return flat;
}

inline ComplexMatrix complex_matrix_from_json(const nlohmann::json& j, std::size_t rows,
                                              std::size_t cols) {
    const auto flat = j.get<std::vector<double>>();
    if (flat.size() != 2 * rows * cols)
        throw std::invalid_argument("complex_matrix_from_json: wrong entry count");
    ComplexMatrix m(rows, cols);
    std::size_t k = 0;
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t jc = 0; jc < cols; ++jc) {
            m(i, jc) = cdouble{flat[k], flat[k + 1]};
            k += 2;
        }
    return m;
}

inline nlohmann::json kraus_to_json(const KrausSet& ks) {
    nlohmann::json ops = nlohmann::json::array();
    for (std::size_t y = 0; y < ks.s; ++y) {
        nlohmann::json branch = nlohmann::json::array();
        for (std::size_t k = 0; k < ks.w; ++k)
            branch.push_back(complex_matrix_to_json(ks.ops[y][k]));
        ops.push_back(std::move(branch));
    }
    return {{"format", "hqmm-model"},
            {"kind", "hqmm"},
            {"n", ks.n},
            {"s", ks.s},
            {"w", ks.w},
            {"ops", std::move(ops)}};
}

inline KrausSet kraus_from_json(const nlohmann::json& j) {
    KrausSet ks = KrausSet::zeros(j.at("n").get<std::size_t>(), j.at("s").get<std::size_t>(),
                                  j.at("w").get<std::size_t>());
    const auto& ops = j.at("ops");
    if (ops.size() != ks.s) throw std::invalid_argument("kraus_from_json: wrong output count");
    for (std::size_t y = 0; y < ks.s; ++y) {
        if (ops[y].size() != ks.w)
            throw std::invalid_argument("kraus_from_json: wrong branch count");
        for (std::size_t k = 0; k < ks.w; ++k)
            ks.ops[y][k] = complex_matrix_from_json(ops[y][k], ks.n, ks.n);
    }
    return ks;
}

inline nlohmann::json hmm_to_json(const HmmParams& p) {
    return {{"format", "hqmm-model"}, {"kind", "hmm"}, {"n", p.n}, {"s", p.s},
            {"A", p.A},              {"C", p.C},       {"prior", p.prior}};
}

inline HmmParams hmm_from_json(const nlohmann::json& j) {
    HmmParams p;
    p.n = j.at("n").get<std::size_t>();
    p.s = j.at("s").get<std::size_t>();
    p.A = j.at("A").get<RealMatrix>();
    p.C = j.at("C").get<RealMatrix>();
    p.prior = j.at("prior").get<std::vector<double>>();
    p.validate(1e-8);
    return p;
}

inline nlohmann::json model_to_json(const BuiltinModel& model) {
    if (std::holds_alternative<KrausSet>(model))
        return kraus_to_json(std::get<KrausSet>(model));
    return hmm_to_json(std::get<HmmParams>(model));
}

inline BuiltinModel model_from_json(const nlohmann::json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "hqmm") return kraus_from_json(j);
    if (kind == "hmm") return hmm_from_json(j);
    throw std::invalid_argument("model_from_json: unknown kind '" + kind + "'");
}

inline nlohmann::json unitary_to_json(const UnitaryMatrix& u) {
    return {{"format", "hqmm-unitary"}, {"dim", u.dim}, {"mat", complex_matrix_to_json(u.mat)}};
}

inline UnitaryMatrix unitary_from_json(const nlohmann::json& j) {
    const std::size_t dim = j.at("dim").get<std::size_t>();
    return UnitaryMatrix(complex_matrix_from_json(j.at("mat"), dim, dim));
}

inline nlohmann::json rotations_to_json(const std::vector<HRotation>& rots) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rots)
        arr.push_back({{"i", r.i},
                       {"j", r.j},
                       {"theta", r.theta},
                       {"phi", r.phi},
                       {"psi", r.psi},
                       {"delta", r.delta}});
    return {{"format", "hqmm-rotations"}, {"factors", std::move(arr)}};
}

inline std::vector<HRotation> rotations_from_json(const nlohmann::json& j) {
    std::vector<HRotation> rots;
    for (const auto& r : j.at("factors"))
        rots.push_back({r.at("i").get<std::size_t>(), r.at("j").get<std::size_t>(),
                        r.at("theta").get<double>(), r.at("phi").get<double>(),
                        r.at("psi").get<double>(), r.at("delta").get<double>()});
    return rots;
}

inline nlohmann::json train_config_to_json(const TrainConfig& cfg) {
    nlohmann::json schedule = nlohmann::json::array();
    for (const auto& ph : cfg.schedule)
        schedule.push_back({ph.batch_size, ph.num_iterations});
    return {{"batch_size", cfg.batch_size},
            {"total_batches", cfg.total_batches},
            {"num_iterations", cfg.num_iterations},
            {"rng_seed", cfg.rng_seed},
            {"schedule", std::move(schedule)},
            {"nm_max_evals", cfg.nm_max_evals},
            {"nm_restarts", cfg.nm_restarts},
            {"min_improvement", cfg.min_improvement},
            {"check_invariants", cfg.check_invariants}};
}

inline TrainConfig train_config_from_json(const nlohmann::json& j) {
    TrainConfig cfg;
    cfg.batch_size = j.value("batch_size", cfg.batch_size);
    cfg.total_batches = j.value("total_batches", cfg.total_batches);
    cfg.num_iterations = j.value("num_iterations", cfg.num_iterations);
    cfg.rng_seed = j.value("rng_seed", cfg.rng_seed);
    if (j.contains("schedule")) {
        cfg.schedule.clear();
        for (const auto& ph : j["schedule"])
            cfg.schedule.push_back({ph.at(0).get<std::size_t>(), ph.at(1).get<std::size_t>()});
    }
    cfg.nm_max_evals = j.value("nm_max_evals", cfg.nm_max_evals);
    cfg.nm_restarts = j.value("nm_restarts", cfg.nm_restarts);
    cfg.min_improvement = j.value("min_improvement", cfg.min_improvement);
    cfg.check_invariants = j.value("check_invariants", cfg.check_invariants);
    cfg.validate();
    return cfg;
}

inline nlohmann::json checkpoint_to_json(const TrainCheckpoint& ck, const TrainConfig& cfg) {
    return {{"format", "hqmm-checkpoint"},
            {"n", ck.sk.n},
            {"s", ck.sk.s},
            {"w", ck.sk.w},
            {"kappa", complex_matrix_to_json(ck.sk.kappa)},
            {"rng_state", ck.rng_state},
            {"batches_done", ck.batches_done},
            {"config", train_config_to_json(cfg)}};
}

inline std::pair<TrainCheckpoint, TrainConfig> checkpoint_from_json(const nlohmann::json& j) {
    TrainCheckpoint ck;
    ck.sk.n = j.at("n").get<std::size_t>();
    ck.sk.s = j.at("s").get<std::size_t>();
    ck.sk.w = j.at("w").get<std::size_t>();
    ck.sk.kappa = complex_matrix_from_json(j.at("kappa"), ck.sk.num_rows(), ck.sk.n);
    ck.rng_state = j.at("rng_state").get<std::string>();
    ck.batches_done = j.at("batches_done").get<std::size_t>();
    return {std::move(ck), train_config_from_json(j.at("config"))};
}

inline void save_json(const nlohmann::json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_json: cannot open " + path);
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("save_json: write failed for " + path);
}

inline nlohmann::json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_json: cannot open " + path);
    return nlohmann::json::parse(in);
}

}  // namespace hqmm
