// experiment.hpp
// Benchmark orchestration: dataset generation from a generator model,
// model-grid experiments with per-row parameter counts and train/test DA,
// CSV + JSON result writers, and the canned table specifications.
//
// Reproducibility contract: every random stream is derived from the spec
// seed and a fixed stream id, grid cells never share RNG state, and result
// assembly is ordered by row, so identical specs give identical CSV bytes no
// matter how many workers run.

#pragma once

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include <json.hpp>

#include "hqmm/builtin_models.hpp"
#include "hqmm/dataset.hpp"
#include "hqmm/hmm.hpp"
#include "hqmm/kraus.hpp"
#include "hqmm/learner.hpp"
#include "hqmm/metrics.hpp"
#include "hqmm/serialize.hpp"

namespace hqmm {

struct ScalePreset {
    std::string name;
    std::size_t m_train = 0;
    std::size_t m_val = 0;
    std::size_t length = 0;
    std::size_t burn_in = 0;
};

inline ScalePreset desk_scale() { return {"desk", 10, 5, 500, 200}; }
inline ScalePreset full_scale() { return {"full", 20, 10, 3000, 1000}; }

inline ScalePreset scale_by_name(const std::string& name) {
    if (name == "desk") return desk_scale();
    if (name == "full") return full_scale();
    throw std::invalid_argument("scale_by_name: expected 'desk' or 'full', got '" + name + "'");
}

enum class ModelKind { HqmmTrue, HqmmLearned, HmmTrue, HmmLearned };

struct GridEntry {
    ModelKind kind = ModelKind::HqmmLearned;
    std::size_t n = 0;
    std::size_t s = 0;
    std::size_t w = 1;  // ignored for HMM rows

    std::string label() const {
        const bool hqmm = kind == ModelKind::HqmmTrue || kind == ModelKind::HqmmLearned;
        const bool learned = kind == ModelKind::HqmmLearned || kind == ModelKind::HmmLearned;
        std::string out = std::to_string(n) + "," + std::to_string(s);
        if (hqmm) out += "," + std::to_string(w);
        out += hqmm ? "-HQMM" : "-HMM";
        out += learned ? " (L)" : " (T)";
        return out;
    }

    std::size_t param_count() const {
        const bool hqmm = kind == ModelKind::HqmmTrue || kind == ModelKind::HqmmLearned;
        return hqmm ? n * n * s * w : hmm_param_count(n, s);
    }
};

struct ExperimentSpec {
    std::string label;          // used in output file names
    std::string generator;      // builtin model name or a model file path
    std::vector<GridEntry> grid;
    std::size_t m_train = 10;
    std::size_t m_val = 5;
    std::size_t length = 500;
    std::size_t burn_in = 200;
    std::uint64_t seed = 0;

    std::size_t hmm_restarts = 10;
    std::size_t hmm_max_iters = 500;
    double hmm_tol = 1e-6;
    TrainConfig train_config = default_train_config();

    void validate() const {
        if (m_train < 1 || m_val < 1 || length < 1)
            throw std::invalid_argument("ExperimentSpec: sizes must be positive");
        if (grid.empty()) throw std::invalid_argument("ExperimentSpec: empty model grid");
    }
};

inline BuiltinModel resolve_generator(const std::string& generator) {
    if (is_builtin_model(generator)) return builtin_model(generator);
    return model_from_json(load_json(generator));
}

inline std::size_t generator_alphabet(const BuiltinModel& model) {
    if (std::holds_alternative<KrausSet>(model)) return std::get<KrausSet>(model).s;
    return std::get<HmmParams>(model).s;
}

// One split: M independent sequences, each with its own derived seed and its
// own burn-in. HMM generators start from their prior; HQMM generators from
// the maximally mixed state.
inline SequenceDataset generate_split(const BuiltinModel& model, const std::string& generator,
                                      const std::string& split, std::size_t m,
                                      std::size_t length, std::size_t burn_in,
                                      std::uint64_t split_seed) {
    SequenceDataset ds;
    ds.s = generator_alphabet(model);
    ds.metadata.generator = generator;
    ds.metadata.seed = split_seed;
    ds.metadata.burn_in = burn_in;
    ds.metadata.split = split;
    ds.sequences.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
        const std::uint64_t seq_seed = derive_seed(split_seed, i);
        if (std::holds_alternative<KrausSet>(model)) {
            ds.sequences.push_back(
                hqmm_sample(std::get<KrausSet>(model), length, burn_in, seq_seed));
            ds.metadata.notes["rho0"] = "maximally_mixed";
        } else {
            ds.sequences.push_back(
                hmm_sample(std::get<HmmParams>(model), length, burn_in, seq_seed));
            ds.metadata.notes["prior"] = "model_prior";
        }
    }
    return ds;
}

struct GeneratedData {
    SequenceDataset train;
    SequenceDataset validation;
};

inline GeneratedData generate_data(const ExperimentSpec& spec) {
    const BuiltinModel model = resolve_generator(spec.generator);
    GeneratedData out;
    out.train = generate_split(model, spec.generator, "train", spec.m_train, spec.length,
                               spec.burn_in, derive_seed(spec.seed, 101));
    out.validation = generate_split(model, spec.generator, "validation", spec.m_val,
                                    spec.length, spec.burn_in, derive_seed(spec.seed, 202));
    return out;
}

// Writes train.txt / val.txt plus metadata sidecars into out_dir.
inline GeneratedData generate_dataset(const ExperimentSpec& spec, const std::string& out_dir) {
    GeneratedData data = generate_data(spec);
    std::filesystem::create_directories(out_dir);
    save_dataset(data.train, (std::filesystem::path(out_dir) / "train.txt").string());
    save_dataset(data.validation, (std::filesystem::path(out_dir) / "val.txt").string());
    return data;
}

struct CellResult {
    GridEntry entry;
    std::string status = "ok";  // or "error: ..."
    DaScore train_da;
    DaScore test_da;
    BaumWelchReport em_report;    // HMM learned rows
    TrainReport train_report;     // HQMM learned rows
};

struct ExperimentResult {
    ExperimentSpec spec;
    GeneratedData data;
    std::vector<CellResult> cells;
};

inline std::size_t worker_count() {
    if (const char* env = std::getenv("HQMM_WORKERS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<std::size_t>(v);
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc ? hc : 1;
}

namespace detail {

inline CellResult run_cell(const ExperimentSpec& spec, const GeneratedData& data,
                           const BuiltinModel& generator, std::size_t cell_index) {
    const GridEntry entry = spec.grid[cell_index];
    CellResult cell;
    cell.entry = entry;
    const std::uint64_t cell_seed = derive_seed(spec.seed, 1000 + cell_index);
    try {
        switch (entry.kind) {
            case ModelKind::HqmmTrue: {
                const auto& model = std::get<KrausSet>(generator);
                if (model.n != entry.n || model.s != entry.s || model.w != entry.w)
                    throw std::invalid_argument("true-model row dims do not match generator");
                cell.train_da = da(model, data.train.sequences);
                cell.test_da = da(model, data.validation.sequences);
                break;
            }
            case ModelKind::HmmTrue: {
                const auto& model = std::get<HmmParams>(generator);
                if (model.n != entry.n || model.s != entry.s)
                    throw std::invalid_argument("true-model row dims do not match generator");
                cell.train_da = da(model, data.train.sequences);
                cell.test_da = da(model, data.validation.sequences);
                break;
            }
            case ModelKind::HqmmLearned: {
                TrainConfig cfg = spec.train_config;
                cfg.rng_seed = cell_seed;
                const TrainResult res =
                    train(data.train, entry.n, entry.s, entry.w, cfg, &data.validation);
                cell.train_da = da(res.model, data.train.sequences);
                cell.test_da = da(res.model, data.validation.sequences);
                cell.train_report = res.report;
                break;
            }
            case ModelKind::HmmLearned: {
                BaumWelchReport report;
                const HmmParams model =
                    baum_welch(data.train.sequences, entry.n, entry.s, spec.hmm_restarts,
                               spec.hmm_max_iters, spec.hmm_tol, cell_seed, &report);
                cell.train_da = da(model, data.train.sequences);
                cell.test_da = da(model, data.validation.sequences);
                cell.em_report = report;
                break;
            }
        }
    } catch (const std::exception& e) {
        cell.status = std::string("error: ") + e.what();
    }
    return cell;
}

}  // namespace detail

inline ExperimentResult run_experiment(const ExperimentSpec& spec) {
    spec.validate();
    ExperimentResult result;
    result.spec = spec;
    const BuiltinModel generator = resolve_generator(spec.generator);
    result.data = generate_data(spec);
    result.cells.resize(spec.grid.size());

    const std::size_t workers = std::min(worker_count(), spec.grid.size());
    if (workers <= 1) {
        for (std::size_t i = 0; i < spec.grid.size(); ++i)
            result.cells[i] = detail::run_cell(spec, result.data, generator, i);
    } else {
        std::atomic<std::size_t> next{0};
        auto work = [&]() {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= spec.grid.size()) break;
                result.cells[i] = detail::run_cell(spec, result.data, generator, i);
            }
        };
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    return result;
}

namespace detail {

inline std::string format_da(double v) {
    if (!std::isfinite(v)) return "";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

}  // namespace detail

inline void write_results_csv(const ExperimentResult& result, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_results_csv: cannot open " + path);
    out << "model,P,train_da_mean,train_da_std,test_da_mean,test_da_std,status\n";
    for (const auto& cell : result.cells) {
        out << '"' << cell.entry.label() << '"' << ',' << cell.entry.param_count() << ',';
        if (cell.status == "ok") {
            out << detail::format_da(cell.train_da.mean) << ','
                << detail::format_da(cell.train_da.stddev) << ','
                << detail::format_da(cell.test_da.mean) << ','
                << detail::format_da(cell.test_da.stddev) << ',';
        } else {
            out << ",,,,";
        }
        out << cell.status << '\n';
    }
    if (!out) throw std::runtime_error("write_results_csv: write failed for " + path);
}

inline nlohmann::json results_to_json(const ExperimentResult& result) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& cell : result.cells) {
        nlohmann::json row{{"model", cell.entry.label()},
                           {"P", cell.entry.param_count()},
                           {"status", cell.status},
                           {"train_da_mean", cell.train_da.mean},
                           {"train_da_std", cell.train_da.stddev},
                           {"test_da_mean", cell.test_da.mean},
                           {"test_da_std", cell.test_da.stddev},
                           {"train_da_per_sequence", cell.train_da.per_sequence},
                           {"test_da_per_sequence", cell.test_da.per_sequence}};
        if (cell.entry.kind == ModelKind::HmmLearned)
            row["em_loglik_traces"] = cell.em_report.loglik_traces;
        if (cell.entry.kind == ModelKind::HqmmLearned) {
            row["rotations_accepted"] = cell.train_report.accepted;
            row["rotations_rejected"] = cell.train_report.rejected;
        }
        rows.push_back(std::move(row));
    }
    const ExperimentSpec& spec = result.spec;
    return {{"label", spec.label},
            {"generator", spec.generator},
            {"seed", spec.seed},
            {"sizes",
             {{"m_train", spec.m_train},
              {"m_val", spec.m_val},
              {"length", spec.length},
              {"burn_in", spec.burn_in}}},
            {"hmm_restarts", spec.hmm_restarts},
            {"train_config", train_config_to_json(spec.train_config)},
            {"notes",
             {{"da_aggregation", "per-sequence DA, then mean and sample std over sequences"},
              {"train_da", "final model evaluated on the training split"},
              {"rho0", "maximally mixed unless stated"},
              {"hmm_prior", "uniform for generation and Dirichlet(1) inits for EM"}}},
            {"rows", std::move(rows)}};
}

// Canned table specifications over the four generators.
inline ExperimentSpec table_spec(int table, const ScalePreset& scale, std::uint64_t seed) {
    ExperimentSpec spec;
    spec.m_train = scale.m_train;
    spec.m_val = scale.m_val;
    spec.length = scale.length;
    spec.burn_in = scale.burn_in;
    spec.seed = seed;
    spec.label = "table" + std::to_string(table) + "_" + scale.name;
    switch (table) {
        case 2:
            spec.generator = "prob_clock";
            spec.grid = {{ModelKind::HqmmTrue, 2, 2, 1},    {ModelKind::HqmmLearned, 2, 2, 1},
                         {ModelKind::HmmLearned, 2, 2, 1},  {ModelKind::HmmLearned, 4, 2, 1},
                         {ModelKind::HmmLearned, 8, 2, 1}};
            break;
        case 3:
            spec.generator = "monras_2x4";
            spec.grid = {{ModelKind::HqmmTrue, 2, 4, 1},    {ModelKind::HqmmLearned, 2, 4, 1},
                         {ModelKind::HqmmLearned, 2, 4, 2}, {ModelKind::HmmLearned, 2, 4, 1},
                         {ModelKind::HmmLearned, 3, 4, 1},  {ModelKind::HmmLearned, 4, 4, 1}};
            break;
        case 4:
            spec.generator = "fully_quantum_2x6";
            spec.grid = {{ModelKind::HqmmTrue, 2, 6, 1},   {ModelKind::HqmmLearned, 2, 6, 1},
                         {ModelKind::HmmLearned, 2, 6, 1}, {ModelKind::HmmLearned, 3, 6, 1},
                         {ModelKind::HmmLearned, 4, 6, 1}, {ModelKind::HmmLearned, 5, 6, 1},
                         {ModelKind::HmmLearned, 6, 6, 1}};
            break;
        case 5:
            spec.generator = "handwritten_hmm_6x6";
            spec.grid = {{ModelKind::HmmTrue, 6, 6, 1},     {ModelKind::HqmmLearned, 2, 6, 1},
                         {ModelKind::HqmmLearned, 3, 6, 1}, {ModelKind::HqmmLearned, 4, 6, 1},
                         {ModelKind::HqmmLearned, 5, 6, 1}, {ModelKind::HqmmLearned, 5, 6, 2},
                         {ModelKind::HqmmLearned, 5, 6, 3}, {ModelKind::HqmmLearned, 5, 6, 5},
                         {ModelKind::HqmmLearned, 6, 6, 1}, {ModelKind::HqmmLearned, 6, 6, 2},
                         {ModelKind::HmmLearned, 2, 6, 1},  {ModelKind::HmmLearned, 3, 6, 1},
                         {ModelKind::HmmLearned, 4, 6, 1},  {ModelKind::HmmLearned, 5, 6, 1},
                         {ModelKind::HmmLearned, 6, 6, 1}};
            break;
        default:
            throw std::invalid_argument("table_spec: table must be 2, 3, 4 or 5");
    }
    return spec;
}

}  // namespace hqmm
