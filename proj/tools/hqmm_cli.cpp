// hqmm_cli.cpp
// Command-line front end: dataset generation, HQMM/HMM training, evaluation,
// HMM-to-HQMM conversion, unitary factorization, and table reproduction.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <variant>

#include <CLI11.hpp>

#include "hqmm/hqmm.hpp"

namespace {

hqmm::ExperimentSpec sizes_to_spec(const std::string& generator, std::size_t m_train,
                                   std::size_t m_val, std::size_t len, std::size_t burn_in,
                                   std::uint64_t seed) {
    hqmm::ExperimentSpec spec;
    spec.generator = generator;
    spec.m_train = m_train;
    spec.m_val = m_val;
    spec.length = len;
    spec.burn_in = burn_in;
    spec.seed = seed;
    spec.grid = {{hqmm::ModelKind::HqmmLearned, 1, 1, 1}};  // unused by generate
    return spec;
}

void print_da(const char* split, const hqmm::DaScore& score) {
    std::printf("%s DA: %.4f (%.4f) over %zu sequences\n", split, score.mean, score.stddev,
                score.per_sequence.size());
}

int run_generate(const std::string& model, const std::string& out_dir, std::size_t m_train,
                 std::size_t m_val, std::size_t len, std::size_t burn_in,
                 std::uint64_t seed) {
    const auto spec = sizes_to_spec(model, m_train, m_val, len, burn_in, seed);
    const auto data = hqmm::generate_dataset(spec, out_dir);
    std::printf("wrote %zu train and %zu validation sequences of length %zu to %s\n",
                data.train.num_sequences(), data.validation.num_sequences(), data.train.length(),
                out_dir.c_str());
    return 0;
}

int run_train_hqmm(const std::string& data_path, const std::string& val_path, std::size_t n,
                   std::size_t s, std::size_t w, std::uint64_t seed,
                   const std::string& out_path, const std::string& config_path,
                   const std::string& checkpoint_out, const std::string& resume_path,
                   std::optional<std::size_t> batches_override) {
    const hqmm::SequenceDataset data = hqmm::load_dataset(data_path);
    std::optional<hqmm::SequenceDataset> val;
    if (!val_path.empty()) val = hqmm::load_dataset(val_path);

    hqmm::TrainConfig cfg = hqmm::default_train_config(seed);
    hqmm::TrainCheckpoint checkpoint;
    if (!resume_path.empty()) {
        auto [ck, stored_cfg] = hqmm::checkpoint_from_json(hqmm::load_json(resume_path));
        checkpoint = std::move(ck);
        cfg = stored_cfg;
        if (checkpoint.sk.n != n || checkpoint.sk.s != s || checkpoint.sk.w != w)
            throw std::invalid_argument("resume: checkpoint dims do not match --n/--s/--w");
    } else if (!config_path.empty()) {
        cfg = hqmm::train_config_from_json(hqmm::load_json(config_path));
        cfg.rng_seed = seed;
    } else {
        cfg.rng_seed = seed;
    }
    if (batches_override) cfg.total_batches = *batches_override;

    const hqmm::TrainResult result =
        hqmm::train(data, n, s, w, cfg, val ? &*val : nullptr, &checkpoint);
    hqmm::save_json(hqmm::kraus_to_json(result.model), out_path);
    if (!checkpoint_out.empty())
        hqmm::save_json(hqmm::checkpoint_to_json(checkpoint, cfg), checkpoint_out);

    std::printf("accepted %zu rotations, rejected %zu\n", result.report.accepted,
                result.report.rejected);
    std::printf("train DA: %.4f\n", result.report.final_train_da);
    if (val) std::printf("validation DA: %.4f\n", result.report.final_validation_da);
    std::printf("model written to %s\n", out_path.c_str());
    return 0;
}

int run_train_hmm(const std::string& data_path, const std::string& val_path, std::size_t n,
                  std::uint64_t seed, std::size_t restarts, const std::string& out_path) {
    const hqmm::SequenceDataset data = hqmm::load_dataset(data_path);
    hqmm::BaumWelchReport report;
    const hqmm::HmmParams model =
        hqmm::baum_welch(data.sequences, n, data.s, restarts, 500, 1e-6, seed, &report);
    hqmm::save_json(hqmm::hmm_to_json(model), out_path);
    print_da("train", hqmm::da(model, data.sequences));
    if (!val_path.empty()) {
        const auto val = hqmm::load_dataset(val_path);
        print_da("validation", hqmm::da(model, val.sequences));
    }
    std::printf("model written to %s (best of %zu restarts)\n", out_path.c_str(), restarts);
    return 0;
}

int run_evaluate(const std::string& model_path, const std::string& data_path,
                 const std::string& out_path) {
    const hqmm::BuiltinModel model =
        hqmm::is_builtin_model(model_path)
            ? hqmm::builtin_model(model_path)
            : hqmm::model_from_json(hqmm::load_json(model_path));
    const hqmm::SequenceDataset data = hqmm::load_dataset(data_path);
    hqmm::DaScore score;
    if (std::holds_alternative<hqmm::KrausSet>(model))
        score = hqmm::da(std::get<hqmm::KrausSet>(model), data.sequences);
    else
        score = hqmm::da(std::get<hqmm::HmmParams>(model), data.sequences);
    print_da(data.metadata.split.empty() ? "dataset" : data.metadata.split.c_str(), score);
    if (!out_path.empty()) {
        hqmm::save_json({{"da_mean", score.mean},
                         {"da_std", score.stddev},
                         {"da_per_sequence", score.per_sequence},
                         {"model", model_path},
                         {"data", data_path}},
                        out_path);
        std::printf("scores written to %s\n", out_path.c_str());
    }
    return 0;
}

int run_convert(const std::string& in_path, const std::string& out_path,
                const std::string& method) {
    const hqmm::BuiltinModel model =
        hqmm::is_builtin_model(in_path) ? hqmm::builtin_model(in_path)
                                        : hqmm::model_from_json(hqmm::load_json(in_path));
    if (!std::holds_alternative<hqmm::HmmParams>(model))
        throw std::invalid_argument("convert: input must be an HMM model");
    const auto& params = std::get<hqmm::HmmParams>(model);
    const hqmm::KrausSet ks = method == "circuit" ? hqmm::hmm_to_hqmm_circuit(params)
                                                  : hqmm::hmm_to_hqmm_sqrt(params);
    hqmm::save_json(hqmm::kraus_to_json(ks), out_path);
    std::printf("wrote %zu,%zu,%zu-HQMM (%s construction) to %s\n", ks.n, ks.s, ks.w,
                method.c_str(), out_path.c_str());
    return 0;
}

int run_factor(const std::string& in_path, const std::string& out_path, bool verify) {
    const hqmm::UnitaryMatrix u = hqmm::unitary_from_json(hqmm::load_json(in_path));
    const auto factors = hqmm::factor_unitary(u);
    if (verify) {
        const hqmm::UnitaryMatrix rebuilt = hqmm::product_of_rotations(factors, u.dim);
        const double err = (rebuilt.mat - u.mat).frobenius_norm();
        std::printf("reconstruction error (Frobenius): %.3e\n", err);
    }
    if (!out_path.empty()) {
        hqmm::save_json(hqmm::rotations_to_json(factors), out_path);
        std::printf("%zu factors written to %s\n", factors.size(), out_path.c_str());
    } else {
        std::printf("%zu factors\n", factors.size());
    }
    return 0;
}

int run_reproduce(int table, const std::string& scale_name, std::uint64_t seed,
                  const std::string& out_dir) {
    const hqmm::ScalePreset scale = hqmm::scale_by_name(scale_name);
    const hqmm::ExperimentSpec spec = hqmm::table_spec(table, scale, seed);
    const hqmm::ExperimentResult result = hqmm::run_experiment(spec);
    std::filesystem::create_directories(out_dir);
    const auto base = std::filesystem::path(out_dir) / spec.label;
    write_results_csv(result, base.string() + ".csv");
    hqmm::save_json(hqmm::results_to_json(result), base.string() + ".json");
    for (const auto& cell : result.cells) {
        std::printf("%-18s P=%-4zu train %.4f (%.4f)  test %.4f (%.4f)  %s\n",
                    cell.entry.label().c_str(), cell.entry.param_count(), cell.train_da.mean,
                    cell.train_da.stddev, cell.test_da.mean, cell.test_da.stddev,
                    cell.status.c_str());
    }
    std::printf("results written to %s.csv / .json\n", base.string().c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hidden quantum Markov models: simulate, learn, evaluate"};
    app.require_subcommand(1);

    // generate
    std::string gen_model, gen_out = ".";
    std::size_t gen_train = 10, gen_val = 5, gen_len = 500, gen_burn = 200;
    std::uint64_t gen_seed = 0;
    auto* generate = app.add_subcommand("generate", "Sample a dataset from a model");
    generate->add_option("--model", gen_model,
                         "builtin name (prob_clock, monras_2x4, fully_quantum_2x6, "
                         "handwritten_hmm_6x6) or model JSON path")
        ->required();
    generate->add_option("--out", gen_out, "output directory");
    generate->add_option("--train", gen_train, "training sequences");
    generate->add_option("--val", gen_val, "validation sequences");
    generate->add_option("--len", gen_len, "sequence length");
    generate->add_option("--burn-in", gen_burn, "discarded leading samples");
    generate->add_option("--seed", gen_seed, "RNG seed");

    // train
    std::string tr_kind = "hqmm", tr_data, tr_val, tr_out = "model.json", tr_config;
    std::string tr_checkpoint, tr_resume;
    std::size_t tr_n = 2, tr_s = 2, tr_w = 1, tr_restarts = 10;
    std::uint64_t tr_seed = 0;
    std::optional<std::size_t> tr_batches;
    auto* train_cmd = app.add_subcommand("train", "Learn a model from a dataset");
    train_cmd->add_option("--kind", tr_kind, "hqmm or hmm")
        ->check(CLI::IsMember({"hqmm", "hmm"}));
    train_cmd->add_option("--data", tr_data, "training dataset file")->required();
    train_cmd->add_option("--val", tr_val, "validation dataset file");
    train_cmd->add_option("--n", tr_n, "hidden dimension");
    train_cmd->add_option("--s", tr_s, "alphabet size");
    train_cmd->add_option("--w", tr_w, "Kraus operators per output (hqmm)");
    train_cmd->add_option("--seed", tr_seed, "RNG seed");
    train_cmd->add_option("--restarts", tr_restarts, "EM restarts (hmm)");
    train_cmd->add_option("--out", tr_out, "output model path");
    train_cmd->add_option("--config", tr_config, "TrainConfig JSON (hqmm)");
    train_cmd->add_option("--checkpoint", tr_checkpoint, "write checkpoint JSON here (hqmm)");
    train_cmd->add_option("--resume", tr_resume, "resume from checkpoint JSON (hqmm)");
    train_cmd->add_option("--batches", tr_batches, "override total batches (hqmm)");

    // evaluate
    std::string ev_model, ev_data, ev_out;
    auto* evaluate = app.add_subcommand("evaluate", "Score a dataset with a model (DA)");
    evaluate->add_option("--model", ev_model, "model JSON path or builtin name")->required();
    evaluate->add_option("--data", ev_data, "dataset file")->required();
    evaluate->add_option("--out", ev_out, "write per-sequence scores here");

    // convert
    std::string cv_in, cv_out = "hqmm.json", cv_method = "sqrt";
    auto* convert = app.add_subcommand("convert", "HMM file to HQMM file");
    convert->add_option("--in", cv_in, "HMM model JSON path or builtin name")->required();
    convert->add_option("--out", cv_out, "output HQMM path");
    convert->add_option("--method", cv_method, "circuit or sqrt")
        ->check(CLI::IsMember({"circuit", "sqrt"}));

    // factor
    std::string fa_in, fa_out;
    bool fa_verify = false;
    auto* factor = app.add_subcommand("factor", "Factor a unitary into H rotations");
    factor->add_option("--in", fa_in, "unitary JSON path")->required();
    factor->add_option("--out", fa_out, "output rotation list path");
    factor->add_flag("--verify", fa_verify, "re-multiply factors and report the error");

    // reproduce
    int rp_table = 2;
    std::string rp_scale = "desk", rp_out = ".";
    std::uint64_t rp_seed = 0;
    auto* reproduce = app.add_subcommand("reproduce", "Run a benchmark table");
    reproduce->add_option("--table", rp_table, "table number (2-5)")->required();
    reproduce->add_option("--scale", rp_scale, "desk or full")
        ->check(CLI::IsMember({"desk", "full"}));
    reproduce->add_option("--seed", rp_seed, "RNG seed");
    reproduce->add_option("--out", rp_out, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (generate->parsed())
            return run_generate(gen_model, gen_out, gen_train, gen_val, gen_len, gen_burn,
                                gen_seed);
        if (train_cmd->parsed()) {
            if (tr_kind == "hmm")
                return run_train_hmm(tr_data, tr_val, tr_n, tr_seed, tr_restarts, tr_out);
            return run_train_hqmm(tr_data, tr_val, tr_n, tr_s, tr_w, tr_seed, tr_out,
                                  tr_config, tr_checkpoint, tr_resume, tr_batches);
        }
        if (evaluate->parsed()) return run_evaluate(ev_model, ev_data, ev_out);
        if (convert->parsed()) return run_convert(cv_in, cv_out, cv_method);
        if (factor->parsed()) return run_factor(fa_in, fa_out, fa_verify);
        if (reproduce->parsed()) return run_reproduce(rp_table, rp_scale, rp_seed, rp_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
