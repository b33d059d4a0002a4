#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hqmm/conversion.hpp"
#include "hqmm/experiment.hpp"
#include "hqmm/metrics.hpp"
#include "oracles.hpp"

using namespace hqmm;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::filesystem::path temp_dir(const std::string& tag) {
    auto dir = std::filesystem::temp_directory_path() / ("hqmm_test_" + tag);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("DA transfer function") {
    CHECK(da_value(0.0, 2, 10) == 1.0);                       // P = 1
    const double uniform_ll = -10.0 * std::log(4.0);          // P = s^-l
    CHECK(da_value(uniform_ll, 4, 10) == doctest::Approx(0.0).epsilon(1e-12));

    // Branch continuity at zero.
    CHECK(std::abs(da_transfer(0.0) - (1.0 - std::exp(-0.0)) / (1.0 + std::exp(-0.0))) <=
          1e-12);
    CHECK(std::abs(da_transfer(-1e-13) - da_transfer(1e-13)) <= 1e-12);

    // f(-4) = (1 - e) / (1 + e).
    CHECK(da_transfer(-4.0) == doctest::Approx(-0.46212).epsilon(1e-4));
    CHECK(std::abs(da_transfer(-4.0) - (1.0 - std::exp(1.0)) / (1.0 + std::exp(1.0))) <= 1e-12);

    // Monotone in log-likelihood, bounded in (-1, 1].
    double prev = -1.0;
    for (double ll = -400.0; ll <= 0.0; ll += 7.0) {
        const double v = da_value(ll, 2, 50);
        CHECK(v > prev);
        CHECK(v > -1.0);
        CHECK(v <= 1.0);
        prev = v;
    }
    const double impossible = da_value(-std::numeric_limits<double>::infinity(), 2, 50);
    CHECK(impossible == doctest::Approx(-1.0).epsilon(1e-11));
    CHECK(impossible > -1.0);
}

TEST_CASE("DA aggregation over sequences") {
    const auto score = da_from_logliks({0.0, -5.0 * std::log(2.0)}, 2, {5, 5});
    CHECK(score.per_sequence[0] == 1.0);
    CHECK(score.per_sequence[1] == doctest::Approx(0.0));
    CHECK(score.mean == doctest::Approx(0.5));
    CHECK(score.stddev == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
}

TEST_CASE("builtin model lookup") {
    CHECK(std::holds_alternative<KrausSet>(builtin_model("prob_clock")));
    CHECK(std::holds_alternative<KrausSet>(builtin_model("monras_2x4")));
    CHECK(std::holds_alternative<KrausSet>(builtin_model("fully_quantum_2x6")));
    CHECK(std::holds_alternative<HmmParams>(builtin_model("handwritten_hmm_6x6")));
    CHECK_THROWS_AS(builtin_model("nope"), std::invalid_argument);

    // The two complex-valued operators carry +-i/(2 sqrt 3) off-diagonals.
    const KrausSet fq = fully_quantum_2x6();
    const double b = 1.0 / (2.0 * std::sqrt(3.0));
    CHECK(fq.ops[4][0](0, 1) == cdouble{0.0, -b});
    CHECK(fq.ops[4][0](1, 0) == cdouble{0.0, b});
    CHECK(fq.ops[5][0](0, 1) == cdouble{0.0, b});
    CHECK(fq.ops[5][0](1, 0) == cdouble{0.0, -b});
}

TEST_CASE("spin-measurement process never repeats an axis with a flip") {
    const KrausSet fq = fully_quantum_2x6();
    // After observing y the state is the corresponding pure state, where the
    // opposite outcome on the same axis has probability zero.
    Rng rng(12);
    for (int trial = 0; trial < 10; ++trial) {
        const auto rho = oracles::random_density(2, rng);
        for (Symbol y = 0; y < 6; ++y) {
            const HqmmState stepped = hqmm_step({rho, 0.0}, fq, y);
            const auto probs = hqmm_output_probs(fq, stepped.rho);
            const Symbol partner = (y % 2 == 0) ? y + 1 : y - 1;
            CHECK(probs[partner] <= 1e-12);
        }
    }
    // And the sampled output never contains such a pair adjacently.
    const auto seq = hqmm_sample(fq, 20000, 100, 5);
    for (std::size_t t = 1; t < seq.size(); ++t) {
        const Symbol a = seq[t - 1], b = seq[t];
        CHECK_FALSE((a / 2 == b / 2 && a != b));
    }
}

TEST_CASE("dataset files round-trip and regenerate byte-identically") {
    const auto dir = temp_dir("dataset");
    ExperimentSpec spec;
    spec.generator = "prob_clock";
    spec.grid = {{ModelKind::HqmmTrue, 2, 2, 1}};
    spec.m_train = 2;
    spec.m_val = 2;
    spec.length = 50;
    spec.burn_in = 10;
    spec.seed = 9;

    const auto data1 = generate_dataset(spec, (dir / "a").string());
    const auto data2 = generate_dataset(spec, (dir / "b").string());
    CHECK(slurp((dir / "a/train.txt").string()) == slurp((dir / "b/train.txt").string()));
    CHECK(slurp((dir / "a/val.txt").string()) == slurp((dir / "b/val.txt").string()));

    const SequenceDataset loaded = load_dataset((dir / "a/train.txt").string());
    CHECK(loaded.s == 2);
    CHECK(loaded.sequences == data1.train.sequences);
    CHECK(loaded.metadata.generator == "prob_clock");
    CHECK(loaded.metadata.split == "train");
}

TEST_CASE("hand-written HMM generator matches its stationary marginals") {
    const HmmParams p = handwritten_hmm_6x6();
    ExperimentSpec spec;
    spec.generator = "handwritten_hmm_6x6";
    spec.grid = {{ModelKind::HmmTrue, 6, 6, 1}};
    spec.m_train = 1;
    spec.m_val = 1;
    spec.length = 100000;
    spec.burn_in = 1000;
    spec.seed = 3;
    const auto data = generate_data(spec);

    std::vector<double> freq(6, 0.0);
    for (Symbol y : data.train.sequences[0])
        freq[y] += 1.0 / static_cast<double>(spec.length);
    const auto pi = stationary_distribution(p.A, 6);
    for (std::size_t y = 0; y < 6; ++y) {
        double expected = 0.0;
        for (std::size_t i = 0; i < 6; ++i) expected += p.C[y][i] * pi[i];
        CHECK(std::abs(freq[y] - expected) <= 0.01);
    }
}

TEST_CASE("table specs carry the published parameter counts") {
    const ScalePreset desk = desk_scale();
    auto counts = [&](int table) {
        std::vector<std::size_t> out;
        for (const auto& e : table_spec(table, desk, 0).grid) out.push_back(e.param_count());
        return out;
    };
    CHECK(counts(2) == std::vector<std::size_t>{8, 8, 8, 24, 80});
    CHECK(counts(3) == std::vector<std::size_t>{16, 16, 32, 12, 21, 32});
    CHECK(counts(4) == std::vector<std::size_t>{24, 24, 16, 27, 40, 55, 72});
    CHECK(counts(5) == std::vector<std::size_t>{72, 24, 54, 96, 150, 300, 450, 750, 216, 432,
                                                16, 27, 40, 55, 72});
    CHECK_THROWS_AS(table_spec(6, desk, 0), std::invalid_argument);

    CHECK(table_spec(2, desk, 0).grid[0].label() == "2,2,1-HQMM (T)");
    CHECK(table_spec(2, desk, 0).grid[2].label() == "2,2-HMM (L)");
    CHECK(table_spec(5, desk, 0).grid[0].label() == "6,6-HMM (T)");
}

TEST_CASE("run_experiment: perfect generator scores DA 1 on its own data") {
    const auto dir = temp_dir("identity");
    HmmParams ident;
    ident.n = 2;
    ident.s = 2;
    ident.A = {{1.0, 0.0}, {0.0, 1.0}};
    ident.C = {{1.0, 0.0}, {0.0, 1.0}};
    ident.prior = {1.0, 0.0};
    const std::string model_path = (dir / "identity.json").string();
    save_json(hmm_to_json(ident), model_path);

    ExperimentSpec spec;
    spec.generator = model_path;
    spec.grid = {{ModelKind::HmmTrue, 2, 2, 1}};
    spec.m_train = 3;
    spec.m_val = 2;
    spec.length = 40;
    spec.burn_in = 5;
    spec.seed = 1;
    const ExperimentResult result = run_experiment(spec);
    REQUIRE(result.cells.size() == 1);
    CHECK(result.cells[0].status == "ok");
    CHECK(result.cells[0].train_da.mean == doctest::Approx(1.0));
    CHECK(result.cells[0].test_da.mean == doctest::Approx(1.0));
}

TEST_CASE("run_experiment records failures per row and keeps going") {
    ExperimentSpec spec;
    spec.generator = "prob_clock";
    // First row claims dims that do not match the generator; second is fine.
    spec.grid = {{ModelKind::HqmmTrue, 3, 2, 1}, {ModelKind::HqmmTrue, 2, 2, 1}};
    spec.m_train = 2;
    spec.m_val = 2;
    spec.length = 30;
    spec.burn_in = 5;
    spec.seed = 2;
    const ExperimentResult result = run_experiment(spec);
    CHECK(result.cells[0].status.rfind("error:", 0) == 0);
    CHECK(result.cells[1].status == "ok");
}

TEST_CASE("experiment CSV output is deterministic") {
    const auto dir = temp_dir("csv");
    ExperimentSpec spec;
    spec.generator = "prob_clock";
    spec.grid = {{ModelKind::HqmmTrue, 2, 2, 1}, {ModelKind::HmmLearned, 2, 2, 1}};
    spec.m_train = 4;
    spec.m_val = 2;
    spec.length = 60;
    spec.burn_in = 10;
    spec.seed = 5;
    spec.hmm_restarts = 2;
    spec.hmm_max_iters = 50;

    write_results_csv(run_experiment(spec), (dir / "a.csv").string());
    write_results_csv(run_experiment(spec), (dir / "b.csv").string());
    const std::string a = slurp((dir / "a.csv").string());
    CHECK(a == slurp((dir / "b.csv").string()));
    CHECK(a.rfind("model,P,train_da_mean,train_da_std,test_da_mean,test_da_std,status", 0) ==
          0);
    CHECK(a.find("\"2,2,1-HQMM (T)\",8,") != std::string::npos);
}

TEST_CASE("converted-model DA agrees with classical evaluation") {
    const HmmParams p = handwritten_hmm_6x6();
    ExperimentSpec spec;
    spec.generator = "handwritten_hmm_6x6";
    spec.grid = {{ModelKind::HmmTrue, 6, 6, 1}};
    spec.m_train = 3;
    spec.m_val = 3;
    spec.length = 200;
    spec.burn_in = 50;
    spec.seed = 8;
    const auto data = generate_data(spec);

    const DaScore classical = da(p, data.validation.sequences);
    for (const KrausSet& converted : {hmm_to_hqmm_circuit(p), hmm_to_hqmm_sqrt(p)}) {
        const DaScore quantum =
            da(converted, data.validation.sequences, DensityMatrix::from_diagonal(p.prior));
        CHECK(std::abs(quantum.mean - classical.mean) <= 1e-6);
        for (std::size_t i = 0; i < classical.per_sequence.size(); ++i)
            CHECK(std::abs(quantum.per_sequence[i] - classical.per_sequence[i]) <= 1e-6);
    }
}

TEST_CASE("worker count honours the environment override") {
    setenv("HQMM_WORKERS", "3", 1);
    CHECK(worker_count() == 3);
    unsetenv("HQMM_WORKERS");
    CHECK(worker_count() >= 1);
}
