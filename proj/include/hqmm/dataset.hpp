// dataset.hpp
// Sequence datasets: an M x l matrix of symbols over an alphabet of size s,
// plus provenance metadata. On disk a dataset is a text file of 1-based,
// space-separated symbol rows with a JSON metadata sidecar; in memory symbols
// are 0-based.

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hqmm/hmm.hpp"

namespace hqmm {

struct DatasetMetadata {
    std::string generator;     // builtin model name or source file
    std::uint64_t seed = 0;
    std::size_t burn_in = 0;
    std::string split;         // "train" or "validation"
    std::map<std::string, std::string> notes;
};

struct SequenceDataset {
    std::vector<SymbolSequence> sequences;
    std::size_t s = 0;  // alphabet size
    DatasetMetadata metadata;

    std::size_t num_sequences() const { return sequences.size(); }
    std::size_t length() const { return sequences.empty() ? 0 : sequences.front().size(); }

    void validate() const {
        const std::size_t len = length();
        for (const auto& seq : sequences) {
            if (seq.size() != len)
                throw std::invalid_argument("SequenceDataset: rows have unequal length");
            for (Symbol y : seq)
                if (y < 0 || static_cast<std::size_t>(y) >= s)
                    throw std::invalid_argument("SequenceDataset: symbol out of range");
        }
    }
};

inline std::string metadata_sidecar_path(const std::string& data_path) {
    std::filesystem::path p(data_path);
    p.replace_extension(".meta.json");
    return p.string();
}

// Writes <path> (symbol rows, 1-based) and the sidecar next to it.
inline void save_dataset(const SequenceDataset& ds, const std::string& path) {
    ds.validate();
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_dataset: cannot open " + path);
    for (const auto& seq : ds.sequences) {
        for (std::size_t t = 0; t < seq.size(); ++t) {
            if (t) out << ' ';
            out << seq[t] + 1;
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("save_dataset: write failed for " + path);

    nlohmann::json meta{
        {"format", "hqmm-dataset"},
        {"s", ds.s},
        {"num_sequences", ds.num_sequences()},
        {"length", ds.length()},
        {"generator", ds.metadata.generator},
        {"seed", ds.metadata.seed},
        {"burn_in", ds.metadata.burn_in},
        {"split", ds.metadata.split},
        {"notes", ds.metadata.notes},
    };
    const std::string meta_path = metadata_sidecar_path(path);
    std::ofstream mout(meta_path);
    if (!mout) throw std::runtime_error("save_dataset: cannot open " + meta_path);
    mout << meta.dump(2) << '\n';
}

// Reads a dataset file; the sidecar supplies the alphabet size, and when it
// is absent the alphabet is inferred from the largest symbol seen.
inline SequenceDataset load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_dataset: cannot open " + path);
    SequenceDataset ds;
    std::string line;
    Symbol max_symbol = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        SymbolSequence seq;
        long v;
        while (ls >> v) {
            if (v < 1) throw std::runtime_error("load_dataset: symbols are 1-based on disk");
            seq.push_back(static_cast<Symbol>(v - 1));
            max_symbol = std::max(max_symbol, seq.back());
        }
        if (!seq.empty()) ds.sequences.push_back(std::move(seq));
    }

    const std::string meta_path = metadata_sidecar_path(path);
    std::ifstream min(meta_path);
    if (min) {
        nlohmann::json meta = nlohmann::json::parse(min);
        ds.s = meta.at("s").get<std::size_t>();
        ds.metadata.generator = meta.value("generator", "");
        ds.metadata.seed = meta.value("seed", std::uint64_t{0});
        ds.metadata.burn_in = meta.value("burn_in", std::size_t{0});
        ds.metadata.split = meta.value("split", "");
        if (meta.contains("notes"))
            ds.metadata.notes = meta["notes"].get<std::map<std::string, std::string>>();
    } else {
        ds.s = static_cast<std::size_t>(max_symbol) + 1;
    }
    ds.validate();
    return ds;
}

}  // namespace hqmm
