// Copyright 2026 VACS Contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>

#include "vacs/data.hpp"
#include "vacs/model.hpp"

namespace vacs {

struct GenerateOptions {
    std::size_t count = 5000;
    std::size_t max_len = 30;
    double temperature = 1.0;
    std::uint64_t seed = 1;
};

struct CorpusSummary {
    std::size_t sentences = 0;
    double length_mean = 0.0;
    std::size_t length_max = 0;
    std::size_t source_tokens = 0;
    std::size_t target_tokens = 0;
};

struct GeneratedCorpus {
    Corpus corpus;  // provenance synthetic-gCS
    CorpusSummary summary;
};

// Bulk prior sampling. Each sentence gets its own seed derived from
// (seed, index), so output is independent of synthesis order.
GeneratedCorpus generate_corpus(const VacsParams& params, const Vocabulary& vocab,
                                const GenerateOptions& opts);

// Writes the corpus in the line-record format plus a sidecar summary at
// path + ".summary.json".
void write_generated(const GeneratedCorpus& gen, const std::string& path);

std::string summary_json(const CorpusSummary& summary);

}  // namespace vacs
