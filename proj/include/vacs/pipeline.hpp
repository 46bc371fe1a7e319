// Copyright 2026 VACS Contributors
// SPDX-License-Identifier: Apache-2.0
//
// End-to-end experiment: synthesize the toy bilingual data, train the
// generator, sample a synthetic code-switched corpus, report intrinsic
// metrics, then train payload language models under the Mono and Mono|gCS
// curricula and compare held-out perplexities.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "vacs/data.hpp"
#include "vacs/generation.hpp"
#include "vacs/metrics.hpp"
#include "vacs/model.hpp"
#include "vacs/objective.hpp"
#include "vacs/payload.hpp"

namespace vacs {

struct PipelineConfig {
    ToyConfig toy;
    std::size_t toy_pairs = 1000;
    std::size_t toy_cs_train = 1000;
    std::size_t toy_cs_valid = 1000;
    std::size_t toy_cs_test = 1000;

    VacsConfig model;
    TrainConfig train;
    std::size_t vocab_max_per_lang = 200;
    std::size_t vocab_min_count = 1;
    bool aligned_embeddings = true;

    GenerateOptions generate;

    PayloadConfig payload;
    PayloadTrainConfig payload_train;
    std::size_t payload_mono_epochs = 6;
    std::size_t payload_gcs_epochs = 3;

    std::uint64_t seed = 7;
};

PipelineConfig pipeline_config_from_json(const nlohmann::json& j);
nlohmann::json pipeline_config_to_json(const PipelineConfig& cfg);
PipelineConfig load_pipeline_config(const std::string& path);

struct PipelineResult {
    Vocabulary vocab = Vocabulary::from_word_lists({}, {});
    TrainResult vacs;
    GeneratedCorpus gcs;
    MetricsReport train_cs_metrics;
    MetricsReport gcs_metrics;
    ExperimentTable table;
};

// Runs every stage, writing corpora, checkpoints, metric reports and the
// experiment table under out_dir. Deterministic for a fixed config.
PipelineResult run_pipeline(const PipelineConfig& cfg, const std::string& out_dir,
                            std::ostream* progress = nullptr);

}  // namespace vacs
