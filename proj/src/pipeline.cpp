// Copyright 2026 VACS Contributors
// SPDX-License-Identifier: Apache-2.0

#include "vacs/pipeline.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>

#include "vacs/checkpoint.hpp"
#include "vacs/rng.hpp"

namespace vacs {

using nlohmann::json;

namespace {

template <class T>
void read_if(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

void note(std::ostream* progress, const std::string& line) {
    if (progress != nullptr) {
        *progress << line << "\n";
        progress->flush();
    }
}

}  // namespace

PipelineConfig pipeline_config_from_json(const json& j) {
    PipelineConfig cfg;
    if (j.contains("toy")) {
        const json& t = j.at("toy");
        read_if(t, "vocab_per_lang", cfg.toy.vocab_per_lang);
        read_if(t, "bigram_concentration", cfg.toy.bigram_concentration);
        read_if(t, "stay_prob", cfg.toy.stay_prob);
        read_if(t, "len_min", cfg.toy.len_min);
        read_if(t, "len_max", cfg.toy.len_max);
        read_if(t, "pairs", cfg.toy_pairs);
        read_if(t, "cs_train", cfg.toy_cs_train);
        read_if(t, "cs_valid", cfg.toy_cs_valid);
        read_if(t, "cs_test", cfg.toy_cs_test);
    }
    if (j.contains("model")) {
        const json& m = j.at("model");
        read_if(m, "embed_dim", cfg.model.embed_dim);
        read_if(m, "label_embed_dim", cfg.model.label_embed_dim);
        read_if(m, "hidden_dim", cfg.model.hidden_dim);
        read_if(m, "context_latent_dim", cfg.model.context_latent_dim);
        read_if(m, "switch_latent_dim", cfg.model.switch_latent_dim);
    }
    if (j.contains("train")) {
        const json& t = j.at("train");
        read_if(t, "lr", cfg.train.lr);
        read_if(t, "adam_beta1", cfg.train.adam_beta1);
        read_if(t, "adam_beta2", cfg.train.adam_beta2);
        read_if(t, "adam_eps", cfg.train.adam_eps);
        read_if(t, "batch_size", cfg.train.batch_size);
        read_if(t, "epochs_phase1", cfg.train.epochs_phase1);
        read_if(t, "epochs_phase2", cfg.train.epochs_phase2);
        read_if(t, "anneal_t0", cfg.train.anneal_t0);
        read_if(t, "anneal_k", cfg.train.anneal_k);
        read_if(t, "clip_norm", cfg.train.clip_norm);
    }
    if (j.contains("vocab")) {
        const json& v = j.at("vocab");
        read_if(v, "max_per_lang", cfg.vocab_max_per_lang);
        read_if(v, "min_count", cfg.vocab_min_count);
        read_if(v, "aligned_embeddings", cfg.aligned_embeddings);
    }
    if (j.contains("generate")) {
        const json& g = j.at("generate");
        read_if(g, "count", cfg.generate.count);
        read_if(g, "max_len", cfg.generate.max_len);
        read_if(g, "temperature", cfg.generate.temperature);
    }
    if (j.contains("payload")) {
        const json& p = j.at("payload");
        read_if(p, "char_embed_dim", cfg.payload.char_embed_dim);
        read_if(p, "filter_widths", cfg.payload.filter_widths);
        read_if(p, "filters_per_width", cfg.payload.filters_per_width);
        read_if(p, "hidden_dim", cfg.payload.hidden_dim);
        read_if(p, "lr", cfg.payload_train.lr);
        read_if(p, "batch_size", cfg.payload_train.batch_size);
        read_if(p, "clip_norm", cfg.payload_train.clip_norm);
        read_if(p, "mono_epochs", cfg.payload_mono_epochs);
        read_if(p, "gcs_epochs", cfg.payload_gcs_epochs);
    }
    read_if(j, "seed", cfg.seed);
    return cfg;
}

json pipeline_config_to_json(const PipelineConfig& cfg) {
    json j;
    j["toy"] = {{"vocab_per_lang", cfg.toy.vocab_per_lang},
                {"bigram_concentration", cfg.toy.bigram_concentration},
                {"stay_prob", cfg.toy.stay_prob},
                {"len_min", cfg.toy.len_min},
                {"len_max", cfg.toy.len_max},
                {"pairs", cfg.toy_pairs},
                {"cs_train", cfg.toy_cs_train},
                {"cs_valid", cfg.toy_cs_valid},
                {"cs_test", cfg.toy_cs_test}};
    j["model"] = {{"embed_dim", cfg.model.embed_dim},
                  {"label_embed_dim", cfg.model.label_embed_dim},
                  {"hidden_dim", cfg.model.hidden_dim},
                  {"context_latent_dim", cfg.model.context_latent_dim},
                  {"switch_latent_dim", cfg.model.switch_latent_dim}};
    j["train"] = {{"lr", cfg.train.lr},
                  {"adam_beta1", cfg.train.adam_beta1},
                  {"adam_beta2", cfg.train.adam_beta2},
                  {"adam_eps", cfg.train.adam_eps},
                  {"batch_size", cfg.train.batch_size},
                  {"epochs_phase1", cfg.train.epochs_phase1},
                  {"epochs_phase2", cfg.train.epochs_phase2},
                  {"anneal_t0", cfg.train.anneal_t0},
                  {"anneal_k", cfg.train.anneal_k},
                  {"clip_norm", cfg.train.clip_norm}};
    j["vocab"] = {{"max_per_lang", cfg.vocab_max_per_lang},
                  {"min_count", cfg.vocab_min_count},
                  {"aligned_embeddings", cfg.aligned_embeddings}};
    j["generate"] = {{"count", cfg.generate.count},
                     {"max_len", cfg.generate.max_len},
                     {"temperature", cfg.generate.temperature}};
    j["payload"] = {{"char_embed_dim", cfg.payload.char_embed_dim},
                    {"filter_widths", cfg.payload.filter_widths},
                    {"filters_per_width", cfg.payload.filters_per_width},
                    {"hidden_dim", cfg.payload.hidden_dim},
                    {"lr", cfg.payload_train.lr},
                    {"batch_size", cfg.payload_train.batch_size},
                    {"clip_norm", cfg.payload_train.clip_norm},
                    {"mono_epochs", cfg.payload_mono_epochs},
                    {"gcs_epochs", cfg.payload_gcs_epochs}};
    j["seed"] = cfg.seed;
    return j;
}

PipelineConfig load_pipeline_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open config: " + path);
    }
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw std::runtime_error("config " + path + ": " + e.what());
    }
    return pipeline_config_from_json(j);
}

PipelineResult run_pipeline(const PipelineConfig& cfg, const std::string& out_dir,
                            std::ostream* progress) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);

    // Stage 1: data.
    note(progress, "[pipeline] synthesizing toy corpora");
    auto train_data = synth_toy_corpus(cfg.toy, cfg.toy_pairs, cfg.toy_cs_train,
                                       derive_seed(cfg.seed, 1));
    auto heldout = synth_toy_corpus(cfg.toy, 0, cfg.toy_cs_valid + cfg.toy_cs_test,
                                    derive_seed(cfg.seed, 2));
    Corpus valid, test;
    valid.provenance = test.provenance = Provenance::Toy;
    for (std::size_t i = 0; i < heldout.code_switched.size(); ++i) {
        (i < cfg.toy_cs_valid ? valid : test)
            .sentences.push_back(heldout.code_switched.sentences[i]);
    }
    write_corpus(train_data.mono, out_dir + "/mono.jsonl");
    write_corpus(train_data.code_switched, out_dir + "/cs_train.jsonl");
    write_corpus(valid, out_dir + "/cs_valid.jsonl");
    write_corpus(test, out_dir + "/cs_test.jsonl");

    PipelineResult result;
    result.vocab = Vocabulary::build({&train_data.mono, &train_data.code_switched},
                                     cfg.vocab_max_per_lang, cfg.vocab_min_count);

    // Stage 2: generator training (parallel monolingual first, then real CS).
    VacsParams init;
    if (cfg.aligned_embeddings) {
        const std::string emb_path = out_dir + "/aligned_embeddings.txt";
        write_toy_aligned_embeddings(cfg.toy, cfg.model.embed_dim, cfg.seed, emb_path);
        EmbeddingTable aligned = load_embeddings(emb_path, result.vocab);
        init = VacsParams::init(cfg.model, result.vocab, derive_seed(cfg.seed, 4), &aligned);
    } else {
        init = VacsParams::init(cfg.model, result.vocab, derive_seed(cfg.seed, 4));
    }

    TrainConfig tcfg = cfg.train;
    tcfg.seed = derive_seed(cfg.seed, 5);
    std::ofstream train_log(out_dir + "/train_log.jsonl");
    note(progress, "[pipeline] training generator (" +
                       std::to_string(tcfg.epochs_phase1) + "+" +
                       std::to_string(tcfg.epochs_phase2) + " epochs)");
    result.vacs = train(std::move(init), train_data.mono, train_data.code_switched,
                        result.vocab, tcfg, out_dir, &train_log);
    if (result.vacs.diverged) {
        throw std::runtime_error("pipeline: generator training diverged");
    }

    // Stage 3: synthesis.
    GenerateOptions gen = cfg.generate;
    gen.seed = derive_seed(cfg.seed, 6);
    note(progress, "[pipeline] generating " + std::to_string(gen.count) + " sentences");
    result.gcs = generate_corpus(result.vacs.params, result.vocab, gen);
    write_generated(result.gcs, out_dir + "/gcs.jsonl");

    // Stage 4: intrinsic metrics.
    result.train_cs_metrics = compute_metrics(train_data.code_switched);
    result.gcs_metrics = compute_metrics(result.gcs.corpus);
    {
        std::ofstream mj(out_dir + "/metrics.jsonl");
        json row_train = json::parse(metrics_json(result.train_cs_metrics));
        row_train["dataset"] = "cs-train";
        json row_gcs = json::parse(metrics_json(result.gcs_metrics));
        row_gcs["dataset"] = "gcs";
        mj << row_train.dump() << "\n" << row_gcs.dump() << "\n";
        std::ofstream mt(out_dir + "/metrics_table.txt");
        mt << metrics_table({{"cs-train", result.train_cs_metrics},
                             {"VACS-gCS", result.gcs_metrics}});
    }

    // Stage 5: payload curricula and perplexity.
    note(progress, "[pipeline] training payload models");
    std::vector<Curriculum> curricula;
    curricula.push_back({"Mono", {{train_data.mono, cfg.payload_mono_epochs}}});
    curricula.push_back({"Mono|VACS-gCS",
                         {{train_data.mono, cfg.payload_mono_epochs},
                          {result.gcs.corpus, cfg.payload_gcs_epochs}}});
    result.table = run_experiment_table(curricula, cfg.payload, cfg.payload_train, valid, test,
                                        cfg.vocab_max_per_lang, cfg.vocab_min_count,
                                        derive_seed(cfg.seed, 7));
    {
        std::ofstream records(out_dir + "/experiment.jsonl");
        records << experiment_records(result.table);
        std::ofstream table_txt(out_dir + "/experiment_table.txt");
        table_txt << experiment_table_text(result.table);
    }
    note(progress, "[pipeline] done\n" + experiment_table_text(result.table));
    return result;
}

}  // namespace vacs
