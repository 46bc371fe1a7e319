// Copyright 2026 VACS Contributors
// SPDX-License-Identifier: Apache-2.0
//
// Pipeline driver. Subcommands cover each stage plus the whole experiment:
//   toygen         synthesize the toy bilingual corpora (+ aligned embeddings)
//   train-vacs     train the generator on parallel + code-switched corpora
//   generate       sample a synthetic labeled corpus from a checkpoint
//   metrics        intrinsic code-switching metrics of corpora
//   train-payload  train the payload LM over an ordered curriculum
//   eval-ppl       held-out perplexity of a payload checkpoint
//   pipeline       run everything end to end into an output directory

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "vacs/checkpoint.hpp"
#include "vacs/generation.hpp"
#include "vacs/metrics.hpp"
#include "vacs/payload.hpp"
#include "vacs/pipeline.hpp"

namespace {

using namespace vacs;

PipelineConfig load_config_or_default(const std::string& path) {
    if (path.empty()) return PipelineConfig{};
    return load_pipeline_config(path);
}

int cmd_toygen(const std::string& config_path, const std::string& out_dir,
               std::uint64_t seed, bool seed_set) {
    PipelineConfig cfg = load_config_or_default(config_path);
    if (seed_set) cfg.seed = seed;
    std::filesystem::create_directories(out_dir);

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
    write_toy_aligned_embeddings(cfg.toy, cfg.model.embed_dim, cfg.seed,
                                 out_dir + "/aligned_embeddings.txt");
    std::cout << "wrote mono (" << train_data.mono.size() << "), cs_train ("
              << train_data.code_switched.size() << "), cs_valid (" << valid.size()
              << "), cs_test (" << test.size() << ") under " << out_dir << "\n";
    return 0;
}

int cmd_train_vacs(const std::string& config_path, const std::string& parallel_path,
                   const std::string& cs_path, const std::string& embeddings_path,
                   const std::string& out_dir, std::uint64_t seed, bool seed_set) {
    PipelineConfig cfg = load_config_or_default(config_path);
    if (seed_set) cfg.seed = seed;
    std::filesystem::create_directories(out_dir);

    Corpus parallel = read_corpus(parallel_path, Provenance::ParallelMono);
    Corpus real_cs = read_corpus(cs_path, Provenance::RealCs);
    Vocabulary vocab = Vocabulary::build({&parallel, &real_cs}, cfg.vocab_max_per_lang,
                                         cfg.vocab_min_count);

    VacsParams init;
    if (!embeddings_path.empty()) {
        EmbeddingTable aligned = load_embeddings(embeddings_path, vocab);
        init = VacsParams::init(cfg.model, vocab, derive_seed(cfg.seed, 4), &aligned);
    } else {
        init = VacsParams::init(cfg.model, vocab, derive_seed(cfg.seed, 4));
    }

    TrainConfig tcfg = cfg.train;
    tcfg.seed = derive_seed(cfg.seed, 5);
    std::ofstream log(out_dir + "/train_log.jsonl");
    TrainResult result = train(std::move(init), parallel, real_cs, vocab, tcfg, out_dir, &log);
    if (result.diverged) {
        std::cerr << "training diverged; last good checkpoint kept\n";
    }
    save_vacs_checkpoint(result.params, vocab, out_dir + "/checkpoint_final.json");
    std::cout << "trained " << result.log.size() << " steps; checkpoint at " << out_dir
              << "/checkpoint_final.json\n";
    return result.diverged ? 1 : 0;
}

int cmd_generate(const std::string& checkpoint_path, const std::string& out_path,
                 std::size_t n, std::size_t max_len, double temperature, std::uint64_t seed) {
    VacsCheckpoint ck = load_vacs_checkpoint(checkpoint_path);
    GenerateOptions opts;
    opts.count = n;
    opts.max_len = max_len;
    opts.temperature = temperature;
    opts.seed = seed;
    GeneratedCorpus gen = generate_corpus(ck.params, ck.vocab, opts);
    write_generated(gen, out_path);
    std::cout << summary_json(gen.summary) << "\n";
    return 0;
}

int cmd_metrics(const std::vector<std::string>& corpus_paths) {
    std::vector<std::pair<std::string, MetricsReport>> rows;
    for (const auto& path : corpus_paths) {
        Corpus corpus = read_corpus(path, Provenance::Toy);
        rows.emplace_back(std::filesystem::path(path).filename().string(),
                          compute_metrics(corpus));
    }
    for (const auto& [name, report] : rows) {
        nlohmann::json j = nlohmann::json::parse(metrics_json(report));
        j["dataset"] = name;
        std::cout << j.dump() << "\n";
    }
    std::cout << metrics_table(rows);
    return 0;
}

int cmd_train_payload(const std::string& config_path,
                      const std::vector<std::string>& curriculum_paths,
                      const std::vector<std::size_t>& epochs, const std::string& out_path,
                      std::uint64_t seed, bool seed_set) {
    PipelineConfig cfg = load_config_or_default(config_path);
    if (seed_set) cfg.seed = seed;

    Curriculum curriculum;
    curriculum.name = "cli";
    std::vector<const Corpus*> sources;
    for (std::size_t i = 0; i < curriculum_paths.size(); ++i) {
        CurriculumStage stage;
        stage.corpus = read_corpus(curriculum_paths[i], Provenance::Toy);
        stage.epochs = i < epochs.size() ? epochs[i] : 1;
        curriculum.stages.push_back(std::move(stage));
    }
    for (const auto& stage : curriculum.stages) sources.push_back(&stage.corpus);
    Vocabulary words = Vocabulary::build(sources, cfg.vocab_max_per_lang, cfg.vocab_min_count);

    PayloadParams init = PayloadParams::init(cfg.payload, words, derive_seed(cfg.seed, 0xF00D));
    PayloadTrainResult result =
        train_payload(std::move(init), curriculum, words, cfg.payload_train, cfg.seed);
    if (result.diverged) {
        std::cerr << "payload training diverged; last good checkpoint kept\n";
    }
    save_payload_checkpoint(result.params, words, out_path);
    std::cout << "payload checkpoint at " << out_path << "\n";
    return result.diverged ? 1 : 0;
}

int cmd_eval_ppl(const std::string& checkpoint_path, const std::string& corpus_path) {
    PayloadCheckpoint ck = load_payload_checkpoint(checkpoint_path);
    Corpus held = read_corpus(corpus_path, Provenance::Toy);
    const double ppl = perplexity(ck.params, ck.vocab, held);
    nlohmann::json j;
    j["corpus"] = corpus_path;
    j["ppl"] = ppl;
    std::cout << j.dump() << "\n";
    return 0;
}

int cmd_pipeline(const std::string& config_path, const std::string& out_dir,
                 std::uint64_t seed, bool seed_set) {
    PipelineConfig cfg = load_config_or_default(config_path);
    if (seed_set) cfg.seed = seed;
    PipelineResult result = run_pipeline(cfg, out_dir, &std::cerr);
    std::cout << metrics_table({{"cs-train", result.train_cs_metrics},
                                {"VACS-gCS", result.gcs_metrics}});
    std::cout << experiment_table_text(result.table);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hierarchical VAE for labeled code-switched text"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out", out_path, checkpoint_path, parallel_path,
                cs_path, embeddings_path, corpus_path;
    std::vector<std::string> corpus_paths, curriculum_paths;
    std::vector<std::size_t> stage_epochs;
    std::uint64_t seed = 7;
    std::size_t n = 5000, max_len = 30;
    double temperature = 1.0;

    auto* toygen = app.add_subcommand("toygen", "synthesize toy bilingual corpora");
    toygen->add_option("--config", config_path);
    toygen->add_option("--out", out_dir);
    auto* toygen_seed = toygen->add_option("--seed", seed);

    auto* tv = app.add_subcommand("train-vacs", "train the generator");
    tv->add_option("--config", config_path);
    tv->add_option("--parallel", parallel_path)->required();
    tv->add_option("--cs", cs_path)->required();
    tv->add_option("--embeddings", embeddings_path);
    tv->add_option("--out", out_dir);
    auto* tv_seed = tv->add_option("--seed", seed);

    auto* gen = app.add_subcommand("generate", "sample a labeled corpus from a checkpoint");
    gen->add_option("--checkpoint", checkpoint_path)->required();
    gen->add_option("--out", out_path)->required();
    gen->add_option("--n", n);
    gen->add_option("--max-len", max_len);
    gen->add_option("--temperature", temperature);
    gen->add_option("--seed", seed);

    auto* met = app.add_subcommand("metrics", "intrinsic code-switching metrics");
    met->add_option("--corpus", corpus_paths)->required()->expected(-1);

    auto* tp = app.add_subcommand("train-payload", "train the payload language model");
    tp->add_option("--config", config_path);
    tp->add_option("--curriculum", curriculum_paths, "ordered corpus paths")
        ->required()
        ->expected(-1);
    tp->add_option("--epochs", stage_epochs, "epochs per curriculum stage");
    tp->add_option("--out", out_path)->required();
    auto* tp_seed = tp->add_option("--seed", seed);

    auto* ep = app.add_subcommand("eval-ppl", "held-out perplexity of a payload checkpoint");
    ep->add_option("--checkpoint", checkpoint_path)->required();
    ep->add_option("--corpus", corpus_path)->required();

    auto* pl = app.add_subcommand("pipeline", "run the whole experiment");
    pl->add_option("--config", config_path);
    pl->add_option("--out", out_dir);
    auto* pl_seed = pl->add_option("--seed", seed);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (toygen->parsed()) {
            return cmd_toygen(config_path, out_dir, seed, !toygen_seed->empty());
        }
        if (tv->parsed()) {
            return cmd_train_vacs(config_path, parallel_path, cs_path, embeddings_path,
                                  out_dir, seed, !tv_seed->empty());
        }
        if (gen->parsed()) {
            return cmd_generate(checkpoint_path, out_path, n, max_len, temperature, seed);
        }
        if (met->parsed()) {
            return cmd_metrics(corpus_paths);
        }
        if (tp->parsed()) {
            return cmd_train_payload(config_path, curriculum_paths, stage_epochs, out_path,
                                     seed, !tp_seed->empty());
        }
        if (ep->parsed()) {
            return cmd_eval_ppl(checkpoint_path, corpus_path);
        }
        if (pl->parsed()) {
            return cmd_pipeline(config_path, out_dir, seed, !pl_seed->empty());
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
