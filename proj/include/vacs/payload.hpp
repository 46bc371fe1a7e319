// Copyright 2026 VACS Contributors
// SPDX-License-Identifier: Apache-2.0
//
// Downstream ("payload") language model used to score synthetic-text
// utility: a character-aware word-level LM. Each input word runs through a
// character CNN (several filter widths, max-over-time) and one highway
// layer, then a word-level LSTM predicts the next word id over the union
// vocabulary plus per-language UNKs and EOS. Perplexity on held-out
// code-switched text is the figure of merit.

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "vacs/data.hpp"
#include "vacs/graph.hpp"
#include "vacs/nn.hpp"
#include "vacs/objective.hpp"

namespace vacs {

struct PayloadConfig {
    std::size_t char_embed_dim = 16;
    std::vector<std::size_t> filter_widths = {1, 2, 3, 4};
    std::size_t filters_per_width = 16;
    std::size_t hidden_dim = 128;

    std::size_t feature_dim() const { return filter_widths.size() * filters_per_width; }
};

struct PayloadTrainConfig {
    double lr = 1e-3;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    double clip_norm = 5.0;
    std::size_t batch_size = 16;
};

// Byte-level character inventory with word-boundary and unknown markers.
class CharVocab {
public:
    static constexpr int kBow = 0;
    static constexpr int kEow = 1;
    static constexpr int kUnk = 2;
    static constexpr int kSosMark = 3;

    static CharVocab build(const Vocabulary& words);
    static CharVocab from_bytes(std::vector<unsigned char> bytes);

    int id_of(unsigned char c) const;
    std::size_t size() const { return 4 + bytes_.size(); }
    const std::vector<unsigned char>& bytes() const { return bytes_; }

    // BOW + char ids + EOW, padded with EOW up to min_len.
    std::vector<int> encode_word(const std::string& word, std::size_t min_len) const;
    std::vector<int> encode_sos(std::size_t min_len) const;

private:
    std::vector<unsigned char> bytes_;
    std::map<unsigned char, int> ids_;
};

struct PayloadParams {
    PayloadConfig cfg;
    CharVocab chars;
    std::size_t n_source = 0;
    std::size_t n_target = 0;

    Tensor char_emb;                 // [chars x char_E]
    std::vector<AffineParams> conv;  // one per filter width
    AffineParams highway_gate;       // F -> F
    AffineParams highway_transform;  // F -> F
    LstmCellParams rnn;              // F -> H
    AffineParams head;               // H -> output_dim

    // Union words, both UNKs, then EOS as the final row.
    std::size_t output_dim() const { return n_source + n_target + 3; }
    std::size_t eos_index() const { return n_source + n_target + 2; }

    template <class F>
    void visit(F&& f) {
        f(std::string("char_emb"), char_emb);
        for (std::size_t i = 0; i < conv.size(); ++i) {
            f("conv" + std::to_string(cfg.filter_widths[i]) + ".w", conv[i].w);
            f("conv" + std::to_string(cfg.filter_widths[i]) + ".b", conv[i].b);
        }
        f(std::string("highway_gate.w"), highway_gate.w);
        f(std::string("highway_gate.b"), highway_gate.b);
        f(std::string("highway_transform.w"), highway_transform.w);
        f(std::string("highway_transform.b"), highway_transform.b);
        f(std::string("rnn.wx"), rnn.wx);
        f(std::string("rnn.wh"), rnn.wh);
        f(std::string("rnn.b"), rnn.b);
        f(std::string("head.w"), head.w);
        f(std::string("head.b"), head.b);
    }

    template <class F>
    void visit(F&& f) const {
        const_cast<PayloadParams*>(this)->visit(
            [&](const std::string& name, Tensor& t) { f(name, static_cast<const Tensor&>(t)); });
    }

    static PayloadParams init(const PayloadConfig& cfg, const Vocabulary& words,
                              std::uint64_t seed);
};

// Ordered training schedule; parameters carry across stages without reset.
struct CurriculumStage {
    Corpus corpus;
    std::size_t epochs = 1;
};

struct Curriculum {
    std::string name;
    std::vector<CurriculumStage> stages;
};

struct PayloadTrainResult {
    PayloadParams params;
    std::vector<double> step_loss;  // mean negative log-likelihood per token
    bool diverged = false;
};

PayloadTrainResult train_payload(PayloadParams params, const Curriculum& curriculum,
                                 const Vocabulary& words, const PayloadTrainConfig& cfg,
                                 std::uint64_t seed);

// exp of mean negative log-likelihood per predicted token, EOS included.
// Out-of-vocabulary targets score as the UNK of their labeled language.
// Compensated summation in corpus order keeps the result order-independent.
double perplexity(const PayloadParams& params, const Vocabulary& words, const Corpus& held_out);

// exp(-total_log_prob / tokens); the closed-form core of perplexity().
double ppl_from_logprob(double total_log_prob, std::size_t tokens);

// ---- experiment harness ----

struct ExperimentRow {
    std::string curriculum;
    double valid_ppl = 0.0;
    double test_ppl = 0.0;
};

struct ExperimentTable {
    std::vector<ExperimentRow> rows;
};

// Trains one payload model per curriculum (shared word vocabulary built from
// the union of all curricula corpora) and evaluates both held-out splits.
ExperimentTable run_experiment_table(const std::vector<Curriculum>& curricula,
                                     const PayloadConfig& cfg, const PayloadTrainConfig& tcfg,
                                     const Corpus& valid, const Corpus& test,
                                     std::size_t vocab_max_per_lang, std::size_t vocab_min_count,
                                     std::uint64_t seed);

std::string experiment_table_text(const ExperimentTable& table);
std::string experiment_records(const ExperimentTable& table);  // line-delimited JSON

// ---- payload checkpoint container ----

void save_payload_checkpoint(const PayloadParams& params, const Vocabulary& words,
                             const std::string& path);
struct PayloadCheckpoint {
    PayloadParams params;
    Vocabulary vocab = Vocabulary::from_word_lists({}, {});
};
PayloadCheckpoint load_payload_checkpoint(const std::string& path);

std::uint64_t payload_digest(const PayloadParams& params);

}  // namespace vacs
