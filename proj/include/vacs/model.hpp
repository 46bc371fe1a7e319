// Copyright 2026 VACS Contributors
// SPDX-License-Identifier: Apache-2.0
//
// Two-level hierarchical variational autoencoder over labeled sentences.
// The context encoder reads words into a Gaussian over z_c; conditioned on
// z_c the switching encoder reads labels into a Gaussian over z_l. Decoding
// runs the other way: labels from z_l, then a Gaussian over z_c conditioned
// on the label decoder's final state, then words masked to each position's
// language.

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vacs/data.hpp"
#include "vacs/graph.hpp"
#include "vacs/nn.hpp"
#include "vacs/rng.hpp"

namespace vacs {

struct VacsConfig {
    std::size_t embed_dim = 64;
    std::size_t label_embed_dim = 16;
    std::size_t hidden_dim = 128;
    std::size_t context_latent_dim = 32;
    std::size_t switch_latent_dim = 16;
};

struct GaussianParams {
    std::vector<double> mean;
    std::vector<double> logvar;
};

struct LatentPair {
    std::vector<double> z_context;
    std::vector<double> z_switch;
};

struct VacsParams {
    VacsConfig cfg;
    std::size_t n_source = 0;
    std::size_t n_target = 0;

    Tensor word_emb;   // [n_source+n_target+4 x E]
    Tensor label_emb;  // [s, t, eos, sos] x L

    LstmCellParams enc_ctx;   // words -> context state
    LstmCellParams enc_swi;   // labels -> switching state
    LstmCellParams dec_lbl;   // label decoder
    LstmCellParams dec_word;  // word decoder

    AffineParams head_enc_ctx;   // H -> 2 d_c
    AffineParams head_enc_swi;   // H -> 2 d_l
    AffineParams head_dec_lbl;   // H -> 3
    AffineParams head_dec_ctx;   // H + d_l -> 2 d_c
    AffineParams head_dec_word;  // H + L -> word_output_dim

    AffineParams proj_enc_swi_init;   // d_c -> 2H
    AffineParams proj_dec_lbl_init;   // d_l -> 2H
    AffineParams proj_dec_word_init;  // d_c -> 2H

    std::size_t word_output_dim() const { return n_source + n_target + 2; }

    // Stable enumeration order; optimizers, checkpoints and graph binding all
    // rely on it.
    template <class F>
    void visit(F&& f) {
        f("word_emb", word_emb);
        f("label_emb", label_emb);
        for (auto [prefix, cell] : {std::pair<const char*, LstmCellParams*>{"enc_ctx", &enc_ctx},
                                    {"enc_swi", &enc_swi},
                                    {"dec_lbl", &dec_lbl},
                                    {"dec_word", &dec_word}}) {
            f(std::string(prefix) + ".wx", cell->wx);
            f(std::string(prefix) + ".wh", cell->wh);
            f(std::string(prefix) + ".b", cell->b);
        }
        for (auto [prefix, a] : {std::pair<const char*, AffineParams*>{"head_enc_ctx", &head_enc_ctx},
                                 {"head_enc_swi", &head_enc_swi},
                                 {"head_dec_lbl", &head_dec_lbl},
                                 {"head_dec_ctx", &head_dec_ctx},
                                 {"head_dec_word", &head_dec_word},
                                 {"proj_enc_swi_init", &proj_enc_swi_init},
                                 {"proj_dec_lbl_init", &proj_dec_lbl_init},
                                 {"proj_dec_word_init", &proj_dec_word_init}}) {
            f(std::string(prefix) + ".w", a->w);
            f(std::string(prefix) + ".b", a->b);
        }
    }

    template <class F>
    void visit(F&& f) const {
        const_cast<VacsParams*>(this)->visit(
            [&](const std::string& name, Tensor& t) { f(name, static_cast<const Tensor&>(t)); });
    }

    static VacsParams init(const VacsConfig& cfg, const Vocabulary& vocab, std::uint64_t seed,
                           const EmbeddingTable* aligned = nullptr);

    // All-zero parameters with the right shapes; used by tests.
    static VacsParams zeros(const VacsConfig& cfg, const Vocabulary& vocab);
};

// ---- graph-building layer ----

struct GaussianNodes {
    ad::ValId mean;
    ad::ValId logvar;
};

// One parameter set bound into one graph.
struct VacsGraph {
    ad::Graph* g = nullptr;
    const VacsParams* p = nullptr;

    ad::ValId word_emb, label_emb;
    LstmCellNodes enc_ctx, enc_swi, dec_lbl, dec_word;
    AffineNodes head_enc_ctx, head_enc_swi, head_dec_lbl, head_dec_ctx, head_dec_word;
    AffineNodes proj_enc_swi_init, proj_dec_lbl_init, proj_dec_word_init;

    // Additive log-domain vocabulary masks per language. The scoring mask
    // admits the language's ranked words plus its UNK; the sampling mask
    // drops the UNK so generated text never contains placeholder tokens.
    ad::ValId score_mask[2] = {0, 0};
    ad::ValId sample_mask[2] = {0, 0};
    bool masks_built = false;

    ad::ValId mask_for(int label_id, bool sampling);
};

VacsGraph bind_vacs(ad::Graph& g, const VacsParams& p);

GaussianNodes encode_context_g(VacsGraph& vg, std::span<const int> word_ids);
GaussianNodes encode_switching_g(VacsGraph& vg, ad::ValId z_context,
                                 std::span<const int> label_ids);
ad::ValId reparameterize_g(VacsGraph& vg, const GaussianNodes& q, ad::ValId eps);

// KL(q || p) for diagonal Gaussians, as graph nodes (closed form).
ad::ValId kl_gaussians_g(ad::Graph& g, const GaussianNodes& q, const GaussianNodes& p);
// KL(q || N(0, I)).
ad::ValId kl_standard_g(ad::Graph& g, const GaussianNodes& q);

struct LabelTeacherNodes {
    std::vector<ad::ValId> logits;  // one row per observed label plus the EOS step
    ad::ValId log_lik;
    ad::ValId h_final;  // state at the EOS event
};
LabelTeacherNodes decode_labels_teacher_g(VacsGraph& vg, ad::ValId z_switch,
                                          std::span<const int> label_ids);

struct LabelSampleNodes {
    std::vector<int> label_ids;  // s/t only; EOS terminates
    std::vector<ad::ValId> logits;
    ad::ValId h_final;
};
LabelSampleNodes decode_labels_sample_g(VacsGraph& vg, ad::ValId z_switch, Rng& rng,
                                        double temperature, std::size_t max_len);

GaussianNodes decode_context_params_g(VacsGraph& vg, ad::ValId z_switch, ad::ValId h_label_final);

struct WordTeacherNodes {
    std::vector<ad::ValId> step_log_probs;
    ad::ValId log_lik;
};
WordTeacherNodes decode_words_teacher_g(VacsGraph& vg, ad::ValId z_context,
                                        std::span<const int> label_ids,
                                        std::span<const int> word_ids);

struct WordSampleNodes {
    std::vector<int> word_ids;
    std::vector<double> step_log_probs;
};
WordSampleNodes decode_words_sample_g(VacsGraph& vg, ad::ValId z_context,
                                      std::span<const int> label_ids, Rng& rng,
                                      double temperature);

// ---- plain-value surface ----

GaussianParams encode_context(const VacsParams& p, std::span<const int> word_ids);
GaussianParams encode_switching(const VacsParams& p, std::span<const double> z_context,
                                std::span<const int> label_ids);
std::vector<double> reparameterize(const GaussianParams& g, std::span<const double> noise);

struct LabelDecodeResult {
    std::vector<int> label_ids;
    std::vector<std::vector<double>> logits;
    std::vector<double> h_final;
    double log_lik = 0.0;  // teacher-forced mode only
};
LabelDecodeResult decode_labels_teacher(const VacsParams& p, std::span<const double> z_switch,
                                        std::span<const int> label_ids);
LabelDecodeResult decode_labels_sample(const VacsParams& p, std::span<const double> z_switch,
                                       std::uint64_t seed, double temperature,
                                       std::size_t max_len);

GaussianParams decode_context_params(const VacsParams& p, std::span<const double> z_switch,
                                     std::span<const double> h_label_final);

struct WordDecodeResult {
    std::vector<int> word_ids;
    std::vector<double> step_log_probs;
    double log_lik = 0.0;
};
WordDecodeResult decode_words_teacher(const VacsParams& p, std::span<const double> z_context,
                                      std::span<const int> label_ids,
                                      std::span<const int> word_ids);
WordDecodeResult decode_words_sample(const VacsParams& p, std::span<const double> z_context,
                                     std::span<const int> label_ids, std::uint64_t seed,
                                     double temperature);

struct PriorSample {
    LabeledSentence sentence;
    LatentPair latents;
};

// Draws z_l from the standard normal, decodes labels, draws z_c from the
// decoded context distribution, then decodes words. Empty label draws are
// retried; persistent emptiness signals a collapsed model.
PriorSample prior_sample(const VacsParams& p, const Vocabulary& vocab, std::uint64_t seed,
                         std::size_t max_len, double temperature);

}  // namespace vacs
