// Copyright 2026 VACS Contributors
// SPDX-License-Identifier: Apache-2.0

#include "vacs/model.hpp"

#include <algorithm>
#include <stdexcept>

namespace vacs {

namespace {

constexpr double kMaskedLogit = -1e30;
constexpr int kPriorRetryCap = 100;

std::vector<std::size_t> emb_shape(std::size_t rows, std::size_t dim) { return {rows, dim}; }

void check_label_ids(std::span<const int> label_ids, bool allow_trailing_eos) {
    if (label_ids.empty()) {
        throw std::invalid_argument("label sequence must be non-empty");
    }
    for (std::size_t i = 0; i < label_ids.size(); ++i) {
        const int l = label_ids[i];
        if (l == Vocabulary::kLabelS || l == Vocabulary::kLabelT) continue;
        if (l == Vocabulary::kLabelEos && allow_trailing_eos && i + 1 == label_ids.size()) {
            continue;
        }
        throw std::invalid_argument(
            l == Vocabulary::kLabelEos ? "label sequence contains interior EOS"
                                       : "label sequence contains an unknown label id");
    }
}

std::span<const int> strip_trailing_eos(std::span<const int> label_ids) {
    if (!label_ids.empty() && label_ids.back() == Vocabulary::kLabelEos) {
        return label_ids.subspan(0, label_ids.size() - 1);
    }
    return label_ids;
}

}  // namespace

// ---- parameters ----

VacsParams VacsParams::init(const VacsConfig& cfg, const Vocabulary& vocab, std::uint64_t seed,
                            const EmbeddingTable* aligned) {
    Rng rng(seed);
    VacsParams p;
    p.cfg = cfg;
    p.n_source = vocab.n_source();
    p.n_target = vocab.n_target();

    const std::size_t H = cfg.hidden_dim;
    const std::size_t E = cfg.embed_dim;
    const std::size_t L = cfg.label_embed_dim;
    const std::size_t dc = cfg.context_latent_dim;
    const std::size_t dl = cfg.switch_latent_dim;

    p.word_emb = init_uniform(emb_shape(vocab.total_ids(), E), rng);
    p.label_emb = init_uniform(emb_shape(Vocabulary::kLabelEmbRows, L), rng);

    p.enc_ctx = init_lstm(E, H, rng);
    p.enc_swi = init_lstm(L, H, rng);
    p.dec_lbl = init_lstm(L, H, rng);
    p.dec_word = init_lstm(E, H, rng);

    p.head_enc_ctx = init_affine(H, 2 * dc, rng);
    p.head_enc_swi = init_affine(H, 2 * dl, rng);
    p.head_dec_lbl = init_affine(H, Vocabulary::kLabelHeadDim, rng);
    p.head_dec_ctx = init_affine(H + dl, 2 * dc, rng);
    p.head_dec_word = init_affine(H + L, vocab.word_output_dim(), rng);

    p.proj_enc_swi_init = init_affine(dc, 2 * H, rng);
    p.proj_dec_lbl_init = init_affine(dl, 2 * H, rng);
    p.proj_dec_word_init = init_affine(dc, 2 * H, rng);

    if (aligned != nullptr && aligned->dim != 0) {
        if (aligned->dim != E) {
            throw std::invalid_argument("aligned embeddings have dimension " +
                                        std::to_string(aligned->dim) + ", model expects " +
                                        std::to_string(E));
        }
        for (std::size_t id = 0; id < aligned->covered.size(); ++id) {
            if (!aligned->covered[id]) continue;
            for (std::size_t j = 0; j < E; ++j) {
                p.word_emb.at(id, j) = aligned->vectors[id][j];
            }
        }
    }
    return p;
}

VacsParams VacsParams::zeros(const VacsConfig& cfg, const Vocabulary& vocab) {
    VacsParams p = init(cfg, vocab, 0);
    p.visit([](const std::string&, Tensor& t) { t.fill(0.0); });
    return p;
}

// ---- graph binding ----

VacsGraph bind_vacs(ad::Graph& g, const VacsParams& p) {
    VacsGraph vg;
    vg.g = &g;
    vg.p = &p;
    vg.word_emb = g.param("word_emb", p.word_emb);
    vg.label_emb = g.param("label_emb", p.label_emb);
    vg.enc_ctx = bind_lstm(g, "enc_ctx", p.enc_ctx);
    vg.enc_swi = bind_lstm(g, "enc_swi", p.enc_swi);
    vg.dec_lbl = bind_lstm(g, "dec_lbl", p.dec_lbl);
    vg.dec_word = bind_lstm(g, "dec_word", p.dec_word);
    vg.head_enc_ctx = bind_affine(g, "head_enc_ctx", p.head_enc_ctx);
    vg.head_enc_swi = bind_affine(g, "head_enc_swi", p.head_enc_swi);
    vg.head_dec_lbl = bind_affine(g, "head_dec_lbl", p.head_dec_lbl);
    vg.head_dec_ctx = bind_affine(g, "head_dec_ctx", p.head_dec_ctx);
    vg.head_dec_word = bind_affine(g, "head_dec_word", p.head_dec_word);
    vg.proj_enc_swi_init = bind_affine(g, "proj_enc_swi_init", p.proj_enc_swi_init);
    vg.proj_dec_lbl_init = bind_affine(g, "proj_dec_lbl_init", p.proj_dec_lbl_init);
    vg.proj_dec_word_init = bind_affine(g, "proj_dec_word_init", p.proj_dec_word_init);
    return vg;
}

ad::ValId VacsGraph::mask_for(int label_id, bool sampling) {
    if (!masks_built) {
        const std::size_t V = p->word_output_dim();
        const std::size_t nS = p->n_source;
        const std::size_t nT = p->n_target;
        for (int lang = 0; lang < 2; ++lang) {
            Tensor score = Tensor::full({V}, kMaskedLogit);
            const std::size_t lo = lang == 0 ? 0 : nS;
            const std::size_t hi = lang == 0 ? nS : nS + nT;
            for (std::size_t j = lo; j < hi; ++j) score[j] = 0.0;
            Tensor sample = score;
            score[nS + nT + static_cast<std::size_t>(lang)] = 0.0;  // UNK scores, never sampled
            score_mask[lang] = g->input(score);
            sample_mask[lang] = g->input(sample);
        }
        masks_built = true;
    }
    if (label_id != Vocabulary::kLabelS && label_id != Vocabulary::kLabelT) {
        throw std::invalid_argument("mask_for: label must be s or t");
    }
    return sampling ? sample_mask[label_id] : score_mask[label_id];
}

namespace {

LstmState zero_state(ad::Graph& g, std::size_t hidden) {
    ad::ValId z = g.input(Tensor({hidden}));
    return {z, z};
}

LstmState projected_state(VacsGraph& vg, const AffineNodes& proj, ad::ValId z) {
    ad::Graph& g = *vg.g;
    const std::size_t H = vg.p->cfg.hidden_dim;
    ad::ValId both = affine_apply(g, proj, z);
    return {g.slice(both, 0, H), g.slice(both, H, H)};
}

GaussianNodes split_gaussian(ad::Graph& g, ad::ValId head_out, std::size_t dim) {
    return {g.slice(head_out, 0, dim), g.slice(head_out, dim, dim)};
}

}  // namespace

GaussianNodes encode_context_g(VacsGraph& vg, std::span<const int> word_ids) {
    if (word_ids.empty()) {
        throw std::invalid_argument("encode_context: empty word sequence");
    }
    ad::Graph& g = *vg.g;
    LstmState state = zero_state(g, vg.p->cfg.hidden_dim);
    for (int w : word_ids) {
        state = lstm_step(g, vg.enc_ctx, g.row(vg.word_emb, static_cast<std::size_t>(w)), state);
    }
    ad::ValId head = affine_apply(g, vg.head_enc_ctx, state.h);
    return split_gaussian(g, head, vg.p->cfg.context_latent_dim);
}

GaussianNodes encode_switching_g(VacsGraph& vg, ad::ValId z_context,
                                 std::span<const int> label_ids) {
    check_label_ids(label_ids, false);
    ad::Graph& g = *vg.g;
    LstmState state = projected_state(vg, vg.proj_enc_swi_init, z_context);
    for (int y : label_ids) {
        state = lstm_step(g, vg.enc_swi, g.row(vg.label_emb, static_cast<std::size_t>(y)), state);
    }
    ad::ValId head = affine_apply(g, vg.head_enc_swi, state.h);
    return split_gaussian(g, head, vg.p->cfg.switch_latent_dim);
}

ad::ValId reparameterize_g(VacsGraph& vg, const GaussianNodes& q, ad::ValId eps) {
    ad::Graph& g = *vg.g;
    ad::ValId sigma = g.exp_op(g.scale(q.logvar, 0.5));
    return g.add(q.mean, g.mul(sigma, eps));
}

ad::ValId kl_gaussians_g(ad::Graph& g, const GaussianNodes& q, const GaussianNodes& p) {
    //   0.5 * sum( exp(lq - lp) + (mp - mq)^2 exp(-lp) - 1 + lp - lq )
    ad::ValId dlog = g.sub(q.logvar, p.logvar);
    ad::ValId ratio = g.exp_op(dlog);
    ad::ValId dmean = g.sub(p.mean, q.mean);
    ad::ValId maha = g.mul(g.mul(dmean, dmean), g.exp_op(g.scale(p.logvar, -1.0)));
    ad::ValId inner = g.add_const(g.sub(g.add(ratio, maha), dlog), -1.0);
    return g.scale(g.sum(inner), 0.5);
}

ad::ValId kl_standard_g(ad::Graph& g, const GaussianNodes& q) {
    const std::size_t d = g.value(q.mean).size();
    GaussianNodes std_normal{g.input(Tensor({d})), g.input(Tensor({d}))};
    return kl_gaussians_g(g, q, std_normal);
}

LabelTeacherNodes decode_labels_teacher_g(VacsGraph& vg, ad::ValId z_switch,
                                          std::span<const int> label_ids) {
    check_label_ids(label_ids, false);
    ad::Graph& g = *vg.g;
    LabelTeacherNodes out;
    LstmState state = projected_state(vg, vg.proj_dec_lbl_init, z_switch);
    int prev = Vocabulary::kLabelSos;
    std::vector<ad::ValId> picks;
    // One step per observed label, then the EOS step: n+1 logit rows total.
    for (std::size_t o = 0; o <= label_ids.size(); ++o) {
        state = lstm_step(g, vg.dec_lbl, g.row(vg.label_emb, static_cast<std::size_t>(prev)),
                          state);
        ad::ValId logits = affine_apply(g, vg.head_dec_lbl, state.h);
        out.logits.push_back(logits);
        const int observed = o < label_ids.size() ? label_ids[o] : Vocabulary::kLabelEos;
        picks.push_back(g.pick(g.log_softmax(logits), static_cast<std::size_t>(observed)));
        prev = observed;
    }
    out.log_lik = g.add_n(picks);
    out.h_final = state.h;
    return out;
}

LabelSampleNodes decode_labels_sample_g(VacsGraph& vg, ad::ValId z_switch, Rng& rng,
                                        double temperature, std::size_t max_len) {
    if (max_len == 0) {
        throw std::invalid_argument("decode_labels: max_len must be >= 1");
    }
    if (temperature <= 0.0) {
        throw std::invalid_argument("decode_labels: temperature must be > 0");
    }
    ad::Graph& g = *vg.g;
    LabelSampleNodes out;
    LstmState state = projected_state(vg, vg.proj_dec_lbl_init, z_switch);
    int prev = Vocabulary::kLabelSos;
    for (;;) {
        state = lstm_step(g, vg.dec_lbl, g.row(vg.label_emb, static_cast<std::size_t>(prev)),
                          state);
        ad::ValId logits = affine_apply(g, vg.head_dec_lbl, state.h);
        out.logits.push_back(logits);
        if (out.label_ids.size() == max_len) {
            break;  // forced EOS; this step is the terminal event
        }
        const std::vector<double>& lv = g.value(logits).values();
        std::vector<double> scaled(lv);
        for (double& v : scaled) v /= temperature;
        const std::size_t drawn = rng.categorical(ad::softmax(scaled));
        if (drawn == static_cast<std::size_t>(Vocabulary::kLabelEos)) break;
        out.label_ids.push_back(static_cast<int>(drawn));
        prev = static_cast<int>(drawn);
    }
    out.h_final = state.h;
    return out;
}

GaussianNodes decode_context_params_g(VacsGraph& vg, ad::ValId z_switch,
                                      ad::ValId h_label_final) {
    ad::Graph& g = *vg.g;
    ad::ValId head = affine_apply(g, vg.head_dec_ctx, g.concat(h_label_final, z_switch));
    return split_gaussian(g, head, vg.p->cfg.context_latent_dim);
}

WordTeacherNodes decode_words_teacher_g(VacsGraph& vg, ad::ValId z_context,
                                        std::span<const int> label_ids,
                                        std::span<const int> word_ids) {
    check_label_ids(label_ids, true);
    const auto labels = strip_trailing_eos(label_ids);
    if (labels.size() != word_ids.size()) {
        throw std::invalid_argument("decode_words: words/labels length mismatch");
    }
    const std::size_t nS = vg.p->n_source;
    const std::size_t nT = vg.p->n_target;
    for (std::size_t o = 0; o < labels.size(); ++o) {
        const std::size_t w = static_cast<std::size_t>(word_ids[o]);
        const bool src_owned = w < nS || w == nS + nT;
        const bool tgt_owned = (w >= nS && w < nS + nT) || w == nS + nT + 1;
        if (w >= vg.p->word_output_dim() ||
            (labels[o] == Vocabulary::kLabelS ? !src_owned : !tgt_owned)) {
            throw std::invalid_argument("decode_words: word id " + std::to_string(w) +
                                        " is not owned by the language of its label");
        }
    }

    ad::Graph& g = *vg.g;
    WordTeacherNodes out;
    LstmState state = projected_state(vg, vg.proj_dec_word_init, z_context);
    std::size_t prev = nS + nT + 2;  // SOS row
    std::vector<ad::ValId> picks;
    for (std::size_t o = 0; o < labels.size(); ++o) {
        state = lstm_step(g, vg.dec_word, g.row(vg.word_emb, prev), state);
        ad::ValId feat = g.concat(state.h, g.row(vg.label_emb,
                                                 static_cast<std::size_t>(labels[o])));
        ad::ValId logits = affine_apply(g, vg.head_dec_word, feat);
        ad::ValId masked = g.add(logits, vg.mask_for(labels[o], /*sampling=*/false));
        ad::ValId lp = g.pick(g.log_softmax(masked), static_cast<std::size_t>(word_ids[o]));
        out.step_log_probs.push_back(lp);
        picks.push_back(lp);
        prev = static_cast<std::size_t>(word_ids[o]);
    }
    out.log_lik = g.add_n(picks);
    return out;
}

WordSampleNodes decode_words_sample_g(VacsGraph& vg, ad::ValId z_context,
                                      std::span<const int> label_ids, Rng& rng,
                                      double temperature) {
    check_label_ids(label_ids, true);
    const auto labels = strip_trailing_eos(label_ids);
    if (temperature <= 0.0) {
        throw std::invalid_argument("decode_words: temperature must be > 0");
    }
    const std::size_t nS = vg.p->n_source;
    const std::size_t nT = vg.p->n_target;
    for (int y : labels) {
        if ((y == Vocabulary::kLabelS && nS == 0) || (y == Vocabulary::kLabelT && nT == 0)) {
            throw std::runtime_error("decode_words: vocabulary has no generable words for label " +
                                     std::string(y == Vocabulary::kLabelS ? "s" : "t"));
        }
    }

    ad::Graph& g = *vg.g;
    WordSampleNodes out;
    LstmState state = projected_state(vg, vg.proj_dec_word_init, z_context);
    std::size_t prev = nS + nT + 2;  // SOS row
    for (std::size_t o = 0; o < labels.size(); ++o) {
        state = lstm_step(g, vg.dec_word, g.row(vg.word_emb, prev), state);
        ad::ValId feat = g.concat(state.h, g.row(vg.label_emb,
                                                 static_cast<std::size_t>(labels[o])));
        ad::ValId logits = affine_apply(g, vg.head_dec_word, feat);
        ad::ValId masked = g.add(g.scale(logits, 1.0 / temperature),
                                 vg.mask_for(labels[o], /*sampling=*/true));
        const std::vector<double> lsm = ad::log_softmax(g.value(masked).values());
        std::vector<double> probs(lsm.size());
        for (std::size_t j = 0; j < lsm.size(); ++j) probs[j] = std::exp(lsm[j]);
        const std::size_t drawn = rng.categorical(probs);
        out.word_ids.push_back(static_cast<int>(drawn));
        out.step_log_probs.push_back(lsm[drawn]);
        prev = drawn;
    }
    return out;
}

// ---- plain-value surface ----

GaussianParams encode_context(const VacsParams& p, std::span<const int> word_ids) {
    ad::Graph g;
    VacsGraph vg = bind_vacs(g, p);
    GaussianNodes q = encode_context_g(vg, word_ids);
    return {g.value(q.mean).values(), g.value(q.logvar).values()};
}

GaussianParams encode_switching(const VacsParams& p, std::span<const double> z_context,
                                std::span<const int> label_ids) {
    if (z_context.size() != p.cfg.context_latent_dim) {
        throw std::invalid_argument("encode_switching: z_c has wrong dimension");
    }
    ad::Graph g;
    VacsGraph vg = bind_vacs(g, p);
    ad::ValId z = g.input(Tensor::vec({z_context.begin(), z_context.end()}));
    GaussianNodes q = encode_switching_g(vg, z, label_ids);
    return {g.value(q.mean).values(), g.value(q.logvar).values()};
}

std::vector<double> reparameterize(const GaussianParams& g, std::span<const double> noise) {
    if (g.mean.size() != g.logvar.size() || noise.size() != g.mean.size()) {
        throw std::invalid_argument("reparameterize: length mismatch");
    }
    std::vector<double> z(g.mean.size());
    for (std::size_t j = 0; j < z.size(); ++j) {
        z[j] = g.mean[j] + std::exp(0.5 * g.logvar[j]) * noise[j];
    }
    return z;
}

LabelDecodeResult decode_labels_teacher(const VacsParams& p, std::span<const double> z_switch,
                                        std::span<const int> label_ids) {
    ad::Graph g;
    VacsGraph vg = bind_vacs(g, p);
    ad::ValId z = g.input(Tensor::vec({z_switch.begin(), z_switch.end()}));
    LabelTeacherNodes nodes = decode_labels_teacher_g(vg, z, label_ids);
    LabelDecodeResult out;
    out.label_ids.assign(label_ids.begin(), label_ids.end());
    for (ad::ValId l : nodes.logits) out.logits.push_back(g.value(l).values());
    out.h_final = g.value(nodes.h_final).values();
    out.log_lik = g.scalar_value(nodes.log_lik);
    return out;
}

LabelDecodeResult decode_labels_sample(const VacsParams& p, std::span<const double> z_switch,
                                       std::uint64_t seed, double temperature,
                                       std::size_t max_len) {
    ad::Graph g;
    VacsGraph vg = bind_vacs(g, p);
    ad::ValId z = g.input(Tensor::vec({z_switch.begin(), z_switch.end()}));
    Rng rng(seed);
    LabelSampleNodes nodes = decode_labels_sample_g(vg, z, rng, temperature, max_len);
    LabelDecodeResult out;
    out.label_ids = nodes.label_ids;
    for (ad::ValId l : nodes.logits) out.logits.push_back(g.value(l).values());
    out.h_final = g.value(nodes.h_final).values();
    return out;
}

GaussianParams decode_context_params(const VacsParams& p, std::span<const double> z_switch,
                                     std::span<const double> h_label_final) {
    if (z_switch.size() != p.cfg.switch_latent_dim ||
        h_label_final.size() != p.cfg.hidden_dim) {
        throw std::invalid_argument("decode_context_params: dimension mismatch");
    }
    ad::Graph g;
    VacsGraph vg = bind_vacs(g, p);
    ad::ValId z = g.input(Tensor::vec({z_switch.begin(), z_switch.end()}));
    ad::ValId h = g.input(Tensor::vec({h_label_final.begin(), h_label_final.end()}));
    GaussianNodes out = decode_context_params_g(vg, z, h);
    return {g.value(out.mean).values(), g.value(out.logvar).values()};
}

WordDecodeResult decode_words_teacher(const VacsParams& p, std::span<const double> z_context,
                                      std::span<const int> label_ids,
                                      std::span<const int> word_ids) {
    ad::Graph g;
    VacsGraph vg = bind_vacs(g, p);
    ad::ValId z = g.input(Tensor::vec({z_context.begin(), z_context.end()}));
    WordTeacherNodes nodes = decode_words_teacher_g(vg, z, label_ids, word_ids);
    WordDecodeResult out;
    out.word_ids.assign(word_ids.begin(), word_ids.end());
    for (ad::ValId lp : nodes.step_log_probs) out.step_log_probs.push_back(g.scalar_value(lp));
    out.log_lik = g.scalar_value(nodes.log_lik);
    return out;
}

WordDecodeResult decode_words_sample(const VacsParams& p, std::span<const double> z_context,
                                     std::span<const int> label_ids, std::uint64_t seed,
                                     double temperature) {
    ad::Graph g;
    VacsGraph vg = bind_vacs(g, p);
    ad::ValId z = g.input(Tensor::vec({z_context.begin(), z_context.end()}));
    Rng rng(seed);
    WordSampleNodes nodes = decode_words_sample_g(vg, z, label_ids, rng, temperature);
    WordDecodeResult out;
    out.word_ids = nodes.word_ids;
    out.step_log_probs = nodes.step_log_probs;
    for (double lp : nodes.step_log_probs) out.log_lik += lp;
    return out;
}

PriorSample prior_sample(const VacsParams& p, const Vocabulary& vocab, std::uint64_t seed,
                         std::size_t max_len, double temperature) {
    if (max_len == 0) {
        throw std::invalid_argument("prior_sample: max_len must be >= 1");
    }
    Rng rng(seed);
    for (int attempt = 0; attempt < kPriorRetryCap; ++attempt) {
        ad::Graph g;
        VacsGraph vg = bind_vacs(g, p);
        ad::ValId z_switch =
            g.input(Tensor::vec(rng.normal_vec(p.cfg.switch_latent_dim)));
        LabelSampleNodes labels = decode_labels_sample_g(vg, z_switch, rng, temperature, max_len);
        if (labels.label_ids.empty()) continue;

        GaussianNodes ctx_prior = decode_context_params_g(vg, z_switch, labels.h_final);
        ad::ValId eps = g.input(Tensor::vec(rng.normal_vec(p.cfg.context_latent_dim)));
        ad::ValId z_context = reparameterize_g(vg, ctx_prior, eps);
        WordSampleNodes words =
            decode_words_sample_g(vg, z_context, labels.label_ids, rng, temperature);

        PriorSample out;
        for (std::size_t o = 0; o < labels.label_ids.size(); ++o) {
            out.sentence.words.push_back(vocab.word_string(words.word_ids[o]));
            out.sentence.labels.push_back(labels.label_ids[o] == Vocabulary::kLabelS
                                              ? Lang::Source
                                              : Lang::Target);
        }
        out.latents.z_context = g.value(z_context).values();
        out.latents.z_switch = g.value(z_switch).values();
        return out;
    }
    throw std::runtime_error(
        "prior_sample: model collapse, label decoder produced " +
        std::to_string(kPriorRetryCap) + " consecutive empty sequences");
}

}  // namespace vacs
