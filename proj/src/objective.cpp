// Copyright 2026 VACS Contributors
// SPDX-License-Identifier: Apache-2.0

#include "vacs/objective.hpp"

#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "vacs/checkpoint.hpp"
#include "vacs/rng.hpp"

namespace vacs {

void TrainConfig::validate() const {
    if (lr <= 0.0) throw std::invalid_argument("TrainConfig: lr must be > 0");
    if (!(adam_beta1 > 0.0 && adam_beta1 < 1.0 && adam_beta2 > 0.0 && adam_beta2 < 1.0)) {
        throw std::invalid_argument("TrainConfig: Adam betas must lie in (0, 1)");
    }
    if (clip_norm <= 0.0) throw std::invalid_argument("TrainConfig: clip_norm must be > 0");
    if (batch_size == 0) throw std::invalid_argument("TrainConfig: batch_size must be >= 1");
}

double kl_anneal(double step, double t0, double k) {
    return 1.0 / (1.0 + std::exp(-k * (step - t0)));
}

ElboNodes build_elbo(VacsGraph& vg, const Batch& batch, double beta, Rng& noise) {
    if (!(beta >= 0.0 && beta <= 1.0)) {
        throw std::invalid_argument("elbo: beta must lie in [0, 1]");
    }
    if (batch.size() == 0) {
        throw std::invalid_argument("elbo: empty batch");
    }
    ad::Graph& g = *vg.g;
    const std::size_t dc = vg.p->cfg.context_latent_dim;
    const std::size_t dl = vg.p->cfg.switch_latent_dim;

    std::vector<ad::ValId> label_lls, word_lls, kl_switches, kl_contexts;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const std::size_t len = batch.lengths[i];
        std::span<const int> words(batch.word_ids[i].data(), len);
        std::span<const int> labels(batch.label_ids[i].data(), len);

        GaussianNodes q_ctx = encode_context_g(vg, words);
        ad::ValId eps_c = g.input(Tensor::vec(noise.normal_vec(dc)));
        ad::ValId z_ctx = reparameterize_g(vg, q_ctx, eps_c);

        GaussianNodes q_swi = encode_switching_g(vg, z_ctx, labels);
        ad::ValId eps_l = g.input(Tensor::vec(noise.normal_vec(dl)));
        ad::ValId z_swi = reparameterize_g(vg, q_swi, eps_l);

        LabelTeacherNodes lab = decode_labels_teacher_g(vg, z_swi, labels);
        GaussianNodes p_ctx = decode_context_params_g(vg, z_swi, lab.h_final);
        WordTeacherNodes wrd = decode_words_teacher_g(vg, z_ctx, labels, words);

        label_lls.push_back(lab.log_lik);
        word_lls.push_back(wrd.log_lik);
        kl_switches.push_back(kl_standard_g(g, q_swi));
        kl_contexts.push_back(kl_gaussians_g(g, q_ctx, p_ctx));
    }

    const double inv_b = 1.0 / static_cast<double>(batch.size());
    ElboNodes out;
    out.recon_labels = g.scale(g.add_n(label_lls), inv_b);
    out.recon_words = g.scale(g.add_n(word_lls), inv_b);
    out.kl_switch = g.scale(g.add_n(kl_switches), inv_b);
    out.kl_context = g.scale(g.add_n(kl_contexts), inv_b);
    ad::ValId recon = g.add(out.recon_labels, out.recon_words);
    ad::ValId kl_term = g.scale(g.add(out.kl_switch, out.kl_context), beta);
    out.total = g.sub(recon, kl_term);
    out.loss = g.scale(out.total, -1.0);
    return out;
}

namespace {

ElboBreakdown read_breakdown(const ad::Graph& g, const ElboNodes& nodes, double beta) {
    ElboBreakdown b;
    b.recon_labels = g.scalar_value(nodes.recon_labels);
    b.recon_words = g.scalar_value(nodes.recon_words);
    b.kl_switch = g.scalar_value(nodes.kl_switch);
    b.kl_context = g.scalar_value(nodes.kl_context);
    b.beta = beta;
    b.total = g.scalar_value(nodes.total);
    return b;
}

}  // namespace

ElboBreakdown elbo(const VacsParams& params, const Batch& batch, double beta,
                   std::uint64_t seed) {
    ad::Graph g;
    VacsGraph vg = bind_vacs(g, params);
    Rng noise(seed);
    ElboNodes nodes = build_elbo(vg, batch, beta, noise);
    return read_breakdown(g, nodes, beta);
}

VacsParams extract_grads(const ad::Graph& g, const VacsParams& like) {
    VacsParams grads = like;
    grads.visit([&](const std::string& name, Tensor& t) {
        t = g.grad(static_cast<ad::ValId>(g.leaf_by_name(name)));
    });
    return grads;
}

// ---- Adam ----

void adam_step(std::span<Tensor* const> params, std::span<const Tensor* const> grads,
               std::span<const std::string> names, AdamState& state, const AdamConfig& cfg) {
    if (params.size() != grads.size() || params.size() != names.size()) {
        throw std::invalid_argument("adam_step: parameter/gradient count mismatch");
    }
    if (state.m.empty()) {
        for (const Tensor* p : params) {
            state.m.emplace_back(p->shape());
            state.v.emplace_back(p->shape());
        }
    }
    if (state.m.size() != params.size()) {
        throw std::invalid_argument("adam_step: state does not match parameter set");
    }

    double sq_norm = 0.0;
    for (std::size_t i = 0; i < grads.size(); ++i) {
        const Tensor& gt = *grads[i];
        if (!gt.all_finite()) {
            throw std::runtime_error("adam_step: non-finite gradient for tensor '" +
                                     names[i] + "'");
        }
        for (std::size_t j = 0; j < gt.size(); ++j) sq_norm += gt[j] * gt[j];
    }
    const double norm = std::sqrt(sq_norm);
    const double scale = norm > cfg.clip_norm ? cfg.clip_norm / norm : 1.0;

    state.t += 1;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));
    for (std::size_t i = 0; i < params.size(); ++i) {
        Tensor& p = *params[i];
        const Tensor& gt = *grads[i];
        Tensor& m = state.m[i];
        Tensor& v = state.v[i];
        for (std::size_t j = 0; j < p.size(); ++j) {
            const double gj = gt[j] * scale;
            m[j] = cfg.beta1 * m[j] + (1.0 - cfg.beta1) * gj;
            v[j] = cfg.beta2 * v[j] + (1.0 - cfg.beta2) * gj * gj;
            const double mhat = m[j] / bc1;
            const double vhat = v[j] / bc2;
            p[j] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
        }
    }
}

namespace {

struct TensorRefs {
    std::vector<std::string> names;
    std::vector<Tensor*> params;
};

TensorRefs collect(VacsParams& p) {
    TensorRefs refs;
    p.visit([&](const std::string& name, Tensor& t) {
        refs.names.push_back(name);
        refs.params.push_back(&t);
    });
    return refs;
}

}  // namespace

AdamState adam_state_like(const VacsParams& params) {
    AdamState state;
    params.visit([&](const std::string&, const Tensor& t) {
        state.m.emplace_back(t.shape());
        state.v.emplace_back(t.shape());
    });
    return state;
}

void adam_step(VacsParams& params, const VacsParams& grads, AdamState& state,
               const AdamConfig& cfg) {
    TensorRefs p = collect(params);
    TensorRefs g = collect(const_cast<VacsParams&>(grads));
    std::vector<const Tensor*> gptrs(g.params.begin(), g.params.end());
    adam_step(p.params, gptrs, p.names, state, cfg);
}

// ---- two-phase training ----

namespace {

void log_record(std::ostream* out, const StepRecord& r) {
    if (out == nullptr) return;
    std::ostringstream os;
    os << "{\"step\":" << r.step << ",\"epoch\":" << r.epoch << ",\"phase\":" << r.phase
       << ",\"beta\":" << r.elbo.beta << ",\"recon\":" << r.elbo.recon()
       << ",\"kl_l\":" << r.elbo.kl_switch << ",\"kl_c\":" << r.elbo.kl_context
       << ",\"total\":" << r.elbo.total << "}";
    *out << os.str() << "\n";
}

}  // namespace

TrainResult train(VacsParams params, const Corpus& parallel, const Corpus& real_cs,
                  const Vocabulary& vocab, const TrainConfig& cfg,
                  const std::string& checkpoint_dir, std::ostream* log_out) {
    cfg.validate();
    if (parallel.empty() || real_cs.empty()) {
        throw std::invalid_argument("train: both corpora must be non-empty");
    }

    AdamConfig adam{cfg.lr, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps, cfg.clip_norm};
    AdamState state = adam_state_like(params);

    TrainResult result;
    VacsParams last_good = params;
    std::size_t step = 0;
    std::size_t global_epoch = 0;

    const std::pair<const Corpus*, std::size_t> phases[2] = {
        {&parallel, cfg.epochs_phase1},
        {&real_cs, cfg.epochs_phase2},
    };

    for (int phase = 0; phase < 2; ++phase) {
        const Corpus& corpus = *phases[phase].first;
        for (std::size_t epoch = 0; epoch < phases[phase].second; ++epoch, ++global_epoch) {
            auto batches = make_batches(corpus, vocab, cfg.batch_size,
                                        derive_seed(cfg.seed, 0xE70C + global_epoch));
            for (const Batch& batch : batches) {
                const double beta = kl_anneal(static_cast<double>(step), cfg.anneal_t0,
                                              cfg.anneal_k);
                ad::Graph g;
                VacsGraph vg = bind_vacs(g, params);
                Rng noise(derive_seed(cfg.seed, 0x4015E + step));
                ElboNodes nodes = build_elbo(vg, batch, beta, noise);
                ElboBreakdown b = read_breakdown(g, nodes, beta);
                if (!std::isfinite(b.total)) {
                    result.params = last_good;
                    result.diverged = true;
                    return result;
                }
                g.backward(nodes.loss);
                VacsParams grads = extract_grads(g, params);
                try {
                    adam_step(params, grads, state, adam);
                } catch (const std::runtime_error&) {
                    result.params = last_good;
                    result.diverged = true;
                    return result;
                }
                StepRecord rec{step, global_epoch, phase + 1, b};
                log_record(log_out, rec);
                result.log.push_back(std::move(rec));
                ++step;
            }
            last_good = params;
            if (!checkpoint_dir.empty()) {
                save_vacs_checkpoint(params, vocab, checkpoint_dir + "/checkpoint_last.json");
            }
            if (log_out != nullptr) log_out->flush();
        }
    }

    if (!checkpoint_dir.empty()) {
        save_vacs_checkpoint(params, vocab, checkpoint_dir + "/checkpoint_final.json");
    }
    result.params = std::move(params);
    return result;
}

double smoothed_total(const std::vector<StepRecord>& log, std::size_t step,
                      std::size_t window) {
    if (log.empty()) throw std::invalid_argument("smoothed_total: empty log");
    if (step >= log.size()) throw std::invalid_argument("smoothed_total: step beyond log");
    const std::size_t hi = std::min(step + window, log.size());
    double acc = 0.0;
    for (std::size_t i = step; i < hi; ++i) acc += log[i].elbo.total;
    return acc / static_cast<double>(hi - step);
}

}  // namespace vacs
