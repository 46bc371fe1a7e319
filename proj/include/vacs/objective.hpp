// Copyright 2026 VACS Contributors
// SPDX-License-Identifier: Apache-2.0
//
// Training objective and optimization: single-sample ELBO with analytic KL
// terms, logistic KL-weight annealing, Adam with global-norm clipping, and
// the two-phase schedule (parallel monolingual first, then real
// code-switched text).

#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "vacs/data.hpp"
#include "vacs/model.hpp"

namespace vacs {

struct TrainConfig {
    double lr = 1e-3;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    std::size_t batch_size = 16;
    std::size_t epochs_phase1 = 4;
    std::size_t epochs_phase2 = 4;
    double anneal_t0 = 2500.0;
    double anneal_k = 0.0025;
    double clip_norm = 5.0;
    std::uint64_t seed = 1;

    void validate() const;
};

struct ElboBreakdown {
    double recon_labels = 0.0;
    double recon_words = 0.0;
    double kl_switch = 0.0;   // KL(q(z_l | z_c, Y) || N(0, I))
    double kl_context = 0.0;  // KL(q(z_c | W) || p(z_c | z_l, h))
    double beta = 0.0;
    double total = 0.0;       // recon - beta * (kl_switch + kl_context)

    double recon() const { return recon_labels + recon_words; }
};

// Logistic annealing weight: 1 / (1 + exp(-k (step - t0))).
double kl_anneal(double step, double t0, double k);

// Differentiable ELBO over one padded batch; padded positions are excluded
// via the recorded lengths. One latent sample per sentence.
struct ElboNodes {
    ad::ValId recon_labels;
    ad::ValId recon_words;
    ad::ValId kl_switch;
    ad::ValId kl_context;
    ad::ValId total;
    ad::ValId loss;  // -total, the minimization target
};
ElboNodes build_elbo(VacsGraph& vg, const Batch& batch, double beta, Rng& noise);

ElboBreakdown elbo(const VacsParams& params, const Batch& batch, double beta,
                   std::uint64_t seed);

// Reads per-parameter gradients out of a graph after backward().
VacsParams extract_grads(const ad::Graph& g, const VacsParams& like);

// ---- Adam with bias correction and global-norm clipping ----

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double clip_norm = 5.0;
};

struct AdamState {
    std::vector<Tensor> m;
    std::vector<Tensor> v;
    std::int64_t t = 0;
};

void adam_step(std::span<Tensor* const> params, std::span<const Tensor* const> grads,
               std::span<const std::string> names, AdamState& state, const AdamConfig& cfg);

// Convenience over the model's parameter set.
AdamState adam_state_like(const VacsParams& params);
void adam_step(VacsParams& params, const VacsParams& grads, AdamState& state,
               const AdamConfig& cfg);

// ---- two-phase training ----

struct StepRecord {
    std::size_t step = 0;
    std::size_t epoch = 0;
    int phase = 1;
    ElboBreakdown elbo;
};

struct TrainResult {
    VacsParams params;
    std::vector<StepRecord> log;
    bool diverged = false;
};

// Phase 1 trains on the parallel corpus, phase 2 continues on real
// code-switched data; the annealing step counter runs across both. Per-epoch
// checkpoints go to checkpoint_dir when given; divergence aborts with the
// last epoch-end parameters. Fully deterministic for a fixed seed.
TrainResult train(VacsParams params, const Corpus& parallel, const Corpus& real_cs,
                  const Vocabulary& vocab, const TrainConfig& cfg,
                  const std::string& checkpoint_dir = "", std::ostream* log_out = nullptr);

// Window-mean of per-step ELBO totals over [step, step + window). Batches are
// length-bucketed, so the raw per-step total swings with sentence length; a
// window covering many batches is what the training-progress checks compare.
double smoothed_total(const std::vector<StepRecord>& log, std::size_t step,
                      std::size_t window = 50);

}  // namespace vacs
