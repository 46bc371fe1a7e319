// Copyright 2026 VACS Contributors
// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite. Eight criteria, one pass/fail line each on stdout;
// nonzero exit if any fails. Progress streams to stderr. The expensive
// criteria share one trained generator: criterion 5 trains it, criteria 6-7
// consume its synthetic corpus, criterion 4 samples from its checkpoint.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

#include "metric_oracle.hpp"
#include "vacs/checkpoint.hpp"
#include "vacs/generation.hpp"
#include "vacs/metrics.hpp"
#include "vacs/model.hpp"
#include "vacs/objective.hpp"
#include "vacs/payload.hpp"
#include "vacs/rng.hpp"

using namespace vacs;
using Clock = std::chrono::steady_clock;

namespace {

struct Criterion {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

double elapsed(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v, int prec = 3) {
    std::ostringstream os;
    os.precision(prec);
    os << v;
    return os.str();
}

Vocabulary micro_vocab() {
    Corpus c;
    LabeledSentence a;
    a.words = {"sa", "sb"};
    a.labels = {Lang::Source, Lang::Source};
    LabeledSentence b;
    b.words = {"ta", "tb"};
    b.labels = {Lang::Target, Lang::Target};
    c.sentences = {a, b};
    return Vocabulary::build({&c}, 10, 1);
}

// 1. Full ELBO gradient against central finite differences on a tiny model.
Criterion criterion_gradient() {
    const auto start = Clock::now();
    Criterion c{1, "ELBO gradient vs central finite differences"};

    Vocabulary v = micro_vocab();
    VacsConfig cfg;
    cfg.embed_dim = 4;
    cfg.label_embed_dim = 3;
    cfg.hidden_dim = 6;
    cfg.context_latent_dim = 3;
    cfg.switch_latent_dim = 2;
    VacsParams params = VacsParams::init(cfg, v, 1234);

    Corpus batch_corpus;
    LabeledSentence s1;
    s1.words = {"sa", "ta"};
    s1.labels = {Lang::Source, Lang::Target};
    LabeledSentence s2;
    s2.words = {"tb", "sb"};
    s2.labels = {Lang::Target, Lang::Source};
    batch_corpus.sentences = {s1, s2};
    Batch batch = make_batches(batch_corpus, v, 2, 0).at(0);

    ad::Graph g;
    VacsGraph vg = bind_vacs(g, params);
    Rng noise(777);
    ElboNodes nodes = build_elbo(vg, batch, 0.6, noise);
    const double err = g.grad_check(nodes.loss, 1e-5);

    c.seconds = elapsed(start);
    c.pass = err < 1e-4 && c.seconds < 60.0;
    c.detail = "max rel err " + fmt(err, 2) + " (limit 1e-4)";
    return c;
}

// 2. Closed-form KL against a Monte-Carlo estimate, 1e6 samples, 3 sigma.
Criterion criterion_kl_oracle() {
    const auto start = Clock::now();
    Criterion c{2, "closed-form KL vs Monte-Carlo oracle"};

    Rng rng(5511);
    const std::size_t n_samples = 1000000;
    bool all_ok = true;
    double worst_z = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t d = 1 + rng.below(5);
        std::vector<double> mq(d), lq(d), mp(d), lp(d);
        for (std::size_t j = 0; j < d; ++j) {
            mq[j] = rng.uniform(-2.0, 2.0);
            lq[j] = rng.uniform(-1.5, 1.5);
            mp[j] = rng.uniform(-2.0, 2.0);
            lp[j] = rng.uniform(-1.5, 1.5);
        }
        const double closed = ad::kl_diag_gaussian(mq, lq, mp, lp);

        // E_q[ln q - ln p] by direct sampling.
        double sum = 0.0, sum_sq = 0.0;
        for (std::size_t i = 0; i < n_samples; ++i) {
            double term = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
                const double x = mq[j] + std::exp(0.5 * lq[j]) * rng.normal();
                const double dq = x - mq[j];
                const double dp = x - mp[j];
                const double ln_q = -0.5 * (lq[j] + dq * dq / std::exp(lq[j]));
                const double ln_p = -0.5 * (lp[j] + dp * dp / std::exp(lp[j]));
                term += ln_q - ln_p;
            }
            sum += term;
            sum_sq += term * term;
        }
        const double mean = sum / static_cast<double>(n_samples);
        const double var = sum_sq / static_cast<double>(n_samples) - mean * mean;
        const double sigma = std::sqrt(var / static_cast<double>(n_samples));
        const double z = std::abs(closed - mean) / sigma;
        worst_z = std::max(worst_z, z);
        if (z > 3.0) all_ok = false;
    }

    c.seconds = elapsed(start);
    c.pass = all_ok && c.seconds < 60.0;
    c.detail = "20 pairs x 1e6 samples, worst |z| = " + fmt(worst_z, 3) + " (limit 3)";
    return c;
}

// 3. Metric implementations against the brute-force oracle plus pinned values.
Criterion criterion_metric_oracle() {
    const auto start = Clock::now();
    Criterion c{3, "metrics vs brute-force oracle"};

    auto sent_of = [](const std::string& labels) {
        LabeledSentence s;
        for (char ch : labels) {
            s.words.push_back(std::string(1, ch) + "x");
            s.labels.push_back(ch == 's' ? Lang::Source : Lang::Target);
        }
        return s;
    };
    auto corpus_of = [&](std::vector<std::string> labelings) {
        Corpus out;
        for (const auto& l : labelings) out.sentences.push_back(sent_of(l));
        return out;
    };

    bool ok = true;
    std::string why;
    // Pinned values first.
    if (std::abs(cmi(sent_of("sstt")) - 0.375) > 1e-12) ok = false, why = "cmi sstt";
    if (std::abs(cmi(sent_of("stst")) - 0.625) > 1e-12) ok = false, why = "cmi stst";
    if (std::abs(m_index(corpus_of({"ssst"})) - 0.6) > 1e-12) ok = false, why = "m_index 3:1";
    if (std::abs(burstiness(corpus_of({"sttsss"})) - (-0.42020)) > 1e-5) {
        ok = false, why = "burstiness {1,2,3}";
    }
    if (std::abs(span_entropy(corpus_of({"st", "sstt"})) - 1.0) > 1e-12) {
        ok = false, why = "span entropy 1 bit";
    }

    // 100 random corpora against the oracle.
    Rng rng(31415);
    double worst = 0.0;
    for (int rep = 0; rep < 100 && ok; ++rep) {
        Corpus corpus;
        const std::size_t n = 1 + rng.below(10);
        for (std::size_t i = 0; i < n; ++i) {
            std::string labels;
            const double stay = rng.uniform(0.3, 1.0);
            char cur = rng.bernoulli(0.5) ? 's' : 't';
            const std::size_t len = 1 + rng.below(16);
            for (std::size_t j = 0; j < len; ++j) {
                if (j > 0 && !rng.bernoulli(stay)) cur = cur == 's' ? 't' : 's';
                labels.push_back(cur);
            }
            corpus.sentences.push_back(sent_of(labels));
        }
        const double diffs[4] = {
            std::abs(avg_cmi(corpus) - oracle::avg_cmi(corpus)),
            std::abs(m_index(corpus) - oracle::m_index(corpus)),
            std::abs(burstiness(corpus) - oracle::burstiness(corpus)),
            std::abs(span_entropy(corpus) - oracle::span_entropy(corpus))};
        for (double d : diffs) {
            worst = std::max(worst, d);
            if (d > 1e-9) ok = false, why = "oracle divergence";
        }
    }

    c.seconds = elapsed(start);
    c.pass = ok;
    c.detail = ok ? "pinned values exact, worst oracle gap " + fmt(worst, 2)
                  : "failed at: " + why;
    return c;
}

// 8. Uniform predictor perplexity equals the output vocabulary size.
Criterion criterion_uniform_ppl() {
    const auto start = Clock::now();
    Criterion c{8, "uniform-predictor perplexity equals vocabulary size"};

    ToyConfig toy;
    toy.vocab_per_lang = 40;
    toy.stay_prob = 0.6;
    auto data = synth_toy_corpus(toy, 40, 40, 11);
    Vocabulary v = Vocabulary::build({&data.mono, &data.code_switched}, 100, 1);

    PayloadConfig pcfg;
    pcfg.char_embed_dim = 8;
    pcfg.filters_per_width = 8;
    pcfg.hidden_dim = 16;
    PayloadParams params = PayloadParams::init(pcfg, v, 3);
    params.head.w.fill(0.0);
    params.head.b.fill(0.0);

    const double ppl = perplexity(params, v, data.code_switched);
    const double expected = static_cast<double>(params.output_dim());
    const double gap = std::abs(ppl - expected);

    c.seconds = elapsed(start);
    c.pass = gap < 1e-9;
    c.detail = "PPL " + fmt(ppl, 15) + " vs V = " + fmt(expected, 15) + ", gap " + fmt(gap, 2);
    return c;
}

struct PipelineArtifacts {
    Vocabulary vocab = Vocabulary::from_word_lists({}, {});
    VacsParams trained;
    Corpus mono;
    Corpus cs_train;
    Corpus cs_valid;
    Corpus cs_test;
    GeneratedCorpus gcs;
    std::string checkpoint_path;
};

// 5. Training sanity on the prescribed toy corpus.
Criterion criterion_training(PipelineArtifacts& art, const std::string& work_dir) {
    const auto start = Clock::now();
    Criterion c{5, "training improves smoothed ELBO with saturating annealing"};

    ToyConfig toy;
    toy.vocab_per_lang = 200;
    toy.bigram_concentration = 0.05;
    toy.stay_prob = 0.7;
    toy.len_min = 4;
    toy.len_max = 18;
    auto train_data = synth_toy_corpus(toy, 1000, 1000, derive_seed(20260808, 1));
    auto heldout = synth_toy_corpus(toy, 0, 2000, derive_seed(20260808, 2));
    art.mono = train_data.mono;
    art.cs_train = train_data.code_switched;
    art.cs_valid.provenance = art.cs_test.provenance = Provenance::Toy;
    for (std::size_t i = 0; i < heldout.code_switched.size(); ++i) {
        (i < 1000 ? art.cs_valid : art.cs_test)
            .sentences.push_back(heldout.code_switched.sentences[i]);
    }
    art.vocab = Vocabulary::build({&art.mono, &art.cs_train}, 200, 1);

    const std::string emb_path = work_dir + "/aligned_embeddings.txt";
    write_toy_aligned_embeddings(toy, 64, 20260808, emb_path);
    EmbeddingTable aligned = load_embeddings(emb_path, art.vocab);

    VacsConfig mcfg;  // desk-scale defaults
    VacsParams init = VacsParams::init(mcfg, art.vocab, derive_seed(20260808, 4), &aligned);

    TrainConfig tcfg;
    tcfg.batch_size = 16;
    tcfg.epochs_phase1 = 8;
    tcfg.epochs_phase2 = 8;
    tcfg.anneal_t0 = 150.0;
    tcfg.anneal_k = 0.04;
    tcfg.seed = derive_seed(20260808, 5);

    TrainResult result = train(std::move(init), art.mono, art.cs_train, art.vocab, tcfg);
    art.trained = result.params;
    art.checkpoint_path = work_dir + "/acceptance_checkpoint.json";
    save_vacs_checkpoint(art.trained, art.vocab, art.checkpoint_path);

    bool ok = !result.diverged && result.log.size() > 550;
    std::string why;
    const double early = smoothed_total(result.log, 0);
    const double later = smoothed_total(result.log, 500);
    if (!(later > early)) ok = false, why = "no ELBO improvement";

    double prev_beta = -1.0;
    bool monotone = true;
    for (const auto& rec : result.log) {
        if (rec.elbo.beta < prev_beta) monotone = false;
        prev_beta = rec.elbo.beta;
    }
    if (!monotone) ok = false, why = "beta not monotone";
    if (!(prev_beta > 0.99)) ok = false, why = "beta did not reach 0.99";

    c.seconds = elapsed(start);
    c.pass = ok && c.seconds < 600.0;
    c.detail = "smoothed ELBO " + fmt(early, 4) + " -> " + fmt(later, 4) + " (steps 0/500), " +
               "final beta " + fmt(prev_beta, 6) + (why.empty() ? "" : "; " + why);
    return c;
}

// 6. Payload perplexity direction: Mono|VACS-gCS at least 5% under Mono.
Criterion criterion_extrinsic(PipelineArtifacts& art, Criterion& table1_out) {
    const auto start = Clock::now();
    Criterion c{6, "Mono|VACS-gCS payload perplexity at least 5% under Mono"};

    GenerateOptions gen;
    gen.count = 5000;
    gen.max_len = 30;
    gen.temperature = 1.0;
    gen.seed = derive_seed(20260808, 6);
    art.gcs = generate_corpus(art.trained, art.vocab, gen);

    PayloadConfig pcfg;  // desk-scale defaults
    PayloadTrainConfig ptcfg;
    std::vector<Curriculum> curricula;
    curricula.push_back({"Mono", {{art.mono, 4}}});
    curricula.push_back({"Mono|VACS-gCS", {{art.mono, 4}, {art.gcs.corpus, 2}}});
    ExperimentTable table = run_experiment_table(curricula, pcfg, ptcfg, art.cs_valid,
                                                 art.cs_test, 200, 1,
                                                 derive_seed(20260808, 7));
    std::cerr << experiment_table_text(table);

    const double mono_valid = table.rows[0].valid_ppl;
    const double mix_valid = table.rows[1].valid_ppl;
    const double mono_test = table.rows[0].test_ppl;
    const double mix_test = table.rows[1].test_ppl;
    const double drop_valid = (mono_valid - mix_valid) / mono_valid;
    const double drop_test = (mono_test - mix_test) / mono_test;

    c.seconds = elapsed(start);
    c.pass = drop_valid >= 0.05 && drop_test >= 0.05 && c.seconds < 1800.0;
    c.detail = "valid PPL " + fmt(mono_valid, 6) + " -> " + fmt(mix_valid, 6) + " (" +
               fmt(drop_valid * 100.0, 3) + "% drop), test " + fmt(mono_test, 6) + " -> " +
               fmt(mix_test, 6) + " (" + fmt(drop_test * 100.0, 3) + "%), threshold 5%";

    // 7. Intrinsic metrics of the generated corpus vs the training corpus.
    const auto start7 = Clock::now();
    table1_out.id = 7;
    table1_out.name = "generated-corpus metrics finite, switching present, M-index close";
    MetricsReport train_m = compute_metrics(art.cs_train);
    MetricsReport gcs_m = compute_metrics(art.gcs.corpus);
    std::cerr << metrics_table({{"cs-train", train_m}, {"VACS-gCS", gcs_m}});

    const bool finite = std::isfinite(gcs_m.avg_cmi) && std::isfinite(gcs_m.m_index) &&
                        std::isfinite(gcs_m.burstiness) && std::isfinite(gcs_m.span_entropy);
    const double m_gap = std::abs(gcs_m.m_index - train_m.m_index);
    table1_out.pass = finite && gcs_m.avg_cmi > 0.0 && m_gap <= 0.3;
    table1_out.detail = "avg CMI " + fmt(gcs_m.avg_cmi, 4) + " (train " +
                        fmt(train_m.avg_cmi, 4) + "), M-index gap " + fmt(m_gap, 4) +
                        " (limit 0.3), burstiness " + fmt(gcs_m.burstiness, 4) +
                        ", span entropy " + fmt(gcs_m.span_entropy, 4);
    table1_out.seconds = elapsed(start7);
    return c;
}

// Supplementary (not a numbered criterion): the trained generator's length
// distribution should land near the training corpus.
Criterion supplementary_length(const PipelineArtifacts& art) {
    Criterion c{9, "supplementary: generated length mean within 3 of training mean"};
    const auto start = Clock::now();
    const double train_mean = length_histogram(art.cs_train).mean;
    const double gcs_mean = art.gcs.summary.length_mean;
    c.pass = std::abs(gcs_mean - train_mean) <= 3.0;
    c.detail = "generated mean " + fmt(gcs_mean, 4) + " vs training mean " + fmt(train_mean, 4);
    c.seconds = elapsed(start);
    return c;
}

// 4. Generation invariants from the trained checkpoint.
Criterion criterion_generation(const PipelineArtifacts& art) {
    const auto start = Clock::now();
    Criterion c{4, "1000 prior samples respect masks, specials, length, determinism"};

    VacsCheckpoint ck = load_vacs_checkpoint(art.checkpoint_path);
    bool ok = true;
    std::string why;
    const std::size_t max_len = 30;
    for (int i = 0; i < 1000 && ok; ++i) {
        PriorSample s = prior_sample(ck.params, ck.vocab, derive_seed(424242, i), max_len, 1.0);
        if (s.sentence.size() < 1 || s.sentence.size() > max_len) {
            ok = false;
            why = "length bounds";
            break;
        }
        for (std::size_t t = 0; t < s.sentence.size(); ++t) {
            const std::string& w = s.sentence.words[t];
            if (w == "<sos>" || w == "<eos>" || w == "<unk-s>" || w == "<unk-t>") {
                ok = false;
                why = "special token in words";
                break;
            }
            const int id = ck.vocab.encode_word(w, s.sentence.labels[t]);
            if (ck.vocab.is_special(id) ||
                ck.vocab.lang_of(id) != s.sentence.labels[t]) {
                ok = false;
                why = "language ownership";
                break;
            }
        }
    }

    // Fixed seed reproduces byte-identical output.
    GenerateOptions opts;
    opts.count = 50;
    opts.max_len = max_len;
    opts.seed = 99;
    GeneratedCorpus a = generate_corpus(ck.params, ck.vocab, opts);
    GeneratedCorpus b = generate_corpus(ck.params, ck.vocab, opts);
    std::ostringstream sa, sb;
    for (const auto& s : a.corpus.sentences) sa << format_labeled_line(s) << "\n";
    for (const auto& s : b.corpus.sentences) sb << format_labeled_line(s) << "\n";
    if (sa.str() != sb.str()) {
        ok = false;
        why = "determinism";
    }

    c.seconds = elapsed(start);
    c.pass = ok && c.seconds < 60.0;
    c.detail = ok ? "1000 samples clean; 50-sentence regeneration byte-identical"
                  : "failed: " + why;
    return c;
}

}  // namespace

int main() {
    const std::string work_dir = "acceptance_work";
    std::filesystem::create_directories(work_dir);

    std::vector<Criterion> results;
    auto run = [&](Criterion c) {
        std::cerr << "[acceptance] criterion " << c.id << (c.pass ? " passed" : " FAILED")
                  << " in " << fmt(c.seconds, 3) << "s\n";
        results.push_back(std::move(c));
    };

    std::cerr << "[acceptance] fast criteria (1,2,3,8)\n";
    run(criterion_gradient());
    run(criterion_kl_oracle());
    run(criterion_metric_oracle());
    run(criterion_uniform_ppl());

    std::cerr << "[acceptance] training the generator (criterion 5)\n";
    PipelineArtifacts art;
    run(criterion_training(art, work_dir));

    std::cerr << "[acceptance] extrinsic evaluation (criteria 6, 7)\n";
    Criterion table1;
    Criterion extrinsic = criterion_extrinsic(art, table1);
    run(std::move(extrinsic));
    run(std::move(table1));

    std::cerr << "[acceptance] generation invariants (criterion 4)\n";
    run(criterion_generation(art));
    run(supplementary_length(art));

    std::sort(results.begin(), results.end(),
              [](const Criterion& a, const Criterion& b) { return a.id < b.id; });

    bool all_pass = true;
    for (const auto& c : results) {
        all_pass = all_pass && c.pass;
        const std::string label = c.id <= 8 ? "criterion " + std::to_string(c.id) : c.name;
        const std::string title = c.id <= 8 ? c.name : std::string();
        std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << label
                  << (title.empty() ? "" : ": " + title) << " - " << c.detail << " ["
                  << fmt(c.seconds, 3) << "s]\n";
    }
    std::cout << (all_pass ? "ACCEPTANCE: all criteria passed"
                           : "ACCEPTANCE: some criteria FAILED")
              << "\n";
    return all_pass ? 0 : 1;
}
