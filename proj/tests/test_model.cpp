// Copyright 2026 VACS Contributors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <set>

#include "vacs/model.hpp"

using namespace vacs;

namespace {

Vocabulary tiny_vocab() {
    Corpus c;
    LabeledSentence a;
    a.words = {"sa", "sb", "sc"};
    a.labels = {Lang::Source, Lang::Source, Lang::Source};
    LabeledSentence b;
    b.words = {"ta", "tb"};
    b.labels = {Lang::Target, Lang::Target};
    c.sentences = {a, b};
    return Vocabulary::build({&c}, 100, 1);
}

VacsConfig tiny_cfg() {
    VacsConfig cfg;
    cfg.embed_dim = 5;
    cfg.label_embed_dim = 3;
    cfg.hidden_dim = 6;
    cfg.context_latent_dim = 4;
    cfg.switch_latent_dim = 3;
    return cfg;
}

}  // namespace

TEST_CASE("encode_context: zero params give a standard normal head") {
    Vocabulary v = tiny_vocab();
    VacsParams p = VacsParams::zeros(tiny_cfg(), v);
    std::vector<int> words{0, 1};
    GaussianParams q = encode_context(p, words);
    REQUIRE(q.mean.size() == 4);
    for (double m : q.mean) CHECK(m == 0.0);
    for (double lv : q.logvar) CHECK(lv == 0.0);

    GaussianParams q2 = encode_context(p, words);
    CHECK(q.mean == q2.mean);

    CHECK_THROWS_AS(encode_context(p, std::vector<int>{}), std::invalid_argument);
}

TEST_CASE("encode_context: order sensitivity with random params") {
    Vocabulary v = tiny_vocab();
    VacsParams p = VacsParams::init(tiny_cfg(), v, 12);
    GaussianParams ab = encode_context(p, std::vector<int>{0, 1});
    GaussianParams ba = encode_context(p, std::vector<int>{1, 0});
    double diff = 0.0;
    for (std::size_t i = 0; i < ab.mean.size(); ++i) diff += std::abs(ab.mean[i] - ba.mean[i]);
    CHECK(diff > 1e-9);
}

TEST_CASE("encode_switching: depends on z_c and on labels") {
    Vocabulary v = tiny_vocab();
    VacsParams zero = VacsParams::zeros(tiny_cfg(), v);
    std::vector<int> all_s{0, 0, 0};

    GaussianParams q0 = encode_switching(zero, std::vector<double>{1.0, -2.0, 0.5, 3.0}, all_s);
    for (double m : q0.mean) CHECK(m == 0.0);
    for (double lv : q0.logvar) CHECK(lv == 0.0);

    VacsParams p = VacsParams::init(tiny_cfg(), v, 21);
    std::vector<double> zc1{0.1, 0.2, -0.3, 0.4};
    std::vector<double> zc2{1.1, 0.2, -0.3, 0.4};
    GaussianParams a = encode_switching(p, zc1, all_s);
    GaussianParams b = encode_switching(p, zc2, all_s);
    double diff = 0.0;
    for (std::size_t i = 0; i < a.mean.size(); ++i) diff += std::abs(a.mean[i] - b.mean[i]);
    CHECK(diff > 1e-9);

    GaussianParams c = encode_switching(p, zc1, std::vector<int>{1, 1, 1});
    diff = 0.0;
    for (std::size_t i = 0; i < a.mean.size(); ++i) diff += std::abs(a.mean[i] - c.mean[i]);
    CHECK(diff > 1e-9);

    CHECK_THROWS_AS(encode_switching(p, zc1, std::vector<int>{}), std::invalid_argument);
    CHECK_THROWS_AS(encode_switching(p, std::vector<double>{0.0}, all_s),
                    std::invalid_argument);
}

TEST_CASE("reparameterize: pinned examples") {
    GaussianParams g;
    g.mean = {1.0, -2.0};
    g.logvar = {0.0, 0.0};
    auto z0 = reparameterize(g, std::vector<double>{0.0, 0.0});
    CHECK(z0[0] == 1.0);
    CHECK(z0[1] == -2.0);

    GaussianParams unit;
    unit.mean = {0.0};
    unit.logvar = {0.0};
    CHECK(reparameterize(unit, std::vector<double>{0.7})[0] == 0.7);

    GaussianParams wide;
    wide.mean = {1.0};
    wide.logvar = {std::log(4.0)};
    CHECK(reparameterize(wide, std::vector<double>{0.5})[0] ==
          doctest::Approx(2.0).epsilon(1e-12));

    CHECK_THROWS_AS(reparameterize(wide, std::vector<double>{0.5, 0.1}),
                    std::invalid_argument);
}

TEST_CASE("decode_labels teacher-forced: one logit row per label plus EOS") {
    Vocabulary v = tiny_vocab();
    VacsParams p = VacsParams::init(tiny_cfg(), v, 3);
    std::vector<double> zl{0.3, -0.2, 0.9};
    std::vector<int> y{0, 1, 0, 0};
    auto res = decode_labels_teacher(p, zl, y);
    CHECK(res.logits.size() == 5);
    for (const auto& row : res.logits) CHECK(row.size() == 3);
    CHECK(res.log_lik < 0.0);
    CHECK(res.h_final.size() == p.cfg.hidden_dim);
}

TEST_CASE("decode_labels sampling: zero params are uniform over {s,t,EOS}") {
    Vocabulary v = tiny_vocab();
    VacsParams p = VacsParams::zeros(tiny_cfg(), v);
    std::vector<double> zl{0.0, 0.0, 0.0};

    int counts[3] = {0, 0, 0};
    const int n = 30000;
    for (int i = 0; i < n; ++i) {
        auto res = decode_labels_sample(p, zl, 1000 + static_cast<std::uint64_t>(i), 1.0, 40);
        if (res.label_ids.empty()) {
            ++counts[2];
        } else {
            ++counts[res.label_ids[0]];
        }
    }
    for (int c : counts) {
        CHECK(static_cast<double>(c) / n == doctest::Approx(1.0 / 3.0).epsilon(0.05));
    }

    auto a = decode_labels_sample(p, zl, 42, 1.0, 40);
    auto b = decode_labels_sample(p, zl, 42, 1.0, 40);
    CHECK(a.label_ids == b.label_ids);

    // max_len truncation is honored and still emits the terminal row.
    VacsParams biased = VacsParams::zeros(tiny_cfg(), v);
    biased.head_dec_lbl.b[Vocabulary::kLabelEos] = -50.0;  // EOS essentially banned
    auto forced = decode_labels_sample(biased, zl, 5, 1.0, 7);
    CHECK(forced.label_ids.size() == 7);
    CHECK(forced.logits.size() == 8);
}

TEST_CASE("decode_context_params: shape and sensitivity") {
    Vocabulary v = tiny_vocab();
    VacsParams zero = VacsParams::zeros(tiny_cfg(), v);
    std::vector<double> zl{0.1, 0.1, 0.1};
    std::vector<double> h(zero.cfg.hidden_dim, 0.2);
    GaussianParams g0 = decode_context_params(zero, zl, h);
    REQUIRE(g0.mean.size() == zero.cfg.context_latent_dim);
    REQUIRE(g0.logvar.size() == zero.cfg.context_latent_dim);
    for (double m : g0.mean) CHECK(m == 0.0);
    for (double lv : g0.logvar) CHECK(lv == 0.0);

    VacsParams p = VacsParams::init(tiny_cfg(), v, 9);
    std::vector<double> h2(p.cfg.hidden_dim, -0.4);
    GaussianParams a = decode_context_params(p, zl, h);
    GaussianParams b = decode_context_params(p, zl, h2);
    double diff = 0.0;
    for (std::size_t i = 0; i < a.mean.size(); ++i) diff += std::abs(a.mean[i] - b.mean[i]);
    CHECK(diff > 1e-9);

    CHECK_THROWS_AS(decode_context_params(p, zl, std::vector<double>{1.0}),
                    std::invalid_argument);
}

TEST_CASE("decode_words: language mask is structural") {
    Vocabulary v = tiny_vocab();
    VacsParams p = VacsParams::init(tiny_cfg(), v, 77);
    std::vector<double> zc{0.2, -0.2, 0.1, 0.0};
    std::vector<int> labels{0, 1, 0, 1, 1};

    for (int rep = 0; rep < 1000; ++rep) {
        auto res = decode_words_sample(p, zc, labels, static_cast<std::uint64_t>(rep), 1.0);
        REQUIRE(res.word_ids.size() == labels.size());
        for (std::size_t o = 0; o < labels.size(); ++o) {
            auto owner = v.lang_of(res.word_ids[o]);
            REQUIRE(owner.has_value());
            CHECK(*owner == (labels[o] == 0 ? Lang::Source : Lang::Target));
            // Sampling never emits UNK ids.
            CHECK(res.word_ids[o] != v.unk_s());
            CHECK(res.word_ids[o] != v.unk_t());
        }
    }

    std::vector<int> bad{0, Vocabulary::kLabelEos, 1};
    CHECK_THROWS_WITH_AS(decode_words_sample(p, zc, bad, 1, 1.0),
                         doctest::Contains("interior EOS"), std::invalid_argument);
}

TEST_CASE("decode_words: zero params are uniform over the labeled language") {
    Vocabulary v = tiny_vocab();
    VacsParams p = VacsParams::zeros(tiny_cfg(), v);
    std::vector<double> zc(p.cfg.context_latent_dim, 0.0);

    // Teacher-forced scoring admits the language block plus its UNK.
    std::vector<int> labels{0};
    std::vector<int> words{1};
    auto res = decode_words_teacher(p, zc, labels, words);
    CHECK(res.log_lik == doctest::Approx(std::log(1.0 / 4.0)).epsilon(1e-12));  // 3 words + UNK-s

    std::vector<int> tlabels{1};
    std::vector<int> twords{static_cast<int>(v.n_source())};
    auto rest = decode_words_teacher(p, zc, tlabels, twords);
    CHECK(rest.log_lik == doctest::Approx(std::log(1.0 / 3.0)).epsilon(1e-12));  // 2 words + UNK-t
}

TEST_CASE("decode_words teacher-forced: matches hand accumulation") {
    // Two-word vocabulary (one per language); handcrafted head biases so the
    // per-step distributions are known in closed form.
    Corpus c;
    LabeledSentence a;
    a.words = {"sa"};
    a.labels = {Lang::Source};
    LabeledSentence b;
    b.words = {"ta"};
    b.labels = {Lang::Target};
    c.sentences = {a, b};
    Vocabulary v = Vocabulary::build({&c}, 100, 1);

    VacsConfig cfg = tiny_cfg();
    VacsParams p = VacsParams::zeros(cfg, v);
    // Output ids: 0 = sa, 1 = ta, 2 = UNK-s, 3 = UNK-t.
    p.head_dec_word.b[0] = 0.7;
    p.head_dec_word.b[2] = -0.4;
    p.head_dec_word.b[1] = 1.3;
    p.head_dec_word.b[3] = 0.2;

    std::vector<int> labels{0, 1, 0};
    std::vector<int> words{0, 1, 0};
    auto res = decode_words_teacher(p, std::vector<double>(cfg.context_latent_dim, 0.0),
                                    labels, words);

    // Hand accumulation with independent arithmetic.
    auto lp2 = [](double chosen, double other) {
        return chosen - std::log(std::exp(chosen) + std::exp(other));
    };
    const double expect = lp2(0.7, -0.4) + lp2(1.3, 0.2) + lp2(0.7, -0.4);
    CHECK(res.log_lik == doctest::Approx(expect).epsilon(1e-12));
    REQUIRE(res.step_log_probs.size() == 3);
    CHECK(res.step_log_probs[1] == doctest::Approx(lp2(1.3, 0.2)).epsilon(1e-12));
}

TEST_CASE("masked word distribution: sums to 1 on the permitted block, 0 elsewhere") {
    Vocabulary v = tiny_vocab();
    VacsParams p = VacsParams::init(tiny_cfg(), v, 5);
    ad::Graph g;
    VacsGraph vg = bind_vacs(g, p);
    // Build one masked softmax row directly.
    Rng rng(8);
    ad::ValId h = g.input(init_uniform({p.cfg.hidden_dim}, rng));
    ad::ValId feat = g.concat(h, g.row(vg.label_emb, 0));
    ad::ValId logits = affine_apply(g, vg.head_dec_word, feat);
    ad::ValId masked = g.add(logits, vg.mask_for(Vocabulary::kLabelS, false));
    ad::ValId probs = g.softmax(masked);
    const Tensor& pr = g.value(probs);
    double on_block = 0.0;
    for (std::size_t j = 0; j < pr.size(); ++j) {
        const bool permitted = j < v.n_source() || j == static_cast<std::size_t>(v.unk_s());
        if (permitted) {
            on_block += pr[j];
        } else {
            CHECK(pr[j] == 0.0);
        }
    }
    CHECK(on_block == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("factorization: joint teacher-forced log-lik splits exactly") {
    Vocabulary v = tiny_vocab();
    VacsParams p = VacsParams::init(tiny_cfg(), v, 123);
    std::vector<double> zl{0.4, -0.1, 0.2};
    std::vector<double> zc{0.3, 0.1, -0.2, 0.5};
    std::vector<int> labels{0, 0, 1};
    std::vector<int> words{0, 2, static_cast<int>(v.n_source()) + 1};

    // Combined: one graph holding both likelihood terms.
    double combined = 0.0;
    {
        ad::Graph g;
        VacsGraph vg = bind_vacs(g, p);
        ad::ValId zln = g.input(Tensor::vec({zl.begin(), zl.end()}));
        ad::ValId zcn = g.input(Tensor::vec({zc.begin(), zc.end()}));
        auto lab = decode_labels_teacher_g(vg, zln, labels);
        auto wrd = decode_words_teacher_g(vg, zcn, labels, words);
        combined = g.scalar_value(g.add(lab.log_lik, wrd.log_lik));
    }

    // Separate halves.
    const double lab = decode_labels_teacher(p, zl, labels).log_lik;
    const double wrd = decode_words_teacher(p, zc, labels, words).log_lik;
    CHECK(std::abs(combined - (lab + wrd)) < 1e-10);
}

TEST_CASE("gaussian heads: sigma strictly positive by construction") {
    Vocabulary v = tiny_vocab();
    VacsParams p = VacsParams::init(tiny_cfg(), v, 2024);
    Rng rng(55);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<int> words;
        for (int i = 0; i < 4; ++i) {
            words.push_back(static_cast<int>(rng.below(v.n_source() + v.n_target())));
        }
        GaussianParams q = encode_context(p, words);
        for (double lv : q.logvar) {
            CHECK(std::isfinite(lv));
            CHECK(std::exp(0.5 * lv) > 0.0);
        }
    }
}

TEST_CASE("prior_sample: determinism, consistency, zero-params length law") {
    Vocabulary v = tiny_vocab();
    VacsParams p = VacsParams::init(tiny_cfg(), v, 31);

    PriorSample a = prior_sample(p, v, 999, 12, 1.0);
    PriorSample b = prior_sample(p, v, 999, 12, 1.0);
    CHECK(a.sentence.words == b.sentence.words);
    CHECK(a.sentence.labels == b.sentence.labels);
    CHECK(a.latents.z_switch == b.latents.z_switch);

    for (int rep = 0; rep < 200; ++rep) {
        PriorSample s = prior_sample(p, v, static_cast<std::uint64_t>(rep), 12, 1.0);
        REQUIRE(!s.sentence.words.empty());
        CHECK(s.sentence.words.size() <= 12);
        for (std::size_t i = 0; i < s.sentence.size(); ++i) {
            const std::string& w = s.sentence.words[i];
            CHECK(w != "<sos>");
            CHECK(w != "<eos>");
            CHECK(w != "<unk-s>");
            CHECK(w != "<unk-t>");
            const int id = v.encode_word(w, s.sentence.labels[i]);
            CHECK(v.lang_of(id) == s.sentence.labels[i]);
            CHECK(!v.is_special(id));
        }
    }

    // Zero parameters: EOS probability 1/3 each step, empty draws resampled,
    // so lengths follow a geometric law conditioned on >= 1 with mean 3.
    VacsParams zero = VacsParams::zeros(tiny_cfg(), v);
    double total_len = 0.0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
        PriorSample s = prior_sample(zero, v, static_cast<std::uint64_t>(i), 30, 1.0);
        total_len += static_cast<double>(s.sentence.size());
    }
    CHECK(total_len / n == doctest::Approx(3.0).epsilon(0.1 / 3.0));
}
