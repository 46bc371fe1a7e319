// Copyright 2026 VACS Contributors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "vacs/payload.hpp"
#include "vacs/rng.hpp"

using namespace vacs;

namespace {

Corpus toy_slice(std::size_t n_pairs, std::size_t n_cs, std::uint64_t seed, bool want_cs) {
    ToyConfig cfg;
    cfg.vocab_per_lang = 20;
    cfg.stay_prob = 0.6;
    cfg.len_min = 3;
    cfg.len_max = 7;
    auto pair = synth_toy_corpus(cfg, n_pairs, n_cs, seed);
    return want_cs ? pair.code_switched : pair.mono;
}

PayloadConfig small_cfg() {
    PayloadConfig cfg;
    cfg.char_embed_dim = 6;
    cfg.filter_widths = {1, 2, 3};
    cfg.filters_per_width = 4;
    cfg.hidden_dim = 10;
    return cfg;
}

}  // namespace

TEST_CASE("char vocab: markers, coverage, unknown bytes") {
    Corpus mono = toy_slice(5, 0, 1, false);
    Vocabulary v = Vocabulary::build({&mono}, 100, 1);
    CharVocab chars = CharVocab::build(v);

    // Toy words use 's', 't' and digits.
    CHECK(chars.id_of('s') >= 4);
    CHECK(chars.id_of('0') >= 4);
    CHECK(chars.id_of('!') == CharVocab::kUnk);

    auto enc = chars.encode_word("s12", 3);
    REQUIRE(enc.size() == 5);
    CHECK(enc.front() == CharVocab::kBow);
    CHECK(enc.back() == CharVocab::kEow);

    // Padding up to the widest filter.
    CHECK(chars.encode_word("s", 6).size() == 6);
    CHECK(chars.encode_sos(4).size() == 4);
}

TEST_CASE("ppl_from_logprob: closed forms") {
    // Per-step probabilities 0.5, 0.25, 0.125.
    const double lp = std::log(0.5) + std::log(0.25) + std::log(0.125);
    CHECK(ppl_from_logprob(lp, 3) == doctest::Approx(4.0).epsilon(1e-12));

    // Probability one half for every observed token.
    CHECK(ppl_from_logprob(std::log(0.5) * 7, 7) == doctest::Approx(2.0).epsilon(1e-12));

    CHECK_THROWS_AS(ppl_from_logprob(0.0, 0), std::invalid_argument);
}

TEST_CASE("perplexity: uniform predictor equals vocabulary size") {
    Corpus mono = toy_slice(10, 0, 2, false);
    Corpus held = toy_slice(0, 12, 3, true);
    Vocabulary v = Vocabulary::build({&mono}, 100, 1);

    PayloadParams p = PayloadParams::init(small_cfg(), v, 7);
    // Zeroing the output head makes every step exactly uniform over the
    // output rows regardless of the rest of the network.
    p.head.w.fill(0.0);
    p.head.b.fill(0.0);

    const double ppl = perplexity(p, v, held);
    CHECK(ppl == doctest::Approx(static_cast<double>(p.output_dim())).epsilon(1e-9 / 40.0));
}

TEST_CASE("perplexity: invariant to sentence order") {
    Corpus mono = toy_slice(10, 0, 4, false);
    Corpus held = toy_slice(0, 15, 5, true);
    Vocabulary v = Vocabulary::build({&mono}, 100, 1);
    PayloadParams p = PayloadParams::init(small_cfg(), v, 11);

    const double a = perplexity(p, v, held);
    Corpus reversed = held;
    std::reverse(reversed.sentences.begin(), reversed.sentences.end());
    const double b = perplexity(p, v, reversed);
    CHECK(a == doctest::Approx(b).epsilon(1e-12));
}

TEST_CASE("train_payload: curricula semantics") {
    Corpus mono = toy_slice(30, 0, 6, false);
    Corpus cs = toy_slice(0, 30, 7, true);
    Vocabulary v = Vocabulary::build({&mono, &cs}, 100, 1);
    PayloadTrainConfig tcfg;
    tcfg.batch_size = 8;

    PayloadParams init = PayloadParams::init(small_cfg(), v, 21);
    const std::uint64_t init_digest = payload_digest(init);

    // Zero-epoch stage is an identity on parameters.
    Curriculum idle{"idle", {{mono, 0}}};
    auto r0 = train_payload(init, idle, v, tcfg, 3);
    CHECK(payload_digest(r0.params) == init_digest);

    // Degenerate single-stage curriculum equals plain training on it.
    Curriculum plain{"Mono", {{mono, 1}}};
    auto r1 = train_payload(init, plain, v, tcfg, 3);
    CHECK(!r1.diverged);
    CHECK(!r1.step_loss.empty());
    CHECK(payload_digest(r1.params) != init_digest);

    // Same seed and curriculum reproduce the checkpoint exactly.
    auto r2 = train_payload(init, plain, v, tcfg, 3);
    CHECK(payload_digest(r2.params) == payload_digest(r1.params));

    // Stage order matters.
    Curriculum ab{"Mono|CS", {{mono, 1}, {cs, 1}}};
    Curriculum ba{"CS|Mono", {{cs, 1}, {mono, 1}}};
    auto rab = train_payload(init, ab, v, tcfg, 3);
    auto rba = train_payload(init, ba, v, tcfg, 3);
    CHECK(payload_digest(rab.params) != payload_digest(rba.params));

    // Loss should drop over one pass already.
    double early = 0.0, late = 0.0;
    const std::size_t k = std::min<std::size_t>(3, r1.step_loss.size());
    for (std::size_t i = 0; i < k; ++i) {
        early += r1.step_loss[i];
        late += r1.step_loss[r1.step_loss.size() - 1 - i];
    }
    CHECK(late < early);

    CHECK_THROWS_AS(train_payload(init, Curriculum{"empty", {}}, v, tcfg, 3),
                    std::invalid_argument);
}

TEST_CASE("experiment table: one row per curriculum, rendered both ways") {
    Corpus mono = toy_slice(20, 0, 8, false);
    Corpus cs = toy_slice(0, 20, 9, true);
    Corpus valid = toy_slice(0, 10, 10, true);
    Corpus test = toy_slice(0, 10, 11, true);

    PayloadTrainConfig tcfg;
    tcfg.batch_size = 8;
    std::vector<Curriculum> curricula{
        {"Mono", {{mono, 1}}},
        {"Mono|gCS", {{mono, 1}, {cs, 1}}},
    };
    ExperimentTable table =
        run_experiment_table(curricula, small_cfg(), tcfg, valid, test, 100, 1, 17);
    REQUIRE(table.rows.size() == 2);
    CHECK(table.rows[0].curriculum == "Mono");
    CHECK(table.rows[1].curriculum == "Mono|gCS");
    for (const auto& row : table.rows) {
        CHECK(std::isfinite(row.valid_ppl));
        CHECK(std::isfinite(row.test_ppl));
        CHECK(row.valid_ppl > 1.0);
    }

    const std::string text = experiment_table_text(table);
    CHECK(text.find("Training Curricula") != std::string::npos);
    CHECK(text.find("Mono|gCS") != std::string::npos);

    const std::string records = experiment_records(table);
    CHECK(std::count(records.begin(), records.end(), '\n') == 2);
}

TEST_CASE("payload checkpoint round trip") {
    Corpus mono = toy_slice(10, 0, 12, false);
    Vocabulary v = Vocabulary::build({&mono}, 100, 1);
    PayloadParams p = PayloadParams::init(small_cfg(), v, 31);

    save_payload_checkpoint(p, v, "/tmp/vacs_payload_ck.json");
    PayloadCheckpoint ck = load_payload_checkpoint("/tmp/vacs_payload_ck.json");
    CHECK(payload_digest(ck.params) == payload_digest(p));
    CHECK(ck.vocab.n_source() == v.n_source());

    Corpus held = toy_slice(0, 5, 13, true);
    CHECK(perplexity(ck.params, ck.vocab, held) ==
          doctest::Approx(perplexity(p, v, held)).epsilon(1e-12));
    std::remove("/tmp/vacs_payload_ck.json");

    CHECK_THROWS_AS(load_payload_checkpoint("/tmp/missing_ck.json"), std::runtime_error);
}
