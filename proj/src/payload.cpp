// Copyright 2026 VACS Contributors
// SPDX-License-Identifier: Apache-2.0

#include "vacs/payload.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include <json.hpp>

#include "vacs/checkpoint.hpp"
#include "vacs/rng.hpp"

namespace vacs {

// ---- character inventory ----

CharVocab CharVocab::build(const Vocabulary& words) {
    std::set<unsigned char> seen;
    for (const auto& list : {words.source_words(), words.target_words()}) {
        for (const auto& w : list) {
            for (char c : w) seen.insert(static_cast<unsigned char>(c));
        }
    }
    return from_bytes(std::vector<unsigned char>(seen.begin(), seen.end()));
}

CharVocab CharVocab::from_bytes(std::vector<unsigned char> bytes) {
    CharVocab v;
    v.bytes_ = std::move(bytes);
    std::sort(v.bytes_.begin(), v.bytes_.end());
    v.bytes_.erase(std::unique(v.bytes_.begin(), v.bytes_.end()), v.bytes_.end());
    for (std::size_t i = 0; i < v.bytes_.size(); ++i) {
        v.ids_[v.bytes_[i]] = static_cast<int>(4 + i);
    }
    return v;
}

int CharVocab::id_of(unsigned char c) const {
    auto it = ids_.find(c);
    return it == ids_.end() ? kUnk : it->second;
}

std::vector<int> CharVocab::encode_word(const std::string& word, std::size_t min_len) const {
    std::vector<int> ids;
    ids.reserve(word.size() + 2);
    ids.push_back(kBow);
    for (char c : word) ids.push_back(id_of(static_cast<unsigned char>(c)));
    ids.push_back(kEow);
    while (ids.size() < min_len) ids.push_back(kEow);
    return ids;
}

std::vector<int> CharVocab::encode_sos(std::size_t min_len) const {
    std::vector<int> ids{kBow, kSosMark, kEow};
    while (ids.size() < min_len) ids.push_back(kEow);
    return ids;
}

// ---- parameters ----

PayloadParams PayloadParams::init(const PayloadConfig& cfg, const Vocabulary& words,
                                  std::uint64_t seed) {
    if (cfg.filter_widths.empty() || cfg.filters_per_width == 0) {
        throw std::invalid_argument("PayloadParams: at least one filter required");
    }
    Rng rng(seed);
    PayloadParams p;
    p.cfg = cfg;
    p.chars = CharVocab::build(words);
    p.n_source = words.n_source();
    p.n_target = words.n_target();

    p.char_emb = init_uniform({p.chars.size(), cfg.char_embed_dim}, rng);
    for (std::size_t w : cfg.filter_widths) {
        p.conv.push_back(init_affine(w * cfg.char_embed_dim, cfg.filters_per_width, rng));
    }
    const std::size_t F = cfg.feature_dim();
    p.highway_gate = init_affine(F, F, rng);
    p.highway_transform = init_affine(F, F, rng);
    p.rnn = init_lstm(F, cfg.hidden_dim, rng);
    p.head = init_affine(cfg.hidden_dim, p.output_dim(), rng);
    return p;
}

// ---- graph construction ----

namespace {

struct PayloadGraph {
    ad::Graph* g = nullptr;
    const PayloadParams* p = nullptr;
    ad::ValId char_emb;
    std::vector<AffineNodes> conv;
    AffineNodes highway_gate, highway_transform;
    LstmCellNodes rnn;
    AffineNodes head;
    std::map<std::string, ad::ValId> word_memo;
};

PayloadGraph bind_payload(ad::Graph& g, const PayloadParams& p) {
    PayloadGraph pg;
    pg.g = &g;
    pg.p = &p;
    pg.char_emb = g.param("char_emb", p.char_emb);
    for (std::size_t i = 0; i < p.conv.size(); ++i) {
        pg.conv.push_back(
            bind_affine(g, "conv" + std::to_string(p.cfg.filter_widths[i]), p.conv[i]));
    }
    pg.highway_gate = bind_affine(g, "highway_gate", p.highway_gate);
    pg.highway_transform = bind_affine(g, "highway_transform", p.highway_transform);
    pg.rnn = bind_lstm(g, "rnn", p.rnn);
    pg.head = bind_affine(g, "head", p.head);
    return pg;
}

ad::ValId word_features_from_chars(PayloadGraph& pg, const std::vector<int>& char_ids) {
    ad::Graph& g = *pg.g;
    const PayloadConfig& cfg = pg.p->cfg;

    std::vector<ad::ValId> char_rows;
    char_rows.reserve(char_ids.size());
    for (int c : char_ids) char_rows.push_back(g.row(pg.char_emb, static_cast<std::size_t>(c)));

    std::vector<ad::ValId> per_width;
    for (std::size_t wi = 0; wi < cfg.filter_widths.size(); ++wi) {
        const std::size_t w = cfg.filter_widths[wi];
        std::vector<ad::ValId> windows;
        for (std::size_t pos = 0; pos + w <= char_rows.size(); ++pos) {
            ad::ValId window = char_rows[pos];
            for (std::size_t k = 1; k < w; ++k) window = g.concat(window, char_rows[pos + k]);
            windows.push_back(g.tanh_op(affine_apply(g, pg.conv[wi], window)));
        }
        per_width.push_back(g.max_n(windows));  // max over time
    }
    ad::ValId features = per_width[0];
    for (std::size_t i = 1; i < per_width.size(); ++i) {
        features = g.concat(features, per_width[i]);
    }

    // Highway: gate mixes the transformed features with the raw ones.
    ad::ValId gate = g.sigmoid(affine_apply(g, pg.highway_gate, features));
    ad::ValId transformed = g.relu(affine_apply(g, pg.highway_transform, features));
    ad::ValId carry = g.add_const(g.scale(gate, -1.0), 1.0);
    return g.add(g.mul(gate, transformed), g.mul(carry, features));
}

ad::ValId word_features(PayloadGraph& pg, const std::string& word, bool is_sos) {
    const std::string key = is_sos ? std::string("\x01sos") : word;
    auto it = pg.word_memo.find(key);
    if (it != pg.word_memo.end()) return it->second;
    const std::size_t min_len = *std::max_element(pg.p->cfg.filter_widths.begin(),
                                                  pg.p->cfg.filter_widths.end());
    const std::vector<int> chars = is_sos ? pg.p->chars.encode_sos(min_len)
                                          : pg.p->chars.encode_word(word, min_len);
    const ad::ValId features = word_features_from_chars(pg, chars);
    pg.word_memo.emplace(key, features);
    return features;
}

// Target index in the payload output space; OOV words map to their labeled
// language's UNK, sentence end to the trailing EOS row.
std::size_t target_index(const PayloadParams& p, const Vocabulary& words,
                         const LabeledSentence& s, std::size_t pos) {
    if (pos == s.size()) return p.eos_index();
    return static_cast<std::size_t>(words.encode_word(s.words[pos], s.labels[pos]));
}

// Per-sentence log-likelihood node: predicts w_1..w_n then EOS.
ad::ValId sentence_log_lik(PayloadGraph& pg, const Vocabulary& words,
                           const LabeledSentence& s) {
    ad::Graph& g = *pg.g;
    const std::size_t H = pg.p->cfg.hidden_dim;
    LstmState state{g.input(Tensor({H})), g.input(Tensor({H}))};
    std::vector<ad::ValId> picks;
    for (std::size_t t = 0; t <= s.size(); ++t) {
        const ad::ValId x = t == 0 ? word_features(pg, "", true)
                                   : word_features(pg, s.words[t - 1], false);
        state = lstm_step(g, pg.rnn, x, state);
        ad::ValId logits = affine_apply(g, pg.head, state.h);
        picks.push_back(g.pick(g.log_softmax(logits), target_index(*pg.p, words, s, t)));
    }
    return g.add_n(picks);
}

}  // namespace

// ---- training ----

PayloadTrainResult train_payload(PayloadParams params, const Curriculum& curriculum,
                                 const Vocabulary& words, const PayloadTrainConfig& cfg,
                                 std::uint64_t seed) {
    if (curriculum.stages.empty()) {
        throw std::invalid_argument("train_payload: curriculum must be non-empty");
    }
    for (const auto& stage : curriculum.stages) {
        if (stage.corpus.empty()) {
            throw std::invalid_argument("train_payload: stage corpus must be non-empty");
        }
    }
    if (params.n_source != words.n_source() || params.n_target != words.n_target()) {
        throw std::invalid_argument("train_payload: params/vocabulary size mismatch");
    }

    AdamConfig adam{cfg.lr, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps, cfg.clip_norm};
    AdamState state;
    PayloadTrainResult result;
    PayloadParams last_good = params;

    std::size_t global_epoch = 0;
    for (std::size_t stage_idx = 0; stage_idx < curriculum.stages.size(); ++stage_idx) {
        const CurriculumStage& stage = curriculum.stages[stage_idx];
        for (std::size_t epoch = 0; epoch < stage.epochs; ++epoch, ++global_epoch) {
            auto batches = make_batches(stage.corpus, words, cfg.batch_size,
                                        derive_seed(seed, 0xBA7C + global_epoch));
            for (const Batch& batch : batches) {
                ad::Graph g;
                PayloadGraph pg = bind_payload(g, params);
                std::vector<ad::ValId> lls;
                std::size_t tokens = 0;
                for (std::size_t i = 0; i < batch.size(); ++i) {
                    const LabeledSentence& s = stage.corpus.sentences[batch.sentence_index[i]];
                    lls.push_back(sentence_log_lik(pg, words, s));
                    tokens += s.size() + 1;
                }
                ad::ValId loss =
                    g.scale(g.add_n(lls), -1.0 / static_cast<double>(tokens));
                const double loss_value = g.scalar_value(loss);
                if (!std::isfinite(loss_value)) {
                    result.params = last_good;
                    result.diverged = true;
                    return result;
                }
                g.backward(loss);

                std::vector<std::string> names;
                std::vector<Tensor*> ps;
                std::vector<const Tensor*> gs;
                std::vector<Tensor> grad_store;
                params.visit([&](const std::string& name, Tensor& t) {
                    names.push_back(name);
                    ps.push_back(&t);
                    grad_store.push_back(g.grad(static_cast<ad::ValId>(g.leaf_by_name(name))));
                });
                gs.reserve(grad_store.size());
                for (const Tensor& t : grad_store) gs.push_back(&t);
                try {
                    adam_step(ps, gs, names, state, adam);
                } catch (const std::runtime_error&) {
                    result.params = last_good;
                    result.diverged = true;
                    return result;
                }
                result.step_loss.push_back(loss_value);
            }
            last_good = params;
        }
    }
    result.params = std::move(params);
    return result;
}

// ---- perplexity ----

double ppl_from_logprob(double total_log_prob, std::size_t tokens) {
    if (tokens == 0) {
        throw std::invalid_argument("ppl_from_logprob: no predicted tokens");
    }
    return std::exp(-total_log_prob / static_cast<double>(tokens));
}

double perplexity(const PayloadParams& params, const Vocabulary& words,
                  const Corpus& held_out) {
    if (held_out.empty()) {
        throw std::invalid_argument("perplexity: empty corpus");
    }
    // Kahan summation; per-sentence terms are independent so corpus order
    // cannot move the result beyond rounding.
    double sum = 0.0, comp = 0.0;
    std::size_t tokens = 0;
    for (const auto& s : held_out.sentences) {
        ad::Graph g;
        PayloadGraph pg = bind_payload(g, params);
        const double ll = g.scalar_value(sentence_log_lik(pg, words, s));
        const double y = ll - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        tokens += s.size() + 1;
    }
    return ppl_from_logprob(sum, tokens);
}

// ---- experiment harness ----

ExperimentTable run_experiment_table(const std::vector<Curriculum>& curricula,
                                     const PayloadConfig& cfg, const PayloadTrainConfig& tcfg,
                                     const Corpus& valid, const Corpus& test,
                                     std::size_t vocab_max_per_lang, std::size_t vocab_min_count,
                                     std::uint64_t seed) {
    if (curricula.empty()) {
        throw std::invalid_argument("run_experiment_table: no curricula");
    }
    // One shared word vocabulary across rows keeps the perplexities
    // comparable: built from training corpora only.
    std::vector<const Corpus*> sources;
    for (const auto& cur : curricula) {
        for (const auto& stage : cur.stages) sources.push_back(&stage.corpus);
    }
    Vocabulary words = Vocabulary::build(sources, vocab_max_per_lang, vocab_min_count);

    ExperimentTable table;
    for (const auto& cur : curricula) {
        PayloadParams init = PayloadParams::init(cfg, words, derive_seed(seed, 0xF00D));
        PayloadTrainResult trained = train_payload(std::move(init), cur, words, tcfg, seed);
        ExperimentRow row;
        row.curriculum = cur.name;
        row.valid_ppl = perplexity(trained.params, words, valid);
        row.test_ppl = perplexity(trained.params, words, test);
        table.rows.push_back(std::move(row));
    }
    return table;
}

std::string experiment_table_text(const ExperimentTable& table) {
    std::size_t name_width = 18;  // "Training Curricula"
    for (const auto& row : table.rows) name_width = std::max(name_width, row.curriculum.size());
    std::ostringstream os;
    os << std::left << std::setw(static_cast<int>(name_width) + 2) << "Training Curricula"
       << std::right << std::setw(12) << "Valid PPL" << std::setw(12) << "Test PPL" << "\n";
    os << std::string(name_width + 2 + 24, '-') << "\n";
    os << std::fixed << std::setprecision(3);
    for (const auto& row : table.rows) {
        os << std::left << std::setw(static_cast<int>(name_width) + 2) << row.curriculum
           << std::right << std::setw(12) << row.valid_ppl << std::setw(12) << row.test_ppl
           << "\n";
    }
    return os.str();
}

std::string experiment_records(const ExperimentTable& table) {
    std::ostringstream os;
    for (const auto& row : table.rows) {
        nlohmann::json j;
        j["curriculum"] = row.curriculum;
        j["valid_ppl"] = row.valid_ppl;
        j["test_ppl"] = row.test_ppl;
        os << j.dump() << "\n";
    }
    return os.str();
}

// ---- checkpoint container ----

namespace {
constexpr const char* kPayloadFormat = "vacs-payload-checkpoint";
constexpr int kPayloadVersion = 1;
}  // namespace

void save_payload_checkpoint(const PayloadParams& params, const Vocabulary& words,
                             const std::string& path) {
    nlohmann::json j;
    j["format"] = kPayloadFormat;
    j["version"] = kPayloadVersion;
    j["config"] = {{"char_embed_dim", params.cfg.char_embed_dim},
                   {"filter_widths", params.cfg.filter_widths},
                   {"filters_per_width", params.cfg.filters_per_width},
                   {"hidden_dim", params.cfg.hidden_dim}};
    j["chars"] = params.chars.bytes();
    j["vocab"] = vocab_to_json(words);
    nlohmann::json tensors;
    params.visit([&](const std::string& name, const Tensor& t) {
        tensors[name] = tensor_to_json(t);
    });
    j["params"] = std::move(tensors);

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
    out << j.dump() << "\n";
}

PayloadCheckpoint load_payload_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("checkpoint " + path + ": " + e.what());
    }
    if (j.value("format", "") != kPayloadFormat) {
        throw std::runtime_error("checkpoint " + path + ": unrecognized format");
    }
    if (j.value("version", -1) != kPayloadVersion) {
        throw std::runtime_error("checkpoint " + path + ": unsupported version");
    }

    PayloadConfig cfg;
    const auto& c = j.at("config");
    cfg.char_embed_dim = c.at("char_embed_dim").get<std::size_t>();
    cfg.filter_widths = c.at("filter_widths").get<std::vector<std::size_t>>();
    cfg.filters_per_width = c.at("filters_per_width").get<std::size_t>();
    cfg.hidden_dim = c.at("hidden_dim").get<std::size_t>();

    PayloadCheckpoint ck;
    ck.vocab = vocab_from_json(j.at("vocab"));
    ck.params = PayloadParams::init(cfg, ck.vocab, 0);
    ck.params.chars = CharVocab::from_bytes(j.at("chars").get<std::vector<unsigned char>>());
    ck.params.char_emb = Tensor({ck.params.chars.size(), cfg.char_embed_dim});
    const auto& tensors = j.at("params");
    ck.params.visit([&](const std::string& name, Tensor& t) {
        const Tensor loaded = tensor_from_json(tensors.at(name));
        if (!loaded.same_shape(t)) {
            throw std::runtime_error("checkpoint " + path + ": tensor '" + name +
                                     "' has unexpected shape " + loaded.shape_str());
        }
        t = loaded;
    });
    return ck;
}

std::uint64_t payload_digest(const PayloadParams& params) {
    std::uint64_t h = 0x13198A2E03707344ull;
    params.visit([&](const std::string& name, const Tensor& t) {
        for (char ch : name) h = mix64(h ^ static_cast<std::uint64_t>(ch));
        for (double v : t.values()) h = mix64(h ^ std::bit_cast<std::uint64_t>(v));
    });
    return h;
}

}  // namespace vacs
