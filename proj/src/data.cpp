// Copyright 2026 VACS Contributors
// SPDX-License-Identifier: Apache-2.0

#include "vacs/data.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "vacs/rng.hpp"

namespace vacs {

namespace {

using nlohmann::json;

const char* kUnkSourceStr = "<unk-s>";
const char* kUnkTargetStr = "<unk-t>";
const char* kSosStr = "<sos>";
const char* kEosStr = "<eos>";

bool is_reserved_word(const std::string& w) {
    return w == kUnkSourceStr || w == kUnkTargetStr || w == kSosStr || w == kEosStr;
}

[[noreturn]] void line_error(std::size_t line_no, const std::string& what) {
    if (line_no > 0) {
        throw std::runtime_error("line " + std::to_string(line_no) + ": " + what);
    }
    throw std::runtime_error(what);
}

}  // namespace

std::string provenance_str(Provenance p) {
    switch (p) {
        case Provenance::RealCs: return "real-CS";
        case Provenance::ParallelMono: return "parallel-mono";
        case Provenance::SyntheticGcs: return "synthetic-gCS";
        case Provenance::Toy: return "toy";
    }
    return "?";
}

// ---- Vocabulary ----

Vocabulary Vocabulary::build(const std::vector<const Corpus*>& corpora,
                             std::size_t max_per_lang, std::size_t min_count) {
    std::size_t total = 0;
    for (const Corpus* c : corpora) total += c ? c->size() : 0;
    if (total == 0) {
        throw std::invalid_argument("build_vocab: empty corpora");
    }

    std::map<std::string, std::size_t> counts[2];
    for (const Corpus* c : corpora) {
        for (const auto& sent : c->sentences) {
            for (std::size_t i = 0; i < sent.size(); ++i) {
                counts[static_cast<int>(sent.labels[i])][sent.words[i]] += 1;
            }
        }
    }

    auto rank = [&](const std::map<std::string, std::size_t>& freq) {
        std::vector<std::pair<std::string, std::size_t>> items(freq.begin(), freq.end());
        // Count descending, then lexicographic. The map iteration order makes
        // the lexicographic tie-break hold under stable_sort as well, but the
        // comparator states it outright.
        std::stable_sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
            if (a.second != b.second) return a.second > b.second;
            return a.first < b.first;
        });
        std::vector<std::string> kept;
        for (const auto& [word, count] : items) {
            if (count < min_count) continue;
            if (kept.size() >= max_per_lang) break;
            kept.push_back(word);
        }
        return kept;
    };

    return from_word_lists(rank(counts[0]), rank(counts[1]));
}

Vocabulary Vocabulary::from_word_lists(std::vector<std::string> source,
                                       std::vector<std::string> target) {
    Vocabulary v;
    v.source_words_ = std::move(source);
    v.target_words_ = std::move(target);
    for (std::size_t i = 0; i < v.source_words_.size(); ++i) {
        v.source_ids_[v.source_words_[i]] = static_cast<int>(i);
    }
    for (std::size_t i = 0; i < v.target_words_.size(); ++i) {
        v.target_ids_[v.target_words_[i]] = static_cast<int>(v.source_words_.size() + i);
    }
    return v;
}

std::optional<Lang> Vocabulary::lang_of(int id) const {
    if (id < 0 || static_cast<std::size_t>(id) >= total_ids()) {
        throw std::out_of_range("lang_of: word id out of range");
    }
    if (static_cast<std::size_t>(id) < n_source() || id == unk_s()) return Lang::Source;
    if (static_cast<std::size_t>(id) < n_source() + n_target() || id == unk_t()) {
        return Lang::Target;
    }
    return std::nullopt;  // SOS/EOS
}

int Vocabulary::encode_word(const std::string& word, Lang label) const {
    // A word resolves only in the map of its own label's language.
    if (label == Lang::Source) {
        auto it = source_ids_.find(word);
        return it == source_ids_.end() ? unk_s() : it->second;
    }
    auto it = target_ids_.find(word);
    return it == target_ids_.end() ? unk_t() : it->second;
}

const std::string& Vocabulary::word_string(int id) const {
    static const std::string unk_s_str = kUnkSourceStr;
    static const std::string unk_t_str = kUnkTargetStr;
    static const std::string sos_str = kSosStr;
    static const std::string eos_str = kEosStr;
    if (id >= 0 && static_cast<std::size_t>(id) < n_source()) {
        return source_words_[static_cast<std::size_t>(id)];
    }
    if (static_cast<std::size_t>(id) < n_source() + n_target()) {
        return target_words_[static_cast<std::size_t>(id) - n_source()];
    }
    if (id == unk_s()) return unk_s_str;
    if (id == unk_t()) return unk_t_str;
    if (id == sos()) return sos_str;
    if (id == eos()) return eos_str;
    throw std::out_of_range("word_string: word id out of range");
}

EncodedSentence encode_sentence(const Vocabulary& v, const LabeledSentence& sent) {
    EncodedSentence enc;
    enc.word_ids.reserve(sent.size());
    enc.label_ids.reserve(sent.size());
    for (std::size_t i = 0; i < sent.size(); ++i) {
        enc.word_ids.push_back(v.encode_word(sent.words[i], sent.labels[i]));
        enc.label_ids.push_back(sent.labels[i] == Lang::Source ? Vocabulary::kLabelS
                                                               : Vocabulary::kLabelT);
    }
    return enc;
}

LabeledSentence decode_sentence(const Vocabulary& v, const EncodedSentence& enc) {
    LabeledSentence sent;
    for (std::size_t i = 0; i < enc.word_ids.size(); ++i) {
        sent.words.push_back(v.word_string(enc.word_ids[i]));
        sent.labels.push_back(enc.label_ids[i] == Vocabulary::kLabelS ? Lang::Source
                                                                      : Lang::Target);
    }
    return sent;
}

// ---- corpus file format ----

LabeledSentence parse_labeled_line(const std::string& line, std::size_t line_no) {
    json rec;
    try {
        rec = json::parse(line);
    } catch (const json::exception& e) {
        line_error(line_no, std::string("bad record: ") + e.what());
    }
    if (!rec.is_object() || !rec.contains("words") || !rec.contains("labels") ||
        !rec["words"].is_array() || !rec["labels"].is_array()) {
        line_error(line_no, "record must be an object with words/labels arrays");
    }
    const auto& words = rec["words"];
    const auto& labels = rec["labels"];
    if (words.size() != labels.size()) {
        line_error(line_no, "words/labels length mismatch (" + std::to_string(words.size()) +
                                " vs " + std::to_string(labels.size()) + ")");
    }
    if (words.empty()) {
        line_error(line_no, "empty sentence");
    }
    LabeledSentence sent;
    for (std::size_t i = 0; i < words.size(); ++i) {
        if (!words[i].is_string() || !labels[i].is_string()) {
            line_error(line_no, "words/labels entries must be strings");
        }
        const std::string w = words[i].get<std::string>();
        const std::string l = labels[i].get<std::string>();
        if (is_reserved_word(w)) {
            line_error(line_no, "word '" + w + "' is a reserved symbol");
        }
        if (l == "s") {
            sent.labels.push_back(Lang::Source);
        } else if (l == "t") {
            sent.labels.push_back(Lang::Target);
        } else {
            line_error(line_no, "unknown label '" + l + "'");
        }
        sent.words.push_back(w);
    }
    return sent;
}

std::string format_labeled_line(const LabeledSentence& sent) {
    json rec;
    rec["words"] = sent.words;
    json labels = json::array();
    for (Lang l : sent.labels) labels.push_back(lang_str(l));
    rec["labels"] = std::move(labels);
    return rec.dump();
}

Corpus read_corpus(const std::string& path, Provenance provenance) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open corpus file: " + path);
    }
    Corpus corpus;
    corpus.provenance = provenance;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        corpus.sentences.push_back(parse_labeled_line(line, line_no));
    }
    return corpus;
}

void write_corpus(const Corpus& corpus, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write corpus file: " + path);
    }
    for (const auto& sent : corpus.sentences) {
        out << format_labeled_line(sent) << "\n";
    }
}

// ---- batching ----

std::vector<Batch> make_batches(const Corpus& corpus, const Vocabulary& vocab,
                                std::size_t batch_size, std::uint64_t seed) {
    if (batch_size == 0) {
        throw std::invalid_argument("make_batches: batch_size must be >= 1");
    }
    std::vector<std::size_t> order(corpus.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return corpus.sentences[a].size() < corpus.sentences[b].size();
    });

    std::vector<std::vector<std::size_t>> groups;
    for (std::size_t pos = 0; pos < order.size(); pos += batch_size) {
        const std::size_t end = std::min(pos + batch_size, order.size());
        groups.emplace_back(order.begin() + pos, order.begin() + end);
    }

    // Shuffle full batches; a ragged remainder stays last.
    const bool ragged = !groups.empty() && groups.back().size() < batch_size;
    std::vector<std::size_t> batch_order(groups.size() - (ragged ? 1 : 0));
    std::iota(batch_order.begin(), batch_order.end(), 0);
    Rng rng(seed);
    rng.shuffle_indices(batch_order);
    if (ragged) batch_order.push_back(groups.size() - 1);

    std::vector<Batch> batches;
    batches.reserve(groups.size());
    for (std::size_t gi : batch_order) {
        const auto& group = groups[gi];
        Batch b;
        std::size_t max_len = 0;
        for (std::size_t si : group) max_len = std::max(max_len, corpus.sentences[si].size());
        for (std::size_t si : group) {
            EncodedSentence enc = encode_sentence(vocab, corpus.sentences[si]);
            const std::size_t len = enc.word_ids.size();
            enc.word_ids.resize(max_len, vocab.sos());
            enc.label_ids.resize(max_len, Vocabulary::kLabelS);
            std::vector<std::uint8_t> mask(max_len, 0);
            std::fill(mask.begin(), mask.begin() + len, std::uint8_t{1});
            b.word_ids.push_back(std::move(enc.word_ids));
            b.label_ids.push_back(std::move(enc.label_ids));
            b.mask.push_back(std::move(mask));
            b.lengths.push_back(len);
            b.sentence_index.push_back(si);
        }
        batches.push_back(std::move(b));
    }
    return batches;
}

// ---- aligned embeddings ----

std::size_t EmbeddingTable::coverage_count() const {
    std::size_t n = 0;
    for (bool c : covered) n += c ? 1 : 0;
    return n;
}

EmbeddingTable load_embeddings(const std::string& path, const Vocabulary& vocab) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open embedding file: " + path);
    }
    EmbeddingTable table;
    table.vectors.resize(vocab.total_ids());
    table.covered.assign(vocab.total_ids(), false);

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream is(line);
        std::string word;
        is >> word;
        std::vector<double> values;
        double v;
        while (is >> v) values.push_back(v);
        if (!is.eof()) {
            throw std::runtime_error("embedding file line " + std::to_string(line_no) +
                                     ": malformed number");
        }
        if (values.empty()) {
            throw std::runtime_error("embedding file line " + std::to_string(line_no) +
                                     ": no vector components");
        }
        if (table.dim == 0) {
            table.dim = values.size();
        } else if (values.size() != table.dim) {
            throw std::runtime_error("embedding file line " + std::to_string(line_no) +
                                     ": dimension " + std::to_string(values.size()) +
                                     " != " + std::to_string(table.dim));
        }
        // Aligned space: the same surface form may exist in both languages.
        for (Lang lang : {Lang::Source, Lang::Target}) {
            const int id = vocab.encode_word(word, lang);
            if (vocab.is_special(id)) continue;
            table.vectors[static_cast<std::size_t>(id)] = Tensor::vec(values);
            table.covered[static_cast<std::size_t>(id)] = true;
        }
    }
    return table;
}

// ---- synthetic toy bilingual corpus ----

namespace {

struct ToyTables {
    // initial[lang][k], bigram[lang][prev][k] over the shared latent space.
    std::vector<std::vector<double>> initial;
    std::vector<std::vector<std::vector<double>>> bigram;
};

ToyTables build_toy_tables(const ToyConfig& cfg, std::uint64_t seed) {
    Rng rng(seed);
    ToyTables t;
    t.initial.resize(2);
    t.bigram.resize(2);
    for (int lang = 0; lang < 2; ++lang) {
        t.initial[lang] = rng.dirichlet(cfg.vocab_per_lang, cfg.bigram_concentration);
        t.bigram[lang].resize(cfg.vocab_per_lang);
        for (std::size_t prev = 0; prev < cfg.vocab_per_lang; ++prev) {
            t.bigram[lang][prev] = rng.dirichlet(cfg.vocab_per_lang, cfg.bigram_concentration);
        }
    }
    return t;
}

std::string render_toy_word(Lang lang, std::size_t latent) {
    return std::string(lang == Lang::Source ? "s" : "t") + std::to_string(latent);
}

std::vector<std::size_t> sample_latent_chain(const ToyTables& t, const std::vector<Lang>& langs,
                                             Rng& rng) {
    std::vector<std::size_t> chain(langs.size());
    for (std::size_t i = 0; i < langs.size(); ++i) {
        const int lang = static_cast<int>(langs[i]);
        const auto& dist = i == 0 ? t.initial[lang] : t.bigram[lang][chain[i - 1]];
        chain[i] = rng.categorical(dist);
    }
    return chain;
}

}  // namespace

ToyCorpusPair synth_toy_corpus(const ToyConfig& cfg, std::size_t n_pairs, std::size_t n_cs,
                               std::uint64_t seed) {
    if (!(cfg.stay_prob > 0.0 && cfg.stay_prob <= 1.0)) {
        throw std::invalid_argument("synth_toy_corpus: stay_prob must be in (0, 1]");
    }
    if (cfg.vocab_per_lang == 0 || cfg.len_min == 0 || cfg.len_max < cfg.len_min) {
        throw std::invalid_argument("synth_toy_corpus: bad size configuration");
    }
    if (cfg.bigram_concentration <= 0.0) {
        throw std::invalid_argument("synth_toy_corpus: concentration must be > 0");
    }

    const ToyTables tables = build_toy_tables(cfg, derive_seed(seed, 0));

    ToyCorpusPair out;
    out.mono.provenance = Provenance::ParallelMono;
    out.code_switched.provenance = Provenance::Toy;

    auto sample_len = [&](Rng& rng) {
        return cfg.len_min + rng.below(cfg.len_max - cfg.len_min + 1);
    };

    // Parallel monolingual corpus: a latent chain driven by one language's
    // tables, rendered in both languages.
    Rng mono_rng(derive_seed(seed, 1));
    for (std::size_t p = 0; p < n_pairs; ++p) {
        const Lang driver = p % 2 == 0 ? Lang::Source : Lang::Target;
        const std::size_t len = sample_len(mono_rng);
        std::vector<Lang> langs(len, driver);
        const auto chain = sample_latent_chain(tables, langs, mono_rng);
        for (Lang render : {Lang::Source, Lang::Target}) {
            LabeledSentence sent;
            for (std::size_t i = 0; i < len; ++i) {
                sent.words.push_back(render_toy_word(render, chain[i]));
                sent.labels.push_back(render);
            }
            out.mono.sentences.push_back(std::move(sent));
        }
    }

    // Code-switched corpus: hidden language state stays with prob stay_prob.
    Rng cs_rng(derive_seed(seed, 2));
    for (std::size_t sidx = 0; sidx < n_cs; ++sidx) {
        const std::size_t len = sample_len(cs_rng);
        std::vector<Lang> langs(len);
        langs[0] = cs_rng.bernoulli(0.5) ? Lang::Source : Lang::Target;
        for (std::size_t i = 1; i < len; ++i) {
            const bool stay = cs_rng.bernoulli(cfg.stay_prob);
            langs[i] = stay ? langs[i - 1]
                            : (langs[i - 1] == Lang::Source ? Lang::Target : Lang::Source);
        }
        const auto chain = sample_latent_chain(tables, langs, cs_rng);
        LabeledSentence sent;
        for (std::size_t i = 0; i < len; ++i) {
            sent.words.push_back(render_toy_word(langs[i], chain[i]));
            sent.labels.push_back(langs[i]);
        }
        out.code_switched.sentences.push_back(std::move(sent));
    }
    return out;
}

void write_toy_aligned_embeddings(const ToyConfig& cfg, std::size_t dim, std::uint64_t seed,
                                  const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write embedding file: " + path);
    }
    out.precision(17);
    Rng rng(derive_seed(seed, 3));
    for (std::size_t k = 0; k < cfg.vocab_per_lang; ++k) {
        std::vector<double> v(dim);
        for (auto& x : v) x = rng.uniform(-0.08, 0.08);
        for (Lang lang : {Lang::Source, Lang::Target}) {
            out << render_toy_word(lang, k);
            for (double x : v) out << " " << x;
            out << "\n";
        }
    }
}

}  // namespace vacs
