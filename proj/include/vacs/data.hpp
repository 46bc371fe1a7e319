// Copyright 2026 VACS Contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vacs/tensor.hpp"

namespace vacs {

// Per-token language label. Sentences never carry Eos; it is a terminal
// event in label decoding only.
enum class Lang : std::uint8_t { Source = 0, Target = 1 };

inline const char* lang_str(Lang l) { return l == Lang::Source ? "s" : "t"; }

struct LabeledSentence {
    std::vector<std::string> words;
    std::vector<Lang> labels;

    std::size_t size() const { return words.size(); }
};

enum class Provenance { RealCs, ParallelMono, SyntheticGcs, Toy };

std::string provenance_str(Provenance p);

struct Corpus {
    std::vector<LabeledSentence> sentences;
    Provenance provenance = Provenance::Toy;

    std::size_t size() const { return sentences.size(); }
    bool empty() const { return sentences.empty(); }
};

// Two disjoint word-id ranges plus specials. Layout:
//   [0, n_source)                    ranked source words
//   [n_source, n_source+n_target)    ranked target words
//   then UNK-s, UNK-t, SOS, EOS.
// Every sampled or scored word id is owned by exactly one language;
// SOS/EOS own neither.
class Vocabulary {
public:
    static Vocabulary build(const std::vector<const Corpus*>& corpora,
                            std::size_t max_per_lang, std::size_t min_count);

    std::size_t n_source() const { return source_words_.size(); }
    std::size_t n_target() const { return target_words_.size(); }

    int unk_s() const { return static_cast<int>(n_source() + n_target()); }
    int unk_t() const { return unk_s() + 1; }
    int sos() const { return unk_s() + 2; }
    int eos() const { return unk_s() + 3; }

    // Rows needed in an embedding table addressed by word id.
    std::size_t total_ids() const { return n_source() + n_target() + 4; }
    // Size of the generative word distribution: ranked words plus both UNKs.
    std::size_t word_output_dim() const { return n_source() + n_target() + 2; }

    bool is_special(int id) const { return id >= unk_s(); }

    // Language owning a word id; UNKs belong to their language, SOS/EOS to none.
    std::optional<Lang> lang_of(int id) const;

    int encode_word(const std::string& word, Lang label) const;
    const std::string& word_string(int id) const;

    // Label alphabet used by the label decoder head: s, t, end-of-sentence.
    static constexpr int kLabelS = 0;
    static constexpr int kLabelT = 1;
    static constexpr int kLabelEos = 2;
    static constexpr int kLabelSos = 3;  // input-only
    static constexpr std::size_t kLabelHeadDim = 3;
    static constexpr std::size_t kLabelEmbRows = 4;

    const std::vector<std::string>& source_words() const { return source_words_; }
    const std::vector<std::string>& target_words() const { return target_words_; }

    // Deserialization support; word lists must already be ranked.
    static Vocabulary from_word_lists(std::vector<std::string> source,
                                      std::vector<std::string> target);

private:
    Vocabulary() = default;

    std::vector<std::string> source_words_;
    std::vector<std::string> target_words_;
    std::map<std::string, int> source_ids_;
    std::map<std::string, int> target_ids_;
};

struct EncodedSentence {
    std::vector<int> word_ids;
    std::vector<int> label_ids;  // kLabelS / kLabelT
};

EncodedSentence encode_sentence(const Vocabulary& v, const LabeledSentence& sent);
LabeledSentence decode_sentence(const Vocabulary& v, const EncodedSentence& enc);

// ---- corpus file format: one record per line, {"words": [...], "labels": [...]} ----

LabeledSentence parse_labeled_line(const std::string& line, std::size_t line_no = 0);
std::string format_labeled_line(const LabeledSentence& sent);

Corpus read_corpus(const std::string& path, Provenance provenance);
void write_corpus(const Corpus& corpus, const std::string& path);

// ---- batching ----

struct Batch {
    // Row-per-sentence, padded to the batch max length. Padded positions carry
    // the vocabulary SOS word id / label s and mask 0.
    std::vector<std::vector<int>> word_ids;
    std::vector<std::vector<int>> label_ids;
    std::vector<std::vector<std::uint8_t>> mask;
    std::vector<std::size_t> lengths;
    std::vector<std::size_t> sentence_index;  // position in the source corpus

    std::size_t size() const { return lengths.size(); }
    std::size_t max_len() const { return word_ids.empty() ? 0 : word_ids[0].size(); }
};

// Sentences are grouped by length so padding stays small, the batch order is
// shuffled with the seed, and a ragged remainder batch always comes last.
std::vector<Batch> make_batches(const Corpus& corpus, const Vocabulary& vocab,
                                std::size_t batch_size, std::uint64_t seed);

// ---- aligned embeddings ----

struct EmbeddingTable {
    std::size_t dim = 0;
    // Per word id; ids absent from the file keep their flag false and are
    // left for random initialization.
    std::vector<Tensor> vectors;
    std::vector<bool> covered;

    std::size_t coverage_count() const;
};

EmbeddingTable load_embeddings(const std::string& path, const Vocabulary& vocab);

// ---- synthetic toy bilingual corpus ----

struct ToyConfig {
    std::size_t vocab_per_lang = 200;
    double bigram_concentration = 0.05;
    double stay_prob = 0.7;        // probability the language state repeats
    std::size_t len_min = 4;
    std::size_t len_max = 18;
};

struct ToyCorpusPair {
    Corpus mono;          // paired translations, two sentences per pair
    Corpus code_switched;
};

// Words are emitted from per-language bigram tables over a shared latent
// index space, so translations pair index-for-index and cross-language
// bigrams remain statistically meaningful.
ToyCorpusPair synth_toy_corpus(const ToyConfig& cfg, std::size_t n_pairs,
                               std::size_t n_cs, std::uint64_t seed);

// Aligned embeddings for the toy languages: translation pairs share one
// random vector, written in the plain text embedding format.
void write_toy_aligned_embeddings(const ToyConfig& cfg, std::size_t dim, std::uint64_t seed,
                                  const std::string& path);

}  // namespace vacs
