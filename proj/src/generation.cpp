// Copyright 2026 VACS Contributors
// SPDX-License-Identifier: Apache-2.0

#include "vacs/generation.hpp"

#include <algorithm>
#include <fstream>

#include <json.hpp>

#include "vacs/rng.hpp"

namespace vacs {

GeneratedCorpus generate_corpus(const VacsParams& params, const Vocabulary& vocab,
                                const GenerateOptions& opts) {
    if (opts.count == 0 || opts.max_len == 0) {
        throw std::invalid_argument("generate_corpus: count and max_len must be >= 1");
    }
    GeneratedCorpus out;
    out.corpus.provenance = Provenance::SyntheticGcs;
    out.corpus.sentences.reserve(opts.count);

    double length_acc = 0.0;
    for (std::size_t i = 0; i < opts.count; ++i) {
        PriorSample sample = prior_sample(params, vocab, derive_seed(opts.seed, i),
                                          opts.max_len, opts.temperature);
        const LabeledSentence& s = sample.sentence;
        length_acc += static_cast<double>(s.size());
        out.summary.length_max = std::max(out.summary.length_max, s.size());
        for (Lang l : s.labels) {
            if (l == Lang::Source) {
                ++out.summary.source_tokens;
            } else {
                ++out.summary.target_tokens;
            }
        }
        out.corpus.sentences.push_back(std::move(sample.sentence));
    }
    out.summary.sentences = opts.count;
    out.summary.length_mean = length_acc / static_cast<double>(opts.count);
    return out;
}

std::string summary_json(const CorpusSummary& summary) {
    nlohmann::json j;
    j["provenance"] = provenance_str(Provenance::SyntheticGcs);
    j["sentences"] = summary.sentences;
    j["length_mean"] = summary.length_mean;
    j["length_max"] = summary.length_max;
    j["source_tokens"] = summary.source_tokens;
    j["target_tokens"] = summary.target_tokens;
    return j.dump();
}

void write_generated(const GeneratedCorpus& gen, const std::string& path) {
    write_corpus(gen.corpus, path);
    std::ofstream side(path + ".summary.json");
    if (!side) {
        throw std::runtime_error("cannot write summary: " + path + ".summary.json");
    }
    side << summary_json(gen.summary) << "\n";
}

}  // namespace vacs
