// Copyright 2026 VACS Contributors
// SPDX-License-Identifier: Apache-2.0
//
// Intrinsic code-switching metrics. Sentence level: the code-mixing index
// (CMI). Corpus level: M-index over per-language token fractions, burstiness
// and Shannon entropy of monolingual span lengths, plus the sentence-length
// histogram. Spans are maximal runs of one label and never cross sentence
// boundaries.

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "vacs/data.hpp"

namespace vacs {

struct LengthHistogram {
    std::map<std::size_t, std::size_t> counts;
    double mean = 0.0;
    std::size_t max = 0;
    std::size_t total = 0;
};

struct MetricsReport {
    double avg_cmi = 0.0;
    double m_index = 0.0;
    double burstiness = 0.0;
    double span_entropy = 0.0;
    LengthHistogram lengths;
    std::size_t source_tokens = 0;
    std::size_t target_tokens = 0;
};

// (N - max_y |S_y| + switches) / (2N); 0 for monolingual sentences,
// bounded below 0.75 for two languages.
double cmi(const LabeledSentence& sent);

double avg_cmi(const Corpus& corpus);

// (1 - sum p_j^2) / ((k-1) sum p_j^2) over k=2 corpus-level token fractions;
// 0 when one language owns every token, 1 at perfect balance.
double m_index(const Corpus& corpus);

// (sigma - m) / (sigma + m) over pooled monolingual span lengths, population
// standard deviation. -1 for perfectly periodic span lengths.
double burstiness(const Corpus& corpus);

// Base-2 Shannon entropy of the empirical span-length distribution.
double span_entropy(const Corpus& corpus);

LengthHistogram length_histogram(const Corpus& corpus);

// Pooled maximal monolingual run lengths, in corpus order.
std::vector<std::size_t> span_lengths(const Corpus& corpus);

MetricsReport compute_metrics(const Corpus& corpus);

// Single structured record (JSON object, one line).
std::string metrics_json(const MetricsReport& report);

// Aligned-column table over named corpora: dataset per row, one metric per
// column.
std::string metrics_table(const std::vector<std::pair<std::string, MetricsReport>>& rows);

}  // namespace vacs
