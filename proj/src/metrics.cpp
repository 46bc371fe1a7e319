// Copyright 2026 VACS Contributors
// SPDX-License-Identifier: Apache-2.0

#include "vacs/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace vacs {

namespace {

void require_nonempty(const Corpus& corpus, const char* op) {
    if (corpus.empty()) {
        throw std::invalid_argument(std::string(op) + ": empty corpus");
    }
}

}  // namespace

double cmi(const LabeledSentence& sent) {
    if (sent.size() == 0) {
        throw std::invalid_argument("cmi: empty sentence");
    }
    const double n = static_cast<double>(sent.size());
    std::size_t per_lang[2] = {0, 0};
    std::size_t switches = 0;
    for (std::size_t i = 0; i < sent.size(); ++i) {
        per_lang[static_cast<int>(sent.labels[i])] += 1;
        if (i > 0 && sent.labels[i] != sent.labels[i - 1]) ++switches;
    }
    const double dominant = static_cast<double>(std::max(per_lang[0], per_lang[1]));
    return (n - dominant + static_cast<double>(switches)) / (2.0 * n);
}

double avg_cmi(const Corpus& corpus) {
    require_nonempty(corpus, "avg_cmi");
    double acc = 0.0;
    for (const auto& s : corpus.sentences) acc += cmi(s);
    return acc / static_cast<double>(corpus.size());
}

double m_index(const Corpus& corpus) {
    require_nonempty(corpus, "m_index");
    double tokens[2] = {0.0, 0.0};
    for (const auto& s : corpus.sentences) {
        for (Lang l : s.labels) tokens[static_cast<int>(l)] += 1.0;
    }
    const double total = tokens[0] + tokens[1];
    const double p0 = tokens[0] / total;
    const double p1 = tokens[1] / total;
    const double sum_sq = p0 * p0 + p1 * p1;
    return (1.0 - sum_sq) / sum_sq;  // k = 2, so k-1 = 1
}

std::vector<std::size_t> span_lengths(const Corpus& corpus) {
    std::vector<std::size_t> spans;
    for (const auto& s : corpus.sentences) {
        std::size_t run = 0;
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (i == 0 || s.labels[i] == s.labels[i - 1]) {
                ++run;
            } else {
                spans.push_back(run);
                run = 1;
            }
        }
        if (run > 0) spans.push_back(run);
    }
    return spans;
}

double burstiness(const Corpus& corpus) {
    require_nonempty(corpus, "burstiness");
    const auto spans = span_lengths(corpus);
    const double n = static_cast<double>(spans.size());
    double mean = 0.0;
    for (std::size_t len : spans) mean += static_cast<double>(len);
    mean /= n;
    double var = 0.0;
    for (std::size_t len : spans) {
        const double d = static_cast<double>(len) - mean;
        var += d * d;
    }
    const double sigma = std::sqrt(var / n);
    return (sigma - mean) / (sigma + mean);
}

double span_entropy(const Corpus& corpus) {
    require_nonempty(corpus, "span_entropy");
    const auto spans = span_lengths(corpus);
    std::map<std::size_t, std::size_t> counts;
    for (std::size_t len : spans) counts[len] += 1;
    const double n = static_cast<double>(spans.size());
    double h = 0.0;
    for (const auto& [len, count] : counts) {
        const double p = static_cast<double>(count) / n;
        h -= p * std::log2(p);
    }
    return h;
}

LengthHistogram length_histogram(const Corpus& corpus) {
    require_nonempty(corpus, "length_histogram");
    LengthHistogram hist;
    double acc = 0.0;
    for (const auto& s : corpus.sentences) {
        hist.counts[s.size()] += 1;
        hist.max = std::max(hist.max, s.size());
        acc += static_cast<double>(s.size());
        hist.total += 1;
    }
    hist.mean = acc / static_cast<double>(hist.total);
    return hist;
}

MetricsReport compute_metrics(const Corpus& corpus) {
    require_nonempty(corpus, "compute_metrics");
    MetricsReport r;
    r.avg_cmi = avg_cmi(corpus);
    r.m_index = m_index(corpus);
    r.burstiness = burstiness(corpus);
    r.span_entropy = span_entropy(corpus);
    r.lengths = length_histogram(corpus);
    for (const auto& s : corpus.sentences) {
        for (Lang l : s.labels) {
            if (l == Lang::Source) {
                ++r.source_tokens;
            } else {
                ++r.target_tokens;
            }
        }
    }
    return r;
}

std::string metrics_json(const MetricsReport& report) {
    nlohmann::json j;
    j["avg_cmi"] = report.avg_cmi;
    j["m_index"] = report.m_index;
    j["burstiness"] = report.burstiness;
    j["span_entropy"] = report.span_entropy;
    j["length_mean"] = report.lengths.mean;
    j["length_max"] = report.lengths.max;
    j["sentences"] = report.lengths.total;
    j["source_tokens"] = report.source_tokens;
    j["target_tokens"] = report.target_tokens;
    nlohmann::json hist = nlohmann::json::object();
    for (const auto& [len, count] : report.lengths.counts) {
        hist[std::to_string(len)] = count;
    }
    j["length_histogram"] = std::move(hist);
    return j.dump();
}

std::string metrics_table(const std::vector<std::pair<std::string, MetricsReport>>& rows) {
    std::size_t name_width = 7;  // "Dataset"
    for (const auto& [name, report] : rows) name_width = std::max(name_width, name.size());

    std::ostringstream os;
    os << std::left << std::setw(static_cast<int>(name_width) + 2) << "Dataset" << std::right
       << std::setw(10) << "Avg CMI" << std::setw(10) << "M-index" << std::setw(12)
       << "Burstiness" << std::setw(14) << "Span Entropy" << "\n";
    os << std::string(name_width + 2 + 10 + 10 + 12 + 14, '-') << "\n";
    os << std::fixed << std::setprecision(3);
    for (const auto& [name, r] : rows) {
        os << std::left << std::setw(static_cast<int>(name_width) + 2) << name << std::right
           << std::setw(10) << r.avg_cmi << std::setw(10) << r.m_index << std::setw(12)
           << r.burstiness << std::setw(14) << r.span_entropy << "\n";
    }
    return os.str();
}

}  // namespace vacs
