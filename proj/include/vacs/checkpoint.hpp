// Copyright 2026 VACS Contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include <json.hpp>

#include "vacs/data.hpp"
#include "vacs/model.hpp"

namespace vacs {

// Self-describing versioned container: config, vocabulary, named tensors.
struct VacsCheckpoint {
    VacsParams params;
    Vocabulary vocab = Vocabulary::from_word_lists({}, {});
};

void save_vacs_checkpoint(const VacsParams& params, const Vocabulary& vocab,
                          const std::string& path);
VacsCheckpoint load_vacs_checkpoint(const std::string& path);

// Shared tensor/vocab JSON helpers, reused by the payload model's container.
nlohmann::json tensor_to_json(const Tensor& t);
Tensor tensor_from_json(const nlohmann::json& j);
nlohmann::json vocab_to_json(const Vocabulary& v);
Vocabulary vocab_from_json(const nlohmann::json& j);

// Stable content digest over parameter bytes (for change detection in tests
// and logs, not cryptographic).
std::uint64_t params_digest(const VacsParams& params);

}  // namespace vacs
