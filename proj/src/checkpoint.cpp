// Copyright 2026 VACS Contributors
// SPDX-License-Identifier: Apache-2.0

#include "vacs/checkpoint.hpp"

#include <bit>
#include <fstream>

#include "vacs/rng.hpp"

namespace vacs {

using nlohmann::json;

namespace {

constexpr const char* kFormat = "vacs-checkpoint";
constexpr int kVersion = 1;

}  // namespace

json tensor_to_json(const Tensor& t) {
    json j;
    j["shape"] = t.shape();
    j["values"] = t.values();
    return j;
}

Tensor tensor_from_json(const json& j) {
    std::vector<std::size_t> shape = j.at("shape").get<std::vector<std::size_t>>();
    std::vector<double> values = j.at("values").get<std::vector<double>>();
    return Tensor(std::move(shape), std::move(values));
}

json vocab_to_json(const Vocabulary& v) {
    json j;
    j["source"] = v.source_words();
    j["target"] = v.target_words();
    return j;
}

Vocabulary vocab_from_json(const json& j) {
    return Vocabulary::from_word_lists(j.at("source").get<std::vector<std::string>>(),
                                       j.at("target").get<std::vector<std::string>>());
}

void save_vacs_checkpoint(const VacsParams& params, const Vocabulary& vocab,
                          const std::string& path) {
    json j;
    j["format"] = kFormat;
    j["version"] = kVersion;
    j["config"] = {{"embed_dim", params.cfg.embed_dim},
                   {"label_embed_dim", params.cfg.label_embed_dim},
                   {"hidden_dim", params.cfg.hidden_dim},
                   {"context_latent_dim", params.cfg.context_latent_dim},
                   {"switch_latent_dim", params.cfg.switch_latent_dim}};
    j["vocab"] = vocab_to_json(vocab);
    json tensors;
    params.visit([&](const std::string& name, const Tensor& t) {
        tensors[name] = tensor_to_json(t);
    });
    j["params"] = std::move(tensors);

    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write checkpoint: " + path);
    }
    out << j.dump() << "\n";
}

VacsCheckpoint load_vacs_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open checkpoint: " + path);
    }
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw std::runtime_error("checkpoint " + path + ": " + e.what());
    }
    if (j.value("format", "") != kFormat) {
        throw std::runtime_error("checkpoint " + path + ": unrecognized format");
    }
    if (j.value("version", -1) != kVersion) {
        throw std::runtime_error("checkpoint " + path + ": unsupported version");
    }

    VacsCheckpoint ck;
    const json& c = j.at("config");
    VacsConfig cfg;
    cfg.embed_dim = c.at("embed_dim").get<std::size_t>();
    cfg.label_embed_dim = c.at("label_embed_dim").get<std::size_t>();
    cfg.hidden_dim = c.at("hidden_dim").get<std::size_t>();
    cfg.context_latent_dim = c.at("context_latent_dim").get<std::size_t>();
    cfg.switch_latent_dim = c.at("switch_latent_dim").get<std::size_t>();

    ck.vocab = vocab_from_json(j.at("vocab"));
    ck.params = VacsParams::zeros(cfg, ck.vocab);
    const json& tensors = j.at("params");
    ck.params.visit([&](const std::string& name, Tensor& t) {
        const Tensor loaded = tensor_from_json(tensors.at(name));
        if (!loaded.same_shape(t)) {
            throw std::runtime_error("checkpoint " + path + ": tensor '" + name +
                                     "' has shape " + loaded.shape_str() + ", expected " +
                                     t.shape_str());
        }
        t = loaded;
    });
    return ck;
}

std::uint64_t params_digest(const VacsParams& params) {
    std::uint64_t h = 0x243F6A8885A308D3ull;
    params.visit([&](const std::string& name, const Tensor& t) {
        for (char ch : name) h = mix64(h ^ static_cast<std::uint64_t>(ch));
        for (double v : t.values()) h = mix64(h ^ std::bit_cast<std::uint64_t>(v));
    });
    return h;
}

}  // namespace vacs
