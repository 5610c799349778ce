#pragma once

#include <string>

#include "mixsaem/missingness.hpp"
#include "mixsaem/model.hpp"
#include "mixsaem/saem.hpp"

namespace mixsaem {

/// JSON document with encoding, beta, mu, sigma and per-variable level
/// probabilities. Doubles are written with round-trip precision.
std::string params_to_json(const ModelParams& params);
ModelParams params_from_json(const std::string& text);

void save_params(const ModelParams& params, const std::string& path);
ModelParams load_params(const std::string& path);

/// Overlays the keys present in `json_text` onto `cfg`. Unknown keys are
/// an error so typos do not silently fall back to defaults.
void apply_saem_config(SaemConfig& cfg, const std::string& json_text);
std::string saem_config_to_json(const SaemConfig& cfg);

DiscreteEncoding parse_encoding(const std::string& name);
std::string encoding_name(DiscreteEncoding e);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace mixsaem
