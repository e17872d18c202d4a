#pragma once

#include "ethdr/model.hpp"

#include <string>

namespace ethdr {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Flat key=value text. '#' starts a comment. Unknown or repeated keys are
// errors. Keys: variant, base_channels, embed_dim, num_blocks, heads,
// ire_stride, mlp_ratio, emsdc_activation, color_mode, emsdc_attach.
ModelConfig parse_config_text(const std::string& text);
ModelConfig load_config(const std::string& path);

std::string config_to_text(const ModelConfig& cfg);

}  // namespace ethdr
