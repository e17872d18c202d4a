#pragma once

#include "ethdr/blocks.hpp"
#include "ethdr/colorspace.hpp"
#include "ethdr/tensor.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace ethdr {

// Weight-file or weight-binding violations.
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Three exposure-bracketed LDR frames. EVs are informational tags.
struct ExposureStack {
    Tensor under, normal, over;           // 1x3xHxW each, values in [0,1]
    std::array<float, 3> ev = {-2.0f, 0.0f, 2.0f};
};

void validate_stack(const ExposureStack& stack);

enum class Variant { Main, Lite };
enum class ColorMode { Paper, Bt601 };

struct ModelConfig {
    Variant variant = Variant::Main;
    std::size_t base_channels = 16;
    std::size_t embed_dim = 32;
    std::size_t num_blocks = 3;
    std::size_t heads = 4;
    std::size_t ire_stride = 2;
    std::size_t mlp_ratio = 2;
    EmsdcAct emsdc_activation = EmsdcAct::Gelu;
    ColorMode color_mode = ColorMode::Paper;
    EmsdcAttach emsdc_attach = EmsdcAttach::Input;
};

void validate_config(const ModelConfig& cfg);

// SE reduction and IRE expansion follow the MobileNetV2 conventions.
inline constexpr std::size_t kSeRatio = 4;
inline constexpr std::size_t kIreExpansion = 6;

// Channels entering IRE: 5C for the main fusion concat, 3C for lite.
std::size_t transformer_input_channels(const ModelConfig& cfg);

/// Ordered parameter map. Insertion order is the serialization order.
class WeightStore {
public:
    void add(std::string name, Tensor t);
    bool contains(const std::string& name) const;
    const Tensor& get(const std::string& name) const;
    Tensor& get_mutable(const std::string& name);

    std::size_t count() const { return items_.size(); }
    std::uint64_t total_elements() const;
    const std::vector<std::pair<std::string, Tensor>>& items() const { return items_; }

private:
    std::vector<std::pair<std::string, Tensor>> items_;
    std::unordered_map<std::string, std::size_t> index_;
};

// Little-endian container: magic "EHDRW\0", u16 version, u32 tensor count,
// then per tensor u16 name length, name bytes, u8 rank, u32 dims, f32 data.
void save_weights(const WeightStore& store, const std::string& path);
WeightStore load_weights(const std::string& path);

/// The assembled network. Immutable once built; forward is const.
class Model {
public:
    // Deterministic build: same (cfg, seed) gives a bit-identical store.
    static Model build(const ModelConfig& cfg, std::uint64_t seed);
    // Bind externally loaded weights; every expected parameter must be
    // present with the right shape and nothing extra.
    static Model from_weights(const ModelConfig& cfg, WeightStore store);

    const ModelConfig& config() const { return cfg_; }
    const WeightStore& weights() const { return store_; }

    Tensor forward(const ExposureStack& stack) const;

    // Whole-image fusion: patches of `tile` px with `overlap` px linear
    // feathering, so attention cost stays bounded on large inputs.
    Tensor fuse_tiled(const ExposureStack& stack, std::size_t tile = 128,
                      std::size_t overlap = 16) const;

private:
    Model() = default;
    void bind();

    ModelConfig cfg_;
    WeightStore store_;

    ConvLayer stem_over_, stem_normal_, stem_under_;
    IAAFParams iaaf_over_, iaaf_under_;
    IREParams ire_;
    std::vector<CAViTBlockParams> blocks_;
    ConvLayer recon0_, recon1_;
    ColorCoeffs coeffs_{};
};

// Names, shapes, and init category of every parameter, in build order.
enum class InitKind { FanInUniform, Zero, One, DytAlpha };
struct ParamSpec {
    std::string name;
    std::vector<std::size_t> shape;
    InitKind init;
    std::size_t fan_in;  // used by FanInUniform
};
std::vector<ParamSpec> enumerate_params(const ModelConfig& cfg);

}  // namespace ethdr
