#include "ethdr/model.hpp"

#include "ethdr/init_rng.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

namespace ethdr {

void validate_stack(const ExposureStack& stack) {
    const Tensor* imgs[3] = {&stack.under, &stack.normal, &stack.over};
    const char* names[3] = {"under", "normal", "over"};
    for (int i = 0; i < 3; ++i) {
        if (imgs[i]->rank() != 4 || imgs[i]->extent(0) != 1 || imgs[i]->extent(1) != 3) {
            throw ShapeError(std::string("exposure image '") + names[i] + "' must be 1x3xHxW, got " +
                             imgs[i]->shape_str());
        }
    }
    if (!stack.under.same_shape(stack.normal) || !stack.normal.same_shape(stack.over)) {
        throw ShapeError("exposure stack shape mismatch: under " + stack.under.shape_str() +
                         ", normal " + stack.normal.shape_str() + ", over " + stack.over.shape_str());
    }
    for (int i = 0; i < 3; ++i) {
        const float* p = imgs[i]->data();
        for (std::size_t j = 0; j < imgs[i]->size(); ++j) {
            if (!(p[j] >= 0.0f && p[j] <= 1.0f)) {
                throw ShapeError(std::string("exposure image '") + names[i] +
                                 "' has values outside [0,1] (or non-finite)");
            }
        }
    }
}

void validate_config(const ModelConfig& cfg) {
    if (cfg.base_channels < 1) throw FormatError("config: base_channels must be >= 1");
    if (cfg.num_blocks < 1) throw FormatError("config: num_blocks must be >= 1");
    if (cfg.ire_stride != 1 && cfg.ire_stride != 2 && cfg.ire_stride != 4) {
        throw FormatError("config: ire_stride must be 1, 2, or 4");
    }
    if (cfg.mlp_ratio < 1) throw FormatError("config: mlp_ratio must be >= 1");
    if (cfg.heads < 1 || cfg.embed_dim % cfg.heads != 0) {
        throw FormatError("config: heads must divide embed_dim");
    }
    if (cfg.embed_dim % 4 != 0) throw FormatError("config: embed_dim must be divisible by 4");
    if (cfg.embed_dim % kSeRatio != 0) throw FormatError("config: embed_dim must be divisible by the SE ratio");
    const std::size_t expanded = kIreExpansion * transformer_input_channels(cfg);
    if (expanded % kSeRatio != 0) {
        throw FormatError("config: IRE expanded channels must be divisible by the SE ratio "
                          "(use an even base_channels)");
    }
}

std::size_t transformer_input_channels(const ModelConfig& cfg) {
    return (cfg.variant == Variant::Main ? 5 : 3) * cfg.base_channels;
}

// ---------------------------------------------------------------------------
// WeightStore
// ---------------------------------------------------------------------------

void WeightStore::add(std::string name, Tensor t) {
    if (index_.count(name)) throw FormatError("duplicate parameter name: " + name);
    index_.emplace(name, items_.size());
    items_.emplace_back(std::move(name), std::move(t));
}

bool WeightStore::contains(const std::string& name) const { return index_.count(name) != 0; }

const Tensor& WeightStore::get(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw FormatError("missing parameter: " + name);
    return items_[it->second].second;
}

Tensor& WeightStore::get_mutable(const std::string& name) {
    auto it = index_.find(name);
    if (it == index_.end()) throw FormatError("missing parameter: " + name);
    return items_[it->second].second;
}

std::uint64_t WeightStore::total_elements() const {
    std::uint64_t n = 0;
    for (const auto& [name, t] : items_) n += t.size();
    return n;
}

// ---------------------------------------------------------------------------
// Parameter enumeration
// ---------------------------------------------------------------------------

std::vector<ParamSpec> enumerate_params(const ModelConfig& cfg) {
    validate_config(cfg);
    const std::size_t C = cfg.base_channels;
    const std::size_t D = cfg.embed_dim;
    const std::size_t CC = transformer_input_channels(cfg);
    const std::size_t E = kIreExpansion * CC;
    const std::size_t mD = cfg.mlp_ratio * D;

    std::vector<ParamSpec> out;
    auto conv = [&](const std::string& name, std::size_t oc, std::size_t icpg,
                    std::size_t kh, std::size_t kw, bool zero_init = false) {
        out.push_back({name + ".weight", {oc, icpg, kh, kw},
                       zero_init ? InitKind::Zero : InitKind::FanInUniform, icpg * kh * kw});
        out.push_back({name + ".bias", {oc}, InitKind::Zero, 0});
    };
    auto linear = [&](const std::string& name, std::size_t o, std::size_t i) {
        out.push_back({name + ".weight", {o, i}, InitKind::FanInUniform, i});
        out.push_back({name + ".bias", {o}, InitKind::Zero, 0});
    };
    auto dyt = [&](const std::string& name) {
        out.push_back({name + ".alpha", {1}, InitKind::DytAlpha, 0});
        out.push_back({name + ".gamma", {D}, InitKind::One, 0});
        out.push_back({name + ".beta", {D}, InitKind::Zero, 0});
    };
    auto se = [&](const std::string& name, std::size_t ch) {
        linear(name + ".reduce", ch / kSeRatio, ch);
        linear(name + ".expand", ch, ch / kSeRatio);
    };

    conv("stem.over", C, 3, 3, 3);
    conv("stem.normal", C, 3, 3, 3);
    conv("stem.under", C, 3, 3, 3);
    for (const char* br : {"over", "under"}) {
        const std::string base = std::string("iaaf.") + br;
        conv(base + ".pre", C, 2 * C, 3, 3);
        conv(base + ".res.conv0", C, C, 3, 3);
        conv(base + ".res.conv1", C, C, 3, 3);
        conv(base + ".post", C, C, 3, 3);
    }
    conv("ire.expand", E, CC, 1, 1);
    conv("ire.dw", E, 1, 3, 3);
    se("ire.se", E);
    conv("ire.project", D, E, 1, 1);
    for (std::size_t i = 0; i < cfg.num_blocks; ++i) {
        const std::string b = "block" + std::to_string(i);
        dyt(b + ".dyt1");
        linear(b + ".attn.qkv", 3 * D, D);
        linear(b + ".attn.out", D, D);
        conv(b + ".lce.dw", D, 1, 3, 3);
        conv(b + ".lce.pw", D, D, 1, 1);
        se(b + ".lce.se", D);
        dyt(b + ".dyt2");
        linear(b + ".mlp.fc0", mD, D);
        linear(b + ".mlp.fc1", D, mD);
        conv(b + ".emsdc.branch1", D, D / 4, 3, 3);
        conv(b + ".emsdc.branch3", D, D / 4, 3, 3);
        conv(b + ".emsdc.branch5", D, D / 4, 3, 3);
        conv(b + ".emsdc.merge", D, D, 1, 1, /*zero_init=*/true);
    }
    conv("recon.conv0", C, D, 3, 3);
    conv("recon.conv1", 3, C, 3, 3, /*zero_init=*/true);
    return out;
}

// ---------------------------------------------------------------------------
// Build / bind
// ---------------------------------------------------------------------------

Model Model::build(const ModelConfig& cfg, std::uint64_t seed) {
    const std::vector<ParamSpec> specs = enumerate_params(cfg);
    WeightStore store;
    for (std::size_t ordinal = 0; ordinal < specs.size(); ++ordinal) {
        const ParamSpec& ps = specs[ordinal];
        std::size_t count = 1;
        for (std::size_t e : ps.shape) count *= e;
        FloatBuffer values(count);
        switch (ps.init) {
            case InitKind::Zero:
                break;
            case InitKind::One:
                std::fill(values.begin(), values.end(), 1.0f);
                break;
            case InitKind::DytAlpha:
                std::fill(values.begin(), values.end(), 0.5f);
                break;
            case InitKind::FanInUniform: {
                const float bound = 1.0f / std::sqrt(static_cast<float>(ps.fan_in));
                for (std::size_t j = 0; j < count; ++j) {
                    const float u = unit_float(counter_hash(seed, ordinal, j));
                    values[j] = (2.0f * u - 1.0f) * bound;
                }
                break;
            }
        }
        store.add(ps.name, Tensor::from_buffer(ps.shape, std::move(values)));
    }
    return from_weights(cfg, std::move(store));
}

Model Model::from_weights(const ModelConfig& cfg, WeightStore store) {
    const std::vector<ParamSpec> specs = enumerate_params(cfg);
    for (const ParamSpec& ps : specs) {
        if (!store.contains(ps.name)) throw FormatError("weights missing parameter: " + ps.name);
        if (store.get(ps.name).shape() != ps.shape) {
            throw FormatError("parameter " + ps.name + " has shape " + store.get(ps.name).shape_str() +
                              ", expected a different shape for this config");
        }
    }
    if (store.count() != specs.size()) {
        throw FormatError("weight store has " + std::to_string(store.count()) +
                          " tensors, config expects " + std::to_string(specs.size()));
    }
    Model m;
    m.cfg_ = cfg;
    m.store_ = std::move(store);
    m.bind();
    return m;
}

namespace {

ConvLayer make_conv(const WeightStore& s, const std::string& name, ConvSpec spec) {
    return ConvLayer{spec, s.get(name + ".weight"), s.get(name + ".bias")};
}

LinearLayer make_linear(const WeightStore& s, const std::string& name) {
    return LinearLayer{s.get(name + ".weight"), s.get(name + ".bias")};
}

DyTParams make_dyt(const WeightStore& s, const std::string& name) {
    DyTParams p;
    p.alpha = s.get(name + ".alpha").data()[0];
    const Tensor& gamma = s.get(name + ".gamma");
    const Tensor& beta = s.get(name + ".beta");
    p.gamma.assign(gamma.data(), gamma.data() + gamma.size());
    p.beta.assign(beta.data(), beta.data() + beta.size());
    return p;
}

SEParams make_se(const WeightStore& s, const std::string& name) {
    SEParams p;
    p.reduce_w = s.get(name + ".reduce.weight");
    p.reduce_b = s.get(name + ".reduce.bias");
    p.expand_w = s.get(name + ".expand.weight");
    p.expand_b = s.get(name + ".expand.bias");
    p.ratio = kSeRatio;
    return p;
}

ConvSpec conv3x3(std::size_t oc, std::size_t ic, std::size_t groups = 1, std::size_t stride = 1,
                 std::size_t dilation = 1) {
    ConvSpec s;
    s.out_channels = oc;
    s.in_channels = ic;
    s.kernel_h = s.kernel_w = 3;
    s.stride_h = s.stride_w = stride;
    s.dilation_h = s.dilation_w = dilation;
    s.groups = groups;
    s.pad_h = s.pad_w = dilation;
    return s;
}

ConvSpec conv1x1(std::size_t oc, std::size_t ic) {
    ConvSpec s;
    s.out_channels = oc;
    s.in_channels = ic;
    return s;
}

void ensure_finite(const Tensor& t, const std::string& stage) {
    if (!all_finite(t)) throw std::runtime_error("non-finite values after layer: " + stage);
}

// Bottom/right-only mirror padding so divisibility cropping stays one-sided.
Tensor pad_reflect_bottom_right(const Tensor& x, std::size_t pb, std::size_t pr) {
    if (pb == 0 && pr == 0) return x;
    const std::size_t N = x.extent(0), C = x.extent(1), H = x.extent(2), W = x.extent(3);
    if (pb >= H || pr >= W) throw ShapeError("image too small to pad to a stride multiple");
    Tensor out({N, C, H + pb, W + pr});
    auto reflect = [](std::size_t i, std::size_t n) { return i < n ? i : 2 * n - 2 - i; };
    for (std::size_t n = 0; n < N; ++n)
        for (std::size_t c = 0; c < C; ++c)
            for (std::size_t y = 0; y < H + pb; ++y)
                for (std::size_t xx = 0; xx < W + pr; ++xx)
                    out.at(n, c, y, xx) = x.at(n, c, reflect(y, H), reflect(xx, W));
    return out;
}

}  // namespace

void Model::bind() {
    const std::size_t C = cfg_.base_channels;
    const std::size_t D = cfg_.embed_dim;
    const std::size_t CC = transformer_input_channels(cfg_);
    const std::size_t E = kIreExpansion * CC;

    coeffs_ = cfg_.color_mode == ColorMode::Paper ? ColorCoeffs::paper() : ColorCoeffs::bt601();

    stem_over_ = make_conv(store_, "stem.over", conv3x3(C, 3));
    stem_normal_ = make_conv(store_, "stem.normal", conv3x3(C, 3));
    stem_under_ = make_conv(store_, "stem.under", conv3x3(C, 3));

    auto bind_iaaf = [&](const std::string& base) {
        IAAFParams p;
        p.pre = make_conv(store_, base + ".pre", conv3x3(C, 2 * C));
        p.res0 = make_conv(store_, base + ".res.conv0", conv3x3(C, C));
        p.res1 = make_conv(store_, base + ".res.conv1", conv3x3(C, C));
        p.post = make_conv(store_, base + ".post", conv3x3(C, C));
        return p;
    };
    iaaf_over_ = bind_iaaf("iaaf.over");
    iaaf_under_ = bind_iaaf("iaaf.under");

    ire_.expand = make_conv(store_, "ire.expand", conv1x1(E, CC));
    ire_.depthwise = make_conv(store_, "ire.dw", conv3x3(E, E, /*groups=*/E, cfg_.ire_stride));
    ire_.se = make_se(store_, "ire.se");
    ire_.project = make_conv(store_, "ire.project", conv1x1(D, E));
    ire_.expansion_ratio = kIreExpansion;
    ire_.stride = cfg_.ire_stride;

    blocks_.clear();
    for (std::size_t i = 0; i < cfg_.num_blocks; ++i) {
        const std::string b = "block" + std::to_string(i);
        CAViTBlockParams blk;
        blk.dyt1 = make_dyt(store_, b + ".dyt1");
        blk.dyt2 = make_dyt(store_, b + ".dyt2");
        blk.attn.dim = D;
        blk.attn.heads = cfg_.heads;
        blk.attn.qkv = make_linear(store_, b + ".attn.qkv");
        blk.attn.out = make_linear(store_, b + ".attn.out");
        blk.lce.dw = make_conv(store_, b + ".lce.dw", conv3x3(D, D, /*groups=*/D));
        blk.lce.pw = make_conv(store_, b + ".lce.pw", conv1x1(D, D));
        blk.lce.channel_gate = make_se(store_, b + ".lce.se");
        blk.mlp.fc0 = make_linear(store_, b + ".mlp.fc0");
        blk.mlp.fc1 = make_linear(store_, b + ".mlp.fc1");
        blk.emsdc.branches[0] = make_conv(store_, b + ".emsdc.branch1", conv3x3(D, D, 4, 1, 1));
        blk.emsdc.branches[1] = make_conv(store_, b + ".emsdc.branch3", conv3x3(D, D, 4, 1, 3));
        blk.emsdc.branches[2] = make_conv(store_, b + ".emsdc.branch5", conv3x3(D, D, 4, 1, 5));
        blk.emsdc.merge = make_conv(store_, b + ".emsdc.merge", conv1x1(D, D));
        blk.emsdc.act = cfg_.emsdc_activation;
        blk.attach = cfg_.emsdc_attach;
        blocks_.push_back(std::move(blk));
    }

    recon0_ = make_conv(store_, "recon.conv0", conv3x3(C, D));
    recon1_ = make_conv(store_, "recon.conv1", conv3x3(3, C));
}

Tensor Model::forward(const ExposureStack& stack) const {
    validate_stack(stack);
    const std::size_t H = stack.normal.extent(2), W = stack.normal.extent(3);
    const std::size_t s = cfg_.ire_stride;
    const std::size_t pb = (s - H % s) % s, pr = (s - W % s) % s;

    const Tensor over = pad_reflect_bottom_right(stack.over, pb, pr);
    const Tensor normal = pad_reflect_bottom_right(stack.normal, pb, pr);
    const Tensor under = pad_reflect_bottom_right(stack.under, pb, pr);
    const std::size_t Hp = H + pb, Wp = W + pr;

    // F1/F2/F3 are the over/normal/under stem features.
    Tensor f1 = apply_conv(stem_over_, rgb_to_ycbcr(over, coeffs_));
    Tensor f2 = apply_conv(stem_normal_, rgb_to_ycbcr(normal, coeffs_));
    Tensor f3 = apply_conv(stem_under_, rgb_to_ycbcr(under, coeffs_));
    ensure_finite(f1, "stem.over");
    ensure_finite(f2, "stem.normal");
    ensure_finite(f3, "stem.under");

    Tensor fused1 = iaaf_fuse(f1, f2, iaaf_over_);
    Tensor fused3 = iaaf_fuse(f3, f2, iaaf_under_);
    ensure_finite(fused1, "iaaf.over");
    ensure_finite(fused3, "iaaf.under");

    Tensor cat = cfg_.variant == Variant::Main
                     ? concat_channels({fused1, f1, f2, f3, fused3})
                     : concat_channels({fused1, f2, fused3});

    Tensor embedded = ire_forward(cat, ire_);
    ensure_finite(embedded, "ire");
    const std::size_t gh = embedded.extent(2), gw = embedded.extent(3);

    Tensor tokens = grid_to_tokens(embedded);
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
        tokens = cavit_block_forward(tokens, gh, gw, blocks_[i]);
        ensure_finite(tokens, "block" + std::to_string(i));
    }

    Tensor up = resize_bilinear(tokens_to_grid(tokens, gh, gw), Hp, Wp);
    Tensor r = add(apply_conv(recon0_, up), f2);
    r = activation(r, Act::Gelu);
    Tensor out = activation(apply_conv(recon1_, r), Act::Sigmoid);
    ensure_finite(out, "recon");

    if (pb || pr) out = crop(out, 0, 0, H, W);
    return out;
}

Tensor Model::fuse_tiled(const ExposureStack& stack, std::size_t tile, std::size_t overlap) const {
    validate_stack(stack);
    const std::size_t H = stack.normal.extent(2), W = stack.normal.extent(3);
    if (tile < 2 * overlap + 1) throw ShapeError("tile must exceed twice the overlap");
    if (H <= tile && W <= tile) return forward(stack);

    auto starts = [&](std::size_t len) {
        std::vector<std::size_t> v;
        if (len <= tile) {
            v.push_back(0);
            return v;
        }
        const std::size_t step = tile - overlap;
        for (std::size_t p = 0;; p += step) {
            if (p + tile >= len) {
                v.push_back(len - tile);
                break;
            }
            v.push_back(p);
        }
        return v;
    };
    auto axis_weights = [&](std::size_t off, std::size_t len, std::size_t total) {
        std::vector<float> w(len, 1.0f);
        if (off > 0) {
            for (std::size_t i = 0; i < overlap && i < len; ++i)
                w[i] = static_cast<float>(i + 1) / static_cast<float>(overlap + 1);
        }
        if (off + len < total) {
            for (std::size_t i = 0; i < overlap && i < len; ++i)
                w[len - 1 - i] = std::min(w[len - 1 - i],
                                          static_cast<float>(i + 1) / static_cast<float>(overlap + 1));
        }
        return w;
    };

    Tensor canvas({1, 3, H, W});
    Tensor wsum({1, 1, H, W});
    for (std::size_t y0 : starts(H)) {
        const std::size_t th = std::min(tile, H);
        const std::vector<float> wy = axis_weights(y0, th, H);
        for (std::size_t x0 : starts(W)) {
            const std::size_t tw = std::min(tile, W);
            const std::vector<float> wx = axis_weights(x0, tw, W);
            ExposureStack sub;
            sub.under = crop(stack.under, y0, x0, th, tw);
            sub.normal = crop(stack.normal, y0, x0, th, tw);
            sub.over = crop(stack.over, y0, x0, th, tw);
            sub.ev = stack.ev;
            Tensor result = forward(sub);
            for (std::size_t y = 0; y < th; ++y)
                for (std::size_t x = 0; x < tw; ++x) {
                    const float w = wy[y] * wx[x];
                    for (std::size_t c = 0; c < 3; ++c)
                        canvas.at(0, c, y0 + y, x0 + x) += w * result.at(0, c, y, x);
                    wsum.at(0, 0, y0 + y, x0 + x) += w;
                }
        }
    }
    for (std::size_t y = 0; y < H; ++y)
        for (std::size_t x = 0; x < W; ++x) {
            const float w = wsum.at(0, 0, y, x);
            for (std::size_t c = 0; c < 3; ++c) canvas.at(0, c, y, x) /= w;
        }
    return canvas;
}

// ---------------------------------------------------------------------------
// Weight serialization
// ---------------------------------------------------------------------------

namespace {

constexpr char kMagic[6] = {'E', 'H', 'D', 'R', 'W', '\0'};
constexpr std::uint16_t kVersion = 1;

void put_u16(std::string& buf, std::uint16_t v) {
    buf.push_back(static_cast<char>(v & 0xFF));
    buf.push_back(static_cast<char>((v >> 8) & 0xFF));
}
void put_u32(std::string& buf, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

struct Cursor {
    const unsigned char* p;
    std::size_t remaining;
    void need(std::size_t n) const {
        if (n > remaining) throw FormatError("weight file truncated");
    }
    std::uint16_t u16() {
        need(2);
        std::uint16_t v = static_cast<std::uint16_t>(p[0] | (p[1] << 8));
        p += 2;
        remaining -= 2;
        return v;
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
        p += 4;
        remaining -= 4;
        return v;
    }
    std::uint8_t u8() {
        need(1);
        std::uint8_t v = *p;
        ++p;
        --remaining;
        return v;
    }
    void bytes(void* dst, std::size_t n) {
        need(n);
        std::memcpy(dst, p, n);
        p += n;
        remaining -= n;
    }
};

}  // namespace

void save_weights(const WeightStore& store, const std::string& path) {
    std::string buf;
    buf.append(kMagic, sizeof(kMagic));
    put_u16(buf, kVersion);
    put_u32(buf, static_cast<std::uint32_t>(store.count()));
    for (const auto& [name, t] : store.items()) {
        if (name.size() > 0xFFFF) throw FormatError("parameter name too long: " + name);
        put_u16(buf, static_cast<std::uint16_t>(name.size()));
        buf.append(name);
        if (t.rank() > 0xFF) throw FormatError("tensor rank too large");
        buf.push_back(static_cast<char>(t.rank()));
        for (std::size_t e : t.shape()) put_u32(buf, static_cast<std::uint32_t>(e));
        for (std::size_t i = 0; i < t.size(); ++i) {
            put_u32(buf, std::bit_cast<std::uint32_t>(t.data()[i]));
        }
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw FormatError("cannot open weight file for writing: " + path);
    f.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!f) throw FormatError("failed writing weight file: " + path);
}

WeightStore load_weights(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw FormatError("cannot open weight file: " + path);
    std::vector<unsigned char> raw((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    Cursor cur{raw.data(), raw.size()};

    char magic[6];
    cur.bytes(magic, 6);
    if (std::memcmp(magic, kMagic, 6) != 0) throw FormatError("bad weight file magic");
    const std::uint16_t version = cur.u16();
    if (version != kVersion) throw FormatError("unsupported weight file version " + std::to_string(version));
    const std::uint32_t count = cur.u32();

    WeightStore store;
    for (std::uint32_t i = 0; i < count; ++i) {
        const std::uint16_t name_len = cur.u16();
        if (name_len == 0) throw FormatError("empty parameter name");
        std::string name(name_len, '\0');
        cur.bytes(name.data(), name_len);
        const std::uint8_t rank = cur.u8();
        if (rank == 0) throw FormatError("parameter " + name + " has rank 0");
        std::vector<std::size_t> shape(rank);
        std::uint64_t elems = 1;
        for (std::uint8_t r = 0; r < rank; ++r) {
            const std::uint32_t dim = cur.u32();
            if (dim == 0) throw FormatError("parameter " + name + " has a zero extent");
            shape[r] = dim;
            elems *= dim;
        }
        cur.need(elems * 4);  // element count vs remaining bytes
        FloatBuffer values(elems);
        for (std::uint64_t j = 0; j < elems; ++j) {
            std::uint32_t bits = cur.u32();
            values[j] = std::bit_cast<float>(bits);
        }
        store.add(std::move(name), Tensor::from_buffer(std::move(shape), std::move(values)));
    }
    if (cur.remaining != 0) throw FormatError("trailing bytes after last tensor");
    return store;
}

}  // namespace ethdr
