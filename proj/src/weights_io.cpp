#include "riskpath/nnheur.hpp"

#include "riskpath/errors.hpp"
#include "rng.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

namespace riskpath {

namespace {

using Kind = WeightsError::Kind;

constexpr std::uint8_t kMagic[4] = {0x41, 0x53, 0x44, 0x57};  // "ASDW"
constexpr std::uint32_t kVersion = 1;
constexpr std::uint32_t kMaxRank = 8;
constexpr std::uint32_t kMaxNameLength = 4096;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    std::uint32_t u32(const char* what) {
        need(4, what);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
        pos_ += 4;
        return v;
    }

    std::span<const std::uint8_t> take(std::size_t n, const char* what) {
        need(n, what);
        auto s = bytes_.subspan(pos_, n);
        pos_ += n;
        return s;
    }

    std::size_t remaining() const noexcept { return bytes_.size() - pos_; }

private:
    void need(std::size_t n, const char* what) const {
        if (remaining() < n) {
            throw WeightsError(Kind::Truncated, std::string("truncated ASDW file while reading ") + what);
        }
    }

    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

}  // namespace

std::size_t Tensor::numel() const noexcept {
    std::size_t n = 1;
    for (auto d : dims) n *= d;
    return n;
}

void ModelWeights::add(Tensor t) {
    if (find(t.name)) {
        throw WeightsError(Kind::DuplicateTensor, "duplicate tensor '" + t.name + "'");
    }
    tensors_.push_back(std::move(t));
}

const Tensor* ModelWeights::find(std::string_view name) const noexcept {
    for (const Tensor& t : tensors_) {
        if (t.name == name) return &t;
    }
    return nullptr;
}

const Tensor& ModelWeights::at(std::string_view name) const {
    if (const Tensor* t = find(name)) return *t;
    throw WeightsError(Kind::MissingTensor, "missing tensor '" + std::string(name) + "'");
}

std::vector<std::uint8_t> serialize_weights(const ModelWeights& weights) {
    std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
    put_u32(out, kVersion);
    put_u32(out, static_cast<std::uint32_t>(weights.tensors().size()));
    for (const Tensor& t : weights.tensors()) {
        if (t.data.size() != t.numel()) {
            throw WeightsError(Kind::ShapeMismatch, "tensor '" + t.name + "' data does not match its dims");
        }
        put_u32(out, static_cast<std::uint32_t>(t.name.size()));
        out.insert(out.end(), t.name.begin(), t.name.end());
        put_u32(out, static_cast<std::uint32_t>(t.dims.size()));
        for (auto d : t.dims) put_u32(out, d);
        for (float v : t.data) put_u32(out, std::bit_cast<std::uint32_t>(v));
    }
    return out;
}

ModelWeights parse_weights(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
        throw WeightsError(Kind::BadMagic, "not an ASDW file (bad magic)");
    }
    Reader in(bytes.subspan(4));
    const std::uint32_t version = in.u32("version");
    if (version != kVersion) {
        throw WeightsError(Kind::UnsupportedVersion, "unsupported ASDW version " + std::to_string(version));
    }
    const std::uint32_t count = in.u32("tensor count");
    ModelWeights weights;
    for (std::uint32_t k = 0; k < count; ++k) {
        Tensor t;
        const std::uint32_t name_len = in.u32("name length");
        if (name_len > kMaxNameLength) {
            throw WeightsError(Kind::Truncated, "implausible tensor name length");
        }
        const auto name = in.take(name_len, "tensor name");
        t.name.assign(name.begin(), name.end());
        const std::uint32_t rank = in.u32("rank");
        if (rank > kMaxRank) {
            throw WeightsError(Kind::ShapeMismatch, "tensor '" + t.name + "' has rank " + std::to_string(rank));
        }
        std::uint64_t numel = 1;
        for (std::uint32_t r = 0; r < rank; ++r) {
            t.dims.push_back(in.u32("dims"));
            numel *= t.dims.back();
            if (numel > in.remaining() / 4) {
                throw WeightsError(Kind::Truncated, "tensor '" + t.name + "' extends past end of file");
            }
        }
        const auto raw = in.take(static_cast<std::size_t>(numel) * 4, "tensor data");
        t.data.resize(static_cast<std::size_t>(numel));
        for (std::size_t i = 0; i < t.data.size(); ++i) {
            std::uint32_t bits = 0;
            for (int b = 0; b < 4; ++b) bits |= static_cast<std::uint32_t>(raw[4 * i + b]) << (8 * b);
            t.data[i] = std::bit_cast<float>(bits);
            if (!std::isfinite(t.data[i])) {
                throw WeightsError(Kind::NonFinite, "tensor '" + t.name + "' holds a non-finite value");
            }
        }
        weights.add(std::move(t));
    }
    if (in.remaining() != 0) {
        throw WeightsError(Kind::TrailingData, "unexpected bytes after the last tensor");
    }
    return weights;
}

namespace {

void expect_shape(const ModelWeights& w, const std::string& name, std::vector<std::uint32_t> dims) {
    const Tensor& t = w.at(name);
    if (t.dims != dims) {
        std::string want, got;
        for (auto d : dims) want += (want.empty() ? "" : "x") + std::to_string(d);
        for (auto d : t.dims) got += (got.empty() ? "" : "x") + std::to_string(d);
        throw WeightsError(Kind::ShapeMismatch, "tensor '" + name + "' is [" + got + "], expected [" + want + "]");
    }
}

std::uint32_t dim_of(const ModelWeights& w, const std::string& name, std::size_t rank, std::size_t axis) {
    const Tensor& t = w.at(name);
    if (t.dims.size() != rank) {
        throw WeightsError(Kind::ShapeMismatch, "tensor '" + name + "' must have rank " + std::to_string(rank));
    }
    if (t.dims[axis] == 0) {
        throw WeightsError(Kind::ShapeMismatch, "tensor '" + name + "' has a zero dimension");
    }
    return t.dims[axis];
}

bool is_known_name(const std::string& name, int n_heads) {
    static const char* const fixed[] = {"risk_proj.w", "risk_proj.b", "start_embed", "dest_embed", "pos_embed",
                                        "attn_out.w",  "attn_out.b",  "ln1.g",       "ln1.b",      "ln2.g",
                                        "ln2.b",       "ffn.w1",      "ffn.b1",      "ffn.w2",     "ffn.b2",
                                        "head_out.w",  "head_out.b",  "target_scale"};
    for (const char* f : fixed) {
        if (name == f) return true;
    }
    for (int i = 0; i < n_heads; ++i) {
        const std::string p = "head" + std::to_string(i) + ".";
        if (name == p + "wq" || name == p + "wk" || name == p + "wv") return true;
    }
    return false;
}

}  // namespace

ModelConfig validate_weights(const ModelWeights& w) {
    ModelConfig cfg;
    cfg.d_r = static_cast<int>(dim_of(w, "pos_embed", 2, 0));
    cfg.d_model = static_cast<int>(dim_of(w, "pos_embed", 2, 1));
    while (w.find("head" + std::to_string(cfg.n_heads) + ".wq")) ++cfg.n_heads;
    if (cfg.n_heads == 0) {
        throw WeightsError(Kind::MissingTensor, "missing tensor 'head0.wq'");
    }
    cfg.d_k = static_cast<int>(dim_of(w, "head0.wq", 2, 1));
    cfg.d_ff = static_cast<int>(dim_of(w, "ffn.w1", 2, 1));
    if (cfg.d_model % cfg.n_heads != 0 || cfg.d_k != cfg.d_model / cfg.n_heads) {
        throw WeightsError(Kind::ShapeMismatch, "head width must equal d_model / n_heads");
    }

    const auto dr = static_cast<std::uint32_t>(cfg.d_r);
    const auto dm = static_cast<std::uint32_t>(cfg.d_model);
    const auto dk = static_cast<std::uint32_t>(cfg.d_k);
    const auto dff = static_cast<std::uint32_t>(cfg.d_ff);
    const auto nh = static_cast<std::uint32_t>(cfg.n_heads);
    expect_shape(w, "risk_proj.w", {1, dm});
    expect_shape(w, "risk_proj.b", {dm});
    expect_shape(w, "start_embed", {dr, dm});
    expect_shape(w, "dest_embed", {dr, dm});
    for (int i = 0; i < cfg.n_heads; ++i) {
        const std::string p = "head" + std::to_string(i) + ".";
        expect_shape(w, p + "wq", {dm, dk});
        expect_shape(w, p + "wk", {dm, dk});
        expect_shape(w, p + "wv", {dm, dk});
    }
    expect_shape(w, "attn_out.w", {nh * dk, dm});
    expect_shape(w, "attn_out.b", {dm});
    for (const char* ln : {"ln1.g", "ln1.b", "ln2.g", "ln2.b"}) expect_shape(w, ln, {dm});
    expect_shape(w, "ffn.w1", {dm, dff});
    expect_shape(w, "ffn.b1", {dff});
    expect_shape(w, "ffn.w2", {dff, dm});
    expect_shape(w, "ffn.b2", {dm});
    expect_shape(w, "head_out.w", {dm, dr});
    expect_shape(w, "head_out.b", {dr});
    if (w.find("target_scale")) expect_shape(w, "target_scale", {1});

    for (const Tensor& t : w.tensors()) {
        if (!is_known_name(t.name, cfg.n_heads)) {
            throw WeightsError(Kind::UnknownTensor, "unknown tensor '" + t.name + "'");
        }
        for (float v : t.data) {
            if (!std::isfinite(v)) {
                throw WeightsError(Kind::NonFinite, "tensor '" + t.name + "' holds a non-finite value");
            }
        }
    }
    return cfg;
}

std::pair<ModelConfig, ModelWeights> load_weights(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw WeightsError(Kind::Io, "cannot open " + path.string());
    }
    const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    ModelWeights weights = parse_weights(bytes);
    const ModelConfig cfg = validate_weights(weights);
    return {cfg, std::move(weights)};
}

void save_weights(const ModelWeights& weights, const std::filesystem::path& path) {
    const auto bytes = serialize_weights(weights);
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw WeightsError(Kind::Io, "cannot write " + path.string());
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw WeightsError(Kind::Io, "write failed: " + path.string());
    }
}

ModelWeights random_weights(const ModelConfig& cfg, std::uint64_t seed, double scale) {
    if (cfg.d_r < 1 || cfg.d_model < 1 || cfg.n_heads < 1 || cfg.d_ff < 1 || cfg.d_model % cfg.n_heads != 0 ||
        cfg.d_k != cfg.d_model / cfg.n_heads) {
        throw UsageError("random_weights: inconsistent model config");
    }
    detail::Rng rng(seed);
    ModelWeights w;
    auto gaussian = [&](std::string name, std::vector<std::uint32_t> dims) {
        Tensor t{std::move(name), std::move(dims), {}};
        t.data.resize(t.numel());
        for (float& v : t.data) v = static_cast<float>(scale * rng.normal());
        w.add(std::move(t));
    };
    auto constant = [&](std::string name, std::uint32_t n, float value) {
        w.add(Tensor{std::move(name), {n}, std::vector<float>(n, value)});
    };
    const auto dr = static_cast<std::uint32_t>(cfg.d_r);
    const auto dm = static_cast<std::uint32_t>(cfg.d_model);
    const auto dk = static_cast<std::uint32_t>(cfg.d_k);
    const auto dff = static_cast<std::uint32_t>(cfg.d_ff);
    gaussian("risk_proj.w", {1, dm});
    gaussian("risk_proj.b", {dm});
    gaussian("start_embed", {dr, dm});
    gaussian("dest_embed", {dr, dm});
    gaussian("pos_embed", {dr, dm});
    for (int i = 0; i < cfg.n_heads; ++i) {
        const std::string p = "head" + std::to_string(i) + ".";
        gaussian(p + "wq", {dm, dk});
        gaussian(p + "wk", {dm, dk});
        gaussian(p + "wv", {dm, dk});
    }
    gaussian("attn_out.w", {static_cast<std::uint32_t>(cfg.n_heads) * dk, dm});
    gaussian("attn_out.b", {dm});
    constant("ln1.g", dm, 1.0f);
    constant("ln1.b", dm, 0.0f);
    constant("ln2.g", dm, 1.0f);
    constant("ln2.b", dm, 0.0f);
    gaussian("ffn.w1", {dm, dff});
    gaussian("ffn.b1", {dff});
    gaussian("ffn.w2", {dff, dm});
    gaussian("ffn.b2", {dm});
    gaussian("head_out.w", {dm, dr});
    gaussian("head_out.b", {dr});
    return w;
}

}  // namespace riskpath
