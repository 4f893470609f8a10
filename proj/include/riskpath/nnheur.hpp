// Transformer-encoder heuristic: ASDW weight files and a dependency-free
// forward pass producing one h-value per grid cell.
//
// ASDW layout (little-endian): "ASDW", u32 version (1), u32 tensor count, then
// per tensor: u32 name length, name bytes, u32 rank, u32 dims[rank], float32
// values row-major. Matrices are stored [in, out] so a layer computes x.W + b.
#pragma once

#include "riskpath/expert.hpp"
#include "riskpath/riskmap.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace riskpath {

struct ModelConfig {
    int d_r = 0;  // tokens, one per grid cell
    int d_model = 0;
    int n_heads = 0;
    int d_k = 0;
    int d_ff = 0;
    int n_blocks = 1;  // only single-block files are defined by the tensor naming

    friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

class WeightsError : public std::runtime_error {
public:
    enum class Kind { Io, BadMagic, UnsupportedVersion, Truncated, TrailingData, ShapeMismatch,
                      NonFinite, MissingTensor, UnknownTensor, DuplicateTensor };

    WeightsError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

struct Tensor {
    std::string name;
    std::vector<std::uint32_t> dims;
    std::vector<float> data;

    std::size_t numel() const noexcept;
    friend bool operator==(const Tensor&, const Tensor&) = default;
};

// Named tensors in file order.
class ModelWeights {
public:
    void add(Tensor t);  // throws WeightsError(DuplicateTensor)
    const Tensor* find(std::string_view name) const noexcept;
    const Tensor& at(std::string_view name) const;  // throws WeightsError(MissingTensor)
    const std::vector<Tensor>& tensors() const noexcept { return tensors_; }

    friend bool operator==(const ModelWeights&, const ModelWeights&) = default;

private:
    std::vector<Tensor> tensors_;
};

std::vector<std::uint8_t> serialize_weights(const ModelWeights& weights);
// Container-level decode: magic, version, truncation, finiteness.
ModelWeights parse_weights(std::span<const std::uint8_t> bytes);
// Completeness and shape consistency; returns the inferred config.
ModelConfig validate_weights(const ModelWeights& weights);

std::pair<ModelConfig, ModelWeights> load_weights(const std::filesystem::path& path);
void save_weights(const ModelWeights& weights, const std::filesystem::path& path);

// Gaussian-initialised weights with standard deviation `scale`; LayerNorm gains start at 1.
ModelWeights random_weights(const ModelConfig& config, std::uint64_t seed, double scale = 0.1);

struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}
    double& operator()(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
    double operator()(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
};

struct ForwardTrace {
    Matrix x1;
    std::vector<Matrix> attention;  // one d_r x d_r matrix per head
    Matrix x2;
    Matrix ln1_hat;  // LayerNorm outputs before gain/shift
    Matrix ln2_hat;
    std::vector<double> output;
};

class TransformerModel {
public:
    explicit TransformerModel(ModelWeights weights);  // validates

    const ModelConfig& config() const noexcept { return config_; }
    const ModelWeights& weights() const noexcept { return weights_; }
    // Multiplier applied to the mean output (tensor "target_scale", default 1).
    double target_scale() const noexcept { return target_scale_; }

    // Token i = risk_proj(R_i) + start_embed[start] + dest_embed[dest] + pos_embed[i].
    Matrix embed_inputs(const RiskMap& map, const Case& c) const;
    // Multi-head self-attention with output projection and residual.
    Matrix multi_head_attention(const Matrix& x1, ForwardTrace* trace = nullptr) const;
    // LayerNorm, FFN + residual, LayerNorm, projection to d_r, mean over the last axis,
    // scaled by target_scale and clamped at 0.
    std::vector<double> output_head(const Matrix& x2, ForwardTrace* trace = nullptr) const;

    std::vector<double> forward(const RiskMap& map, const Case& c, ForwardTrace* trace = nullptr) const;

private:
    ModelWeights weights_;
    ModelConfig config_;
    double target_scale_ = 1.0;
};

inline constexpr double kLayerNormEps = 1e-5;

// One forward pass; cells with h >= h_inf(m) / 2 are flagged infeasible.
HeuristicTable nn_heuristic(const RiskMap& map, const Case& c, const TransformerModel& model);

}  // namespace riskpath
