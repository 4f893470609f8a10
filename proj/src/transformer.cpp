#include "riskpath/errors.hpp"
#include "riskpath/nnheur.hpp"

#include <algorithm>
#include <cmath>

namespace riskpath {

namespace {

// a (r x k) . b (k x c), with b given as row-major float storage.
Matrix matmul(const Matrix& a, const std::vector<float>& b, int b_cols) {
    Matrix out(a.rows, b_cols);
    for (int i = 0; i < a.rows; ++i) {
        double* row = &out.data[static_cast<std::size_t>(i) * b_cols];
        for (int k = 0; k < a.cols; ++k) {
            const double aik = a(i, k);
            const float* brow = &b[static_cast<std::size_t>(k) * b_cols];
            for (int j = 0; j < b_cols; ++j) row[j] += aik * brow[j];
        }
    }
    return out;
}

void add_bias(Matrix& x, const std::vector<float>& bias) {
    for (int i = 0; i < x.rows; ++i)
        for (int j = 0; j < x.cols; ++j) x(i, j) += bias[j];
}

// Row-wise normalisation; `hat` receives the pre-affine values.
Matrix layer_norm(const Matrix& x, const std::vector<float>& gain, const std::vector<float>& shift, Matrix* hat) {
    Matrix out(x.rows, x.cols);
    if (hat) *hat = Matrix(x.rows, x.cols);
    for (int i = 0; i < x.rows; ++i) {
        double mean = 0.0;
        for (int j = 0; j < x.cols; ++j) mean += x(i, j);
        mean /= x.cols;
        double var = 0.0;
        for (int j = 0; j < x.cols; ++j) var += (x(i, j) - mean) * (x(i, j) - mean);
        var /= x.cols;
        const double inv = 1.0 / std::sqrt(var + kLayerNormEps);
        for (int j = 0; j < x.cols; ++j) {
            const double n = (x(i, j) - mean) * inv;
            if (hat) (*hat)(i, j) = n;
            out(i, j) = n * gain[j] + shift[j];
        }
    }
    return out;
}

}  // namespace

TransformerModel::TransformerModel(ModelWeights weights) : weights_(std::move(weights)) {
    config_ = validate_weights(weights_);
    if (const Tensor* s = weights_.find("target_scale")) target_scale_ = s->data[0];
}

Matrix TransformerModel::embed_inputs(const RiskMap& map, const Case& c) const {
    if (map.cell_count() != config_.d_r) {
        throw UsageError("model expects " + std::to_string(config_.d_r) + " cells, map has " +
                         std::to_string(map.cell_count()));
    }
    const int dm = config_.d_model;
    const auto& w = weights_.at("risk_proj.w").data;
    const auto& b = weights_.at("risk_proj.b").data;
    const auto& start = weights_.at("start_embed").data;
    const auto& dest = weights_.at("dest_embed").data;
    const auto& pos = weights_.at("pos_embed").data;
    const std::size_t s_row = static_cast<std::size_t>(map.flatten(c.start)) * dm;
    const std::size_t d_row = static_cast<std::size_t>(map.flatten(c.dest)) * dm;

    Matrix x1(config_.d_r, dm);
    for (int i = 0; i < config_.d_r; ++i) {
        const double r = map.risk(i);
        for (int j = 0; j < dm; ++j) {
            x1(i, j) = (r * w[j] + b[j]) + start[s_row + j] + dest[d_row + j] +
                       pos[static_cast<std::size_t>(i) * dm + j];
        }
    }
    return x1;
}

Matrix TransformerModel::multi_head_attention(const Matrix& x1, ForwardTrace* trace) const {
    const int dr = config_.d_r, dk = config_.d_k;
    if (x1.rows != dr || x1.cols != config_.d_model) {
        throw UsageError("attention input must be d_r x d_model");
    }
    const double scale = 1.0 / std::sqrt(static_cast<double>(dk));
    Matrix concat(dr, config_.n_heads * dk);
    if (trace) trace->attention.clear();
    for (int h = 0; h < config_.n_heads; ++h) {
        const std::string p = "head" + std::to_string(h) + ".";
        const Matrix q = matmul(x1, weights_.at(p + "wq").data, dk);
        const Matrix k = matmul(x1, weights_.at(p + "wk").data, dk);
        const Matrix v = matmul(x1, weights_.at(p + "wv").data, dk);

        Matrix a(dr, dr);
        for (int i = 0; i < dr; ++i) {
            double row_max = -INFINITY;
            for (int j = 0; j < dr; ++j) {
                double dot = 0.0;
                for (int t = 0; t < dk; ++t) dot += q(i, t) * k(j, t);
                a(i, j) = dot * scale;
                row_max = std::max(row_max, a(i, j));
            }
            double sum = 0.0;
            for (int j = 0; j < dr; ++j) {
                a(i, j) = std::exp(a(i, j) - row_max);
                sum += a(i, j);
            }
            for (int j = 0; j < dr; ++j) a(i, j) /= sum;
        }
        for (int i = 0; i < dr; ++i)
            for (int j = 0; j < dr; ++j) {
                const double aij = a(i, j);
                for (int t = 0; t < dk; ++t) concat(i, h * dk + t) += aij * v(j, t);
            }
        if (trace) trace->attention.push_back(std::move(a));
    }
    Matrix x2 = matmul(concat, weights_.at("attn_out.w").data, config_.d_model);
    add_bias(x2, weights_.at("attn_out.b").data);
    for (std::size_t i = 0; i < x2.data.size(); ++i) x2.data[i] += x1.data[i];
    return x2;
}

std::vector<double> TransformerModel::output_head(const Matrix& x2, ForwardTrace* trace) const {
    const int dr = config_.d_r;
    if (x2.rows != dr || x2.cols != config_.d_model) {
        throw UsageError("output head input must be d_r x d_model");
    }
    Matrix y = layer_norm(x2, weights_.at("ln1.g").data, weights_.at("ln1.b").data, trace ? &trace->ln1_hat : nullptr);
    Matrix hidden = matmul(y, weights_.at("ffn.w1").data, config_.d_ff);
    add_bias(hidden, weights_.at("ffn.b1").data);
    for (double& v : hidden.data) v = std::max(0.0, v);
    Matrix ffn = matmul(hidden, weights_.at("ffn.w2").data, config_.d_model);
    add_bias(ffn, weights_.at("ffn.b2").data);
    for (std::size_t i = 0; i < y.data.size(); ++i) y.data[i] += ffn.data[i];
    y = layer_norm(y, weights_.at("ln2.g").data, weights_.at("ln2.b").data, trace ? &trace->ln2_hat : nullptr);

    Matrix z = matmul(y, weights_.at("head_out.w").data, dr);
    add_bias(z, weights_.at("head_out.b").data);
    std::vector<double> h(dr);
    for (int i = 0; i < dr; ++i) {
        double sum = 0.0;
        for (int j = 0; j < dr; ++j) sum += z(i, j);
        h[i] = std::max(0.0, sum / dr * target_scale_);
    }
    if (trace) trace->output = h;
    return h;
}

std::vector<double> TransformerModel::forward(const RiskMap& map, const Case& c, ForwardTrace* trace) const {
    Matrix x1 = embed_inputs(map, c);
    Matrix x2 = multi_head_attention(x1, trace);
    if (trace) {
        trace->x1 = x1;
        trace->x2 = x2;
    }
    return output_head(x2, trace);
}

HeuristicTable nn_heuristic(const RiskMap& map, const Case& c, const TransformerModel& model) {
    if (map.cell_count() != model.config().d_r) {
        throw UsageError("weights were trained for " + std::to_string(model.config().d_r) + " cells, map has " +
                         std::to_string(map.cell_count()));
    }
    HeuristicTable table;
    table.m = map.size();
    table.h = model.forward(map, c);
    table.infeasible.resize(table.h.size());
    const double cut = 0.5 * h_inf(map.size());
    for (std::size_t i = 0; i < table.h.size(); ++i) table.infeasible[i] = table.h[i] >= cut;
    return table;
}

}  // namespace riskpath
