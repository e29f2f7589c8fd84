#include "fedsched/model.hpp"

#include <cmath>
#include <stdexcept>

namespace fedsched {

namespace {

void check_dims(const ParamVector& params, const ClientDataset& data) {
    if (data.rows < 1) throw std::invalid_argument("loss: empty dataset");
    if (params.size() != data.cols)
        throw std::invalid_argument("loss: parameter/feature dimension mismatch");
}

inline double sign_label(double y) { return y > 0.0 ? 1.0 : -1.0; }

// log(1 + exp(m)) without overflow.
inline double log1pexp(double m) {
    if (m > 35.0) return m;
    if (m < -35.0) return std::exp(m);
    return std::log1p(std::exp(m));
}

// 1 / (1 + exp(m))
inline double inv1pexp(double m) {
    if (m > 35.0) return std::exp(-m);
    return 1.0 / (1.0 + std::exp(m));
}

}  // namespace

double loss(const LossModel& model, const ParamVector& params, const ClientDataset& data) {
    check_dims(params, data);
    double total = 0.0;
    for (std::size_t i = 0; i < data.rows; ++i) {
        const double z = dot(params, data.row(i));
        switch (model.kind) {
            case LossKind::SquaredError: {
                const double d = data.labels[i] - z;
                total += d * d;
                break;
            }
            case LossKind::LogLoss:
                total += log1pexp(-sign_label(data.labels[i]) * z);
                break;
            case LossKind::Hinge: {
                const double margin = 1.0 - sign_label(data.labels[i]) * z;
                if (margin > 0.0) total += margin;
                break;
            }
        }
    }
    double value = total / static_cast<double>(data.rows);
    if (model.l2 > 0.0) value += 0.5 * model.l2 * squared_norm(params);
    if (!std::isfinite(value)) throw std::runtime_error("loss: non-finite value");
    return value;
}

ParamVector gradient(const LossModel& model, const ParamVector& params,
                     const ClientDataset& data) {
    check_dims(params, data);
    ParamVector g(params.size(), 0.0);
    for (std::size_t i = 0; i < data.rows; ++i) {
        const auto x = data.row(i);
        const double z = dot(params, x);
        double coef = 0.0;
        switch (model.kind) {
            case LossKind::SquaredError:
                coef = 2.0 * (z - data.labels[i]);
                break;
            case LossKind::LogLoss: {
                const double y = sign_label(data.labels[i]);
                coef = -y * inv1pexp(y * z);
                break;
            }
            case LossKind::Hinge: {
                const double y = sign_label(data.labels[i]);
                // Strict inequality: margin exactly at the kink contributes 0.
                coef = (y * z < 1.0) ? -y : 0.0;
                break;
            }
        }
        if (coef != 0.0) add_scaled(g, coef, x);
    }
    const double inv_n = 1.0 / static_cast<double>(data.rows);
    for (double& v : g) v *= inv_n;
    if (model.l2 > 0.0) add_scaled(g, model.l2, params);
    if (!all_finite(g)) throw std::runtime_error("gradient: non-finite value");
    return g;
}

double accuracy(const ParamVector& params, const ClientDataset& data) {
    check_dims(params, data);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < data.rows; ++i) {
        const double z = dot(params, data.row(i));
        const double pred = z >= 0.0 ? 1.0 : -1.0;
        if (pred == sign_label(data.labels[i])) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(data.rows);
}

const char* loss_kind_name(LossKind kind) {
    switch (kind) {
        case LossKind::SquaredError: return "mse";
        case LossKind::LogLoss: return "logloss";
        case LossKind::Hinge: return "svm";
    }
    return "?";
}

}  // namespace fedsched
