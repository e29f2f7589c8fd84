#pragma once

#include "fedsched/dataset.hpp"
#include "fedsched/linalg.hpp"

namespace fedsched {

// Convex loss families for linear predictors z = w.x. Classification losses
// read labels by sign (y > 0 is the positive class); squared error uses the
// raw label value.
enum class LossKind { SquaredError, LogLoss, Hinge };

struct LossModel {
    LossKind kind = LossKind::SquaredError;
    double l2 = 0.0;  // optional ridge term 0.5 * l2 * ||w||^2
};

// Mean per-sample loss over `data`, plus the ridge term if configured.
double loss(const LossModel& model, const ParamVector& params, const ClientDataset& data);

// Exact full-batch gradient of loss(). The hinge uses subgradient 0 at the kink.
ParamVector gradient(const LossModel& model, const ParamVector& params,
                     const ClientDataset& data);

// Fraction of samples where sign(w.x) matches sign(y); w.x = 0 counts as +1.
double accuracy(const ParamVector& params, const ClientDataset& data);

const char* loss_kind_name(LossKind kind);

}  // namespace fedsched
