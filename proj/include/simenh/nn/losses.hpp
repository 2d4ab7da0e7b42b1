#pragma once

#include "simenh/nn/matrix.hpp"

namespace simenh::nn {

struct LossResult {
    double value = 0.0;
    Matrix grad;  // dL/d(prediction), same shape as the prediction
};

// Mean squared error over all elements.
LossResult mse_loss(const Matrix& prediction, const Matrix& target);

// Binary cross-entropy. Predictions are clamped to [1e-7, 1 - 1e-7] before the
// logs; the gradient is taken with respect to the clamped value, so saturated
// predictions still produce finite gradients.
LossResult bce_loss(const Matrix& prediction, const Matrix& labels);

}  // namespace simenh::nn
