#include "simenh/nn/losses.hpp"

#include <algorithm>
#include <cmath>

#include "simenh/common/error.hpp"

namespace simenh::nn {

namespace {

void check_shapes(const Matrix& a, const Matrix& b, const char* what) {
    if (a.rows != b.rows || a.cols != b.cols)
        throw ValidationError(std::string(what) + ": prediction and target shapes differ");
    if (a.data.empty()) throw ValidationError(std::string(what) + ": empty inputs");
}

}  // namespace

LossResult mse_loss(const Matrix& prediction, const Matrix& target) {
    check_shapes(prediction, target, "mse_loss");
    const double n = static_cast<double>(prediction.data.size());
    LossResult result;
    result.grad = Matrix(prediction.rows, prediction.cols);
    double sum = 0.0;
    for (std::size_t i = 0; i < prediction.data.size(); ++i) {
        const double d = prediction.data[i] - target.data[i];
        sum += d * d;
        result.grad.data[i] = 2.0 * d / n;
    }
    result.value = sum / n;
    return result;
}

LossResult bce_loss(const Matrix& prediction, const Matrix& labels) {
    check_shapes(prediction, labels, "bce_loss");
    constexpr double kEps = 1e-7;
    const double n = static_cast<double>(prediction.data.size());
    LossResult result;
    result.grad = Matrix(prediction.rows, prediction.cols);
    double sum = 0.0;
    for (std::size_t i = 0; i < prediction.data.size(); ++i) {
        const double y = labels.data[i];
        const double p = std::clamp(prediction.data[i], kEps, 1.0 - kEps);
        sum -= y * std::log(p) + (1.0 - y) * std::log(1.0 - p);
        result.grad.data[i] = (p - y) / (p * (1.0 - p)) / n;
    }
    result.value = sum / n;
    return result;
}

}  // namespace simenh::nn
