#include "simenh/nn/gradient_check.hpp"

#include <algorithm>
#include <cmath>

#include "simenh/common/error.hpp"
#include "simenh/nn/losses.hpp"

namespace simenh::nn {

namespace {

double eval_loss(const NetworkModel& model, const Matrix& batch, const Matrix& target,
                 LossKind loss) {
    const Matrix out = forward(model, batch, ForwardMode::train);
    return loss == LossKind::mse ? mse_loss(out, target).value : bce_loss(out, target).value;
}

}  // namespace

GradCheckReport gradient_check(NetworkModel& model, const Matrix& batch, const Matrix& target,
                               LossKind loss, double step) {
    if (!(step > 0.0)) throw ValidationError("gradient_check: step must be positive");

    ForwardCache cache;
    const Matrix out = forward(model, batch, ForwardMode::train, &cache);
    const LossResult lr = loss == LossKind::mse ? mse_loss(out, target) : bce_loss(out, target);
    const Gradients grads = backward(model, cache, lr.grad);

    GradCheckReport report;
    for (std::size_t i = 0; i < model.layers.size(); ++i) {
        LayerState& layer = model.layers[i];
        if (!layer.trainable || layer.params.empty()) continue;
        const std::vector<Matrix>& layer_grads = grads.per_layer[i];
        for (std::size_t p = 0; p < layer.params.size(); ++p) {
            Matrix& param = layer.params[p];
            for (std::size_t e = 0; e < param.data.size(); ++e) {
                const double saved = param.data[e];
                param.data[e] = saved + step;
                const double plus = eval_loss(model, batch, target, loss);
                param.data[e] = saved - step;
                const double minus = eval_loss(model, batch, target, loss);
                param.data[e] = saved;

                const double numeric = (plus - minus) / (2.0 * step);
                const double analytic = layer_grads[p].data[e];
                const double rel = std::abs(analytic - numeric) /
                                   std::max({1.0, std::abs(analytic), std::abs(numeric)});
                ++report.checked;
                if (rel > report.max_rel_error) {
                    report.max_rel_error = rel;
                    report.worst = {static_cast<int>(i), static_cast<int>(p), e,
                                    analytic,           numeric,             rel};
                }
            }
        }
    }
    return report;
}

}  // namespace simenh::nn
