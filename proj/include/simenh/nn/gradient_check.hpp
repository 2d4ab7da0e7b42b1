#pragma once

#include <cstddef>

#include "simenh/nn/matrix.hpp"
#include "simenh/nn/model.hpp"

namespace simenh::nn {

enum class LossKind { mse, bce };

struct GradCheckEntry {
    int layer = -1;
    int param = -1;
    std::size_t element = 0;
    double analytic = 0.0;
    double numeric = 0.0;
    double rel_error = 0.0;
};

struct GradCheckReport {
    double max_rel_error = 0.0;
    GradCheckEntry worst;
    std::size_t checked = 0;  // number of parameter elements compared
};

// Compares analytic parameter gradients against central finite differences
// (loss evaluated at p +/- step). Relative error per element is
// |analytic - numeric| / max(1, |analytic|, |numeric|). Frozen layers are
// skipped; a model with no trainable parameters yields checked == 0.
// The model is restored bit-exactly before returning.
GradCheckReport gradient_check(NetworkModel& model, const Matrix& batch, const Matrix& target,
                               LossKind loss, double step = 1e-6);

}  // namespace simenh::nn
