#pragma once

#include <functional>
#include <string>

#include "canamrf/autodiff.hpp"

namespace canamrf {

/// Builds a scalar (1x1) loss on the given tape, reading parameters through
/// tape.param(store, path).
using ScalarFunction = std::function<Var(Tape&, ParamStore&)>;

struct GradCheckReport {
    double max_rel_error = 0.0;
    std::string worst_path;
    std::size_t worst_index = 0;
    std::size_t entries_checked = 0;
};

/// Compares reverse-mode gradients with central differences, perturbing every
/// parameter entry independently by +/- eps. The relative error of an entry is
/// |analytic - numeric| / max(1, |analytic|, |numeric|).
///
/// Throws ContractError for eps <= 0 and NumericalError (naming the parameter
/// path) when a loss or gradient is not finite. Parameter values are restored
/// on return; gradient slots hold the analytic gradient.
GradCheckReport grad_check(const ScalarFunction& f, ParamStore& params, double eps = 1e-4);

}  // namespace canamrf
