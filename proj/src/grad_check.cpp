#include "canamrf/grad_check.hpp"

#include <algorithm>
#include <cmath>

#include "canamrf/errors.hpp"

namespace canamrf {

namespace {

double evaluate(const ScalarFunction& f, ParamStore& params, const std::string& path) {
    Tape tape;
    const double v = f(tape, params).value().item();
    if (!std::isfinite(v)) throw NumericalError("grad_check: non-finite loss while perturbing '" + path + "'");
    return v;
}

}  // namespace

GradCheckReport grad_check(const ScalarFunction& f, ParamStore& params, double eps) {
    if (!(eps > 0.0)) throw ContractError("grad_check: eps must be positive");

    params.zero_grads();
    {
        Tape tape;
        Var loss = f(tape, params);
        if (!std::isfinite(loss.value().item())) throw NumericalError("grad_check: non-finite loss at base point");
        tape.backward(loss);
    }

    GradCheckReport report;
    for (auto& [path, entry] : params) {
        if (!entry.grad.all_finite()) throw NumericalError("grad_check: non-finite gradient for '" + path + "'");
        for (std::size_t i = 0; i < entry.value.size(); ++i) {
            const double original = entry.value[i];
            entry.value[i] = original + eps;
            const double up = evaluate(f, params, path);
            entry.value[i] = original - eps;
            const double down = evaluate(f, params, path);
            entry.value[i] = original;

            const double numeric = (up - down) / (2.0 * eps);
            const double analytic = entry.grad[i];
            const double denom = std::max({1.0, std::abs(analytic), std::abs(numeric)});
            const double rel = std::abs(analytic - numeric) / denom;
            ++report.entries_checked;
            if (report.entries_checked == 1 || rel > report.max_rel_error) {
                report.max_rel_error = rel;
                report.worst_path = path;
                report.worst_index = i;
            }
        }
    }
    return report;
}

}  // namespace canamrf
