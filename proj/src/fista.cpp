#include "wgeit/fista.hpp"

#include <cmath>
#include <sstream>

#include "wgeit/error.hpp"

namespace wgeit {

double quadratic_model(const CellGrid& x, const CellGrid& y, double L_step, double f_y, const CellGrid& grad_y,
                       double g_x)
{
    if (!(L_step > 0.0))
        throw InvalidArgument("quadratic_model: L must be positive");
    const CellGrid d = x - y;
    return f_y + (d.array() * grad_y.array()).sum() + 0.5 * L_step * d.squaredNorm() + g_x;
}

CellGrid prox_step(const CellGrid& y, double L_step, const CellGrid& grad_y, const TvPenalty& penalty,
                   const FgpOptions& inner)
{
    if (!(L_step > 0.0))
        throw InvalidArgument("prox_step: L must be positive");
    const CellGrid d = y - grad_y / L_step;
    return fgp_denoise(d, penalty.alpha * penalty.scale / L_step, penalty.lambda, inner).x;
}

FistaResult fista_minimize(const SmoothObjective& f, const TvPenalty& penalty, const CellGrid& x0,
                           const FistaOptions& options, const FistaCallback& on_iteration)
{
    if (!(options.L0 > 0.0))
        throw InvalidArgument("fista_minimize: L0 must be positive");
    if (!(options.eta > 0.0 && options.eta < 1.0))
        throw InvalidArgument("fista_minimize: eta must lie in (0, 1)");
    if ((project_C(x0, penalty.lambda) - x0).cwiseAbs().maxCoeff() > 0.0)
        throw InvalidArgument("fista_minimize: initial guess is outside [lambda, 1/lambda]");

    FistaResult result;
    result.x = x0;
    result.x_last = x0;
    result.F = f.value(x0) + penalty(x0);

    CellGrid x_prev = x0;
    CellGrid y = x0;
    double t = 1.0;
    double L = options.L0;
    for (int k = 1; k <= options.max_iter; ++k) {
        const auto [f_y, grad_y] = f.value_and_gradient(y);

        FistaIteration it;
        it.k = k;
        CellGrid x;
        for (;;) {
            x = prox_step(y, L, grad_y, penalty, options.inner);
            it.f = f.value(x);
            it.g = penalty(x);
            it.model = quadratic_model(x, y, L, f_y, grad_y, it.g);
            if (it.f + it.g <= it.model)
                break;
            if (++it.backtracks > options.max_backtracks) {
                std::ostringstream msg;
                msg << "fista_minimize: backtracking exceeded " << options.max_backtracks
                    << " growth steps at iteration " << k << " (L = " << L << ", F = " << it.f + it.g
                    << ", model = " << it.model << ")";
                throw NumericalError(msg.str());
            }
            L /= options.eta;
        }
        it.F = it.f + it.g;
        it.L = L;
        result.history.push_back(it);
        if (it.F <= result.F) {
            result.F = it.F;
            result.x = x;
        }
        result.x_last = x;
        if (on_iteration)
            on_iteration(it, x);

        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        CellGrid y_next = x + ((t - 1.0) / t_next) * (x - x_prev);
        const double move = (y_next - y).norm();
        x_prev = std::move(x);
        y = std::move(y_next);
        t = t_next;
        if (move < options.delta)
            break;
    }
    return result;
}

} // namespace wgeit
