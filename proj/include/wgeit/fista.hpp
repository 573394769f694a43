#pragma once

#include <functional>
#include <vector>

#include "wgeit/tv_prox.hpp"

namespace wgeit {

/// Smooth part f of F = f + g, evaluated on grid coordinates.
struct SmoothObjective {
    std::function<double(const CellGrid&)> value;
    /// Returns f(y) and grad f(y).
    std::function<std::pair<double, CellGrid>(const CellGrid&)> value_and_gradient;
};

/// g(x) = alpha * scale * TV(x) restricted to the box [lambda, 1/lambda].
/// `scale` is the mesh size h so that g = alpha N_h.
struct TvPenalty {
    double alpha = 0.0;
    double scale = 1.0;
    double lambda = 0.25;

    double operator()(const CellGrid& x) const { return alpha * scale * tv_grid(x); }
};

/// Q_L(x, y) = f(y) + <x - y, grad f(y)> + L/2 |x - y|^2 + g(x)
double quadratic_model(const CellGrid& x, const CellGrid& y, double L_step, double f_y, const CellGrid& grad_y,
                       double g_x);

/// argmin_{x in C} Q_L(x, y): TV denoising of d = y - grad/L with
/// beta = alpha * scale / L.
CellGrid prox_step(const CellGrid& y, double L_step, const CellGrid& grad_y, const TvPenalty& penalty,
                   const FgpOptions& inner = {});

struct FistaOptions {
    double eta = 0.5; // L grows by 1/eta per backtracking step
    double L0 = 1.0;
    int max_iter = 200;
    double delta = 1e-10; // stop when |y_{k+1} - y_k| < delta
    int max_backtracks = 60;
    FgpOptions inner;
};

struct FistaIteration {
    int k = 0;
    double F = 0.0;
    double f = 0.0;
    double g = 0.0;
    double L = 0.0;
    int backtracks = 0;
    // Value of Q_L(x_k, y_k) for the accepted step.
    double model = 0.0;
};

struct FistaResult {
    CellGrid x;      // best iterate by F, latest among ties
    CellGrid x_last; // final iterate
    double F = 0.0;
    std::vector<FistaIteration> history;
};

using FistaCallback = std::function<void(const FistaIteration&, const CellGrid&)>;

/// FISTA with backtracking for min_{x in C} f(x) + g(x). Throws
/// NumericalError if a line search needs more than max_backtracks growths.
FistaResult fista_minimize(const SmoothObjective& f, const TvPenalty& penalty, const CellGrid& x0,
                           const FistaOptions& options = {}, const FistaCallback& on_iteration = {});

} // namespace wgeit
