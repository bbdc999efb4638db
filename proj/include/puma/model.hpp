#pragma once

// Delayed Gause-type predator-prey model with a Holling type III functional
// response and Ricker-type recruitment:
//
//   x'(t) = r (1 - x/K) x - p(x) y
//   y'(t) = -beta y + p(x(t - tau)) y(t - tau) exp(-y(t - tau) / N)
//
// with p(x) = gamma x^2 / (a^2 + x^2).

#include <string>
#include <vector>

namespace puma {

/// Ecological parameter set. All fields strictly positive except tau >= 0.
struct ModelParams {
    double r = 0.1;      // prey reproduction rate
    double K = 200.0;    // carrying capacity
    double a = 0.5;      // half-saturation constant
    double gamma = 0.5;  // maximum per-capita consumption rate
    double beta = 0.1;   // predator mortality rate
    double N = 2.0;      // optimal predator reproductive density
    double tau = 27.0;   // maturation delay

    bool operator==(const ModelParams&) const = default;
};

/// Throws std::invalid_argument naming the first offending field.
void validate(const ModelParams& params);

/// Population pair (prey x, predator y). Also used for time derivatives,
/// where the non-negativity invariant does not apply.
struct State {
    double x = 0.0;
    double y = 0.0;

    bool operator==(const State&) const = default;
};

inline State operator+(State lhs, const State& rhs) { return {lhs.x + rhs.x, lhs.y + rhs.y}; }
inline State operator-(State lhs, const State& rhs) { return {lhs.x - rhs.x, lhs.y - rhs.y}; }
inline State operator*(double s, const State& v) { return {s * v.x, s * v.y}; }

enum class EquilibriumKind { Origin, Boundary, Positive };

std::string to_string(EquilibriumKind kind);

struct Equilibrium {
    State state;
    EquilibriumKind kind = EquilibriumKind::Origin;
    // max-norm of the steady-state system at `state`, divided by max(1, r K)
    double residual = 0.0;
    // even-multiplicity root of the equilibrium gap (no sign change)
    bool tangential = false;
};

/// gamma x^2 / (a^2 + x^2). Throws std::domain_error for negative or
/// non-finite x.
double functional_response(double x, const ModelParams& params);

/// Right-hand side of the delayed system. Both states must be non-negative.
State rhs(const State& current, const State& delayed, const ModelParams& params);

/// Unchecked right-hand side for solver stages, where roundoff may push a
/// stage value marginally below zero.
State rhs_unchecked(const State& current, const State& delayed, const ModelParams& params) noexcept;

/// Positive equilibria exist iff (gamma / beta) K^2 / (a^2 + K^2) > 1.
bool positive_existence_condition(const ModelParams& params);

/// Lower end of the admissible prey interval for positive equilibria: the
/// point where (gamma / beta) x^2 / (a^2 + x^2) = 1. Clamped to 1e-12 when
/// gamma <= beta.
double admissible_prey_lower_bound(const ModelParams& params);

/// h(x) = (r/gamma)(1 - x/K)(a^2 + x^2)/x - N ln((gamma/beta) x^2/(a^2 + x^2)).
/// Zeros on (x_low, K) are the prey coordinates of positive equilibria.
double equilibrium_gap(double x, const ModelParams& params);

/// Max-norm of the steady-state system at `s` (unscaled).
double steady_state_residual(const State& s, const ModelParams& params);

/// Origin, boundary (K, 0), and every positive equilibrium, sorted by x.
std::vector<Equilibrium> find_equilibria(const ModelParams& params);

}  // namespace puma
