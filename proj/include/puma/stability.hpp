#pragma once

// Local stability of equilibria of the delayed model.
//
// Linearising about an equilibrium gives u' = A u(t) + B u(t - tau) with
//   A = [a11 -a12; 0 a22],  B = [0 0; b21 b22],
// whose characteristic function is
//   F(lambda) = lambda^2 + m lambda + n lambda e^{-lambda tau} + p + q e^{-lambda tau}.
// Purely imaginary roots i*omega solve omega^4 - (2p + n^2 - m^2) omega^2 + p^2 - q^2 = 0.
// Verdicts follow the Cooke-Grossman root-distribution results, and an
// independent argument-principle root count serves as the oracle.

#include "puma/model.hpp"

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace puma {

struct Linearization {
    double a11 = 0.0;
    double a12 = 0.0;
    double a22 = 0.0;
    double b21 = 0.0;
    double b22 = 0.0;
};

struct CharCoefficients {
    double m = 0.0;
    double n = 0.0;
    double p = 0.0;
    double q = 0.0;
};

Linearization linearize(const ModelParams& params, const Equilibrium& eq);

/// m = -(a11 + a22), n = -b22, p = a11 a22, q = b22 a11 + a12 b21.
CharCoefficients char_coefficients(const Linearization& lin);

/// F(lambda; tau).
std::complex<double> char_residual(const CharCoefficients& c, std::complex<double> lambda, double tau);

/// dF/dlambda.
std::complex<double> char_derivative(const CharCoefficients& c, std::complex<double> lambda, double tau);

/// Positive roots omega of the quartic. `plus` is the larger one; when only
/// one positive root exists it is reported as `plus`.
struct OmegaCandidates {
    std::optional<double> plus;
    std::optional<double> minus;

    std::size_t count() const noexcept { return (plus ? 1u : 0u) + (minus ? 1u : 0u); }
};

OmegaCandidates omega_candidates(const CharCoefficients& c);

enum class CrossingDirection { Destabilizing, Stabilizing };

std::string to_string(CrossingDirection direction);

struct CrossingBranch {
    double omega = 0.0;
    CrossingDirection direction = CrossingDirection::Destabilizing;
    std::vector<double> taus;  // ascending critical delays, j = 0 .. j_max-1
    // base angle from the arccos-only formula and whether it differs from
    // the full-angle value (sin(omega tau) < 0 branch)
    double arccos_tau0 = 0.0;
    bool arccos_mismatch = false;
};

struct CrossingSet {
    std::vector<CrossingBranch> branches;  // omega_plus first

    const CrossingBranch* plus() const noexcept;
    const CrossingBranch* minus() const noexcept;
    bool empty() const noexcept { return branches.empty(); }
};

/// Critical delays tau_j = (theta + 2 pi j) / omega with theta taken from the
/// full complex value of e^{-i omega tau}. Empty when n = q = 0.
CrossingSet crossing_set(const CharCoefficients& c, int j_max);

class ContourError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// 10 (1 + |m| + |n| + sqrt(|p| + |q|)).
double default_search_radius(const CharCoefficients& c);

/// Number of roots of F in the right half plane, counted with multiplicity by
/// the winding number of F around [0, R] x [-R, R]. `search_radius` <= 0
/// selects default_search_radius(c). Throws ContourError when F vanishes on
/// the contour after retries.
std::size_t count_unstable_roots(const CharCoefficients& c, double tau, double search_radius = 0.0);

enum class StabilityStatus { AbsolutelyStable, GloballyStableBoundary, ConditionallyStable, Unstable, Inconclusive };

std::string to_string(StabilityStatus status);

/// One evaluated predicate of the decision procedure.
struct TrailEntry {
    std::string name;        // e.g. "(A1) m+n>0"
    std::optional<bool> holds;  // nullopt: inside the 1e-12 dead band
    double value = 0.0;      // the quantity compared against zero
};

struct DelayInterval {
    double lower = 0.0;
    double upper = 0.0;  // may be +infinity for the final unstable interval
};

struct StabilityVerdict {
    StabilityStatus status = StabilityStatus::Inconclusive;
    std::vector<TrailEntry> hypothesis_trail;
    std::vector<std::string> notes;
    std::vector<DelayInterval> stable_windows;    // ConditionallyStable only
    std::vector<DelayInterval> unstable_windows;  // ConditionallyStable only
    CrossingSet crossings;
    std::optional<CharCoefficients> coefficients;
    std::optional<std::size_t> oracle_unstable_roots;  // at tau_ref, when computed
    double tau_ref = 0.0;
};

/// Window assembly for the Cooke-Grossman cases with imaginary crossings.
/// Sweeps the ordered crossings with a running count of right-half-plane
/// root pairs; stops once instability is permanent. Returns nullopt for
/// degenerate (coincident or inconsistent) crossings.
struct WindowSplit {
    std::vector<DelayInterval> stable;
    std::vector<DelayInterval> unstable;
};

std::optional<WindowSplit> assemble_windows(const CharCoefficients& c);

StabilityVerdict classify_equilibrium(const ModelParams& params, const Equilibrium& eq, double tau_ref,
                                      int j_max = 8);

/// Human-readable multi-line report.
std::string format_report(const Equilibrium& eq, const StabilityVerdict& verdict);

}  // namespace puma
