#include "puma/stability.hpp"

#include "puma/numfmt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace puma {

namespace {

using cplx = std::complex<double>;

constexpr double kDeadBand = 1e-12;
constexpr double kCoincidentCrossing = 1e-9;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

TrailEntry predicate(std::string name, double value) {
    TrailEntry e{std::move(name), std::nullopt, value};
    if (value > kDeadBand) {
        e.holds = true;
    } else if (value < -kDeadBand) {
        e.holds = false;
    }
    return e;
}

bool holds(const TrailEntry& e) { return e.holds.value_or(false); }

// Full-angle base delay theta/omega from e^{-i omega tau} = -(p - omega^2 + i m omega)/(q + i n omega).
std::optional<std::pair<double, double>> base_angle(const CharCoefficients& c, double omega) {
    const cplx denom(c.q, c.n * omega);
    if (std::abs(denom) == 0.0) return std::nullopt;
    const cplx quotient = -cplx(c.p - omega * omega, c.m * omega) / denom;
    double theta = -std::arg(quotient);
    if (theta < 0.0) theta += kTwoPi;
    if (theta >= kTwoPi) theta -= kTwoPi;
    const double cos_value = ((omega * omega - c.p) * c.q - c.m * c.n * omega * omega) /
                             (c.q * c.q + c.n * c.n * omega * omega);
    const double theta_acos = std::acos(std::clamp(cos_value, -1.0, 1.0));
    return std::make_pair(theta, theta_acos);
}

struct ContourWalk {
    const CharCoefficients& c;
    double tau;
    double total_phase = 0.0;
    bool touched_zero = false;

    cplx eval(cplx lambda) {
        const cplx value = char_residual(c, lambda, tau);
        if (std::abs(value) < 1e-9) touched_zero = true;
        return value;
    }

    void segment(cplx a, cplx b, cplx fa, cplx fb, int depth) {
        const double jump = std::arg(fb / fa);
        if (std::abs(jump) > std::numbers::pi / 4.0 && depth < 48) {
            const cplx mid = 0.5 * (a + b);
            const cplx fm = eval(mid);
            if (touched_zero) return;
            segment(a, mid, fa, fm, depth + 1);
            segment(mid, b, fm, fb, depth + 1);
            return;
        }
        total_phase += jump;
    }

    void edge(cplx from, cplx to, std::size_t samples) {
        cplx prev = from;
        cplx f_prev = eval(prev);
        for (std::size_t k = 1; k <= samples && !touched_zero; ++k) {
            const double s = static_cast<double>(k) / static_cast<double>(samples);
            const cplx next = k == samples ? to : from + s * (to - from);
            const cplx f_next = eval(next);
            if (touched_zero) return;
            segment(prev, next, f_prev, f_next, 0);
            prev = next;
            f_prev = f_next;
        }
    }
};

std::optional<long> winding_number(const CharCoefficients& c, double tau, double radius) {
    ContourWalk walk{c, tau};
    // oscillation of e^{-lambda tau} near the imaginary axis sets the spacing
    const double spacing = std::numbers::pi / (8.0 * std::max(tau, 1.0));
    auto samples = [&](double length) {
        return std::max<std::size_t>(1024, static_cast<std::size_t>(std::ceil(length / spacing)));
    };
    const cplx lower_left(0.0, -radius);
    const cplx lower_right(radius, -radius);
    const cplx upper_right(radius, radius);
    const cplx upper_left(0.0, radius);
    walk.edge(lower_left, lower_right, samples(radius));
    walk.edge(lower_right, upper_right, 1024);
    walk.edge(upper_right, upper_left, samples(radius));
    walk.edge(upper_left, lower_left, samples(2.0 * radius));
    if (walk.touched_zero) return std::nullopt;
    const double turns = walk.total_phase / kTwoPi;
    const double rounded = std::round(turns);
    if (std::abs(turns - rounded) > 1e-3 || rounded < 0.0) return std::nullopt;
    return static_cast<long>(rounded);
}

void attach_oracle(StabilityVerdict& v, const CharCoefficients& c, double tau_ref) {
    try {
        v.oracle_unstable_roots = count_unstable_roots(c, tau_ref);
    } catch (const ContourError& e) {
        v.notes.emplace_back(std::string("oracle failed: ") + e.what());
    }
}

}  // namespace

Linearization linearize(const ModelParams& params, const Equilibrium& eq) {
    const double u1 = eq.state.x;
    const double u2 = eq.state.y;
    const double a2 = params.a * params.a;
    const double denom = a2 + u1 * u1;
    const double response = params.gamma * u1 * u1 / denom;
    const double slope_term = 2.0 * params.gamma * u1 * u2 * a2 / (denom * denom);
    const double ricker = std::exp(-u2 / params.N);
    Linearization lin;
    lin.a11 = params.r * (1.0 - 2.0 * u1 / params.K) - slope_term;
    lin.a12 = response;
    lin.a22 = -params.beta;
    lin.b21 = slope_term * ricker;
    lin.b22 = response * (1.0 - u2 / params.N) * ricker;
    return lin;
}

CharCoefficients char_coefficients(const Linearization& lin) {
    return {-(lin.a11 + lin.a22), -lin.b22, lin.a11 * lin.a22, lin.b22 * lin.a11 + lin.a12 * lin.b21};
}

std::complex<double> char_residual(const CharCoefficients& c, std::complex<double> lambda, double tau) {
    const cplx e = std::exp(-lambda * tau);
    return lambda * lambda + c.m * lambda + c.n * lambda * e + c.p + c.q * e;
}

std::complex<double> char_derivative(const CharCoefficients& c, std::complex<double> lambda, double tau) {
    const cplx e = std::exp(-lambda * tau);
    return 2.0 * lambda + c.m + (c.n - tau * (c.n * lambda + c.q)) * e;
}

OmegaCandidates omega_candidates(const CharCoefficients& c) {
    const double s = 2.0 * c.p + c.n * c.n - c.m * c.m;
    const double prod = c.p * c.p - c.q * c.q;
    const double disc = s * s - 4.0 * prod;
    OmegaCandidates out;
    if (disc < 0.0) return out;
    const double root = std::sqrt(disc);
    // roots of z^2 - s z + prod, computed without cancellation
    double z_hi = 0.0;
    double z_lo = 0.0;
    if (s >= 0.0) {
        z_hi = 0.5 * (s + root);
        z_lo = z_hi != 0.0 ? prod / z_hi : 0.0;
    } else {
        z_lo = 0.5 * (s - root);
        z_hi = prod / z_lo;
    }
    if (z_hi > 0.0) out.plus = std::sqrt(z_hi);
    if (z_lo > 0.0 && z_lo < z_hi) out.minus = std::sqrt(z_lo);
    return out;
}

std::string to_string(CrossingDirection direction) {
    return direction == CrossingDirection::Destabilizing ? "destabilizing" : "stabilizing";
}

const CrossingBranch* CrossingSet::plus() const noexcept {
    for (const auto& b : branches) {
        if (b.direction == CrossingDirection::Destabilizing) return &b;
    }
    return nullptr;
}

const CrossingBranch* CrossingSet::minus() const noexcept {
    for (const auto& b : branches) {
        if (b.direction == CrossingDirection::Stabilizing) return &b;
    }
    return nullptr;
}

CrossingSet crossing_set(const CharCoefficients& c, int j_max) {
    if (j_max < 1) throw std::invalid_argument("crossing_set: j_max must be >= 1");
    CrossingSet out;
    if (c.n == 0.0 && c.q == 0.0) return out;
    const OmegaCandidates omegas = omega_candidates(c);
    for (const auto& candidate : {omegas.plus, omegas.minus}) {
        if (!candidate) continue;
        const double omega = *candidate;
        const auto angles = base_angle(c, omega);
        if (!angles) continue;
        CrossingBranch branch;
        branch.omega = omega;
        const double sign = c.m * c.m - c.n * c.n - 2.0 * c.p + 2.0 * omega * omega;
        branch.direction = sign > 0.0 ? CrossingDirection::Destabilizing : CrossingDirection::Stabilizing;
        for (int j = 0; j < j_max; ++j) branch.taus.push_back((angles->first + kTwoPi * j) / omega);
        branch.arccos_tau0 = angles->second / omega;
        branch.arccos_mismatch = std::abs(angles->first - angles->second) > 1e-8;
        out.branches.push_back(std::move(branch));
    }
    return out;
}

double default_search_radius(const CharCoefficients& c) {
    return 10.0 * (1.0 + std::abs(c.m) + std::abs(c.n) + std::sqrt(std::abs(c.p) + std::abs(c.q)));
}

std::size_t count_unstable_roots(const CharCoefficients& c, double tau, double search_radius) {
    if (!std::isfinite(tau) || tau < 0.0) throw std::invalid_argument("count_unstable_roots: tau must be >= 0");
    const double radius = search_radius > 0.0 ? search_radius : default_search_radius(c);
    for (int attempt = 0; attempt <= 5; ++attempt) {
        const auto w = winding_number(c, tau, radius + 1e-6 * attempt);
        if (w) return static_cast<std::size_t>(*w);
    }
    throw ContourError("count_unstable_roots: characteristic function vanishes on or near the contour (tau = " +
                       format_double(tau) + ")");
}

std::string to_string(StabilityStatus status) {
    switch (status) {
        case StabilityStatus::AbsolutelyStable: return "AbsolutelyStable";
        case StabilityStatus::GloballyStableBoundary: return "GloballyStableBoundary";
        case StabilityStatus::ConditionallyStable: return "ConditionallyStable";
        case StabilityStatus::Unstable: return "Unstable";
        case StabilityStatus::Inconclusive: return "Inconclusive";
    }
    return "Unknown";
}

std::optional<WindowSplit> assemble_windows(const CharCoefficients& c) {
    const OmegaCandidates omegas = omega_candidates(c);
    if (!omegas.plus) return std::nullopt;
    const auto plus_angle = base_angle(c, *omegas.plus);
    if (!plus_angle) return std::nullopt;
    std::optional<double> minus_theta;
    if (omegas.minus) {
        const auto a = base_angle(c, *omegas.minus);
        if (!a) return std::nullopt;
        minus_theta = a->first;
    }
    const double inf = std::numeric_limits<double>::infinity();
    auto plus_tau = [&](long j) { return (plus_angle->first + kTwoPi * static_cast<double>(j)) / *omegas.plus; };
    auto minus_tau = [&](long j) {
        return minus_theta ? (*minus_theta + kTwoPi * static_cast<double>(j)) / *omegas.minus : inf;
    };

    WindowSplit split;
    long i = 0;
    long j = 0;
    int pairs = 0;
    double stable_start = 0.0;
    double unstable_start = 0.0;
    for (int iteration = 0; iteration < 200000; ++iteration) {
        if (!minus_theta && pairs > 0) {
            split.unstable.push_back({unstable_start, inf});
            return split;
        }
        const double next_plus = plus_tau(i);
        const double next_minus = minus_tau(j);
        if (std::abs(next_plus - next_minus) <= kCoincidentCrossing) return std::nullopt;
        if (next_plus < next_minus) {
            if (pairs == 0) {
                split.stable.push_back({stable_start, next_plus});
                unstable_start = next_plus;
            }
            ++pairs;
            ++i;
            continue;
        }
        if (pairs == 0) return std::nullopt;
        --pairs;
        ++j;
        if (pairs == 0) {
            split.unstable.push_back({unstable_start, next_minus});
            stable_start = next_minus;
        } else {
            // omega+ > omega-: every later stabilizing interval contains a
            // destabilizing crossing, so the count never returns to zero
            split.unstable.push_back({unstable_start, inf});
            return split;
        }
    }
    return std::nullopt;
}

StabilityVerdict classify_equilibrium(const ModelParams& params, const Equilibrium& eq, double tau_ref, int j_max) {
    validate(params);
    StabilityVerdict v;
    v.tau_ref = tau_ref;
    const Linearization lin = linearize(params, eq);
    const CharCoefficients c = char_coefficients(lin);
    v.coefficients = c;
    v.crossings = crossing_set(c, j_max);
    const double K2 = params.K * params.K;
    const double a2 = params.a * params.a;

    switch (eq.kind) {
        case EquilibriumKind::Origin: {
            v.hypothesis_trail.push_back(predicate("origin: a11 = r > 0", lin.a11));
            v.status = StabilityStatus::Unstable;
            attach_oracle(v, c, tau_ref);
            return v;
        }
        case EquilibriumKind::Boundary: {
            const double max_response = params.gamma * K2 / (a2 + K2);
            const TrailEntry global = predicate("beta>gamma", params.beta - params.gamma);
            const TrailEntry h1 = predicate("(H1) beta>gamma*K^2/(a^2+K^2)", params.beta - max_response);
            v.hypothesis_trail.push_back(global);
            v.hypothesis_trail.push_back(h1);
            if (holds(global)) {
                v.status = StabilityStatus::GloballyStableBoundary;
            } else if (holds(h1)) {
                v.status = StabilityStatus::AbsolutelyStable;
            } else {
                const TrailEntry a2_pred = predicate("(A2) p+q>0", c.p + c.q);
                v.hypothesis_trail.push_back(a2_pred);
                if (a2_pred.holds == false) {
                    v.notes.emplace_back("p+q<0: F has a positive real root for every tau");
                }
                v.status = StabilityStatus::Inconclusive;
                attach_oracle(v, c, tau_ref);
            }
            return v;
        }
        case EquilibriumKind::Positive: break;
    }

    const double x = eq.state.x;
    const double y = eq.state.y;
    const double denom = a2 + x * x;
    const double growth = params.r * (1.0 - x / params.K);
    const double h2_lhs = (params.r * x / params.K + params.beta * y / params.N) / growth;
    const double h2_rhs = 1.0 - 2.0 * a2 / denom;
    const double h3_lhs = params.gamma * x * y * a2 / (denom * denom);
    const double h3_rhs = params.r * (1.0 - 2.0 * x / params.K);
    const double s = 2.0 * c.p + c.n * c.n - c.m * c.m;
    const double prod = c.p * c.p - c.q * c.q;

    const TrailEntry h2 = predicate("(H2)", h2_lhs - h2_rhs);
    const TrailEntry h3 = predicate("(H3)", h3_lhs - h3_rhs);
    const TrailEntry a1 = predicate("(A1) m+n>0", c.m + c.n);
    const TrailEntry a2p = predicate("(A2) p+q>0", c.p + c.q);
    const TrailEntry s_neg = predicate("2p+n^2-m^2<0", -s);
    const TrailEntry prod_pos = predicate("p^2-q^2>0", prod);
    const TrailEntry a4 = predicate("(A4) p^2-q^2<0", -prod);
    const TrailEntry s_pos = predicate("2p+n^2-m^2>0", s);
    const TrailEntry disc_pos = predicate("(2p+n^2-m^2)^2>4(p^2-q^2)", s * s - 4.0 * prod);
    for (const TrailEntry* e : {&h2, &h3, &a1, &a2p, &s_neg, &prod_pos, &a4, &s_pos, &disc_pos}) {
        v.hypothesis_trail.push_back(*e);
    }
    const bool a3 = holds(s_neg) && holds(prod_pos);
    const bool a5 = holds(prod_pos) && holds(s_pos) && holds(disc_pos);
    v.hypothesis_trail.push_back({"(A3)", a3, 0.0});
    v.hypothesis_trail.push_back({"(A5)", a5, 0.0});

    if (!(holds(a1) && holds(a2p))) {
        if (a2p.holds == false) v.notes.emplace_back("p+q<0: F has a positive real root for every tau");
        if (a1.holds == false && holds(a2p)) v.notes.emplace_back("m+n<0: two roots in the right half-plane at tau=0");
        v.status = StabilityStatus::Inconclusive;
        attach_oracle(v, c, tau_ref);
        return v;
    }
    if (a3 || (holds(prod_pos) && omega_candidates(c).count() == 0)) {
        v.notes.emplace_back("case a): no purely imaginary roots for any tau");
        v.status = StabilityStatus::AbsolutelyStable;
        return v;
    }
    if (holds(a4) || a5) {
        v.notes.emplace_back(holds(a4) ? "case b): single destabilizing crossing omega+"
                                       : "case c): alternating crossings omega+ / omega-");
        const auto split = assemble_windows(c);
        if (split) {
            v.status = StabilityStatus::ConditionallyStable;
            v.stable_windows = split->stable;
            v.unstable_windows = split->unstable;
            return v;
        }
        v.notes.emplace_back("degenerate crossings; windows not assembled");
    } else {
        v.notes.emplace_back("no root-distribution theorem applies");
    }
    v.status = StabilityStatus::Inconclusive;
    attach_oracle(v, c, tau_ref);
    return v;
}

std::string format_report(const Equilibrium& eq, const StabilityVerdict& v) {
    std::ostringstream os;
    os << "equilibrium " << to_string(eq.kind) << " (" << format_double(eq.state.x) << ", "
       << format_double(eq.state.y) << ")\n";
    os << "  status: " << to_string(v.status) << '\n';
    if (v.coefficients) {
        const auto& c = *v.coefficients;
        os << "  coefficients: m=" << format_double(c.m) << " n=" << format_double(c.n) << " p=" << format_double(c.p)
           << " q=" << format_double(c.q) << '\n';
    }
    os << "  hypotheses:\n";
    for (const auto& e : v.hypothesis_trail) {
        os << "    " << e.name << ": " << (e.holds ? (*e.holds ? "true" : "false") : "dead-band");
        if (e.value != 0.0) os << " (" << format_double(e.value) << ')';
        os << '\n';
    }
    for (const auto& b : v.crossings.branches) {
        os << "  omega=" << format_double(b.omega) << " " << to_string(b.direction) << " tau_j:";
        for (double t : b.taus) os << ' ' << format_double(t);
        if (b.arccos_mismatch) os << " [arccos form gives tau0=" << format_double(b.arccos_tau0) << "]";
        os << '\n';
    }
    auto interval = [&](const DelayInterval& w) {
        os << " [" << format_double(w.lower) << ", " << format_double(w.upper) << ')';
    };
    if (!v.stable_windows.empty()) {
        os << "  stable windows:";
        for (const auto& w : v.stable_windows) interval(w);
        os << "\n  unstable windows:";
        for (const auto& w : v.unstable_windows) interval(w);
        os << '\n';
    }
    if (v.oracle_unstable_roots) {
        os << "  unstable roots at tau=" << format_double(v.tau_ref) << ": " << *v.oracle_unstable_roots << '\n';
    }
    for (const auto& n : v.notes) os << "  note: " << n << '\n';
    return os.str();
}

}  // namespace puma
