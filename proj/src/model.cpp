#include "puma/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace puma {

namespace {

constexpr int kScanIntervals = 2000;
constexpr double kBisectionTolerance = 1e-12;
constexpr double kTangentialScanLevel = 1e-6;
constexpr double kTangentialAccept = 1e-10;
constexpr double kDuplicateRelTol = 1e-8;

void require_positive(double value, const char* name) {
    if (!std::isfinite(value) || !(value > 0.0)) {
        throw std::invalid_argument(std::string("ModelParams.") + name + " must be finite and > 0");
    }
}

double gap_unchecked(double x, const ModelParams& p) {
    const double a2 = p.a * p.a;
    const double first = (p.r / p.gamma) * (1.0 - x / p.K) * (a2 + x * x) / x;
    const double second = p.N * std::log((p.gamma / p.beta) * x * x / (a2 + x * x));
    return first - second;
}

double predator_on_prey_isocline(double x, const ModelParams& p) {
    return (p.r / p.gamma) * (1.0 - x / p.K) * (p.a * p.a + x * x) / x;
}

double bisect_gap(double lo, double hi, double h_lo, const ModelParams& p) {
    double best_x = lo;
    double best_h = std::abs(h_lo);
    for (int it = 0; it < 400; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double h_mid = gap_unchecked(mid, p);
        if (std::abs(h_mid) < best_h) {
            best_h = std::abs(h_mid);
            best_x = mid;
        }
        if (std::abs(h_mid) <= kBisectionTolerance || mid <= lo || mid >= hi) break;
        if ((h_mid > 0.0) == (h_lo > 0.0)) {
            lo = mid;
            h_lo = h_mid;
        } else {
            hi = mid;
        }
    }
    return best_x;
}

// Golden-section minimisation of |h| on [lo, hi].
double minimise_abs_gap(double lo, double hi, const ModelParams& p) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = hi - inv_phi * (hi - lo);
    double d = lo + inv_phi * (hi - lo);
    double fc = std::abs(gap_unchecked(c, p));
    double fd = std::abs(gap_unchecked(d, p));
    for (int it = 0; it < 200 && (hi - lo) > 1e-15 * std::max(1.0, hi); ++it) {
        if (fc < fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = std::abs(gap_unchecked(c, p));
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = std::abs(gap_unchecked(d, p));
        }
    }
    return fc < fd ? c : d;
}

std::vector<double> scan_nodes(double lo, double hi) {
    std::vector<double> nodes;
    nodes.reserve(2 * kScanIntervals + 2);
    const double width = hi - lo;
    for (int i = 0; i <= kScanIntervals; ++i) {
        nodes.push_back(lo + width * static_cast<double>(i) / kScanIntervals);
    }
    // log-spaced offsets resolve roots crowding the lower end
    for (int i = 0; i < kScanIntervals; ++i) {
        const double exponent = -10.0 * (1.0 - static_cast<double>(i) / kScanIntervals);
        nodes.push_back(lo + width * std::pow(10.0, exponent));
    }
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    return nodes;
}

}  // namespace

std::string to_string(EquilibriumKind kind) {
    switch (kind) {
        case EquilibriumKind::Origin: return "origin";
        case EquilibriumKind::Boundary: return "boundary";
        case EquilibriumKind::Positive: return "positive";
    }
    return "unknown";
}

void validate(const ModelParams& params) {
    require_positive(params.r, "r");
    require_positive(params.K, "K");
    require_positive(params.a, "a");
    require_positive(params.gamma, "gamma");
    require_positive(params.beta, "beta");
    require_positive(params.N, "N");
    if (!std::isfinite(params.tau) || params.tau < 0.0) {
        throw std::invalid_argument("ModelParams.tau must be finite and >= 0");
    }
}

double functional_response(double x, const ModelParams& params) {
    if (!std::isfinite(x) || x < 0.0) {
        throw std::domain_error("functional_response: prey density must be finite and non-negative");
    }
    const double x2 = x * x;
    return params.gamma * x2 / (params.a * params.a + x2);
}

State rhs_unchecked(const State& current, const State& delayed, const ModelParams& p) noexcept {
    const double a2 = p.a * p.a;
    const double xc2 = current.x * current.x;
    const double xd2 = delayed.x * delayed.x;
    const double response_now = p.gamma * xc2 / (a2 + xc2);
    const double response_delayed = p.gamma * xd2 / (a2 + xd2);
    return {p.r * (1.0 - current.x / p.K) * current.x - response_now * current.y,
            -p.beta * current.y + response_delayed * delayed.y * std::exp(-delayed.y / p.N)};
}

State rhs(const State& current, const State& delayed, const ModelParams& params) {
    if (!(current.x >= 0.0) || !(current.y >= 0.0) || !(delayed.x >= 0.0) || !(delayed.y >= 0.0)) {
        throw std::domain_error("rhs: states must be non-negative");
    }
    return rhs_unchecked(current, delayed, params);
}

bool positive_existence_condition(const ModelParams& p) {
    const double K2 = p.K * p.K;
    return (p.gamma / p.beta) * K2 / (p.a * p.a + K2) > 1.0;
}

double admissible_prey_lower_bound(const ModelParams& p) {
    if (p.gamma <= p.beta * (1.0 + 1e-14)) return 1e-12;
    return p.a * std::sqrt(p.beta / (p.gamma - p.beta));
}

double equilibrium_gap(double x, const ModelParams& params) {
    if (!positive_existence_condition(params)) {
        throw std::domain_error("equilibrium_gap: positive existence condition does not hold");
    }
    const double x_low = admissible_prey_lower_bound(params);
    if (!std::isfinite(x) || !(x > x_low) || x > params.K) {
        throw std::domain_error("equilibrium_gap: prey density outside (x_low, K]");
    }
    return gap_unchecked(x, params);
}

double steady_state_residual(const State& s, const ModelParams& p) {
    const State f = rhs_unchecked(s, s, p);
    return std::max(std::abs(f.x), std::abs(f.y));
}

std::vector<Equilibrium> find_equilibria(const ModelParams& params) {
    validate(params);
    const double scale = std::max(1.0, params.r * params.K);
    auto make = [&](State s, EquilibriumKind kind, bool tangential) {
        return Equilibrium{s, kind, steady_state_residual(s, params) / scale, tangential};
    };

    std::vector<Equilibrium> out;
    out.push_back(make({0.0, 0.0}, EquilibriumKind::Origin, false));

    std::vector<Equilibrium> positive;
    if (positive_existence_condition(params)) {
        const double x_low = admissible_prey_lower_bound(params);
        const std::vector<double> nodes = scan_nodes(x_low, params.K);
        std::vector<double> values(nodes.size());
        for (std::size_t i = 0; i < nodes.size(); ++i) values[i] = gap_unchecked(nodes[i], params);

        std::vector<std::pair<double, bool>> roots;
        for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
            if (values[i] == 0.0) {
                if (i > 0) roots.emplace_back(nodes[i], false);
                continue;
            }
            if ((values[i] > 0.0) != (values[i + 1] > 0.0) && values[i + 1] != 0.0) {
                roots.emplace_back(bisect_gap(nodes[i], nodes[i + 1], values[i], params), false);
            }
        }
        for (std::size_t i = 1; i + 1 < nodes.size(); ++i) {
            const double v = std::abs(values[i]);
            if (v >= kTangentialScanLevel) continue;
            if (v > std::abs(values[i - 1]) || v > std::abs(values[i + 1])) continue;
            const bool same_sign = (values[i - 1] > 0.0) == (values[i] > 0.0) &&
                                   (values[i + 1] > 0.0) == (values[i] > 0.0);
            if (!same_sign) continue;
            const double x = minimise_abs_gap(nodes[i - 1], nodes[i + 1], params);
            if (std::abs(gap_unchecked(x, params)) <= kTangentialAccept) roots.emplace_back(x, true);
        }
        std::sort(roots.begin(), roots.end());
        for (const auto& [x, tangential] : roots) {
            if (!(x > 0.0 && x < params.K)) continue;
            if (!positive.empty()) {
                const double prev = positive.back().state.x;
                if (std::abs(x - prev) <= kDuplicateRelTol * std::max(std::abs(x), std::abs(prev))) continue;
            }
            const double y = predator_on_prey_isocline(x, params);
            if (!(y > 0.0)) continue;
            positive.push_back(make({x, y}, EquilibriumKind::Positive, tangential));
        }
    }
    out.insert(out.end(), positive.begin(), positive.end());
    out.push_back(make({params.K, 0.0}, EquilibriumKind::Boundary, false));
    return out;
}

}  // namespace puma
