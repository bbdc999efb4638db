#include "puma/svg.hpp"

#include "puma/numfmt.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace puma {

namespace {

constexpr double kLogFloor = 1e-6;
constexpr const char* kPreyColour = "#1f77b4";
constexpr const char* kPredatorColour = "#d62728";

struct Axis {
    double lo = 0.0;
    double hi = 1.0;
    bool log = false;

    double transform(double v) const { return log ? std::log10(std::max(v, kLogFloor)) : v; }
};

struct Panel {
    double left, top, width, height;
    Axis x, y;

    double px(double t) const { return left + (t - x.lo) / (x.hi - x.lo) * width; }
    double py(double v) const { return top + height - (y.transform(v) - y.lo) / (y.hi - y.lo) * height; }
};

Axis value_axis(const std::vector<double>& values, bool log) {
    Axis axis;
    axis.log = log;
    double lo = INFINITY;
    double hi = -INFINITY;
    for (double v : values) {
        const double t = axis.transform(v);
        lo = std::min(lo, t);
        hi = std::max(hi, t);
    }
    if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
        const double pad = log ? 0.5 : std::max(1.0, 0.05 * std::abs(hi));
        lo -= pad;
        hi += pad;
    }
    axis.lo = lo;
    axis.hi = hi;
    return axis;
}

int decimals_for(double step) { return std::max(0, static_cast<int>(-std::floor(std::log10(step) + 1e-9))); }

std::string fx(double v) { return format_fixed(v, 2); }

void draw_panel(std::ostringstream& os, const Panel& panel, const std::vector<double>& times,
                const std::vector<double>& values, const char* colour, const char* label, const char* css) {
    os << "<rect x=\"" << fx(panel.left) << "\" y=\"" << fx(panel.top) << "\" width=\"" << fx(panel.width)
       << "\" height=\"" << fx(panel.height) << "\" fill=\"none\" stroke=\"#333\"/>\n";

    // value ticks
    std::vector<std::pair<double, std::string>> ticks;
    if (panel.y.log) {
        for (double d : decade_ticks(std::pow(10.0, panel.y.lo), std::pow(10.0, panel.y.hi))) {
            ticks.emplace_back(d, format_double(d));
        }
    } else {
        const auto lin = linear_ticks(panel.y.lo, panel.y.hi);
        const int dec = lin.size() > 1 ? decimals_for(lin[1] - lin[0]) : 2;
        for (double v : lin) ticks.emplace_back(v, format_fixed(v, dec));
    }
    for (const auto& [v, text] : ticks) {
        const double y = panel.py(v);
        os << "<line class=\"tick\" x1=\"" << fx(panel.left - 5) << "\" y1=\"" << fx(y) << "\" x2=\""
           << fx(panel.left) << "\" y2=\"" << fx(y) << "\" stroke=\"#333\"/>\n";
        os << "<text class=\"tick-label\" x=\"" << fx(panel.left - 8) << "\" y=\"" << fx(y + 4)
           << "\" text-anchor=\"end\" font-size=\"11\">" << text << "</text>\n";
    }
    os << "<text x=\"" << fx(panel.left - 55) << "\" y=\"" << fx(panel.top + panel.height / 2)
       << "\" font-size=\"12\" transform=\"rotate(-90 " << fx(panel.left - 55) << ' '
       << fx(panel.top + panel.height / 2) << ")\" text-anchor=\"middle\">" << label
       << (panel.y.log ? " (log scale)" : "") << "</text>\n";

    os << "<polyline class=\"" << css << "\" fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (i > 0) os << ' ';
        os << fx(panel.px(times[i])) << ',' << fx(panel.py(values[i]));
    }
    os << "\"/>\n";
}

}  // namespace

std::vector<double> decade_ticks(double lo, double hi) {
    std::vector<double> out;
    if (!(lo > 0.0) || !(hi >= lo)) return out;
    const int first = static_cast<int>(std::ceil(std::log10(lo) - 1e-12));
    const int last = static_cast<int>(std::floor(std::log10(hi) + 1e-12));
    for (int k = first; k <= last; ++k) out.push_back(std::pow(10.0, k));
    return out;
}

std::vector<double> linear_ticks(double lo, double hi, int target) {
    std::vector<double> out;
    if (!(hi > lo) || target < 1) return out;
    const double raw = (hi - lo) / target;
    const double magnitude = std::pow(10.0, std::floor(std::log10(raw)));
    double step = magnitude;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        step = m * magnitude;
        if (step >= raw) break;
    }
    const auto first = static_cast<long long>(std::ceil(lo / step - 1e-9));
    const auto last = static_cast<long long>(std::floor(hi / step + 1e-9));
    for (long long k = first; k <= last; ++k) out.push_back(static_cast<double>(k) * step);
    return out;
}

std::string render_svg(const Trajectory& traj, const PlotOptions& options) {
    if (traj.size() < 2) throw std::invalid_argument("render_svg: trajectory needs at least two nodes");

    const std::vector<double>& times = traj.times();
    std::vector<double> prey;
    std::vector<double> predator;
    prey.reserve(traj.size());
    predator.reserve(traj.size());
    for (const State& s : traj.states()) {
        prey.push_back(s.x);
        predator.push_back(s.y);
    }

    const double w = options.width;
    const double h = options.height;
    const double left = 80.0;
    const double right = 130.0;
    const double top = 40.0;
    const double gap = 30.0;
    const double bottom = 45.0;
    const double panel_h = (h - top - bottom - gap) / 2.0;
    Axis time_axis{times.front(), times.back(), false};
    if (time_axis.hi <= time_axis.lo) time_axis.hi = time_axis.lo + 1.0;

    const Panel prey_panel{left, top, w - left - right, panel_h, time_axis, value_axis(prey, options.log_prey)};
    const Panel pred_panel{left, top + panel_h + gap, w - left - right, panel_h, time_axis, value_axis(predator, false)};

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << options.width << "\" height=\"" << options.height
       << "\" viewBox=\"0 0 " << options.width << ' ' << options.height << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << fx(w / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << options.title
       << "</text>\n";

    draw_panel(os, prey_panel, times, prey, kPreyColour, "prey", "series-prey");
    draw_panel(os, pred_panel, times, predator, kPredatorColour, "predator", "series-predator");

    // shared time axis
    const auto time_ticks = linear_ticks(time_axis.lo, time_axis.hi, 8);
    const int dec = time_ticks.size() > 1 ? decimals_for(time_ticks[1] - time_ticks[0]) : 0;
    const double axis_y = pred_panel.top + pred_panel.height;
    for (double t : time_ticks) {
        const double x = pred_panel.px(t);
        os << "<line class=\"tick\" x1=\"" << fx(x) << "\" y1=\"" << fx(axis_y) << "\" x2=\"" << fx(x) << "\" y2=\""
           << fx(axis_y + 5) << "\" stroke=\"#333\"/>\n";
        os << "<text class=\"tick-label\" x=\"" << fx(x) << "\" y=\"" << fx(axis_y + 18)
           << "\" text-anchor=\"middle\" font-size=\"11\">" << format_fixed(t, dec) << "</text>\n";
    }
    os << "<text x=\"" << fx(left + (w - left - right) / 2) << "\" y=\"" << fx(h - 6)
       << "\" text-anchor=\"middle\" font-size=\"12\">time</text>\n";

    for (const EventRecord& e : traj.events()) {
        const double x = prey_panel.px(e.time);
        os << "<line class=\"event-marker\" x1=\"" << fx(x) << "\" y1=\"" << fx(top) << "\" x2=\"" << fx(x)
           << "\" y2=\"" << fx(axis_y) << "\" stroke=\"#888\" stroke-dasharray=\"4 3\"/>\n";
    }

    const double lx = w - right + 15;
    os << "<g class=\"legend\">\n";
    os << "<line x1=\"" << fx(lx) << "\" y1=\"" << fx(top + 10) << "\" x2=\"" << fx(lx + 25) << "\" y2=\""
       << fx(top + 10) << "\" stroke=\"" << kPreyColour << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << fx(lx + 30) << "\" y=\"" << fx(top + 14) << "\" font-size=\"12\">prey</text>\n";
    os << "<line x1=\"" << fx(lx) << "\" y1=\"" << fx(top + 30) << "\" x2=\"" << fx(lx + 25) << "\" y2=\""
       << fx(top + 30) << "\" stroke=\"" << kPredatorColour << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << fx(lx + 30) << "\" y=\"" << fx(top + 34) << "\" font-size=\"12\">predator</text>\n";
    if (!traj.events().empty()) {
        os << "<line x1=\"" << fx(lx) << "\" y1=\"" << fx(top + 50) << "\" x2=\"" << fx(lx + 25) << "\" y2=\""
           << fx(top + 50) << "\" stroke=\"#888\" stroke-dasharray=\"4 3\"/>\n";
        os << "<text x=\"" << fx(lx + 30) << "\" y=\"" << fx(top + 54) << "\" font-size=\"12\">removal</text>\n";
    }
    os << "</g>\n</svg>\n";
    return os.str();
}

}  // namespace puma
