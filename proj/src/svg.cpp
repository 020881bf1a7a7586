#include "rgreedy/svg.hpp"

#include "rgreedy/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace rgreedy::svg {

namespace {

std::string fixed(double v, int digits = 2)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string tick_label(double v)
{
    char buf[64];
    if (v != 0.0 && (std::abs(v) >= 1e4 || std::abs(v) < 1e-2))
        std::snprintf(buf, sizeof buf, "%.0e", v);
    else
        std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::string escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

struct Axis {
    bool log = false;
    double lo = 0.0;
    double hi = 1.0;

    double transform(double v) const { return log ? std::log10(v) : v; }
    bool usable(double v) const { return std::isfinite(v) && (!log || v > 0.0); }

    std::vector<double> ticks() const
    {
        std::vector<double> t;
        if (log) {
            for (double e = std::floor(lo); e <= std::ceil(hi) + 1e-9; e += 1.0)
                if (e >= lo - 1e-9 && e <= hi + 1e-9) t.push_back(std::pow(10.0, e));
            return t;
        }
        const double range = hi - lo;
        const double raw = range / 5.0;
        const double mag = std::pow(10.0, std::floor(std::log10(raw)));
        const double norm = raw / mag;
        const double step = (norm < 1.5 ? 1.0 : norm < 3.0 ? 2.0 : norm < 7.0 ? 5.0 : 10.0) * mag;
        for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * step; v += step)
            t.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
        return t;
    }
};

Axis fit_axis(bool log, const std::vector<const std::vector<double>*>& data)
{
    Axis a;
    a.log = log;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto* d : data)
        for (double v : *d)
            if (a.usable(v)) {
                lo = std::min(lo, a.transform(v));
                hi = std::max(hi, a.transform(v));
            }
    if (!std::isfinite(lo)) {
        lo = 0.0;
        hi = 1.0;
    }
    if (hi - lo < 1e-12) {
        lo -= 0.5;
        hi += 0.5;
    }
    if (log) {
        lo = std::floor(lo);
        hi = std::ceil(hi);
        if (hi == lo) hi = lo + 1.0;
    } else {
        const double pad = 0.05 * (hi - lo);
        lo -= pad;
        hi += pad;
    }
    a.lo = lo;
    a.hi = hi;
    return a;
}

} // namespace

std::string render(const Plot& plot, int width, int height)
{
    const double left = 80, right = 20, top = 40, bottom = 60;
    const double pw = width - left - right;
    const double ph = height - top - bottom;

    std::vector<const std::vector<double>*> xs, ys;
    for (const auto& s : plot.series) {
        if (s.x.size() != s.y.size()) throw ConfigError("svg: series '" + s.label + "' has mismatched x/y lengths");
        xs.push_back(&s.x);
        ys.push_back(&s.y);
    }
    const Axis ax = fit_axis(plot.log_x, xs);
    const Axis ay = fit_axis(plot.log_y, ys);
    auto px = [&](double v) { return left + (ax.transform(v) - ax.lo) / (ax.hi - ax.lo) * pw; };
    auto py = [&](double v) { return top + ph - (ay.transform(v) - ay.lo) / (ay.hi - ay.lo) * ph; };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
       << "\" viewBox=\"0 0 " << width << ' ' << height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << fixed(width / 2.0) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
       << escape(plot.title) << "</text>\n";

    // grid and ticks
    for (double t : ax.ticks()) {
        const double x = px(t);
        os << "<line x1=\"" << fixed(x) << "\" y1=\"" << fixed(top) << "\" x2=\"" << fixed(x) << "\" y2=\""
           << fixed(top + ph) << "\" stroke=\"#e0e0e0\"/>\n";
        os << "<text x=\"" << fixed(x) << "\" y=\"" << fixed(top + ph + 16) << "\" text-anchor=\"middle\">"
           << tick_label(t) << "</text>\n";
    }
    for (double t : ay.ticks()) {
        const double y = py(t);
        os << "<line x1=\"" << fixed(left) << "\" y1=\"" << fixed(y) << "\" x2=\"" << fixed(left + pw) << "\" y2=\""
           << fixed(y) << "\" stroke=\"#e0e0e0\"/>\n";
        os << "<text x=\"" << fixed(left - 6) << "\" y=\"" << fixed(y + 4) << "\" text-anchor=\"end\">"
           << tick_label(t) << "</text>\n";
    }
    os << "<rect x=\"" << fixed(left) << "\" y=\"" << fixed(top) << "\" width=\"" << fixed(pw) << "\" height=\""
       << fixed(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
    os << "<text x=\"" << fixed(left + pw / 2) << "\" y=\"" << fixed(height - 16.0) << "\" text-anchor=\"middle\">"
       << escape(plot.x_label) << "</text>\n";
    os << "<text transform=\"translate(18," << fixed(top + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
       << escape(plot.y_label) << "</text>\n";

    for (const auto& s : plot.series) {
        if (s.style == Style::line) {
            // break the polyline at unusable points
            std::string pts;
            auto flush = [&] {
                if (!pts.empty())
                    os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"" << pts
                       << "\"/>\n";
                pts.clear();
            };
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                if (!ax.usable(s.x[i]) || !ay.usable(s.y[i])) {
                    flush();
                    continue;
                }
                if (!pts.empty()) pts += ' ';
                pts += fixed(px(s.x[i])) + "," + fixed(py(s.y[i]));
            }
            flush();
        } else {
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                if (!ax.usable(s.x[i]) || !ay.usable(s.y[i])) continue;
                os << "<circle cx=\"" << fixed(px(s.x[i])) << "\" cy=\"" << fixed(py(s.y[i])) << "\" r=\"3.5\" fill=\""
                   << s.color << "\"/>\n";
            }
        }
    }

    // legend
    double ly = top + 14;
    for (const auto& s : plot.series) {
        if (s.label.empty()) continue;
        const double lx = left + pw - 170;
        if (s.style == Style::line)
            os << "<line x1=\"" << fixed(lx) << "\" y1=\"" << fixed(ly - 4) << "\" x2=\"" << fixed(lx + 20) << "\" y2=\""
               << fixed(ly - 4) << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>\n";
        else
            os << "<circle cx=\"" << fixed(lx + 10) << "\" cy=\"" << fixed(ly - 4) << "\" r=\"3.5\" fill=\"" << s.color
               << "\"/>\n";
        os << "<text x=\"" << fixed(lx + 26) << "\" y=\"" << fixed(ly) << "\">" << escape(s.label) << "</text>\n";
        ly += 16;
    }
    os << "</svg>\n";
    return os.str();
}

} // namespace rgreedy::svg
