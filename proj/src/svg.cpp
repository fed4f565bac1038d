#include "mkf/bench.hpp"

#include "mkf/errors.hpp"
#include "mkf/text.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace mkf {

std::vector<Series> series_from_rows(const std::vector<ResultRow>& rows, std::string_view metric,
                                     const std::function<double(const ResultRow&)>& x_of, bool split_components) {
    if (metric != "mae" && metric != "ssim") throw ConfigError("metric must be mae or ssim");
    std::vector<Series> out;
    std::map<std::string, std::size_t> index;
    for (const auto& r : rows) {
        std::string label = r.filter + ":" + r.params;
        if (split_components) label += " (" + r.component + ")";
        auto [it, inserted] = index.try_emplace(label, out.size());
        if (inserted) out.push_back({label, {}});
        out[it->second].points.emplace_back(x_of(r), metric == "mae" ? r.mae : r.ssim);
    }
    for (auto& s : out) std::sort(s.points.begin(), s.points.end());
    return out;
}

namespace {

std::string escape(std::string_view s) {
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

std::string tick_label(double v) {
    std::ostringstream os;
    os.precision(4);
    os << v;
    return os.str();
}

}  // namespace

std::string render_svg(const std::vector<Series>& series, std::string_view title, std::string_view x_label,
                       std::string_view y_label) {
    static constexpr const char* kColors[] = {"#0072bd", "#d95319", "#edb120", "#7e2f8e",
                                              "#77ac30", "#4dbeee", "#a2142f", "#333333"};
    constexpr double W = 720, H = 440, left = 70, right = 250, top = 40, bottom = 60;
    const double pw = W - left - right, ph = H - top - bottom;

    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& s : series) {
        for (const auto& [x, y] : s.points) {
            x0 = std::min(x0, x);
            x1 = std::max(x1, x);
            y0 = std::min(y0, y);
            y1 = std::max(y1, y);
        }
    }
    if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    if (x1 == x0) x1 = x0 + 1;
    if (y1 == y0) y1 = y0 + 1;
    const double pad = 0.05 * (y1 - y0);
    y0 -= pad;
    y1 += pad;
    auto sx = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
    auto sy = [&](double y) { return top + (1.0 - (y - y0) / (y1 - y0)) * ph; };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << left + pw / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(title) << "</text>\n";
    os << "<line x1=\"" << left << "\" y1=\"" << top + ph << "\" x2=\"" << left + pw << "\" y2=\"" << top + ph << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + ph << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double xv = x0 + (x1 - x0) * i / 5.0;
        const double yv = y0 + (y1 - y0) * i / 5.0;
        os << "<text x=\"" << sx(xv) << "\" y=\"" << top + ph + 16 << "\" text-anchor=\"middle\">" << tick_label(xv) << "</text>\n";
        os << "<text x=\"" << left - 6 << "\" y=\"" << sy(yv) + 4 << "\" text-anchor=\"end\">" << tick_label(yv) << "</text>\n";
        os << "<line x1=\"" << left << "\" y1=\"" << sy(yv) << "\" x2=\"" << left + pw << "\" y2=\"" << sy(yv) << "\" stroke=\"#ddd\"/>\n";
    }
    os << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 18 << "\" text-anchor=\"middle\">" << escape(x_label) << "</text>\n";
    os << "<text x=\"18\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " << top + ph / 2 << ")\">" << escape(y_label) << "</text>\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        const char* color = kColors[i % std::size(kColors)];
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (const auto& [x, y] : series[i].points) os << sx(x) << ',' << sy(y) << ' ';
        os << "\"/>\n";
        const double ly = top + 14 + 18.0 * static_cast<double>(i);
        os << "<line x1=\"" << left + pw + 12 << "\" y1=\"" << ly - 4 << "\" x2=\"" << left + pw + 32 << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        os << "<text x=\"" << left + pw + 38 << "\" y=\"" << ly << "\" font-size=\"9\">" << escape(series[i].label) << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace mkf
