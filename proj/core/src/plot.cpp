#include <dsreg/plot.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <string>

#include <dsreg/error.hpp>

namespace dsreg {

namespace {

constexpr const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                   "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};

std::string fmt(const char* f, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
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

} // namespace

std::string emit_plot(const std::vector<SweepRow>& rows, const PlotSpec& spec)
{
    if (spec.width < 200 || spec.height < 150) throw InvalidInput("emit_plot: canvas too small");
    // Series in order of first appearance, points sorted by n.
    std::vector<std::string> order;
    std::map<std::string, std::vector<std::pair<double, double>>> series;
    for (const SweepRow& r : rows) {
        if (r.metric != spec.metric || !std::isfinite(r.value)) continue;
        if (!series.count(r.method)) order.push_back(r.method);
        series[r.method].emplace_back(static_cast<double>(r.n), r.value);
    }
    if (order.empty()) throw InvalidInput("emit_plot: no finite values for metric '" + spec.metric + "'");
    double x0 = 1e300, x1 = -1e300, y0 = 0.0, y1 = -1e300;
    for (auto& [name, pts] : series) {
        std::sort(pts.begin(), pts.end());
        for (auto [x, y] : pts) {
            x0 = std::min(x0, x);
            x1 = std::max(x1, x);
            y0 = std::min(y0, y);
            y1 = std::max(y1, y);
        }
    }
    if (x1 <= x0) {
        x0 -= 1.0;
        x1 += 1.0;
    }
    if (y1 <= y0) y1 = y0 + 1.0;

    const double left = 70, right = 150, top = 40, bottom = 55;
    const double pw = spec.width - left - right;
    const double ph = spec.height - top - bottom;
    auto sx = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
    auto sy = [&](double y) { return top + ph - (y - y0) / (y1 - y0) * ph; };

    std::string svg;
    svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + std::to_string(spec.width) +
           "\" height=\"" + std::to_string(spec.height) + "\">\n";
    svg += "<rect x=\"0\" y=\"0\" width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += "<text x=\"" + fmt("%.1f", left + pw / 2) + "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">" +
           escape(spec.title.empty() ? spec.metric : spec.title) + "</text>\n";

    svg += "<g stroke=\"black\" stroke-width=\"1\">\n";
    svg += "<line x1=\"" + fmt("%.1f", left) + "\" y1=\"" + fmt("%.1f", top + ph) + "\" x2=\"" + fmt("%.1f", left + pw) +
           "\" y2=\"" + fmt("%.1f", top + ph) + "\"/>\n";
    svg += "<line x1=\"" + fmt("%.1f", left) + "\" y1=\"" + fmt("%.1f", top) + "\" x2=\"" + fmt("%.1f", left) +
           "\" y2=\"" + fmt("%.1f", top + ph) + "\"/>\n";
    svg += "</g>\n<g font-family=\"sans-serif\" font-size=\"11\">\n";
    for (int t = 0; t <= 5; ++t) {
        const double xv = x0 + (x1 - x0) * t / 5.0;
        const double yv = y0 + (y1 - y0) * t / 5.0;
        svg += "<text x=\"" + fmt("%.1f", sx(xv)) + "\" y=\"" + fmt("%.1f", top + ph + 16) +
               "\" text-anchor=\"middle\">" + fmt("%.4g", xv) + "</text>\n";
        svg += "<text x=\"" + fmt("%.1f", left - 6) + "\" y=\"" + fmt("%.1f", sy(yv) + 4) +
               "\" text-anchor=\"end\">" + fmt("%.3g", yv) + "</text>\n";
        svg += "<line x1=\"" + fmt("%.1f", left) + "\" y1=\"" + fmt("%.1f", sy(yv)) + "\" x2=\"" + fmt("%.1f", left + pw) +
               "\" y2=\"" + fmt("%.1f", sy(yv)) + "\" stroke=\"#dddddd\"/>\n";
    }
    svg += "<text x=\"" + fmt("%.1f", left + pw / 2) + "\" y=\"" + fmt("%.1f", spec.height - 12.0) +
           "\" text-anchor=\"middle\">" + escape(spec.x_label) + "</text>\n";
    svg += "<text x=\"16\" y=\"" + fmt("%.1f", top + ph / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
           fmt("%.1f", top + ph / 2) + ")\">" + escape(spec.y_label.empty() ? spec.metric : spec.y_label) + "</text>\n";
    svg += "</g>\n";

    for (std::size_t k = 0; k < order.size(); ++k) {
        const auto& pts = series[order[k]];
        const char* color = palette[k % std::size(palette)];
        std::string path;
        for (auto [x, y] : pts) path += fmt("%.2f", sx(x)) + "," + fmt("%.2f", sy(y)) + " ";
        path.pop_back();
        svg += "<g stroke=\"" + std::string(color) + "\" fill=\"" + color + "\">\n";
        if (pts.size() > 1) svg += "<polyline fill=\"none\" stroke-width=\"2\" points=\"" + path + "\"/>\n";
        for (auto [x, y] : pts) {
            svg += "<circle cx=\"" + fmt("%.2f", sx(x)) + "\" cy=\"" + fmt("%.2f", sy(y)) + "\" r=\"3\"/>\n";
        }
        const double ly = top + 14.0 + 18.0 * static_cast<double>(k);
        svg += "<line x1=\"" + fmt("%.1f", left + pw + 12) + "\" y1=\"" + fmt("%.1f", ly) + "\" x2=\"" +
               fmt("%.1f", left + pw + 32) + "\" y2=\"" + fmt("%.1f", ly) + "\" stroke-width=\"2\"/>\n";
        svg += "<text x=\"" + fmt("%.1f", left + pw + 38) + "\" y=\"" + fmt("%.1f", ly + 4) +
               "\" stroke=\"none\" font-family=\"sans-serif\" font-size=\"12\">" + escape(order[k]) + "</text>\n";
        svg += "</g>\n";
    }
    svg += "</svg>\n";
    return svg;
}

void write_plot(const std::filesystem::path& path, const std::vector<SweepRow>& rows,
                const PlotSpec& spec)
{
    const std::string svg = emit_plot(rows, spec);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidInput("write_plot: cannot write " + path.string());
    out << svg;
}

} // namespace dsreg
