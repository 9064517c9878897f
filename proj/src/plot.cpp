#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "conefpp/experiment.hpp"

namespace conefpp {

namespace {

using nlohmann::json;

constexpr double kW = 640, kH = 480, kPad = 56;

struct Frame {
    double x0, x1, y0, y1;
    bool logx = false, logy = false;

    double tx(double x) const {
        if (logx) x = std::log10(x);
        return kPad + (x - x0) / (x1 - x0) * (kW - 2 * kPad);
    }
    double ty(double y) const {
        if (logy) y = std::log10(y);
        return kH - kPad - (y - y0) / (y1 - y0) * (kH - 2 * kPad);
    }
};

std::string num(double v) {
    std::ostringstream os;
    os << std::setprecision(6) << v;
    return os.str();
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            default: out += c;
        }
    }
    return out;
}

void pad_range(double& lo, double& hi) {
    if (!(hi > lo)) {
        lo -= 0.5;
        hi += 0.5;
    }
    const double m = 0.05 * (hi - lo);
    lo -= m;
    hi += m;
}

struct Svg {
    std::ostringstream os;

    explicit Svg(const std::string& title) {
        os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
           << "\" viewBox=\"0 0 " << kW << ' ' << kH << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
           << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
           << "<text x=\"" << kW / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << escape(title)
           << "</text>\n";
    }
    void text(double x, double y, const std::string& s, const char* anchor = "start") {
        os << "<text x=\"" << num(x) << "\" y=\"" << num(y) << "\" text-anchor=\"" << anchor << "\">" << escape(s)
           << "</text>\n";
    }
    void line(double x0, double y0, double x1, double y1, const char* stroke, const char* extra = "") {
        os << "<line x1=\"" << num(x0) << "\" y1=\"" << num(y0) << "\" x2=\"" << num(x1) << "\" y2=\"" << num(y1)
           << "\" stroke=\"" << stroke << "\" " << extra << "/>\n";
    }
    void polyline(const std::vector<std::pair<double, double>>& pts, const char* stroke, bool closed,
                  const char* extra = "") {
        os << '<' << (closed ? "polygon" : "polyline") << " fill=\"none\" stroke=\"" << stroke << "\" " << extra
           << " points=\"";
        for (const auto& [x, y] : pts) os << num(x) << ',' << num(y) << ' ';
        os << "\"/>\n";
    }
    void axes(const Frame& f, const std::string& xlabel, const std::string& ylabel) {
        line(kPad, kH - kPad, kW - kPad, kH - kPad, "black");
        line(kPad, kPad, kPad, kH - kPad, "black");
        auto lab = [](double v, bool lg) { return num(lg ? std::pow(10.0, v) : v); };
        text(kPad, kH - kPad + 16, lab(f.x0, f.logx), "middle");
        text(kW - kPad, kH - kPad + 16, lab(f.x1, f.logx), "middle");
        text(kPad - 4, kH - kPad, lab(f.y0, f.logy), "end");
        text(kPad - 4, kPad + 4, lab(f.y1, f.logy), "end");
        text(kW / 2, kH - 14, xlabel, "middle");
        os << "<text x=\"16\" y=\"" << kH / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << kH / 2
           << ")\">" << escape(ylabel) << "</text>\n";
    }
    std::string finish() {
        os << "</svg>\n";
        return os.str();
    }
};

std::string shape_svg(const json& p) {
    const double t = p.at("t").get<double>(), eps = p.at("epsilon").get<double>();
    std::vector<std::pair<double, double>> poly;
    for (const auto& v : p.at("polygon")) poly.emplace_back(v[0].get<double>() * t, v[1].get<double>() * t);
    double r = 1.0;
    for (const auto& [x, y] : poly) r = std::max({r, std::abs(x), std::abs(y)});
    for (const auto& row : p.at("rows"))
        r = std::max({r, std::abs(row[0].get<double>()), std::abs(row[1].get<double>()), std::abs(row[2].get<double>())});
    r *= (1 + eps) * 1.05;
    const Frame f{-r, r, -r, r};
    Svg s("reached set at t = " + num(t));
    s.axes(f, "x", "y");
    // Reached cells as one rectangle per row span.
    s.os << "<g fill=\"#9ecae1\" stroke=\"none\">\n";
    const double cw = f.tx(1) - f.tx(0);
    for (const auto& row : p.at("rows")) {
        const double y = row[0].get<double>(), a = row[1].get<double>(), b = row[2].get<double>();
        s.os << "<rect x=\"" << num(f.tx(a - 0.5)) << "\" y=\"" << num(f.ty(y + 0.5)) << "\" width=\""
             << num((b - a + 1) * cw) << "\" height=\"" << num(cw) << "\"/>\n";
    }
    s.os << "</g>\n";
    for (double k : {1 - eps, 1.0, 1 + eps}) {
        std::vector<std::pair<double, double>> pts;
        for (const auto& [x, y] : poly) pts.emplace_back(f.tx(k * x), f.ty(k * y));
        s.polyline(pts, k == 1.0 ? "#08306b" : "#e6550d", true, k == 1.0 ? "stroke-width=\"2\"" : "stroke-dasharray=\"4 3\"");
    }
    if (p.contains("cone")) {
        const auto u = p["cone"]["u"].get<std::vector<double>>();
        const double c = p["cone"]["c"].get<double>();
        const double len = std::hypot(u[0], u[1]), half = std::asin(std::min(1.0, c));
        for (double sg : {-1.0, 1.0}) {
            const double a = std::atan2(u[1], u[0]) + sg * half;
            s.line(f.tx(0), f.ty(0), f.tx(r * std::cos(a)), f.ty(r * std::sin(a)), "gray", "stroke-dasharray=\"2 2\"");
        }
        (void)len;
    }
    s.text(kW - kPad, kPad - 8, "limit shape x t, dashed: 1 +/- " + num(eps), "end");
    return s.finish();
}

std::string trajectory_svg(const json& p) {
    const auto bp = p.at("breakpoints").get<std::vector<double>>();
    const auto v = p.at("values").get<std::vector<double>>();
    const auto w = p.at("window").get<std::vector<double>>();
    const double hat = p.at("hat").get<double>(), lo = p.at("min").get<double>(), mu = p.at("mu_z").get<double>();
    double y0 = std::min({lo, mu}), y1 = std::max({hat, mu});
    for (double x : v) {
        y0 = std::min(y0, x);
        y1 = std::max(y1, x);
    }
    pad_range(y0, y1);
    double x0 = w[0], x1 = w[1];
    pad_range(x0, x1);
    const Frame f{x0, x1, y0, y1};
    Svg s("travel time trajectory");
    s.axes(f, "s", "T(s)");
    std::vector<std::pair<double, double>> pts;
    for (std::size_t k = 0; k < v.size(); ++k) {
        const double end = k + 1 < bp.size() ? bp[k + 1] : w[1];
        pts.emplace_back(f.tx(bp[k]), f.ty(v[k]));
        pts.emplace_back(f.tx(end), f.ty(v[k]));
    }
    s.polyline(pts, "#08306b", false, "stroke-width=\"1.5\"");
    s.line(f.tx(w[0]), f.ty(hat), f.tx(w[1]), f.ty(hat), "#e6550d", "stroke-dasharray=\"4 3\"");
    s.line(f.tx(w[0]), f.ty(lo), f.tx(w[1]), f.ty(lo), "#31a354", "stroke-dasharray=\"4 3\"");
    s.line(f.tx(w[0]), f.ty(mu), f.tx(w[1]), f.ty(mu), "gray");
    s.text(kW - kPad, kPad - 8, "orange: window-max cost, green: window-min cost, gray: mu(z)", "end");
    return s.finish();
}

std::string trend_svg(const json& p) {
    const auto xs = p.at("x").get<std::vector<double>>();
    const auto ys = p.at("y").get<std::vector<double>>();
    const bool lg = p.value("log", false);
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (lg && (xs[i] <= 0 || ys[i] <= 0)) continue;
        x0 = std::min(x0, lg ? std::log10(xs[i]) : xs[i]);
        x1 = std::max(x1, lg ? std::log10(xs[i]) : xs[i]);
        y0 = std::min(y0, lg ? std::log10(ys[i]) : ys[i]);
        y1 = std::max(y1, lg ? std::log10(ys[i]) : ys[i]);
    }
    if (!std::isfinite(x0)) x0 = x1 = y0 = y1 = 0;
    pad_range(x0, x1);
    pad_range(y0, y1);
    const Frame f{x0, x1, y0, y1, lg, lg};
    Svg s(p.value("ylabel", std::string("value")));
    s.axes(f, p.value("xlabel", std::string("x")), p.value("ylabel", std::string("y")));
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (lg && (xs[i] <= 0 || ys[i] <= 0)) continue;
        pts.emplace_back(f.tx(xs[i]), f.ty(ys[i]));
    }
    s.polyline(pts, "#08306b", false, "stroke-width=\"1.5\"");
    for (const auto& [x, y] : pts)
        s.os << "<circle cx=\"" << num(x) << "\" cy=\"" << num(y) << "\" r=\"2.5\" fill=\"#08306b\"/>\n";
    if (p.contains("note")) s.text(kW - kPad, kPad - 8, p["note"].get<std::string>(), "end");
    return s.finish();
}

}  // namespace

std::string emit_plot(const nlohmann::json& result) {
    if (!result.is_object() || !result.contains("plot") || !result["plot"].is_object())
        throw Error(ErrorKind::NoPlot, "result has no plottable record");
    const auto& p = result["plot"];
    const std::string type = p.value("type", std::string());
    try {
        if (type == "shape") return shape_svg(p);
        if (type == "trajectory") return trajectory_svg(p);
        if (type == "trend") return trend_svg(p);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::NoPlot, std::string("malformed plot record: ") + e.what());
    }
    throw Error(ErrorKind::NoPlot, "no plot for record type \"" + type + "\"");
}

}  // namespace conefpp
