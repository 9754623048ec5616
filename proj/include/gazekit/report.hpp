#ifndef GAZEKIT_REPORT_HPP
#define GAZEKIT_REPORT_HPP

#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gazekit/eval.hpp"
#include "gazekit/tracking.hpp"

namespace gazekit {

using Json = nlohmann::json;

inline Json report_to_json(const ErrorReport& rep) {
    Json j;
    j["mean_error_cm"] = rep.mean_error_cm;
    j["std_error_cm"] = rep.std_error_cm;
    j["mae_x_cm"] = rep.mae_x_cm;
    j["mae_y_cm"] = rep.mae_y_cm;
    j["sample_count"] = rep.sample_count;
    j["fingerprint"] = rep.fingerprint;
    j["per_subject"] = rep.per_subject;
    // angular band: true viewing distance is unknown, report 30/40/50 cm
    Json ang;
    for (double d : {30.0, 40.0, 50.0})
        ang[std::to_string(static_cast<int>(d))] = angular_error(rep.mean_error_cm, d);
    j["angular_error_deg"] = ang;
    return j;
}

inline void write_errors_csv(const ErrorReport& rep, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_errors_csv: cannot open " + path);
    out << "subject_id,session_id,posture,glasses,race,error_cm,abs_dx_cm,abs_dy_cm\n";
    out << std::setprecision(10);
    for (const auto& s : rep.samples)
        out << s.subject_id << ',' << s.session_id << ',' << to_string(s.posture) << ','
            << (s.glasses ? 1 : 0) << ',' << to_string(s.race) << ',' << s.error_cm << ','
            << s.abs_dx_cm << ',' << s.abs_dy_cm << "\n";
}

inline void write_track_csv(const GazeTrack& track, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_track_csv: cannot open " + path);
    out << "frame,raw_x_cm,raw_y_cm,filt_x_cm,filt_y_cm,blink\n";
    out << std::setprecision(10);
    for (const auto& e : track.entries) {
        out << e.frame_index << ',';
        if (e.raw)
            out << e.raw->x_cm << ',' << e.raw->y_cm << ',';
        else
            out << ",,";
        if (e.filtered)
            out << e.filtered->x_cm << ',' << e.filtered->y_cm << ',';
        else
            out << ",,";
        out << (e.blink ? 1 : 0) << "\n";
    }
}

namespace detail {

struct SvgCanvas {
    std::ostringstream body;
    int width, height;

    SvgCanvas(int w, int h) : width(w), height(h) {}

    void line(double x1, double y1, double x2, double y2, const std::string& color,
              double stroke = 1.0) {
        body << "<line x1=\"" << x1 << "\" y1=\"" << y1 << "\" x2=\"" << x2 << "\" y2=\"" << y2
             << "\" stroke=\"" << color << "\" stroke-width=\"" << stroke << "\"/>\n";
    }
    void rect(double x, double y, double w, double h, const std::string& fill) {
        body << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << w << "\" height=\"" << h
             << "\" fill=\"" << fill << "\"/>\n";
    }
    void circle(double cx, double cy, double r, const std::string& fill) {
        body << "<circle cx=\"" << cx << "\" cy=\"" << cy << "\" r=\"" << r << "\" fill=\"" << fill
             << "\"/>\n";
    }
    void text(double x, double y, const std::string& s, int size = 11) {
        body << "<text x=\"" << x << "\" y=\"" << y << "\" font-size=\"" << size
             << "\" font-family=\"sans-serif\">" << s << "</text>\n";
    }
    void save(const std::string& path) {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("SvgCanvas: cannot open " + path);
        out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
            << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n"
            << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
            << body.str() << "</svg>\n";
    }
};

}  // namespace detail

/// Bar chart of labeled values (sweep cells, partition groups).
inline void write_bar_chart_svg(const std::vector<std::pair<std::string, double>>& bars,
                                const std::string& title, const std::string& path) {
    const int w = 80 * std::max<int>(1, static_cast<int>(bars.size())) + 80, h = 320;
    detail::SvgCanvas svg(w, h);
    double maxv = 1e-9;
    for (const auto& [_, v] : bars) maxv = std::max(maxv, v);
    svg.text(10, 20, title, 13);
    const double base = h - 60.0, top = 40.0;
    for (size_t i = 0; i < bars.size(); ++i) {
        double bh = (base - top) * bars[i].second / maxv;
        double x = 50.0 + 80.0 * i;
        svg.rect(x, base - bh, 50, bh, "#4878a8");
        std::ostringstream v;
        v << std::fixed << std::setprecision(2) << bars[i].second;
        svg.text(x, base - bh - 5, v.str());
        svg.text(x, base + 16, bars[i].first, 10);
    }
    svg.line(40, base, w - 20.0, base, "black");
    svg.save(path);
}

/// Line chart (size-study curve).
inline void write_line_chart_svg(const std::vector<std::pair<double, double>>& points,
                                 const std::string& title, const std::string& path) {
    const int w = 520, h = 320;
    detail::SvgCanvas svg(w, h);
    svg.text(10, 20, title, 13);
    if (!points.empty()) {
        double xmin = points.front().first, xmax = points.back().first;
        double ymin = points[0].second, ymax = points[0].second;
        for (const auto& [x, y] : points) {
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
        if (xmax == xmin) xmax = xmin + 1;
        if (ymax == ymin) ymax = ymin + 1;
        auto px = [&](double x) { return 50 + (w - 90) * (x - xmin) / (xmax - xmin); };
        auto py = [&](double y) { return (h - 50) - (h - 100) * (y - ymin) / (ymax - ymin); };
        for (size_t i = 1; i < points.size(); ++i)
            svg.line(px(points[i - 1].first), py(points[i - 1].second), px(points[i].first),
                     py(points[i].second), "#4878a8", 2);
        for (const auto& [x, y] : points) svg.circle(px(x), py(y), 3, "#30506e");
        svg.line(50, h - 50.0, w - 40.0, h - 50.0, "black");
        svg.line(50, 50, 50, h - 50.0, "black");
    }
    svg.save(path);
}

/// Overlay of raw/filtered track points on the 5x7 target grid.
inline void write_track_overlay_svg(const GazeTrack& track, const ScreenGeometry& geom,
                                    const std::string& path) {
    const double scale = 24.0;
    const int w = static_cast<int>(geom.width_cm * scale) + 40;
    const int h = static_cast<int>(geom.height_cm * scale) + 40;
    detail::SvgCanvas svg(w, h);
    auto px = [&](double x) { return 20 + x * scale; };
    auto py = [&](double y) { return 20 + y * scale; };
    svg.rect(px(0), py(0), geom.width_cm * scale, geom.height_cm * scale, "#f2f2f2");
    for (int r = 0; r < geom.grid_rows; ++r)
        for (int c = 0; c < geom.grid_cols; ++c) {
            GazePoint p = grid_to_screen({r, c}, geom);
            svg.circle(px(p.x_cm), py(p.y_cm), 4, "#c0c0c0");
        }
    for (const auto& e : track.entries) {
        if (e.raw) svg.circle(px(e.raw->x_cm), py(e.raw->y_cm), 2, "#d08080");
        if (e.filtered) svg.circle(px(e.filtered->x_cm), py(e.filtered->y_cm), 2, "#4878a8");
    }
    svg.save(path);
}

}  // namespace gazekit

#endif
