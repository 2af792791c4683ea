// nnmetric: minimal deterministic SVG emitter for planar scenes (sites,
// Steiner points, witness polylines). Output depends only on the inputs.
// SPDX-License-Identifier: MIT
#pragma once

#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "nnmetric/core.hpp"
#include "nnmetric/path.hpp"

namespace nnm {

/// Maps a planar domain box onto a pixel canvas (y flipped so larger y is up)
/// and collects shapes; polylines are emitted one <line> per segment.
class SvgBuilder {
  public:
    explicit SvgBuilder(const BoundingBox& domain, double width_px = 640.0) {
        if (domain.dim() != 2) throw std::invalid_argument("SvgBuilder: domain must be planar");
        const double pad = 0.05 * (domain.max_extent() > 0 ? domain.max_extent() : 1.0);
        lo_ = {domain.lo[0] - pad, domain.lo[1] - pad};
        hi_ = {domain.hi[0] + pad, domain.hi[1] + pad};
        w_px_ = width_px;
        h_px_ = width_px * (hi_[1] - lo_[1]) / (hi_[0] - lo_[0]);
        body_ << std::setprecision(8);
    }

    void add_circle(double x, double y, double radius_px, const std::string& fill) {
        body_ << "  <circle cx=\"" << sx(x) << "\" cy=\"" << sy(y) << "\" r=\"" << radius_px
              << "\" fill=\"" << fill << "\"/>\n";
    }

    void add_line(double x1, double y1, double x2, double y2, const std::string& stroke,
                  double width_px) {
        body_ << "  <line x1=\"" << sx(x1) << "\" y1=\"" << sy(y1) << "\" x2=\"" << sx(x2)
              << "\" y2=\"" << sy(y2) << "\" stroke=\"" << stroke << "\" stroke-width=\""
              << width_px << "\" stroke-linecap=\"round\"/>\n";
    }

    void add_polyline(const PolylinePath& path, const std::string& stroke, double width_px) {
        if (path.dim() != 2) throw std::invalid_argument("SvgBuilder: polyline must be planar");
        for (std::size_t s = 0; s + 1 < path.num_vertices(); ++s) {
            const double* a = path.vertex_ptr(s);
            const double* b = path.vertex_ptr(s + 1);
            add_line(a[0], a[1], b[0], b[1], stroke, width_px);
        }
    }

    std::string str() const {
        std::ostringstream out;
        out << std::setprecision(8);
        out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << w_px_ << ' '
            << h_px_ << "\">\n";
        out << "  <rect x=\"0\" y=\"0\" width=\"" << w_px_ << "\" height=\"" << h_px_
            << "\" fill=\"#ffffff\"/>\n";
        out << body_.str();
        out << "</svg>\n";
        return out.str();
    }

  private:
    double sx(double x) const { return (x - lo_[0]) / (hi_[0] - lo_[0]) * w_px_; }
    double sy(double y) const { return h_px_ - (y - lo_[1]) / (hi_[1] - lo_[1]) * h_px_; }

    Vec lo_, hi_;
    double w_px_ = 0.0, h_px_ = 0.0;
    std::ostringstream body_;
};

/// Standard scene: sites as large dots, optional Steiner points as small
/// dots, witness polylines on top.
inline std::string render_scene_svg(const PointSet& ps, const std::vector<PolylinePath>& paths,
                                    const std::vector<Vec>& steiner = {}) {
    if (ps.dim() != 2) throw std::invalid_argument("render_scene_svg: d must be 2");
    std::vector<double> flat(ps.data(), ps.data() + ps.size() * 2);
    for (const Vec& s : steiner) flat.insert(flat.end(), s.begin(), s.end());
    for (const PolylinePath& p : paths)
        for (std::size_t v = 0; v < p.num_vertices(); ++v)
            flat.insert(flat.end(), p.vertex_ptr(v), p.vertex_ptr(v) + 2);
    SvgBuilder svg(BoundingBox::of_points(flat.data(), flat.size() / 2, 2));
    for (const Vec& s : steiner) svg.add_circle(s[0], s[1], 1.2, "#9ecae1");
    for (const PolylinePath& p : paths) svg.add_polyline(p, "#d95f02", 2.0);
    for (std::size_t i = 0; i < ps.size(); ++i) {
        const double* p = ps.point_ptr(i);
        svg.add_circle(p[0], p[1], 4.0, "#1b1b1b");
    }
    return svg.str();
}

inline void write_svg_file(const std::string& path, const std::string& svg) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_svg_file: cannot open " + path);
    out << svg;
    if (!out) throw std::runtime_error("write_svg_file: write failed for " + path);
}

}  // namespace nnm
