#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "analysis.hpp"
#include "geometry.hpp"
#include "norms.hpp"

namespace polyuniq {

class UnsupportedDimension : public std::invalid_argument
{
public:
    explicit UnsupportedDimension(const std::string& what) : std::invalid_argument(what) {}
};

namespace detail {

struct Canvas
{
    double radius;  // half-width of the plotted square in data units
    static constexpr double size = 400.0;
    static constexpr double margin = 40.0;

    double px(double x) const { return size / 2 + (size / 2 - margin) * x / radius; }
    double py(double y) const { return size / 2 - (size / 2 - margin) * y / radius; }
};

inline std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", std::abs(v) < 5e-4 ? 0.0 : v);
    return buf;
}

inline std::vector<Vec<double>> by_angle(std::vector<Vec<double>> pts)
{
    double cx = 0, cy = 0;
    for (const auto& p : pts) {
        cx += p[0];
        cy += p[1];
    }
    cx /= static_cast<double>(pts.size());
    cy /= static_cast<double>(pts.size());
    std::sort(pts.begin(), pts.end(), [&](const Vec<double>& a, const Vec<double>& b) {
        return std::atan2(a[1] - cy, a[0] - cx) < std::atan2(b[1] - cy, b[0] - cx);
    });
    return pts;
}

inline std::string header(const std::string& title)
{
    std::ostringstream o;
    o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"400\" height=\"400\" viewBox=\"0 0 400 400\">\n"
      << "<title>" << title << "</title>\n"
      << "<rect x=\"0\" y=\"0\" width=\"400\" height=\"400\" fill=\"white\"/>\n"
      << "<line x1=\"0\" y1=\"200.000\" x2=\"400\" y2=\"200.000\" stroke=\"#cccccc\"/>\n"
      << "<line x1=\"200.000\" y1=\"0\" x2=\"200.000\" y2=\"400\" stroke=\"#cccccc\"/>\n";
    return o.str();
}

inline std::string polygon(const Canvas& c, const std::vector<Vec<double>>& pts, const std::string& attrs)
{
    std::ostringstream o;
    o << "<polygon points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) o << (i ? " " : "") << fmt(c.px(pts[i][0])) << "," << fmt(c.py(pts[i][1]));
    o << "\" " << attrs << "/>\n";
    return o.str();
}

/** A line through the origin with direction d, clipped to the plotted square. */
inline std::string origin_line(const Canvas& c, double dx, double dy, const std::string& attrs)
{
    const double m = std::max(std::abs(dx), std::abs(dy));
    const double t = 0.95 * c.radius / m;
    std::ostringstream o;
    o << "<line x1=\"" << fmt(c.px(-t * dx)) << "\" y1=\"" << fmt(c.py(-t * dy)) << "\" x2=\"" << fmt(c.px(t * dx))
      << "\" y2=\"" << fmt(c.py(t * dy)) << "\" " << attrs << "/>\n";
    return o.str();
}

inline std::string text(const Canvas& c, double x, double y, const std::string& s)
{
    std::ostringstream o;
    o << "<text x=\"" << fmt(c.px(x)) << "\" y=\"" << fmt(c.py(y)) << "\" font-size=\"11\" text-anchor=\"middle\" "
      << "font-family=\"monospace\">" << s << "</text>\n";
    return o.str();
}

/** Proper faces of a 2-D dual ball with their labels. */
inline std::vector<Face> proper_faces_2d(const PolytopeNorm& n)
{
    std::vector<Face> out;
    if (n.kind == PolytopeNorm::Kind::slope) {
        for (const auto& m : enumerate_models(2))
            if (sup_level(m) > 0) out.push_back(subdifferential_face(n, to_rational(m)));
    } else {
        for (const auto& s : enumerate_sign_vectors(2))
            if (support_size(s) > 0) out.push_back(n.kind == PolytopeNorm::Kind::l1 ? Face::box(s, n.scale) : Face::cross(s, n.scale));
    }
    // Degenerate weights can produce the same face from several labels.
    std::vector<Face> unique;
    std::vector<std::vector<Vec<Rational>>> seen;
    for (auto& f : out) {
        auto v = f.vertices();
        if (std::find(seen.begin(), seen.end(), v) != seen.end()) continue;
        seen.push_back(v);
        unique.push_back(f);
    }
    return unique;
}

} // namespace detail

/**
 * The dual unit ball of a norm on R^2 with every proper face labelled, and,
 * when X is given, the line row(X) with the faces it meets highlighted.
 */
inline std::string dual_ball_svg(const PolytopeNorm& n, const RationalMatrix* x = nullptr)
{
    if (n.p != 2) throw UnsupportedDimension("dual-ball plots need p = 2");
    if (x && x->cols() != 2) throw UnsupportedDimension("matrix must have 2 columns");
    const Face ball = dual_ball(n);
    std::vector<Vec<double>> verts;
    double r = 0;
    for (const auto& v : ball.vertices()) {
        verts.push_back(to_double(v));
        r = std::max({r, std::abs(verts.back()[0]), std::abs(verts.back()[1])});
    }
    detail::Canvas c{r * 1.35};
    std::ostringstream o;
    o << detail::header("dual unit ball of the " + n.name() + " norm");
    o << detail::polygon(c, detail::by_angle(verts), "fill=\"#e8eef8\" stroke=\"#203060\" stroke-width=\"1.5\"");

    std::vector<Vec<Rational>> kernel;
    std::size_t rk = 0;
    if (x) {
        rk = rank(*x);
        kernel = kernel_basis(*x);
        if (rk == 1) {
            Vec<double> d;
            for (std::size_t i = 0; i < x->rows() && d.empty(); ++i)
                if (!is_zero(x->row(i))) d = to_double(x->row(i));
            o << detail::origin_line(c, d[0], d[1], "stroke=\"#c03030\" stroke-width=\"1.5\" stroke-dasharray=\"6,3\"");
        }
    }
    for (const Face& f : detail::proper_faces_2d(n)) {
        const auto fv = f.vertices();
        const bool hit = x && rk > 0 && face_intersects_rowspace(f, *x, kernel).has_value();
        const std::string colour = hit ? "#d02020" : "#203060";
        double mx = 0, my = 0;
        for (const auto& v : fv) {
            mx += to_double(v[0]);
            my += to_double(v[1]);
        }
        mx /= static_cast<double>(fv.size());
        my /= static_cast<double>(fv.size());
        if (fv.size() == 1) {
            o << "<circle cx=\"" << detail::fmt(c.px(mx)) << "\" cy=\"" << detail::fmt(c.py(my)) << "\" r=\""
              << (hit ? "5" : "3") << "\" fill=\"" << colour << "\"/>\n";
        } else if (hit) {
            o << "<line x1=\"" << detail::fmt(c.px(to_double(fv[0][0]))) << "\" y1=\"" << detail::fmt(c.py(to_double(fv[0][1])))
              << "\" x2=\"" << detail::fmt(c.px(to_double(fv[1][0]))) << "\" y2=\"" << detail::fmt(c.py(to_double(fv[1][1])))
              << "\" stroke=\"" << colour << "\" stroke-width=\"4\"/>\n";
        }
        const double len = std::hypot(mx, my);
        const double push = len > 0 ? 1.0 + 0.18 * r / len : 1.0;
        o << detail::text(c, mx * push, my * push, format_pattern(f.label()));
    }
    o << "</svg>\n";
    return o.str();
}

/**
 * The null polytope {u in R^2 : ||X'u||* <= 1} for n = 2 rows and rank 2,
 * optionally with a response y and its projection u.
 */
inline std::string null_polytope_svg(const RationalMatrix& x, const PolytopeNorm& n, const Vec<Rational>* y = nullptr,
                                     const Vec<Rational>* u = nullptr)
{
    if (x.rows() != 2) throw UnsupportedDimension("null-polytope plots need n = 2");
    if (rank(x) != 2) throw UnsupportedDimension("null-polytope plots need rank(X) = 2 (bounded polytope)");
    // Constraints a_l'u <= 1 with a_l = X V_l over primal-ball vertices V_l.
    std::vector<Vec<Rational>> rows;
    for (const auto& v : primal_ball_vertices(n)) {
        Vec<Rational> a = x * v;
        if (std::find(rows.begin(), rows.end(), a) == rows.end()) rows.push_back(a);
    }
    std::vector<Vec<Rational>> verts;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t k = i + 1; k < rows.size(); ++k) {
            RationalMatrix a = RationalMatrix::from_rows({rows[i], rows[k]});
            if (rank(a) < 2) continue;
            auto sol = solve_exact(a, {Rational(1), Rational(1)});
            if (!sol) continue;
            bool feasible = std::all_of(rows.begin(), rows.end(), [&](const Vec<Rational>& r) { return dot(r, *sol) <= 1; });
            if (feasible && std::find(verts.begin(), verts.end(), *sol) == verts.end()) verts.push_back(*sol);
        }
    }
    std::sort(verts.begin(), verts.end());
    std::vector<Vec<double>> dv;
    double r = 0;
    for (const auto& v : verts) {
        dv.push_back(to_double(v));
        r = std::max({r, std::abs(dv.back()[0]), std::abs(dv.back()[1])});
    }
    auto include = [&](const Vec<Rational>* p) {
        if (p) r = std::max({r, std::abs(to_double((*p)[0])), std::abs(to_double((*p)[1]))});
    };
    include(y);
    include(u);
    detail::Canvas c{r * 1.25};
    std::ostringstream o;
    o << detail::header("null polytope of the " + n.name() + " norm");
    o << detail::polygon(c, detail::by_angle(dv), "fill=\"#eef6ea\" stroke=\"#206030\" stroke-width=\"1.5\"");
    for (const auto& v : dv)
        o << "<circle cx=\"" << detail::fmt(c.px(v[0])) << "\" cy=\"" << detail::fmt(c.py(v[1])) << "\" r=\"3\" fill=\"#206030\"/>\n";
    if (y) {
        o << "<circle cx=\"" << detail::fmt(c.px(to_double((*y)[0]))) << "\" cy=\"" << detail::fmt(c.py(to_double((*y)[1])))
          << "\" r=\"4\" fill=\"#c03030\"/>\n";
        o << detail::text(c, to_double((*y)[0]), to_double((*y)[1]) + 0.06 * r, "y");
    }
    if (u) {
        o << "<circle cx=\"" << detail::fmt(c.px(to_double((*u)[0]))) << "\" cy=\"" << detail::fmt(c.py(to_double((*u)[1])))
          << "\" r=\"4\" fill=\"#3050c0\"/>\n";
        o << detail::text(c, to_double((*u)[0]), to_double((*u)[1]) - 0.1 * r, "u");
    }
    if (y && u) {
        o << "<line x1=\"" << detail::fmt(c.px(to_double((*y)[0]))) << "\" y1=\"" << detail::fmt(c.py(to_double((*y)[1])))
          << "\" x2=\"" << detail::fmt(c.px(to_double((*u)[0]))) << "\" y2=\"" << detail::fmt(c.py(to_double((*u)[1])))
          << "\" stroke=\"#808080\" stroke-dasharray=\"4,3\"/>\n";
    }
    o << "</svg>\n";
    return o.str();
}

} // namespace polyuniq
