#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "surfsim/experiment.hpp"
#include "surfsim/fit.hpp"

namespace surfsim {

// Hand-rolled SVG scatter of p_l vs p, one series per code distance, with
// +-2 sigma error bars, optional fit-curve overlays and a threshold marker.
inline void write_svg_plot(const std::vector<SweepPoint>& points, const FitResult* fit,
                           std::ostream& os) {
    if (points.empty()) throw std::invalid_argument("plot: no data points");

    const double W = 760, H = 540, ML = 80, MR = 30, MT = 30, MB = 60;
    double pmin = points[0].p, pmax = points[0].p, ymin = 0.0, ymax = 0.0;
    for (const auto& pt : points) {
        pmin = std::min(pmin, pt.p);
        pmax = std::max(pmax, pt.p);
        ymax = std::max(ymax, pt.p_l + 2 * pt.stderr_);
    }
    if (fit) {
        pmin = std::min(pmin, fit->p_th);
        pmax = std::max(pmax, fit->p_th);
    }
    double pad = (pmax - pmin) * 0.05 + 1e-12;
    pmin -= pad;
    pmax += pad;
    ymax *= 1.05;
    if (ymax <= 0.0) ymax = 1.0;

    auto sx = [&](double p) { return ML + (p - pmin) / (pmax - pmin) * (W - ML - MR); };
    auto sy = [&](double y) {
        return H - MB - (y - ymin) / (ymax - ymin) * (H - MT - MB);
    };
    auto fmt = [](double v) {
        char b[32];
        std::snprintf(b, sizeof b, "%g", v);
        return std::string(b);
    };

    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

    std::vector<int> ds;
    for (const auto& pt : points) ds.push_back(pt.d);
    std::sort(ds.begin(), ds.end());
    ds.erase(std::unique(ds.begin(), ds.end()), ds.end());

    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\""
       << H << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    os << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";

    // Axes with a handful of ticks.
    os << "<g class=\"axes\" stroke=\"black\" fill=\"none\">\n";
    os << "<line x1=\"" << ML << "\" y1=\"" << H - MB << "\" x2=\"" << W - MR
       << "\" y2=\"" << H - MB << "\"/>\n";
    os << "<line x1=\"" << ML << "\" y1=\"" << MT << "\" x2=\"" << ML << "\" y2=\""
       << H - MB << "\"/>\n";
    os << "</g>\n<g class=\"ticks\" font-size=\"12\" text-anchor=\"middle\">\n";
    for (int k = 0; k <= 5; ++k) {
        double p = pmin + (pmax - pmin) * k / 5.0;
        os << "<line stroke=\"black\" x1=\"" << sx(p) << "\" y1=\"" << H - MB
           << "\" x2=\"" << sx(p) << "\" y2=\"" << H - MB + 5 << "\"/>\n";
        os << "<text x=\"" << sx(p) << "\" y=\"" << H - MB + 20 << "\">" << fmt(p)
           << "</text>\n";
        double y = ymin + (ymax - ymin) * k / 5.0;
        os << "<line stroke=\"black\" x1=\"" << ML - 5 << "\" y1=\"" << sy(y)
           << "\" x2=\"" << ML << "\" y2=\"" << sy(y) << "\"/>\n";
        os << "<text text-anchor=\"end\" x=\"" << ML - 8 << "\" y=\"" << sy(y) + 4
           << "\">" << fmt(y) << "</text>\n";
    }
    os << "<text x=\"" << (ML + W - MR) / 2 << "\" y=\"" << H - 15
       << "\">physical error rate p</text>\n";
    os << "<text transform=\"rotate(-90 20 " << (MT + H - MB) / 2 << ")\" x=\"20\" y=\""
       << (MT + H - MB) / 2 << "\">logical error rate p_L</text>\n";
    os << "</g>\n";

    for (size_t di = 0; di < ds.size(); ++di) {
        int d = ds[di];
        const char* color = palette[di % 8];
        std::vector<const SweepPoint*> series;
        for (const auto& pt : points)
            if (pt.d == d) series.push_back(&pt);
        std::sort(series.begin(), series.end(),
                  [](const SweepPoint* a, const SweepPoint* b) { return a->p < b->p; });
        os << "<g class=\"series\" data-d=\"" << d << "\" stroke=\"" << color
           << "\" fill=\"" << color << "\">\n";
        os << "<polyline fill=\"none\" points=\"";
        for (const auto* pt : series) os << sx(pt->p) << "," << sy(pt->p_l) << " ";
        os << "\"/>\n";
        for (const auto* pt : series) {
            double lo = std::max(ymin, pt->p_l - 2 * pt->stderr_);
            double hi = std::min(ymax, pt->p_l + 2 * pt->stderr_);
            os << "<line class=\"errbar\" x1=\"" << sx(pt->p) << "\" y1=\"" << sy(lo)
               << "\" x2=\"" << sx(pt->p) << "\" y2=\"" << sy(hi) << "\"/>\n";
            os << "<circle cx=\"" << sx(pt->p) << "\" cy=\"" << sy(pt->p_l)
               << "\" r=\"3\"/>\n";
        }
        os << "<text stroke=\"none\" font-size=\"12\" x=\"" << W - MR - 60 << "\" y=\""
           << MT + 18 * (di + 1) << "\">d = " << d << "</text>\n";
        os << "</g>\n";
    }

    if (fit) {
        for (size_t di = 0; di < ds.size(); ++di) {
            int d = ds[di];
            os << "<path class=\"fit\" data-d=\"" << d << "\" fill=\"none\" stroke=\""
               << palette[di % 8] << "\" stroke-dasharray=\"5,4\" d=\"";
            const int steps = 100;
            bool first = true;
            for (int k = 0; k <= steps; ++k) {
                double p = pmin + (pmax - pmin) * k / steps;
                double y = fit_eval(*fit, p, d);
                if (y < ymin || y > ymax) {
                    first = true;
                    continue;
                }
                os << (first ? "M" : "L") << sx(p) << " " << sy(y) << " ";
                first = false;
            }
            os << "\"/>\n";
        }
        os << "<line class=\"pth-marker\" stroke=\"black\" stroke-dasharray=\"2,3\" "
              "x1=\""
           << sx(fit->p_th) << "\" y1=\"" << MT << "\" x2=\"" << sx(fit->p_th)
           << "\" y2=\"" << H - MB << "\"/>\n";
        os << "<text font-size=\"12\" x=\"" << sx(fit->p_th) + 4 << "\" y=\"" << MT + 12
           << "\">p_th = " << fmt(fit->p_th) << "</text>\n";
    }
    os << "</svg>\n";
}

}  // namespace surfsim
