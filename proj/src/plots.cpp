#include <fstream>
#include <iostream>
#include <sstream>

#include "fgl/cli_io.hpp"
#include "fgl/errors.hpp"

namespace fgl {

namespace {

std::string fmt_point(Complex z) {
  std::ostringstream os;
  os.precision(6);
  // SVG's y axis points down.
  os << z.real() << ',' << -z.imag();
  return os.str();
}

}  // namespace

void write_contour_svg(std::ostream& os, const Contour& c) {
  const double rho = c.chart_radius > 0 ? c.chart_radius : 1.0;
  const double half = 1.1 * rho;
  const double stroke = half / 300;
  os.precision(6);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << -half << ' ' << -half << ' '
     << 2 * half << ' ' << 2 * half << "\">\n";
  os << "<circle cx=\"0\" cy=\"0\" r=\"" << rho << "\" fill=\"none\" stroke=\"#ccc\" stroke-width=\""
     << stroke << "\"/>\n";
  os << "<!-- level " << c.level << " -->\n";
  for (const Polyline& poly : c.components) {
    const std::size_t m = poly.nodes.size();
    const auto visible = [&](const ContourNode& n) {
      return n.chart == Chart::z || std::abs(n.value) > 1.0 / half;
    };
    std::string d;
    bool pen_down = false;
    for (std::size_t s = 0; s <= m; ++s) {
      const ContourNode& n = poly.nodes[s % m];
      if (!visible(n)) {
        pen_down = false;
        continue;
      }
      d += (pen_down ? " L" : " M") + fmt_point(n.z());
      pen_down = true;
    }
    if (!d.empty()) {
      os << "<path d=\"" << d.substr(1) << "\" fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\""
         << stroke << "\"/>\n";
    }
    // A few arrowheads along the orientation.
    const std::size_t step = std::max<std::size_t>(1, m / 6);
    for (std::size_t s = step / 2; s < m; s += step) {
      const ContourNode& a = poly.nodes[s];
      const ContourNode& b = poly.nodes[(s + 1) % m];
      if (!visible(a) || !visible(b)) continue;
      const Complex za = a.z();
      const Complex t = b.z() - za;
      if (std::abs(t) == 0) continue;
      const Complex u = t / std::abs(t) * (6 * stroke);
      const Complex tip = za + u;
      const Complex left = za - u * std::polar(1.0, 0.5);
      const Complex right = za - u * std::polar(1.0, -0.5);
      os << "<polygon points=\"" << fmt_point(tip) << ' ' << fmt_point(left) << ' '
         << fmt_point(right) << "\" fill=\"#1f4e9c\"/>\n";
    }
  }
  os << "</svg>\n";
}

void write_decay_csv(std::ostream& os, const std::vector<DecayRow>& rows) {
  os.precision(17);
  os << "series,l1,max_abs_G,max_ratio\n";
  for (const DecayRow& r : rows) {
    os << r.series << ',' << r.l1 << ',' << r.max_abs_g << ',' << r.max_ratio << '\n';
  }
}

std::vector<std::filesystem::path> emit_plots(const PlotArtifacts& a,
                                              const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> written;
  if (a.contours.empty() && a.decay.empty()) {
    std::cerr << "warning: no plot artifacts to emit\n";
    return written;
  }
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  const auto open = [&](const std::filesystem::path& p) {
    std::ofstream out(p);
    if (!out) throw IoError("cannot write " + p.string());
    written.push_back(p);
    return out;
  };
  for (std::size_t i = 0; i < a.contours.size(); ++i) {
    std::ofstream out = open(dir / ("contour_" + std::to_string(i) + ".svg"));
    write_contour_svg(out, a.contours[i]);
  }
  if (!a.decay.empty()) {
    std::ofstream out = open(dir / "decay.csv");
    write_decay_csv(out, a.decay);
  }
  return written;
}

}  // namespace fgl
