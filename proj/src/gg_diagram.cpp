#include "raceplan/gg_diagram.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <stdexcept>

#include "csv_util.hpp"

namespace raceplan {

namespace {

constexpr double kEnvelopeFloor = 0.1;  // [m/s^2]

void validate_grid(const std::vector<double>& grid, const char* name) {
  if (grid.empty()) throw std::runtime_error(std::string("gg: empty ") + name + " grid");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (grid[i] <= grid[i - 1])
      throw std::runtime_error(std::string("gg: ") + name + " grid must be strictly increasing");
  }
}

std::size_t lower_cell(const std::vector<double>& grid, double value) {
  if (grid.size() == 1) return 0;
  auto it = std::upper_bound(grid.begin(), grid.end(), value);
  std::size_t idx = static_cast<std::size_t>(std::distance(grid.begin(), it));
  if (idx == 0) return 0;
  if (idx >= grid.size()) return grid.size() - 2;
  return idx - 1;
}

}  // namespace

GgLookup GgLookup::from_tables(std::vector<double> v_grid, std::vector<double> g_grid,
                               std::vector<double> ax_min, std::vector<double> ax_max,
                               std::vector<double> ay_max, std::vector<double> p) {
  validate_grid(v_grid, "v");
  validate_grid(g_grid, "g_tilde");
  const std::size_t cells = v_grid.size() * g_grid.size();
  if (ax_min.size() != cells || ax_max.size() != cells || ay_max.size() != cells || p.size() != cells)
    throw std::runtime_error("gg: table size does not match grid");
  for (std::size_t i = 0; i < cells; ++i) {
    if (p[i] < 1.0 || p[i] > 2.0)
      throw std::runtime_error("gg: shape factor p outside [1, 2]: " + detail::fmt_double(p[i]));
    if (!(ax_min[i] < 0.0))
      throw std::runtime_error("gg: ax_min must be negative, got " + detail::fmt_double(ax_min[i]));
    if (!(ax_max[i] > 0.0))
      throw std::runtime_error("gg: ax_max must be positive, got " + detail::fmt_double(ax_max[i]));
    if (!(ay_max[i] > 0.0))
      throw std::runtime_error("gg: ay_max must be positive, got " + detail::fmt_double(ay_max[i]));
  }
  GgLookup gg;
  gg.v_grid_ = std::move(v_grid);
  gg.g_grid_ = std::move(g_grid);
  gg.ax_min_ = std::move(ax_min);
  gg.ax_max_ = std::move(ax_max);
  gg.ay_max_ = std::move(ay_max);
  gg.p_ = std::move(p);
  return gg;
}

GgLookup GgLookup::synth(double mu_x, double mu_y, double ax_drive_max, double p,
                         std::vector<double> v_grid, std::vector<double> g_grid) {
  if (mu_x <= 0.0 || mu_y <= 0.0 || ax_drive_max <= 0.0)
    throw std::runtime_error("gg: synth coefficients must be positive");
  validate_grid(v_grid, "v");
  validate_grid(g_grid, "g_tilde");
  const std::size_t nv = v_grid.size(), ng = g_grid.size();
  std::vector<double> ax_min(nv * ng), ax_max(nv * ng), ay_max(nv * ng), pv(nv * ng, p);
  for (std::size_t iv = 0; iv < nv; ++iv) {
    for (std::size_t ig = 0; ig < ng; ++ig) {
      const double g = g_grid[ig];
      ax_min[iv * ng + ig] = -mu_x * g;
      ax_max[iv * ng + ig] = std::min(ax_drive_max, mu_x * g);
      ay_max[iv * ng + ig] = mu_y * g;
    }
  }
  return from_tables(std::move(v_grid), std::move(g_grid), std::move(ax_min), std::move(ax_max),
                     std::move(ay_max), std::move(pv));
}

GgShape GgLookup::query(double v, double g_tilde) const {
  const double vc = std::clamp(v, v_grid_.front(), v_grid_.back());
  const double gc = std::clamp(g_tilde, g_grid_.front(), g_grid_.back());
  const std::size_t iv = lower_cell(v_grid_, vc);
  const std::size_t ig = lower_cell(g_grid_, gc);
  double av = 0.0, ag = 0.0;
  if (v_grid_.size() > 1) av = (vc - v_grid_[iv]) / (v_grid_[iv + 1] - v_grid_[iv]);
  if (g_grid_.size() > 1) ag = (gc - g_grid_[ig]) / (g_grid_[ig + 1] - g_grid_[ig]);

  auto bilinear = [&](const std::vector<double>& table) {
    const std::size_t iv1 = v_grid_.size() > 1 ? iv + 1 : iv;
    const std::size_t ig1 = g_grid_.size() > 1 ? ig + 1 : ig;
    const double c00 = cell(table, iv, ig);
    const double c01 = cell(table, iv, ig1);
    const double c10 = cell(table, iv1, ig);
    const double c11 = cell(table, iv1, ig1);
    return (1 - av) * ((1 - ag) * c00 + ag * c01) + av * ((1 - ag) * c10 + ag * c11);
  };

  GgShape shape;
  shape.ax_min = bilinear(ax_min_);
  shape.ax_max = bilinear(ax_max_);
  shape.ay_max = bilinear(ay_max_);
  shape.p = bilinear(p_);
  return shape;
}

GgLookup GgLookup::load(const std::string& path) {
  const detail::CsvFile csv = detail::read_csv(path);
  const std::vector<std::string> expected = {"v", "g_tilde", "ax_min", "ax_max", "ay_max", "p"};
  if (csv.header != expected)
    throw std::runtime_error(path + ": expected header v,g_tilde,ax_min,ax_max,ay_max,p");

  struct Entry {
    double ax_min, ax_max, ay_max, p;
  };
  std::map<double, std::map<double, Entry>> by_v;
  for (const auto& row : csv.rows) {
    if (row.fields.size() != 6)
      throw std::runtime_error(path + ":" + std::to_string(row.line_no) + ": expected 6 fields");
    const double v = detail::parse_double(row.fields[0], path, row.line_no);
    const double g = detail::parse_double(row.fields[1], path, row.line_no);
    Entry e{detail::parse_double(row.fields[2], path, row.line_no),
            detail::parse_double(row.fields[3], path, row.line_no),
            detail::parse_double(row.fields[4], path, row.line_no),
            detail::parse_double(row.fields[5], path, row.line_no)};
    by_v[v][g] = e;
  }
  if (by_v.empty()) throw std::runtime_error(path + ": no data rows");

  std::vector<double> v_grid;
  for (const auto& [v, _] : by_v) v_grid.push_back(v);
  std::vector<double> g_grid;
  for (const auto& [g, _] : by_v.begin()->second) g_grid.push_back(g);

  std::vector<double> ax_min, ax_max, ay_max, p;
  for (const auto& [v, row] : by_v) {
    if (row.size() != g_grid.size())
      throw std::runtime_error(path + ": incomplete grid at v=" + detail::fmt_double(v));
    std::size_t ig = 0;
    for (const auto& [g, e] : row) {
      if (g != g_grid[ig])
        throw std::runtime_error(path + ": incomplete grid, missing cell (v=" +
                                 detail::fmt_double(v) + ", g_tilde=" + detail::fmt_double(g_grid[ig]) + ")");
      ax_min.push_back(e.ax_min);
      ax_max.push_back(e.ax_max);
      ay_max.push_back(e.ay_max);
      p.push_back(e.p);
      ++ig;
    }
  }
  return from_tables(std::move(v_grid), std::move(g_grid), std::move(ax_min), std::move(ax_max),
                     std::move(ay_max), std::move(p));
}

void GgLookup::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << "v,g_tilde,ax_min,ax_max,ay_max,p\n";
  for (std::size_t iv = 0; iv < v_grid_.size(); ++iv) {
    for (std::size_t ig = 0; ig < g_grid_.size(); ++ig) {
      out << detail::fmt_double(v_grid_[iv]) << ',' << detail::fmt_double(g_grid_[ig]) << ','
          << detail::fmt_double(cell(ax_min_, iv, ig)) << ',' << detail::fmt_double(cell(ax_max_, iv, ig))
          << ',' << detail::fmt_double(cell(ay_max_, iv, ig)) << ',' << detail::fmt_double(cell(p_, iv, ig))
          << '\n';
    }
  }
}

GgShape scale_for_racing_line(const GgShape& shape, double a_mgn, double a_abs_mgn) {
  if (a_mgn < 0.0 || a_mgn >= 1.0) throw std::invalid_argument("gg: a_mgn must be in [0, 1)");
  if (a_abs_mgn < 0.0) throw std::invalid_argument("gg: a_abs_mgn must be >= 0");
  auto shrink = [&](double e) { return std::max(kEnvelopeFloor, (1.0 - a_mgn) * e - a_abs_mgn); };
  GgShape out;
  out.ax_min = -shrink(std::abs(shape.ax_min));
  out.ax_max = shrink(shape.ax_max);
  out.ay_max = shrink(shape.ay_max);
  out.p = shape.p;
  return out;
}

AccelCheck check_accel(const GgShape& shape, const ApparentAccel& accel) {
  AccelCheck res;
  res.slack_drive = shape.ax_max - accel.ax_tilde;
  res.slack_lateral = shape.ay_max - std::abs(accel.ay_tilde);
  const double ratio = std::abs(accel.ay_tilde) / shape.ay_max;
  const double inner = 1.0 - std::pow(ratio, shape.p);
  // keep the combined bound finite when |ay| already exceeds ay_max
  const double bound = std::abs(shape.ax_min) *
                       std::copysign(std::pow(std::abs(inner), 1.0 / shape.p), inner);
  res.slack_combined = bound - std::abs(accel.ax_tilde);
  res.ok = res.slack_drive >= 0.0 && res.slack_lateral >= 0.0 && res.slack_combined >= 0.0;
  return res;
}

ApparentAccel apparent_accels(double ax_hat, double ay_hat, double v, double chi_hat,
                              const RoadFrame& frame, double s_dot, double w_dot) {
  const double sm = std::sin(frame.mu), cm = std::cos(frame.mu);
  const double sp = std::sin(frame.phi), cp = std::cos(frame.phi);
  const double sc = std::sin(chi_hat), cc = std::cos(chi_hat);
  const double omega_y_hat = (frame.omega.y() * cc - frame.omega.x() * sc) * s_dot;
  ApparentAccel a;
  a.ax_tilde = ax_hat + kGravity * (cm * sp * sc - sm * cc);
  a.ay_tilde = ay_hat + kGravity * (sm * sc + cm * sp * cc);
  a.g_tilde = w_dot - omega_y_hat * v + kGravity * cm * cp;
  return a;
}

}  // namespace raceplan
