#include "ricciot/costs.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "ricciot/errors.hpp"

namespace ricciot {

namespace {

// Bicubic Hermite patch interpolation on a rectilinear grid.
class Bicubic {
 public:
  Bicubic(std::vector<double> xs, std::vector<double> ys, std::vector<double> f,
          std::vector<double> fx, std::vector<double> fy, std::vector<double> fxy)
      : xs_(std::move(xs)), ys_(std::move(ys)), f_(std::move(f)), fx_(std::move(fx)),
        fy_(std::move(fy)), fxy_(std::move(fxy)) {}

  double operator()(double x, double y) const {
    const std::size_t i = cell(xs_, x);
    const std::size_t j = cell(ys_, y);
    const double hx = xs_[i + 1] - xs_[i];
    const double hy = ys_[j + 1] - ys_[j];
    const double u = (x - xs_[i]) / hx;
    const double v = (y - ys_[j]) / hy;
    const double bu[2] = {2 * u * u * u - 3 * u * u + 1, -2 * u * u * u + 3 * u * u};
    const double du[2] = {u * u * u - 2 * u * u + u, u * u * u - u * u};
    const double bv[2] = {2 * v * v * v - 3 * v * v + 1, -2 * v * v * v + 3 * v * v};
    const double dv[2] = {v * v * v - 2 * v * v + v, v * v * v - v * v};
    double sum = 0.0;
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        const std::size_t k = index(i + a, j + b);
        sum += bu[a] * bv[b] * f_[k] + du[a] * hx * bv[b] * fx_[k] +
               bu[a] * dv[b] * hy * fy_[k] + du[a] * dv[b] * hx * hy * fxy_[k];
      }
    }
    return sum;
  }

 private:
  std::size_t index(std::size_t i, std::size_t j) const { return i * ys_.size() + j; }

  static std::size_t cell(const std::vector<double>& grid, double x) {
    if (x < grid.front() - 1e-12 || x > grid.back() + 1e-12) {
      std::ostringstream msg;
      msg << "tabulated cost evaluated at " << x << " outside table range [" << grid.front()
          << ", " << grid.back() << "]";
      throw DomainError(msg.str());
    }
    auto it = std::upper_bound(grid.begin(), grid.end(), x);
    std::size_t i = (it == grid.begin()) ? 0 : static_cast<std::size_t>(it - grid.begin()) - 1;
    return std::min(i, grid.size() - 2);
  }

  std::vector<double> xs_, ys_, f_, fx_, fy_, fxy_;
};

// Three-point Lagrange derivative of a row-major table along one axis
// (second order on nonuniform grids, including the ends).
std::vector<double> difference(const std::vector<double>& xs, const std::vector<double>& ys,
                               const std::vector<double>& f, bool along_x) {
  const std::size_t nx = xs.size(), ny = ys.size();
  const auto& g = along_x ? xs : ys;
  std::vector<double> out(f.size());
  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t j = 0; j < ny; ++j) {
      const std::size_t pos = along_x ? i : j;
      auto at = [&](std::size_t p) { return along_x ? f[p * ny + j] : f[i * ny + p]; };
      if (g.size() == 2) {
        out[i * ny + j] = (at(1) - at(0)) / (g[1] - g[0]);
        continue;
      }
      const std::size_t a = pos == 0 ? 0 : std::min(pos - 1, g.size() - 3);
      const double x = g[pos], x0 = g[a], x1 = g[a + 1], x2 = g[a + 2];
      out[i * ny + j] = at(a) * ((x - x1) + (x - x2)) / ((x0 - x1) * (x0 - x2)) +
                        at(a + 1) * ((x - x0) + (x - x2)) / ((x1 - x0) * (x1 - x2)) +
                        at(a + 2) * ((x - x0) + (x - x1)) / ((x2 - x0) * (x2 - x1));
    }
  }
  return out;
}

void require_nonnegative_s(double s, const char* where) {
  if (!(s >= 0.0)) {
    throw DomainError(std::string(where) + ": distance argument must be nonnegative");
  }
}

}  // namespace

// ---------------------------------------------------------------- table I/O

CostTable read_cost_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open cost table '" + path + "'");
  struct Row {
    double eta, eta_s, eta_ss, eta_tau;
  };
  std::map<std::pair<double, double>, Row> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    double s, tau;
    Row r;
    if (!(fields >> s >> tau >> r.eta >> r.eta_s >> r.eta_ss >> r.eta_tau)) {
      if (line_no == 1) continue;  // header
      throw ConfigError("cost table '" + path + "': malformed line " + std::to_string(line_no));
    }
    rows[{s, tau}] = r;
  }
  CostTable table;
  for (const auto& [key, row] : rows) {
    if (table.s.empty() || table.s.back() != key.first) table.s.push_back(key.first);
  }
  for (const auto& [key, row] : rows) {
    if (key.first != table.s.front()) break;
    table.tau.push_back(key.second);
  }
  if (table.s.size() < 2 || table.tau.size() < 2 ||
      rows.size() != table.s.size() * table.tau.size()) {
    throw ConfigError("cost table '" + path + "' is not a complete (s, tau) grid");
  }
  for (double s : table.s) {
    for (double t : table.tau) {
      const auto it = rows.find({s, t});
      if (it == rows.end()) {
        throw ConfigError("cost table '" + path + "' is not a complete (s, tau) grid");
      }
      table.eta.push_back(it->second.eta);
      table.eta_s.push_back(it->second.eta_s);
      table.eta_ss.push_back(it->second.eta_ss);
      table.eta_tau.push_back(it->second.eta_tau);
    }
  }
  return table;
}

// ---------------------------------------------------------------- CostFunction

CostFunction CostFunction::power(double p, double K) {
  if (!(p > 0.0) || !std::isfinite(p)) throw InvalidArgument("power cost needs p > 0");
  CostFunction c;
  c.kind_ = CostKind::Power;
  std::ostringstream name;
  name << "power(p=" << p << ",K=" << K << ")";
  c.name_ = name.str();
  c.p_ = p;
  c.K_ = K;
  c.singular_at_zero_ = p < 2.0;
  c.eta_ = [p, K](double s, double tau) {
    require_nonnegative_s(s, "power cost");
    return std::exp(p * K * tau) * std::pow(s, p);
  };
  c.eta_s_ = [p, K](double s, double tau) {
    require_nonnegative_s(s, "power cost");
    if (s == 0.0 && p < 1.0) throw DomainError("power cost: eta_s is singular at s = 0");
    return p * std::exp(p * K * tau) * std::pow(s, p - 1.0);
  };
  c.eta_ss_ = [p, K](double s, double tau) {
    require_nonnegative_s(s, "power cost");
    if (s == 0.0 && p < 2.0) throw DomainError("power cost: eta_ss is singular at s = 0");
    return p * (p - 1.0) * std::exp(p * K * tau) * std::pow(s, p - 2.0);
  };
  c.eta_tau_ = [p, K](double s, double tau) {
    require_nonnegative_s(s, "power cost");
    return p * K * std::exp(p * K * tau) * std::pow(s, p);
  };
  return c;
}

CostFunction CostFunction::analytic(std::string name, Fn eta, Fn eta_s, Fn eta_ss,
                                    Fn eta_tau, bool singular_at_zero) {
  if (!eta || !eta_s || !eta_ss || !eta_tau) {
    throw InvalidArgument("analytic cost needs eta and all three derivatives");
  }
  CostFunction c;
  c.kind_ = CostKind::Analytic;
  c.name_ = std::move(name);
  c.singular_at_zero_ = singular_at_zero;
  c.eta_ = std::move(eta);
  c.eta_s_ = std::move(eta_s);
  c.eta_ss_ = std::move(eta_ss);
  c.eta_tau_ = std::move(eta_tau);
  return c;
}

CostFunction CostFunction::tabulated(CostTable table, std::string name) {
  const std::size_t n = table.s.size() * table.tau.size();
  if (table.s.size() < 2 || table.tau.size() < 2 || table.eta.size() != n ||
      table.eta_s.size() != n || table.eta_ss.size() != n || table.eta_tau.size() != n) {
    throw InvalidArgument("tabulated cost: inconsistent table sizes");
  }
  if (!std::is_sorted(table.s.begin(), table.s.end()) ||
      !std::is_sorted(table.tau.begin(), table.tau.end())) {
    throw InvalidArgument("tabulated cost: grids must be increasing");
  }
  const auto& s = table.s;
  const auto& t = table.tau;
  const auto eta_st = difference(s, t, table.eta_s, false);
  auto interp_eta = std::make_shared<Bicubic>(s, t, table.eta, table.eta_s, table.eta_tau, eta_st);
  auto interp_eta_s = std::make_shared<Bicubic>(s, t, table.eta_s, table.eta_ss, eta_st,
                                                difference(s, t, table.eta_ss, false));
  const auto eta_ss_s = difference(s, t, table.eta_ss, true);
  const auto eta_ss_t = difference(s, t, table.eta_ss, false);
  auto interp_eta_ss = std::make_shared<Bicubic>(s, t, table.eta_ss, eta_ss_s, eta_ss_t,
                                                 difference(s, t, eta_ss_s, false));
  const auto eta_t_s = difference(s, t, table.eta_tau, true);
  const auto eta_t_t = difference(s, t, table.eta_tau, false);
  auto interp_eta_t = std::make_shared<Bicubic>(s, t, table.eta_tau, eta_t_s, eta_t_t,
                                                difference(s, t, eta_t_s, false));

  CostFunction c;
  c.kind_ = CostKind::Tabulated;
  c.name_ = std::move(name);
  c.eta_ = [interp_eta](double x, double y) { return (*interp_eta)(x, y); };
  c.eta_s_ = [interp_eta_s](double x, double y) { return (*interp_eta_s)(x, y); };
  c.eta_ss_ = [interp_eta_ss](double x, double y) { return (*interp_eta_ss)(x, y); };
  c.eta_tau_ = [interp_eta_t](double x, double y) { return (*interp_eta_t)(x, y); };
  c.table_ = std::make_shared<const CostTable>(std::move(table));
  return c;
}

double CostFunction::eta(double s, double tau) const { return eta_(s, tau); }
double CostFunction::eta_s(double s, double tau) const { return eta_s_(s, tau); }
double CostFunction::eta_ss(double s, double tau) const { return eta_ss_(s, tau); }
double CostFunction::eta_tau(double s, double tau) const { return eta_tau_(s, tau); }

CostFunction power_cost(double p, double K) { return CostFunction::power(p, K); }

// ---------------------------------------------------------------- checks

AdmissibilityReport admissibility_check(const CostFunction& cost, double K,
                                        const std::vector<double>& s_grid,
                                        const std::vector<double>& tau_grid) {
  AdmissibilityReport report;
  std::vector<double> ss = s_grid;
  std::vector<double> ts = tau_grid;
  if (const CostTable* table = cost.table()) {
    ss = table->s;
    ts = table->tau;
  }
  if (ss.empty() || ts.empty()) throw InvalidArgument("admissibility_check: empty grid");

  ConditionMargin zero{"eta(0,tau)=0", std::numeric_limits<double>::infinity()};
  ConditionMargin slope{"eta_s>=0", std::numeric_limits<double>::infinity()};
  ConditionMargin third{"-eta_tau+K*s*eta_s-min(4*eta_ss,0)>=0",
                        std::numeric_limits<double>::infinity()};
  // A node fails when its margin is negative beyond rounding of its terms.
  auto record = [&](ConditionMargin& m, double value, double scale, double s, double tau) {
    if (value < -report.tolerance * (1.0 + scale)) m.pass = false;
    if (value < m.min_margin) {
      m.min_margin = value;
      m.at_s = s;
      m.at_tau = tau;
    }
  };

  for (double tau : ts) {
    record(zero, -std::abs(cost.eta(0.0, tau)), 0.0, 0.0, tau);
    for (double s : ss) {
      if (s == 0.0 && cost.singular_at_zero()) continue;
      const double d1 = cost.eta_s(s, tau);
      const double d2 = cost.eta_ss(s, tau);
      record(slope, d1, 0.0, s, tau);
          const double concave = d2 < 0.0 ? 4.0 * d2 : 0.0;
      const double dt = cost.eta_tau(s, tau);
      record(third, -dt + K * s * d1 - concave,
             std::abs(dt) + std::abs(K * s * d1) + std::abs(concave), s, tau);
    }
  }
  for (ConditionMargin* m : {&zero, &slope, &third}) {
    report.pass = report.pass && m->pass;
    report.conditions.push_back(*m);
  }
  return report;
}

double eval_cost(const CostFunction& cost, const ScaleFlow& flow, double tau,
                 const SamplePoint& x, const SamplePoint& y) {
  return cost.eta(distance(flow, tau, x, y), tau);
}

}  // namespace ricciot
