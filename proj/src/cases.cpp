#include "hho/cases.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <string>

#include "hho/errors.hpp"
#include "hho/expression.hpp"

namespace hho {

namespace {

constexpr double pi = std::numbers::pi;

double polar_angle(const Point& p)
{
  double t = std::atan2(p.y(), p.x());
  if (t < 0.0)
    t += 2.0 * pi;
  return t;
}

// grad of r^a * g(theta) from g and g'
Eigen::Vector2d polar_gradient(const Point& p, double a, double g, double dg)
{
  const double r = p.norm();
  if (r == 0.0)
    return Eigen::Vector2d::Constant(std::numeric_limits<double>::quiet_NaN());
  const double t = std::atan2(p.y(), p.x());
  const Eigen::Vector2d er(std::cos(t), std::sin(t));
  const Eigen::Vector2d et(-std::sin(t), std::cos(t));
  return std::pow(r, a - 1.0) * (a * g * er + dg * et);
}

ProblemSpec with_exact(ProblemSpec p, ScalarField u, VectorField grad)
{
  p.dirichlet = u;
  p.dirichlet_gradient = grad;
  p.exact = ExactSolution{std::move(u), std::move(grad)};
  return p;
}

} // namespace

ProblemSpec sine_problem()
{
  ProblemSpec p;
  p.diffusion = {{0, 1.0}};
  p.load = [](const Point& x) {
    return 2.0 * pi * pi * std::sin(pi * x.x()) * std::sin(pi * x.y());
  };
  p.neumann = [](const Point&) { return 0.0; };
  return with_exact(
      std::move(p), [](const Point& x) { return std::sin(pi * x.x()) * std::sin(pi * x.y()); },
      [](const Point& x) {
        return Eigen::Vector2d(pi * std::cos(pi * x.x()) * std::sin(pi * x.y()),
                               pi * std::sin(pi * x.x()) * std::cos(pi * x.y()));
      });
}

ProblemSpec lshape_problem()
{
  ProblemSpec p;
  p.diffusion = {{0, 1.0}};
  p.load = [](const Point&) { return 0.0; };
  p.neumann = [](const Point&) { return 0.0; };
  p.singular_point = Point(0.0, 0.0);
  return with_exact(
      std::move(p),
      [](const Point& x) { return std::pow(x.norm(), 2.0 / 3.0) * std::sin(2.0 * polar_angle(x) / 3.0); },
      [](const Point& x) {
        const double t = polar_angle(x);
        return polar_gradient(x, 2.0 / 3.0, std::sin(2.0 * t / 3.0),
                              2.0 / 3.0 * std::cos(2.0 * t / 3.0));
      });
}

KelloggProfile::KelloggProfile(double alpha, double ratio) : alpha_(alpha), ratio_(ratio)
{
  if (!(alpha > 0.0 && alpha < 1.0) || !(ratio > 0.0))
    throw ParameterError("checkerboard profile needs 0 < alpha < 1 and a positive ratio");
  const double g = alpha;
  const double R = ratio;
  auto sec2 = [](double v) { return 1.0 / (std::cos(v) * std::cos(v)); };

  // R = -tan((pi/2 - sigma) g) cot(rho g),  1/R = -tan(rho g) cot(sigma g)
  double rho = pi / 4.0;
  double sigma = pi / 4.0 - pi / (2.0 * g);
  double residual = 0.0;
  for (int it = 0; it < 100; ++it) {
    const double t1 = std::tan((pi / 2.0 - sigma) * g);
    const double t2 = std::tan(rho * g);
    const double t3 = std::tan(sigma * g);
    const Eigen::Vector2d f(1.0 + t1 / (t2 * R), 1.0 / R + t2 / t3);
    Eigen::Matrix2d j;
    j << -t1 * g * sec2(rho * g) / (t2 * t2 * R), -g * sec2((pi / 2.0 - sigma) * g) / (t2 * R),
        g * sec2(rho * g) / t3, -t2 * g * sec2(sigma * g) / (t3 * t3);
    const Eigen::Vector2d step = j.fullPivLu().solve(f);
    rho -= step(0);
    sigma -= step(1);
    residual = f.norm();
    if (step.norm() <= 1e-15 * (1.0 + std::abs(sigma)) && residual <= 1e-13)
      break;
  }
  rho_ = rho;
  sigma_ = sigma;
  if (!(transmission_residual() <= 1e-10))
    throw OracleError("checkerboard profile: transmission conditions not satisfied (residual " +
                      std::to_string(transmission_residual()) + ")");
}

double KelloggProfile::branch_value(int q, double t) const
{
  const double g = alpha_;
  switch (q) {
  case 0: return std::cos((pi / 2.0 - sigma_) * g) * std::cos((t - pi / 2.0 + rho_) * g);
  case 1: return std::cos(rho_ * g) * std::cos((t - pi + sigma_) * g);
  case 2: return std::cos(sigma_ * g) * std::cos((t - pi - rho_) * g);
  default: return std::cos((pi / 2.0 - rho_) * g) * std::cos((t - 1.5 * pi - sigma_) * g);
  }
}

double KelloggProfile::branch_derivative(int q, double t) const
{
  const double g = alpha_;
  switch (q) {
  case 0: return -g * std::cos((pi / 2.0 - sigma_) * g) * std::sin((t - pi / 2.0 + rho_) * g);
  case 1: return -g * std::cos(rho_ * g) * std::sin((t - pi + sigma_) * g);
  case 2: return -g * std::cos(sigma_ * g) * std::sin((t - pi - rho_) * g);
  default: return -g * std::cos((pi / 2.0 - rho_) * g) * std::sin((t - 1.5 * pi - sigma_) * g);
  }
}

namespace {
int quadrant(double t)
{
  return std::clamp(static_cast<int>(t / (pi / 2.0)), 0, 3);
}
} // namespace

double KelloggProfile::value(double t) const { return branch_value(quadrant(t), t); }
double KelloggProfile::derivative(double t) const { return branch_derivative(quadrant(t), t); }
double KelloggProfile::coefficient(double t) const
{
  return quadrant(t) % 2 == 0 ? ratio_ : 1.0;
}

double KelloggProfile::transmission_residual() const
{
  double worst = 0.0;
  for (int q = 0; q < 4; ++q) {
    // interface between quadrant q and q+1 at angle (q+1) pi/2
    const int next = (q + 1) % 4;
    const double t = (q + 1) * pi / 2.0;
    const double t_next = next == 0 ? 0.0 : t;
    const double a = q % 2 == 0 ? ratio_ : 1.0;
    const double b = next % 2 == 0 ? ratio_ : 1.0;
    const double flux_left = a * branch_derivative(q, t);
    const double flux_right = b * branch_derivative(next, t_next);
    worst = std::max(worst, std::abs(branch_value(q, t) - branch_value(next, t_next)));
    worst = std::max(worst, std::abs(flux_left - flux_right) /
                                std::max({1.0, std::abs(flux_left), std::abs(flux_right)}));
  }
  return worst;
}

ProblemSpec kellogg_problem(const KelloggProfile& profile)
{
  ProblemSpec p;
  p.diffusion = {{0, 1.0}, {1, profile.ratio()}};
  p.load = [](const Point&) { return 0.0; };
  p.neumann = [](const Point&) { return 0.0; };
  p.singular_point = Point(0.0, 0.0);
  const double a = profile.alpha();
  return with_exact(
      std::move(p),
      [profile, a](const Point& x) { return std::pow(x.norm(), a) * profile.value(polar_angle(x)); },
      [profile, a](const Point& x) {
        const double t = polar_angle(x);
        return polar_gradient(x, a, profile.value(t), profile.derivative(t));
      });
}

ProblemSpec custom_problem(const ConfigMap& keys, const std::vector<int>& regions)
{
  auto field = [&](const char* key) -> ScalarField {
    const auto it = keys.find(key);
    return it == keys.end() ? ScalarField{} : parse_expression(it->second);
  };
  const ScalarField zero = [](const Point&) { return 0.0; };

  ProblemSpec p;
  const auto a_all = keys.find("A");
  const double a_default = a_all == keys.end() ? 1.0 : parse_expression(a_all->second)(Point::Zero());
  p.diffusion[0] = a_default;
  for (const int r : regions)
    p.diffusion[r] = a_default;
  for (const auto& [key, value] : keys) {
    if (key.rfind("A.", 0) != 0)
      continue;
    std::size_t used = 0;
    int region = 0;
    try {
      region = std::stoi(key.substr(2), &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != key.size() - 2)
      throw ParameterError("bad region in config key '" + key + "'");
    p.diffusion[region] = parse_expression(value)(Point::Zero());
  }

  p.load = keys.count("f") ? field("f") : zero;
  p.neumann = keys.count("g_N") ? field("g_N") : zero;
  const ScalarField u = field("u");
  ScalarField ux = field("u_x");
  ScalarField uy = field("u_y");
  if (u && (!ux || !uy)) {
    auto fd = [u](const Point& x, const Point& dir) {
      const double step = 1e-6 * std::max(1.0, x.norm());
      return (u(x + step * dir) - u(x - step * dir)) / (2.0 * step);
    };
    if (!ux)
      ux = [fd](const Point& x) { return fd(x, Point(1.0, 0.0)); };
    if (!uy)
      uy = [fd](const Point& x) { return fd(x, Point(0.0, 1.0)); };
  }
  if (keys.count("g_D"))
    p.dirichlet = field("g_D");
  else
    p.dirichlet = u ? u : zero;
  if (u) {
    VectorField grad = [ux, uy](const Point& x) { return Eigen::Vector2d(ux(x), uy(x)); };
    p.exact = ExactSolution{u, grad};
    if (!keys.count("g_D"))
      p.dirichlet_gradient = grad;
  }
  return p;
}

Case builtin_case(const std::string& name, int n)
{
  const int m = n > 0 ? n : 4;
  if (name == "ex1" || name == "ex1_sine")
    return {"ex1", sine_problem(), generate_structured_mesh(Domain::square, m), 0};
  if (name == "ex2" || name == "ex2_lshape")
    return {"ex2", lshape_problem(), generate_structured_mesh(Domain::lshape, m), 2};
  if (name == "ex3" || name == "ex3_kellogg")
    return {"ex3", kellogg_problem(KelloggProfile()),
            generate_structured_mesh(Domain::kellogg_square, m), 2};
  throw ParameterError("unknown case '" + name + "' (expected ex1, ex2, ex3 or custom)");
}

Mesh builtin_mesh_with_cells(const std::string& name, std::size_t cells)
{
  const bool lshape = name == "ex2" || name == "ex2_lshape";
  const std::size_t per = lshape ? 6 : 2;
  const bool even_only = name == "ex3" || name == "ex3_kellogg";
  for (std::size_t n = 1; per * n * n <= cells; ++n)
    if (per * n * n == cells && (!even_only || n % 2 == 0))
      return builtin_case(name, static_cast<int>(n)).mesh;
  throw ParameterError("no structured mesh of case '" + name + "' has " + std::to_string(cells) +
                       " cells");
}

} // namespace hho
