#include "doctest.h"

#include <cmath>
#include <sstream>

#include "hho/cases.hpp"
#include "hho/config.hpp"
#include "hho/errors.hpp"
#include "hho/expression.hpp"

using namespace hho;

namespace {

// -div(A grad u) by central differences of the exact gradient.
double fd_load(const ProblemSpec& p, double a, const Point& x)
{
  const double h = 1e-5;
  const Point ex(h, 0), ey(0, h);
  const auto& g = p.exact->gradient;
  return -a * ((g(x + ex).x() - g(x - ex).x()) + (g(x + ey).y() - g(x - ey).y())) / (2 * h);
}

void check_gradient(const ProblemSpec& p, const Point& x)
{
  const double h = 1e-6;
  const auto& u = p.exact->value;
  const Eigen::Vector2d g = p.exact->gradient(x);
  CHECK(g.x() == doctest::Approx((u(x + Point(h, 0)) - u(x - Point(h, 0))) / (2 * h)).epsilon(1e-6));
  CHECK(g.y() == doctest::Approx((u(x + Point(0, h)) - u(x - Point(0, h))) / (2 * h)).epsilon(1e-6));
}

} // namespace

TEST_CASE("example 1: smooth solution")
{
  const ProblemSpec p = sine_problem();
  CHECK(p.load(Point(0.5, 0.5)) == doctest::Approx(2 * M_PI * M_PI));
  for (const Point& x : {Point(0.3, -0.2), Point(-0.7, 0.45)}) {
    CHECK(p.load(x) == doctest::Approx(fd_load(p, 1.0, x)).epsilon(1e-6));
    check_gradient(p, x);
  }
  const Case c = builtin_case("ex1");
  CHECK(c.mesh.num_cells() == 32);
  CHECK(builtin_case("ex1_sine").mesh.num_cells() == 32);
}

TEST_CASE("example 2: L-shape corner singularity")
{
  const ProblemSpec p = lshape_problem();
  const double th = 3 * M_PI / 4;
  CHECK(p.exact->value(Point(std::cos(th), std::sin(th))) == doctest::Approx(1.0));
  for (const Point& x : {Point(0.3, 0.4), Point(-0.5, -0.2), Point(-0.1, 0.8)}) {
    CHECK(std::abs(fd_load(p, 1.0, x)) <= 1e-4);
    CHECK(p.load(x) == 0.0);
    check_gradient(p, x);
  }
  // zero trace on the re-entrant edges
  CHECK(std::abs(p.dirichlet(Point(0.5, 0.0))) <= 1e-14);
  CHECK(std::abs(p.dirichlet(Point(0.0, -0.5))) <= 1e-14);
  REQUIRE(p.singular_point.has_value());
  CHECK(p.singular_point->norm() == 0.0);
  CHECK(builtin_case("ex2").mesh.num_cells() == 96);
}

TEST_CASE("example 3: checkerboard profile")
{
  const KelloggProfile phi;
  CHECK(phi.transmission_residual() <= 1e-10);
  CHECK(phi.rho() == doctest::Approx(M_PI / 4).epsilon(1e-12));

  const ProblemSpec p = kellogg_problem(phi);
  const Case c = builtin_case("ex3");
  for (std::size_t cell = 0; cell < c.mesh.num_cells(); ++cell) {
    const Point x = c.mesh.cell_geometry(cell).centroid;
    if (x.x() > 0 && x.y() > 0 && std::abs(x.x() - 0.5) < 0.2 && std::abs(x.y() - 0.5) < 0.2)
      CHECK(p.diffusion_of(c.mesh.cells()[cell].region) == 161.4476387975881);
  }

  // continuity of u and of the normal flux across the axes at sampled radii
  const auto& u = p.exact->value;
  const auto& g = p.exact->gradient;
  const double eps = 1e-13;
  double worst_u = 0.0, worst_flux = 0.0;
  for (int i = 1; i <= 100; ++i) {
    const double r = 0.01 * i;
    for (int axis = 0; axis < 4; ++axis) {
      const double th = axis * M_PI / 2;
      const Point x(r * std::cos(th), r * std::sin(th));
      const Point tangent(-std::sin(th), std::cos(th)); // normal to the axis
      const Point minus = x - eps * tangent, plus = x + eps * tangent;
      const double a_minus = phi.coefficient(std::fmod(th - 1e-9 + 2 * M_PI, 2 * M_PI));
      const double a_plus = phi.coefficient(th + 1e-9);
      worst_u = std::max(worst_u, std::abs(u(plus) - u(minus)) / std::abs(u(x)));
      const double fp = a_plus * g(plus).dot(tangent), fm = a_minus * g(minus).dot(tangent);
      worst_flux = std::max(worst_flux, std::abs(fp - fm) / std::max(1.0, std::abs(fp)));
    }
  }
  CHECK(worst_u <= 1e-8);
  CHECK(worst_flux <= 1e-8);

  // harmonic inside each quadrant
  for (const Point& x : {Point(0.3, 0.6), Point(-0.4, 0.2), Point(-0.3, -0.5), Point(0.7, -0.1)})
    CHECK(std::abs(fd_load(p, 1.0, x)) <= 1e-3 * g(x).norm());

  CHECK_THROWS_AS(builtin_case("ex4"), ParameterError);
  CHECK(builtin_mesh_with_cells("ex1", 128).num_cells() == 128);
  CHECK(builtin_mesh_with_cells("ex2", 96).num_cells() == 96);
  CHECK_THROWS_AS(builtin_mesh_with_cells("ex1", 100), ParameterError);
}

TEST_CASE("expression parser")
{
  const Point x(0.3, -0.4);
  CHECK(parse_expression("1 + 2 * 3")(x) == 7.0);
  CHECK(parse_expression("2^3^2")(x) == 512.0);
  CHECK(parse_expression("-2^2")(x) == -4.0);
  CHECK(parse_expression("(1 - x) * y")(x) == doctest::Approx(0.7 * -0.4));
  CHECK(parse_expression("r")(x) == doctest::Approx(0.5));
  CHECK(parse_expression("sin(pi * x) * exp(y) + atan2(y, x)")(x) ==
        doctest::Approx(std::sin(M_PI * 0.3) * std::exp(-0.4) + std::atan2(-0.4, 0.3)));
  CHECK(parse_expression("max(x, y) + min(x, y) + pow(2, 10) + abs(y) + sqrt(4)")(x) ==
        doctest::Approx(0.3 - 0.4 + 1024 + 0.4 + 2));
  CHECK(parse_expression("1.5e-3 * e")(x) == doctest::Approx(1.5e-3 * M_E));
  CHECK_THROWS_AS(parse_expression("1 +"), ParameterError);
  CHECK_THROWS_AS(parse_expression("foo(x)"), ParameterError);
  CHECK_THROWS_AS(parse_expression("sin(x, y)"), ParameterError);
  CHECK_THROWS_AS(parse_expression("(x"), ParameterError);
  CHECK_THROWS_AS(parse_expression("x y"), ParameterError);
}

TEST_CASE("config files")
{
  std::istringstream in("# problem\n"
                        "k = 2\n"
                        "\n"
                        "max-dofs = 1000   # inline comment\n"
                        "f = 2 * pi^2 * sin(pi*x) * sin(pi*y)\n");
  const ConfigMap c = read_config(in);
  CHECK(c.at("k") == "2");
  CHECK(c.at("max_dofs") == "1000");
  CHECK(c.at("f") == "2 * pi^2 * sin(pi*x) * sin(pi*y)");
  std::istringstream bad("k 2\n");
  CHECK_THROWS_AS(read_config(bad), IoError);
  std::istringstream empty_key(" = 2\n");
  CHECK_THROWS_AS(read_config(empty_key), IoError);
  CHECK_THROWS_AS(read_config_file("/nonexistent/run.cfg"), IoError);
}

TEST_CASE("custom problem")
{
  const ConfigMap keys = {{"u", "x^2 - y^2 + x*y"}, {"A", "3"}, {"A.1", "5"}};
  const ProblemSpec p = custom_problem(keys, {1});
  CHECK(p.diffusion_of(0) == 3.0);
  CHECK(p.diffusion_of(1) == 5.0);
  CHECK(p.dirichlet(Point(1, 2)) == doctest::Approx(1 - 4 + 2));
  CHECK(p.load(Point(0.2, 0.1)) == 0.0);
  REQUIRE(p.exact.has_value());
  const Eigen::Vector2d g = p.exact->gradient(Point(0.5, 0.25));
  CHECK(g.x() == doctest::Approx(1.0 + 0.25).epsilon(1e-8));
  CHECK(g.y() == doctest::Approx(-0.5 + 0.5).scale(1.0).epsilon(1e-8));
  CHECK_THROWS_AS(custom_problem({{"f", "sin("}}), ParameterError);
  CHECK_THROWS_AS(p.diffusion_of(7), SpecError);
}
