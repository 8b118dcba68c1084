#include "doctest.h"

#include <cmath>
#include <random>

#include "hho/adapt.hpp"
#include "hho/cases.hpp"
#include "hho/errors.hpp"

using namespace hho;

namespace {

std::vector<double> roots(std::vector<double> squared)
{
  for (double& v : squared)
    v = std::sqrt(v);
  return squared;
}

// Among the subsets of minimal cardinality meeting the bulk criterion, the one
// with the largest squared sum (unique for data without ties).
std::vector<std::size_t> brute_force_mark(const std::vector<double>& eta, double theta)
{
  const std::size_t n = eta.size();
  double total = 0.0;
  for (double e : eta)
    total += e * e;
  std::size_t best_mask = 0, best_count = n + 1;
  double best_sum = -1.0;
  for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1) {
        sum += eta[i] * eta[i];
        ++count;
      }
    if (sum < theta * total)
      continue;
    if (count < best_count || (count == best_count && sum > best_sum)) {
      best_mask = mask;
      best_count = count;
      best_sum = sum;
    }
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < n; ++i)
    if (best_mask >> i & 1)
      out.push_back(i);
  return out;
}

} // namespace

TEST_CASE("Doerfler marking examples")
{
  const std::vector<double> eta = roots({4, 3, 2, 1});
  CHECK(dorfler_mark(eta, 0.5) == std::vector<std::size_t>{0, 1});
  CHECK(dorfler_mark(eta, 1.0) == std::vector<std::size_t>{0, 1, 2, 3});
  CHECK(dorfler_mark(roots({0, 4, 0, 1}), 1.0) == std::vector<std::size_t>{1, 3});
  CHECK(dorfler_mark(roots({0.25, 99, 0.25, 0.5}), 0.4) == std::vector<std::size_t>{1});
  // ties go to the smaller id
  CHECK(dorfler_mark(roots({1, 1, 1, 1}), 0.5) == std::vector<std::size_t>{0, 1});
  // marked ids are returned in ascending order
  CHECK(dorfler_mark(roots({1, 2, 3, 4}), 0.5) == std::vector<std::size_t>{2, 3});
}

TEST_CASE("Doerfler marking errors")
{
  const std::vector<double> eta = roots({4, 3});
  CHECK_THROWS_AS(dorfler_mark(eta, 0.0), ParameterError);
  CHECK_THROWS_AS(dorfler_mark(eta, 1.5), ParameterError);
  CHECK_THROWS_AS(dorfler_mark(std::vector<double>{1.0, -1.0}, 0.5), ParameterError);
  CHECK_THROWS_AS(dorfler_mark(std::vector<double>{0.0, 0.0}, 0.5), MarkingError);
}

TEST_CASE("Doerfler marking is minimal and scale invariant")
{
  std::mt19937 gen(2024);
  std::uniform_real_distribution<double> value(0.0, 1.0);
  std::uniform_int_distribution<int> size(1, 12);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> eta(static_cast<std::size_t>(size(gen)));
    for (double& e : eta)
      e = value(gen) < 0.1 ? 0.0 : std::pow(value(gen), 3);
    eta[0] += 1e-3; // at least one positive entry
    const double theta = 0.05 + 0.95 * value(gen);
    const std::vector<std::size_t> marked = dorfler_mark(eta, theta);
    CHECK(marked == brute_force_mark(eta, theta));

    // dropping the smallest member breaks the criterion
    double total = 0.0, sum = 0.0, smallest = 1e300;
    for (double e : eta)
      total += e * e;
    for (std::size_t i : marked) {
      sum += eta[i] * eta[i];
      smallest = std::min(smallest, eta[i] * eta[i]);
    }
    CHECK(sum - smallest < theta * total);

    std::vector<double> scaled = eta;
    for (double& e : scaled)
      e *= 37.5;
    CHECK(dorfler_mark(scaled, theta) == marked);
  }
}

TEST_CASE("rate fitting")
{
  const std::vector<double> dofs = {10, 100, 1000, 1e4};
  std::vector<double> e1, e2;
  for (double d : dofs) {
    e1.push_back(1.0 / d);
    e2.push_back(3.0 * std::pow(d, -1.5));
  }
  CHECK(fit_rate(dofs, e1) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(fit_rate(dofs, e2) == doctest::Approx(-1.5).epsilon(1e-12));
  CHECK_THROWS_AS(fit_rate(std::vector<double>{1.0}, std::vector<double>{1.0}), ParameterError);
  CHECK_THROWS_AS(fit_rate(dofs, std::vector<double>{1, 2, 0, 3}), ParameterError);

  AdaptHistory h;
  for (std::size_t i = 0; i < dofs.size(); ++i) {
    IterationRecord r;
    r.dofs = static_cast<std::size_t>(dofs[i]);
    r.energy_error = i < 2 ? 1.0 : e2[i]; // only the last two follow the rate
    h.records.push_back(r);
  }
  CHECK(fit_rate(h, 2) == doctest::Approx(-1.5).epsilon(1e-12));
  AdaptHistory one;
  one.records.push_back(h.records[0]);
  CHECK_THROWS_AS(fit_rate(one), ParameterError);
}

TEST_CASE("adaptive loop")
{
  const Case c = builtin_case("ex1");
  SUBCASE("max_iters = 0 is a single solve")
  {
    AdaptConfig cfg;
    cfg.max_iters = 0;
    const AdaptHistory h = adaptive_loop(c.mesh, c.problem, cfg);
    REQUIRE(h.records.size() == 1);
    CHECK(h.records[0].cells == 32);
    CHECK(h.records[0].dofs == 2 * 40);
  }
  SUBCASE("history is consistent and converges at the optimal rate")
  {
    AdaptConfig cfg;
    cfg.k = 1;
    cfg.theta = 0.4;
    cfg.max_dofs = 6000;
    std::size_t observed = 0;
    const AdaptHistory h =
        adaptive_loop(c.mesh, c.problem, cfg, [&](const IterationResult&) { ++observed; });
    CHECK(observed == h.records.size());
    REQUIRE(h.records.size() >= 4);
    CHECK(h.records.back().dofs >= cfg.max_dofs);
    for (std::size_t i = 0; i < h.records.size(); ++i) {
      const IterationRecord& r = h.records[i];
      CHECK(r.iter == i);
      CHECK(r.effectivity * r.energy_error == doctest::Approx(r.eta_total).epsilon(1e-10));
      CHECK(r.effectivity >= 1.0);
      if (i > 0) {
        CHECK(r.dofs > h.records[i - 1].dofs);
        CHECK(r.cells > h.records[i - 1].cells);
      }
    }
    std::vector<double> dofs, err;
    for (const auto& r : h.records)
      if (r.dofs > 500) {
        dofs.push_back(static_cast<double>(r.dofs));
        err.push_back(r.energy_error);
      }
    CHECK(fit_rate(dofs, err) == doctest::Approx(-1.0).epsilon(0.2));
  }
  SUBCASE("bad theta")
  {
    AdaptConfig cfg;
    cfg.theta = 0.0;
    CHECK_THROWS_AS(adaptive_loop(c.mesh, c.problem, cfg), ParameterError);
  }
}
