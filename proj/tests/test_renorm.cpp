#include "doctest.h"

#include <cmath>
#include <numbers>
#include <string>

#include "errors.hpp"
#include "renorm.hpp"

using namespace coarsening;

namespace {
MasterInputs sample_inputs() {
  MasterInputs in;
  in.eps_tilde = 0.01;
  in.n = 10;
  in.l_next = 50;
  in.L = 4;
  in.L_next = 200;
  in.t_next = 40;
  in.d = 2;
  in.gamma = 1.0;
  in.C = 1.0;
  return in;
}

ScheduleParams base_params() {
  ScheduleParams p;
  p.d = 2;
  p.C = 1.0;
  p.gamma = 1.0;
  p.eps0 = 1e-3;
  p.L0 = 4.0;
  p.k_max = 5;
  return p;
}

const Condition& find(const ConditionReport& rep, const std::string& name) {
  for (const auto& c : rep.conditions) {
    if (c.name == name) return c;
  }
  FAIL("missing condition " << name);
  return rep.conditions.front();
}
}  // namespace

TEST_CASE("alpha = 1 constants") {
  const double e2 = 2.0 * std::numbers::e;
  const auto k = constants_alpha1(2, 1.0, 1.0);
  CHECK(k.D == doctest::Approx(6.0 / (5.0 * e2) + 64.0).epsilon(1e-14));
  CHECK(k.D == doctest::Approx(64.22072766470286).epsilon(1e-13));
  CHECK(k.chi == doctest::Approx(1.0 / (24.0 * e2)).epsilon(1e-14));
  CHECK(k.chi == doctest::Approx(0.007664155024405048).epsilon(1e-13));
  const auto k3 = constants_alpha1(3, 1.0, 0.01);
  CHECK(k3.chi == doctest::Approx(0.01 / (4.0 * std::sqrt(e2))).epsilon(1e-14));
  CHECK_THROWS_AS(constants_alpha1(1, 1.0, 1.0), InputError);
}

TEST_CASE("master bound: log and direct evaluation agree") {
  auto in = sample_inputs();
  const auto mb = master_bound(in);
  CHECK(mb.value == doctest::Approx(master_bound_direct(in)).epsilon(1e-10));
  in.eps_tilde = 0.3;
  in.d = 3;
  in.t_next = 60;
  CHECK(master_bound(in).value == doctest::Approx(master_bound_direct(in)).epsilon(1e-10));
}

TEST_CASE("master bound: degenerate terms") {
  auto in = sample_inputs();
  in.eps_tilde = 0.0;
  const auto mb = master_bound(in);
  CHECK(std::isinf(mb.log_terms[0]));
  CHECK(mb.log_terms[0] < 0.0);

  in = sample_inputs();
  in.gamma = 1e6;
  const auto big_gamma = master_bound(in);
  CHECK(std::exp(big_gamma.log_terms[1]) == 0.0);
}

TEST_CASE("master bound: named preconditions") {
  auto in = sample_inputs();
  in.n = 100;  // floor(5 * 50 / 3) = 83
  try {
    master_bound(in);
    FAIL("expected an exception");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("n_k condition") != std::string::npos);
  }
  in = sample_inputs();
  in.t_next = 39;
  try {
    master_bound(in);
    FAIL("expected an exception");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("t_k condition") != std::string::npos);
  }
  in = sample_inputs();
  in.eps_tilde = 1.5;
  CHECK_THROWS_AS(master_bound(in), InputError);
}

TEST_CASE("schedule shape") {
  const auto rows = schedule(base_params());
  REQUIRE(rows.size() == 6);
  CHECK(rows[0].eps == doctest::Approx(1e-3));
  CHECK(rows[0].n.top() == std::floor(1000.0 / (2.0 * std::numbers::e)));
  CHECK(rows[1].l.top() == std::floor(64.22072766470286 * 1000.0));
  CHECK(rows[1].L.top() == 4.0 * rows[1].l.top());
  CHECK(rows[1].t.top() == rows[0].n.top() * 4.0);
  for (size_t k = 1; k < rows.size(); ++k) {
    CHECK(rows[k].log_inv_eps > rows[k - 1].log_inv_eps);
    CHECK(rows[k].n >= Tower(3.0));
    CHECK(rows[k].L > rows[k - 1].L);
  }
}

TEST_CASE("renormalisation steps hold for the reference parameters") {
  const auto rows = schedule(base_params());
  for (const auto& r : rows) {
    INFO("k = " << r.k);
    CHECK(r.master.precondition_error.empty());
    CHECK(r.master.holds);
    CHECK(r.master.time_constraint);
    CHECK(r.master.margin >= 0.0);
  }
  CHECK_FALSE(rows[0].master.asymptotic);
}

TEST_CASE("schedule: exact step matches master_bound") {
  const auto rows = schedule(base_params());
  const auto& cur = rows[0];
  const auto& nx = rows[1];
  MasterInputs in;
  in.eps_tilde = cur.eps;
  in.n = cur.n.top();
  in.l_next = nx.l.top();
  in.L = cur.L.top();
  in.L_next = nx.L.top();
  in.t_next = nx.t.top();
  const auto mb = master_bound(in);
  CHECK(mb.log_value == doctest::Approx(cur.master.log_master).epsilon(1e-12));
  CHECK((mb.log_value <= std::log(nx.eps)) == cur.master.holds);
}

TEST_CASE("schedule parameter validation") {
  auto p = base_params();
  p.L0 = 2.0;
  CHECK_THROWS_AS(schedule(p), InputError);
  p = base_params();
  p.eps0 = 1.0;
  CHECK_THROWS_AS(schedule(p), InputError);
  p = base_params();
  p.alpha = 1.5;
  CHECK_THROWS_AS(schedule(p), InputError);  // chi is required
  p.chi = 0.01;
  p.L0 = 1e300;
  CHECK_THROWS_AS(schedule(p), InputError);
}

TEST_CASE("conditions at a fixed eps'") {
  const auto k = constants_alpha1(2, 1.0, 1.0);
  const auto loose = check_conditions(0.5, 2, k.D, k.chi, 1.0, 1.0);
  const auto& e1 = find(loose, "E1");
  CHECK_FALSE(e1.holds);
  CHECK(e1.rhs == doctest::Approx(1.0 / (6.0 * std::numbers::e)));
  CHECK(e1.rhs == doctest::Approx(0.0613).epsilon(1e-3));

  const auto tight = check_conditions(1e-4, 2, k.D, k.chi, 1.0, 1.0);
  for (const char* name : {"E1", "E2", "E3", "E4", "E5", "E6", "E7"}) {
    INFO(name);
    CHECK(find(tight, name).holds);
  }
  CHECK(std::isfinite(find(tight, "E3").lhs));
  CHECK_THROWS_AS(check_conditions(0.0, 2, k.D, k.chi, 1.0, 1.0), InputError);
}

TEST_CASE("prefix conditions are reported") {
  const auto k = constants_alpha1(2, 1.0, 1.0);
  const auto rows = schedule(base_params());
  const auto rep = check_conditions(1e-4, 2, k.D, k.chi, 1.0, 1.0, &rows);
  const auto& suff = find(rep, "E8-sufficient");
  CHECK(suff.holds);
  const auto& e8 = find(rep, "E8");
  CHECK(e8.holds == (e8.lhs <= e8.rhs));
}
