// Acceptance suite: one PASS/FAIL line per criterion; exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "divcert/accel.hpp"
#include "divcert/descent.hpp"
#include "divcert/dualgeom.hpp"
#include "divcert/harness.hpp"
#include "divcert/objectives.hpp"
#include "divcert/ode.hpp"
#include "support.hpp"

using namespace divcert;
using namespace divcert::testing;

namespace {

const std::filesystem::path kSource = DIVCERT_SOURCE_DIR;

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Collects the first failure message; later checks still run.
class Check {
 public:
  void require(bool ok, const std::string& what) {
    if (!ok && pass_) {
      pass_ = false;
      fail_ = what;
    }
  }
  Outcome done(const std::string& summary) const { return {pass_, pass_ ? summary : fail_}; }

 private:
  bool pass_ = true;
  std::string fail_;
};

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

struct Instance {
  ObjectivePtr f;
  Vector p_star;
  double inf_g;
};

std::vector<Instance> paper_instances() {
  return {{paper_geometric(), Vector{0.3, 0.9}, paper_geometric_inf_g()}, {paper_ellipsoid(), Vector{1, 2}, 0.0}};
}

BoundsContext exact_context(const Instance& in, const Vector& x0) {
  return make_bounds_context(*in.f, x0, in.p_star, in.f->shifted_value(x0, in.p_star) - in.inf_g);
}

// ---- criteria ----

Outcome ac1() {
  Check c;
  double worst_ms = 0;
  const DualSetDescription sets[] = {*paper_geometric()->dual_set(), *paper_ellipsoid()->dual_set()};
  const Vector expect[] = {Vector{0.3, 0.9}, Vector{1, 2}};
  for (int i = 0; i < 2; ++i) {
    min_norm_point(sets[i]);  // warm-up
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = min_norm_point(sets[i]);
    const double ms = ms_since(t0);
    worst_ms = std::max(worst_ms, ms);
    c.require(max_abs_diff(r.point, expect[i]) <= 1e-9, "instance " + std::to_string(i) + " point off");
    c.require(ms < 1.0, fmt("instance %g took %.3f ms", i, ms));
  }
  return c.done(fmt("(0.3,0.9) and (1,2) within 1e-9, slowest %.4f ms < 1 ms", worst_ms));
}

Outcome ac2() {
  Check c;
  Gen gen(2024);
  double worst = 0;
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < 500; ++i) {
    auto v = gen.points(gen.index(1, 12), 2, 5);
    // half the clouds are moved off the origin so the answer is nonzero
    if (i % 2) {
      const Vector shift = gen.box(2, 8);
      for (auto& p : v) p += shift;
    }
    worst = std::max(worst, norm(min_norm_point(Polytope{v}).point - min_norm_bruteforce_2d(v).point));
  }
  const double ms = ms_since(t0);
  c.require(worst <= 1e-9, fmt("max disagreement %.3e", worst));
  c.require(ms < 5000, fmt("took %.0f ms", ms));
  return c.done(fmt("500 polytopes, max disagreement %.2e <= 1e-9, %.1f ms < 5 s", worst, ms));
}

Outcome ac3() {
  Check c;
  auto gp = paper_geometric();
  QuadraticObjective F(2);
  const auto sched = StepSchedule::constant(1.0 / 18);
  const auto md = run_mirror(*gp, F, Vector{0, 0}, sched, 1000);
  const auto gd = run_gd(*gp, Vector{0, 0}, sched, 1000);
  std::size_t equal = 0;
  for (std::size_t k = 0; k <= 1000; ++k) {
    const bool same = md.theta[k] == gd.x[k] && md.X[k] == gd.grad[k];
    c.require(same, "first mismatch at k = " + std::to_string(k));
    equal += same;
  }
  return c.done("theta_k == x_k and X_k == grad f(x_k) bit for bit, k = 0.." + std::to_string(equal - 1));
}

Outcome ac4() {
  Check c;
  double worst_rise = -1e300, worst_val = -1e300;
  for (const auto& in : paper_instances()) {
    for (auto kind : {ScheduleKind::Polynomial, ScheduleKind::NesterovMax}) {
      const Vector x0{0, 0};
      const auto s = make_schedule(kind, in.f->smoothness(), 1000);
      const auto t = run_nag(*in.f, x0, s, 1000);
      const auto e = energy_series(t, s, *in.f, x0, in.p_star, in.f->shifted_value(x0, in.p_star));
      for (std::size_t k = 1; k <= 1000; ++k) {
        const double rise = (e.V[k] - e.V[k - 1]) / e.scale[k];
        worst_rise = std::max(worst_rise, rise);
        worst_val = std::max(worst_val, e.V[k] / e.scale[k]);
        c.require(rise <= 1e-9, in.f->name() + " energy rises at k = " + std::to_string(k));
        c.require(e.V[k] <= 0.0, in.f->name() + " energy positive at k = " + std::to_string(k));
      }
    }
  }
  return c.done(fmt("2 instances x 2 schedules, max rise/scale %.2e <= 1e-9, max V/scale %.2e <= 0", worst_rise,
                    worst_val));
}

Outcome ac5() {
  Check c;
  const std::size_t K = 10000;
  double slack = 0;
  const auto t0 = std::chrono::steady_clock::now();
  for (const auto& in : paper_instances()) {
    const Vector x0{0, 0};
    const auto s = ScheduleA::polynomial(in.f->smoothness(), K);
    const auto ctx = exact_context(in, x0);
    const auto t = run_nag(*in.f, x0, s, K);
    const auto cs = certificates(t, s);
    const auto b = bound_series(s, ctx, K);
    const double ps = norm_sq(in.p_star);
    c.require(b.has_caps, "caps missing");
    for (std::size_t k = 1; k <= K; ++k) {
      const auto cb = certificate_bounds(b, ctx, k);
      const std::string at = in.f->name() + " k = " + std::to_string(k);
      const double lhs[] = {norm_sq(cs.p[k] - in.p_star), norm_sq(cs.q[k] - in.p_star), norm_sq(cs.p[k]) - ps,
                            norm_sq(cs.q[k]) - ps};
      const double rhs[] = {cb.p_err, cb.q_err, cb.p_gap.value_or(-1), cb.q_gap.value_or(-1)};
      for (int j = 0; j < 4; ++j) {
        c.require(rhs[j] >= 0 && lhs[j] <= rhs[j], "bound " + std::to_string(j) + " violated at " + at);
        if (rhs[j] > 0) slack = std::max(slack, lhs[j] / rhs[j]);
      }
      // C_k meets its cap with equality, so prefix sums may land an ulp above
      auto under = [](double v, double cap) { return v <= cap * (1 + 1e-12); };
      c.require(under(b.B[k], b.B_cap[k]) && under(b.Bt[k], b.Bt_cap[k]) && under(b.C[k], b.C_cap[k]) &&
                    under(b.Cp[k], b.Cp_cap[k]) && b.Ct[k] && under(*b.Ct[k], b.Ct_cap[k]) && b.Ctp[k] &&
                    under(*b.Ctp[k], b.Ctp_cap[k]),
                "exact bound above its cap at " + at);
    }
  }
  const double ms = ms_since(t0);
  c.require(ms < 10000, fmt("took %.0f ms", ms));
  return c.done(fmt("k <= 1e4 on both instances, max lhs/rhs %.3f, caps hold, %.0f ms < 10 s", slack, ms));
}

Outcome ac6() {
  Check c;
  const auto g = certify_nag(*paper_geometric(), 10000);
  const auto e = certify_nag(*paper_ellipsoid(), 10000);
  const auto sq = certify_nag(*square_geometric(), 10000);
  c.require(g.report.verdict == Verdict::Unbounded && g.report.witness_kind == "q" && *g.report.trigger_index <= 20,
            "geometric: not a q-trigger by k = 20");
  c.require(e.report.verdict == Verdict::Unbounded && *e.report.trigger_index <= 5, "ellipsoid: no trigger by k = 5");
  c.require(sq.report.verdict == Verdict::Inconclusive && sq.p.verdict == Verdict::Inconclusive &&
                sq.stop_index == 10000,
            "bounded control triggered");
  // the guaranteed indices from the cap inequality
  auto first_cap_k = [](double L, double ps, double budget) {
    std::size_t k = 1;
    while (!(128 * L / ((3.0 * k + 1) * (3.0 * k + 1)) < ps / budget)) ++k;
    return k;
  };
  c.require(first_cap_k(18, 0.9, std::log(4.0)) == 20 && first_cap_k(8, 5, 1) == 5, "cap thresholds are not 20 / 5");
  return c.done(fmt("geometric q-trigger at %g <= 20, ellipsoid at %g <= 5, square control inconclusive at 1e4",
                    g.report.trigger_index.value_or(0), e.report.trigger_index.value_or(0)));
}

Outcome ac7() {
  Check c;
  auto gp = paper_geometric();
  const auto gd = run_gd(*gp, Vector{0, 0}, StepSchedule::constant(1.0 / 18), 200);
  const auto rep = detect_unbounded_gd(gd, 18, 0.0);
  const auto nag = certify_nag(*gp, 200);
  // first integer above 2 L (M + f(0)) / |p*|^2 = 55.45
  const std::size_t guaranteed = static_cast<std::size_t>(std::floor(2 * 18 * std::log(4.0) / 0.9)) + 1;
  c.require(guaranteed == 56, "guarantee is not 56");
  c.require(rep.verdict == Verdict::Unbounded && *rep.trigger_index <= 56, "gradient descent missed k = 56");
  c.require(nag.report.verdict == Verdict::Unbounded && *nag.report.trigger_index < *rep.trigger_index,
            "accelerated trigger not earlier");
  return c.done(fmt("gradient descent triggers at %g <= 56, accelerated at %g", rep.trigger_index.value_or(0),
                    nag.report.trigger_index.value_or(0)));
}

Outcome ac8() {
  Check c;
  Gen gen(8);
  double slack = 0;
  for (const auto& in : paper_instances()) {
    const Vector x0{0, 0};
    const auto s = ScheduleA::polynomial(in.f->smoothness(), 1000);
    const auto t = run_nag(*in.f, x0, s, 1000);
    for (int i = 0; i < 20; ++i) {
      const Vector w = gen.box(2, 5);
      const double gw = in.f->shifted_value(w, in.p_star);
      for (std::size_t k = 1; k <= 1000; ++k) {
        const double lhs = in.f->shifted_value(t.x[k], in.p_star) - gw;
        const double rhs = 2 * norm_sq(w - x0) / s.A(k);
        c.require(lhs <= rhs + 1e-12 * (1 + std::abs(gw)), in.f->name() + " value bound at k = " + std::to_string(k));
        slack = std::max(slack, lhs / rhs);
      }
    }
  }
  auto gp = paper_geometric();
  const auto st = newton_polytope_stats(*gp);
  const auto s = ScheduleA::polynomial(18, 1000);
  const auto t = run_nag(*gp, Vector{0, 0}, s, 1000);
  std::size_t checked = 0, first = 0;
  for (std::size_t k = 1; k <= 1000; ++k) {
    const auto bound = geometric_value_bound(s.A(k), st);
    if (!bound) continue;
    if (!checked) first = k;
    ++checked;
    c.require(gp->shifted_value(t.x[k], Vector{0.3, 0.9}) - paper_geometric_inf_g() <= *bound,
              "polytope value bound at k = " + std::to_string(k));
  }
  c.require(checked > 0, "polytope bound never applicable");
  return c.done(fmt("20 w x 2 instances, max lhs/rhs %.3f; polytope bound holds for k = %g..1000", slack, first));
}

Outcome ac9() {
  Check c;
  auto gp = paper_geometric();
  const auto rep = correspondence_check(*gp, Vector{0, 0}, 2.0, 20.0, 1e-3);
  c.require(rep.max_err() <= 1e-6, fmt("discrepancy %.3e at dt = 1e-3", rep.max_err()));
  c.require(rep.pass, "discrepancy above 10x the truncation estimate");
  // halving dt: fixed sample window [1, 20] so only the step changes
  std::vector<double> err;
  for (double dt : {0.01, 0.005, 0.0025}) err.push_back(correspondence_check(*gp, Vector{0, 0}, 2.0, 20.0, dt, 1.0).max_err());
  const double r1 = err[0] / err[1], r2 = err[1] / err[2];
  for (double r : {r1, r2}) c.require(r >= 16 / 1.25 && r <= 16 * 1.2, fmt("halving ratio %.2f not within 20%% of 16", r));
  return c.done(
      fmt("max discrepancy %.2e <= 1e-6; halving ratios %.2f, %.2f (16 +- 20%%)", rep.max_err(), r1, r2));
}

Outcome ac10() {
  Check c;
  double slack = 0;
  for (const auto& in : paper_instances()) {
    const Vector x0{0, 0};
    const double dt = 1e-3;
    const auto fine = integrate_nag_ode(*in.f, x0, 2.0, 100.0, dt);
    const auto coarse = integrate_nag_ode(*in.f, x0, 2.0, 100.0, 2 * dt);
    const auto rep = continuous_bounds(fine, coarse, exact_context(in, x0), 100 * dt);
    c.require(rep.pass, in.f->name() + fmt(": a bound fails, max slack %.4f", rep.max_slack));
    c.require(!rep.rows.empty() && rep.rows.front().p_err_bound_r2.has_value(), "r = 2 families not checked");
    slack = std::max(slack, rep.max_slack);
  }
  return c.done(fmt("all families on both instances, t in [0.1, 100], max lhs/rhs %.3f", slack));
}

Outcome ac11() {
  Check c;
  std::string slopes;
  for (double alpha : {0.25, 0.5}) {
    OneDimTight f(alpha);
    const auto tr = integrate_nag_ode(f, Vector{0}, 2.0, 100.0, 1e-3);
    for (std::size_t i = 0; i < tr.t.size(); ++i) {
      if (std::abs(tr.p(i)[0]) < 1 - 1e-9) {
        c.require(false, fmt("|p| < 1 - 1e-9 at t = %g", tr.t[i]));
        break;
      }
    }
    std::vector<double> t, y;
    for (std::size_t i : sample_indices(tr, 10, 100)) {
      t.push_back(tr.t[i]);
      y.push_back(std::abs(tr.p(i)[0]) - 1);
    }
    const double slope = fit_loglog_slope(t, y);
    const double target = -2 * (1 + alpha);
    c.require(std::abs(slope - target) <= 0.3, fmt("alpha %g: slope %.3f vs %.2f", alpha, slope, target));
    slopes += (slopes.empty() ? "" : ", ") + fmt("alpha %g: %.3f (target %.2f)", alpha, slope, target);
  }
  return c.done("|p| >= 1 - 1e-9 throughout; slopes on [10, 100]: " + slopes);
}

// column of a CSV by name
std::vector<double> column(const std::string& csv, const std::string& name) {
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  std::size_t idx = 0;
  bool found = false;
  {
    std::istringstream h(line);
    for (std::string c; std::getline(h, c, ','); ++idx) {
      if (c == name) {
        found = true;
        break;
      }
    }
  }
  if (!found) return {};
  std::vector<double> out;
  while (std::getline(in, line)) {
    std::istringstream r(line);
    std::string cell;
    for (std::size_t i = 0; i <= idx; ++i) std::getline(r, cell, ',');
    out.push_back(std::stod(cell));
  }
  return out;
}

Outcome ac12() {
  Check c;
  std::string info;
  for (const char* file : {"fig1_geometric.json", "fig2_ellipsoid.json"}) {
    const auto r = run_experiment(load_config(kSource / "configs" / file));
    c.require(r.pass(), std::string(file) + ": bound assertions fail");
    const auto ks = column(r.csv, "k");
    c.require(!ks.empty() && ks.back() >= 1000, std::string(file) + ": fewer than 1000 rows");
    for (const char* col : {"p_err_sq", "q_err_sq", "g_minus_inf"}) {
      const auto v = column(r.csv, col);
      c.require(v.size() == ks.size(), std::string(file) + ": missing " + col);
      if (v.size() != ks.size()) continue;
      // decade maxima over k in [1,10), [10,100), [100,1000] must fall
      double dec[3] = {0, 0, 0};
      for (std::size_t i = 0; i < ks.size(); ++i) {
        if (ks[i] < 1 || ks[i] > 1000) continue;
        const int d = ks[i] < 10 ? 0 : ks[i] < 100 ? 1 : 2;
        dec[d] = std::max(dec[d], std::abs(v[i]));
      }
      c.require(dec[1] < dec[0] && dec[2] < dec[1], std::string(file) + ": " + col + " does not decay by decade");
      if (std::string(col) == "q_err_sq") {
        info += std::string(info.empty() ? "" : "; ") + (file[3] == '1' ? "fig1" : "fig2") +
                fmt(" q_err_sq decade maxima %.1e > %.1e > %.1e", dec[0], dec[1], dec[2]);
      }
    }
  }
  return c.done("p/q errors and g gap decay decade over decade; " + info);
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"AC1 min-norm ground truth", ac1},         {"AC2 Wolfe vs brute force", ac2},
      {"AC3 GD equals mirror descent", ac3},      {"AC4 discrete energy", ac4},
      {"AC5 discrete certificate bounds", ac5},   {"AC6 accelerated detection", ac6},
      {"AC7 gradient descent detection", ac7},    {"AC8 value convergence", ac8},
      {"AC9 ODE correspondence", ac9},            {"AC10 continuous bounds", ac10},
      {"AC11 tight example", ac11},               {"AC12 figure series trends", ac12},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double ms = ms_since(t0);
    std::printf("[%s] %s: %s (%.0f ms)\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str(), ms);
    failed += !o.pass;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed ? 1 : 0;
}
