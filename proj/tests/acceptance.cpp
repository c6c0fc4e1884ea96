// Acceptance suite: one PASS/FAIL line per criterion, plus sub-lines where a
// criterion has several clauses. Exit status is non-zero if any line fails
// that is not listed in kKnownRed.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "icol/audit.hpp"
#include "icol/bandit.hpp"
#include "icol/experiment.hpp"
#include "icol/full_info.hpp"
#include "icol/output.hpp"
#include "icol/panel_io.hpp"
#include "icol/wagering.hpp"
#include "oracles.hpp"

using namespace icol;

namespace {

// Lines that fail by construction; see the project notes for the analysis.
const std::set<std::string> kKnownRed = {"7a", "7d", "10c"};

int g_unexpected = 0;

void report(const std::string& id, bool pass, const std::string& detail) {
  const bool known = !pass && kKnownRed.count(id) > 0;
  if (!pass && !known) ++g_unexpected;
  std::printf("%s %-4s %s%s\n", pass ? "PASS" : "FAIL", id.c_str(), detail.c_str(),
              known ? " [known]" : "");
  std::fflush(stdout);
}

void info(const std::string& id, const std::string& detail) {
  std::printf("INFO %-4s %s\n", id.c_str(), detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

ForecastPanel random_panel(std::size_t k, std::size_t t, RngStream rng) {
  std::vector<double> reports(k * t);
  for (auto& x : reports) x = rng.uniform();
  std::vector<Outcome> outcomes(t);
  for (auto& r : outcomes) r = rng.bernoulli(0.5) ? Outcome::kOne : Outcome::kZero;
  return ForecastPanel(k, std::move(reports), std::move(outcomes));
}

double max_of(const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); }

// Least-squares slope of y against x = first, first+1, ...
double ls_slope(const std::vector<double>& y, std::size_t first, std::size_t last) {
  const double n = static_cast<double>(last - first);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = first; i < last; ++i) {
    const double x = static_cast<double>(i + 1);
    sx += x;
    sy += y[i];
    sxx += x * x;
    sxy += x * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::string serialize(const std::vector<TraceEnsemble>& ensembles) {
  std::ostringstream out;
  write_csv(ensembles, out);
  for (const auto& e : ensembles) out << to_json(e, true);
  return out.str();
}

// ---------------------------------------------------------------------------

void criterion1() {
  Stopwatch clock;
  const auto loss = LossFunction::quadratic();
  RngStream rng(101, 0);
  std::size_t violations = 0;
  double worst_balance = 0.0, worst_oracle = 0.0;
  for (int n = 0; n < 100000; ++n) {
    const std::size_t k = 1 + rng.uniform_index(10);
    std::vector<double> reports(k), raw(k);
    for (auto& p : reports) p = rng.uniform();
    for (auto& w : raw) w = rng.uniform();
    raw[rng.uniform_index(k)] += 1e-3;
    const WeightVector w = WeightVector::normalized(raw);
    const Outcome r = rng.bernoulli(0.5) ? Outcome::kOne : Outcome::kZero;
    const auto g = wswm_payoffs(WagerProfile(reports, w, r), loss);
    std::vector<double> l(k);
    for (std::size_t i = 0; i < k; ++i) l[i] = oracle::quad(reports[i], r == Outcome::kOne);
    const auto expect = oracle::wswm(w.vector(), l);
    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      if (g[i] < 0.0) ++violations;
      sum += g[i];
      worst_oracle = std::max(worst_oracle, std::abs(g[i] - expect[i]));
    }
    worst_balance = std::max(worst_balance, std::abs(sum - 1.0));
  }

  double worst_gain = -1.0;
  for (int ctx = 0; ctx < 50; ++ctx) {
    const std::size_t k = 2 + rng.uniform_index(9);
    std::vector<double> reports(k), raw(k);
    for (auto& p : reports) p = rng.uniform();
    for (auto& w : raw) w = rng.uniform() + 1e-3;
    const WeightVector w = WeightVector::normalized(raw);
    const std::size_t i = rng.uniform_index(k);
    std::vector<double> l1(k), l0(k);
    auto expected = [&](double p, double b) {
      reports[i] = p;
      for (std::size_t j = 0; j < k; ++j) {
        l1[j] = loss(reports[j], Outcome::kOne);
        l0[j] = loss(reports[j], Outcome::kZero);
      }
      return b * wswm_payoffs_from_losses(w, l1)[i] +
             (1 - b) * wswm_payoffs_from_losses(w, l0)[i];
    };
    for (int bi = 0; bi <= 100; ++bi) {
      const double b = bi / 100.0;
      const double truthful = expected(b, b);
      for (int pi = 0; pi <= 1000; ++pi) {
        worst_gain = std::max(worst_gain, expected(pi / 1000.0, b) - truthful);
      }
    }
  }
  const double secs = clock.seconds();
  report("1", violations == 0 && worst_balance <= 1e-12 && worst_oracle <= 1e-12 &&
                  worst_gain <= 1e-12 && secs < 60.0,
         fmt("WSWM: 1e5 profiles, negative payoffs=%zu, max |sum-1|=%.2e, max |lib-oracle|=%.2e; "
             "IC grid max gain=%.2e; %.1fs",
             violations, worst_balance, worst_oracle, worst_gain, secs));
}

// ---------------------------------------------------------------------------

std::vector<TraceEnsemble> c2_random(std::size_t k) {
  const std::size_t t = 267;
  std::vector<ForecastPanel> panels;
  const RngStream base(2000 + k, 0);
  for (std::uint64_t r = 0; r < 200; ++r) panels.push_back(random_panel(k, t, base.derive(r)));
  AlgorithmSpec spec = AlgorithmSpec::parse("WSU:select-one");
  spec.eta = std::sqrt(std::log(double(k)) / t);
  const std::vector<AlgorithmSpec> algos = {spec};
  BenchmarkOptions options;
  options.seed = 20 + k;
  return run_benchmark(panels, algos, options);
}

std::vector<TraceEnsemble> c2_monte_carlo(std::size_t k) {
  SimulationSpec sim;
  sim.num_experts = k;
  sim.horizon = 267;
  sim.repetitions = 200;
  sim.seed = 30 + k;
  AlgorithmSpec spec = AlgorithmSpec::parse("WSU:select-one");
  spec.eta = std::sqrt(std::log(double(k)) / sim.horizon);
  const std::vector<AlgorithmSpec> algos = {spec};
  return run_monte_carlo(sim, algos, {});
}

std::vector<std::vector<TraceEnsemble>> criterion2() {
  Stopwatch clock;
  std::vector<std::vector<TraceEnsemble>> outputs;
  bool all = true;
  std::string detail;
  for (std::size_t k : {5, 10, 25}) {
    const double bound = 2.0 * std::sqrt(267.0 * std::log(double(k)));
    auto a = c2_random(k);
    auto b = c2_monte_carlo(k);
    const double ra = max_of(a[0].mean), rb = max_of(b[0].mean);
    all = all && ra <= bound && rb <= bound;
    detail += fmt(" K=%zu: max mean regret random=%.2f mc=%.2f bound=%.2f;", k, ra, rb, bound);
    outputs.push_back(std::move(a));
    outputs.push_back(std::move(b));
  }
  const double secs = clock.seconds();
  report("2", all && secs < 120.0, "WSU regret bound, 200 runs each." + detail +
                                        fmt(" %.1fs", secs));
  return outputs;
}

// ---------------------------------------------------------------------------

std::vector<TraceEnsemble> c3_runs() {
  const std::size_t k = 10, t = 2000;
  std::vector<ForecastPanel> panels;
  const RngStream base(3000, 0);
  for (std::uint64_t r = 0; r < 100; ++r) panels.push_back(random_panel(k, t, base.derive(r)));
  const std::vector<AlgorithmSpec> algos = {AlgorithmSpec::parse("WSU-UX")};
  BenchmarkOptions options;
  options.seed = 33;
  return run_benchmark(panels, algos, options);
}

std::vector<TraceEnsemble> criterion3() {
  Stopwatch clock;
  const std::size_t k = 10, t = 2000;
  auto out = c3_runs();
  const double bound =
      2.0 * std::pow(4.0 * t, 2.0 / 3.0) * std::cbrt(k * std::log(double(k)));
  const double final_mean = out[0].mean.back();

  // Independent validation of every pi and pi_tilde on a direct run.
  std::size_t bad = 0;
  const RngStream base(3000, 0);
  const auto params = BanditParams::horizon_defaults(k, t);
  for (std::uint64_t r = 0; r < 100; ++r) {
    const auto panel = random_panel(k, t, base.derive(r));
    const auto run = run_bandit(panel, BanditAlgorithm::kWsuUx, {}, RngStream(34, r));
    for (std::size_t s = 0; s < t; ++s) {
      if (!is_valid_simplex(run.weights[s].values())) ++bad;
      if (!is_valid_simplex(run.sampling[s].values())) ++bad;
      for (std::size_t i = 0; i < k; ++i) {
        const double mix = (1 - params.gamma) * run.weights[s][i] + params.gamma / k;
        if (std::abs(mix - run.sampling[s][i]) > 1e-12) ++bad;
      }
    }
  }
  const double secs = clock.seconds();
  report("3", t >= k * std::log(double(k)) && bad == 0 && out[0].metadata.invalid_rounds == 0 &&
                  final_mean <= bound && secs < 180.0,
         fmt("WSU-UX K=10 T=2000, 100 runs: invalid pi/pi~=%zu+%zu, mean final regret=%.2f "
             "bound=%.2f (eta=%.5f gamma=%.4f); %.1fs",
             out[0].metadata.invalid_rounds, bad, final_mean, bound, params.eta, params.gamma,
             secs));
  return out;
}

// ---------------------------------------------------------------------------

void criterion4() {
  RngStream rng(404, 0);
  double worst = 0.0;
  for (int n = 0; n < 10000; ++n) {
    const std::size_t k = 2 + rng.uniform_index(15);
    std::vector<double> raw(k), l(k);
    for (auto& x : raw) x = rng.uniform() + 1e-6;
    for (auto& x : l) x = rng.uniform();
    const double gamma = 0.01 + 0.48 * rng.uniform();
    const WeightVector pt = exploration_mix(WeightVector::normalized(raw), gamma);
    const auto m = estimator_moments_check(pt, l);
    for (std::size_t i = 0; i < k; ++i) {
      worst = std::max(worst, std::abs(m.mean[i] - l[i]));
      worst = std::max(worst, std::abs(m.second_moment[i] - l[i] * l[i] / pt[i]));
    }
  }
  report("4a", worst <= 1e-12,
         fmt("estimator exact moments over 1e4 rounds: max error=%.2e", worst));

  const std::size_t k = 4;
  const WeightVector pi({0.1, 0.2, 0.3, 0.4});
  const BanditParams params{0.01, 0.2};
  const std::vector<double> l = {0.9, 0.1, 0.5, 0.7};
  std::vector<double> sum(k, 0.0), sq(k, 0.0);
  const int draws = 1000000;
  const WeightVector pt = exploration_mix(pi, params.gamma);
  for (int n = 0; n < draws; ++n) {
    const std::size_t chosen = rng.categorical(pt.values());
    const auto step = wsu_ux_update(pi, params, chosen, l[chosen]);
    for (std::size_t i = 0; i < k; ++i) {
      const double x = step.round.estimated_losses[i];
      sum[i] += x;
      sq[i] += x * x;
    }
  }
  double worst_z = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double mean = sum[i] / draws;
    const double var = sq[i] / draws - mean * mean;
    worst_z = std::max(worst_z, std::abs(mean - l[i]) / std::sqrt(var / draws));
  }
  report("4b", worst_z <= 3.0,
         fmt("estimator sampled mean over 1e6 draws: max |z|=%.2f", worst_z));
}

// ---------------------------------------------------------------------------

void criterion5() {
  const double eta = std::sqrt(std::log(3.0) / 100.0);
  const auto ex = mwu_normalization_example(AuditConfig{});
  const double d = central_difference(
      [&](double p) { return expected_next_weight_mwu(p, 3, eta); }, 0.5);
  const double best = ex.report.best_deviation_reports.at(0);
  report("5", ex.report.verdict == Verdict::kViolation && best > 0.5 && d > 0.0,
         fmt("MWU K=3 T=100 b=0.5: verdict=%s best report=%.3f gap=%.3e d/dp at 0.5=%.3e",
             std::string(to_string(ex.report.verdict)).c_str(), best, ex.report.gap, d));
}

void criterion6() {
  auto model = gradient_descent_audit_model(WeightVector::uniform(10), 0.1);
  const auto ctx = myopic_context(0, std::vector<double>(10, 0.0), 0.6);
  const double truthful = 0.6, lie = 0.61;
  const double a = expected_final_weight(*model, ctx, std::span(&truthful, 1));
  const double b = expected_final_weight(*model, ctx, std::span(&lie, 1));
  const auto ex = gradient_descent_example(AuditConfig{});
  report("6", b - a > 0.0 && ex.report.verdict == Verdict::kViolation,
         fmt("GD pi=0.1 b=0.6 eta=0.1: E[w|0.61]-E[w|0.6]=%.3e, audit verdict=%s", b - a,
             std::string(to_string(ex.report.verdict)).c_str()));
}

// ---------------------------------------------------------------------------

double wsu_two_round_oracle(double p1, double p2, double eta) {
  double v = 0.0;
  for (int r1 = 0; r1 <= 1; ++r1) {
    for (int r2 = 0; r2 <= 1; ++r2) {
      const double w = (r1 ? 0.7 : 0.3) * (r2 ? 0.6 : 0.4);
      auto pi = oracle::wsu({0.5, 0.5}, {oracle::quad(p1, r1), oracle::quad(0.4, r1)}, eta);
      pi = oracle::wsu(pi, {oracle::quad(p2, r2), oracle::quad(0.0, r2)}, eta);
      v += w * pi[0];
    }
  }
  return v;
}

void criterion7() {
  double err_printed = 0.0, err_cubic = 0.0, err_dev = 0.0, err_oracle = 0.0;
  for (int n = 1; n <= 5; ++n) {
    const double eta = n / 10.0;
    auto model = wsu_audit_model(WeightVector::uniform(2), eta);
    AuditContext ctx;
    ctx.expert = 0;
    ctx.beliefs = {0.7, 0.6};
    ctx.reports = {{0.7, 0.4}, {0.6, 0.0}};
    const std::vector<double> truthful = {0.7, 0.6}, lie = {0.699, 0.6};
    const double t = expected_final_weight(*model, ctx, truthful);
    const double d = expected_final_weight(*model, ctx, lie);
    err_oracle = std::max({err_oracle, std::abs(t - wsu_two_round_oracle(0.7, 0.6, eta)),
                           std::abs(d - wsu_two_round_oracle(0.699, 0.6, eta))});
    err_printed = std::max(err_printed,
                           std::abs(t - (0.5 + 0.1125 * eta - 0.00188325 * eta * eta)));
    err_cubic = std::max(err_cubic,
                         std::abs(t - (0.5 + 0.1125 * eta - 0.00188325 * eta * eta * eta)));
    err_dev = std::max(
        err_dev, std::abs(d - (0.5 + 0.112499944 * eta - 0.0018719238 * eta * eta * eta)));
  }
  report("7a", err_printed <= 1e-6,
         fmt("WSU forward truthful value vs 0.5+0.1125e-0.00188325e^2: max error=%.2e",
             err_printed));
  report("7b", err_cubic <= 1e-6,
         fmt("WSU forward truthful value vs 0.5+0.1125e-0.00188325e^3: max error=%.2e",
             err_cubic));
  report("7c", err_dev <= 1e-6 && err_oracle <= 1e-15,
         fmt("WSU forward deviating value vs 0.5+0.112499944e-0.0018719238e^3: max error=%.2e "
             "(enumeration vs oracle %.1e)",
             err_dev, err_oracle));

  auto model = wsu_audit_model(WeightVector::uniform(2), 0.1);
  AuditContext ctx;
  ctx.expert = 0;
  ctx.beliefs = {0.7, 0.6};
  ctx.reports = {{0.7, 0.4}, {0.6, 0.0}};
  const std::vector<double> truthful = {0.7, 0.6}, lie = {0.699, 0.6};
  const double gain = expected_final_weight(*model, ctx, lie) -
                      expected_final_weight(*model, ctx, truthful);
  report("7d", gain > 0.0,
         fmt("eta=0.1: E[pi|0.699]-E[pi|0.7]=%.3e by exact enumeration", gain));

  // Search near the truthful report for a deviation that does win at eta=0.1.
  double best_p = 0.7, best_gain = 0.0;
  for (int n = 0; n <= 2000; ++n) {
    const std::vector<double> own = {0.699 + n * 1e-6, 0.6};
    const double g = expected_final_weight(*model, ctx, own) -
                     expected_final_weight(*model, ctx, truthful);
    if (g > best_gain) {
      best_gain = g;
      best_p = own[0];
    }
  }
  info("7e", fmt("eta=0.1: best first-round report on [0.699,0.701] step 1e-6 is %.6f, gain %.3e",
                 best_p, best_gain));
  double threshold = 0.0;
  for (int n = 1; n <= 5000; ++n) {
    const double eta = n * 1e-4;
    auto m = wsu_audit_model(WeightVector::uniform(2), eta);
    if (expected_final_weight(*m, ctx, lie) > expected_final_weight(*m, ctx, truthful)) {
      threshold = eta;
      break;
    }
  }
  info("7f", fmt("smallest eta (step 1e-4) where 0.699 beats 0.7: %.4f", threshold));
}

// ---------------------------------------------------------------------------

void criterion8() {
  RngStream rng(808, 0);
  std::size_t violations = 0;
  double worst_gap = 0.0;
  for (int n = 0; n < 50; ++n) {
    std::vector<std::vector<double>> prior(rng.uniform_index(3), std::vector<double>(2));
    for (auto& row : prior) {
      for (auto& x : row) x = rng.uniform();
    }
    auto model = elfx_audit_model(2, prior);
    AuditContext ctx;
    ctx.expert = rng.uniform_index(2);
    ctx.beliefs = {rng.uniform(), rng.uniform()};
    ctx.reports = {{rng.uniform(), rng.uniform()}, {rng.uniform(), rng.uniform()}};
    const auto r = forward_audit(*model, ctx, AuditConfig{});
    if (r.verdict != Verdict::kIcOnGrid) ++violations;
    worst_gap = std::max(worst_gap, r.gap);
  }
  report("8", violations == 0 && worst_gap <= 1e-9,
         fmt("ELF-X forward audit, 50 K=2 depth-2 contexts: violations=%zu max gap=%.2e",
             violations, worst_gap));
}

// ---------------------------------------------------------------------------

ForecastPanel alternating_panel(std::size_t t) {
  std::vector<double> reports;
  for (std::size_t s = 0; s < t; ++s) {
    reports.push_back(s % 2 == 0 ? 0.0 : 1.0);
    reports.push_back(s % 2 == 0 ? 1.0 : 0.0);
  }
  return ForecastPanel(2, std::move(reports), std::vector<Outcome>(t, Outcome::kOne));
}

std::vector<TraceEnsemble> c9_runs() {
  const std::vector<ForecastPanel> panels = {alternating_panel(500)};
  const auto algos = parse_algorithm_list("ELF:select-one,WSU:select-one");
  BenchmarkOptions options;
  options.repetitions = 100;
  options.seed = 99;
  return run_benchmark(panels, algos, options);
}

std::vector<TraceEnsemble> criterion9() {
  auto out = c9_runs();
  const auto& elf = out[0];
  const auto& wsu = out[1];
  const double slope = ls_slope(elf.mean, 0, elf.rounds());
  const double bound = 2.0 * std::sqrt(500.0 * std::log(2.0));
  report("9", slope >= 0.1 && wsu.mean.back() <= bound,
         fmt("alternating leader T=500, 100 runs: ELF regret slope=%.3f (final %.1f); "
             "WSU final regret=%.2f bound=%.2f",
             slope, elf.mean.back(), wsu.mean.back(), bound));
  return out;
}

// ---------------------------------------------------------------------------

const char* kC10Algorithms = "WSU:select-one,MWU:select-one,WSU:aggregate,MWU:aggregate";

std::vector<TraceEnsemble> c10_runs() {
  SimulationSpec sim;
  sim.num_experts = 12;
  sim.horizon = 600;
  sim.repetitions = 20;
  sim.seed = 10;
  const auto algos = parse_algorithm_list(kC10Algorithms);
  return run_monte_carlo(sim, algos, {});
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

std::vector<TraceEnsemble> criterion10() {
  auto out = c10_runs();
  const auto& wsu1 = out[0];
  const auto& mwu1 = out[1];
  const auto& wsua = out[2];
  const auto& mwua = out[3];
  const std::size_t t = wsu1.rounds();

  report("10a", wsua.mean.back() < 0.0 && mwua.mean.back() < 0.0,
         fmt("K=12 T=600 20 reps: aggregate mean final regret WSU=%.2f MWU=%.2f",
             wsua.mean.back(), mwua.mean.back()));

  std::vector<double> per_round(t);
  for (std::size_t s = 0; s < t; ++s) per_round[s] = wsu1.mean[s] / double(s + 1);
  const std::size_t q = t - t / 4;
  const double slope = ls_slope(per_round, q, t);
  report("10b", slope < 0.0 && per_round.back() < per_round[q - 1],
         fmt("WSU select-one regret/t over final quartile: %.4f -> %.4f, slope=%.2e",
             per_round[q - 1], per_round.back(), slope));

  const double d1 = max_abs_diff(wsu1.mean, mwu1.mean);
  const double da = max_abs_diff(wsua.mean, mwua.mean);
  const double s1 = std::abs(wsu1.mean.back()), sa = std::abs(wsua.mean.back());
  report("10c", d1 < 0.1 * s1,
         fmt("select-one max |WSU-MWU| mean curve gap %.3f, limit %.3f", d1, 0.1 * s1));
  report("10e", da < 0.1 * sa,
         fmt("aggregate max |WSU-MWU| mean curve gap %.3f, limit %.3f", da, 0.1 * sa));

  // Same panels and learner streams, regret from the expected per-round loss <pi, l>.
  SimulationSpec sim;
  sim.num_experts = 12;
  sim.horizon = 600;
  sim.repetitions = 20;
  sim.seed = 10;
  std::vector<double> expected[2] = {std::vector<double>(t, 0.0), std::vector<double>(t, 0.0)};
  double noise = 0.0;
  for (std::uint64_t r = 0; r < sim.repetitions; ++r) {
    const auto panel = simulate_panel(sim, RngStream(sim.seed, 1).derive(r));
    for (std::uint64_t a = 0; a < 2; ++a) {
      const auto run = run_full_info(panel, a ? Algorithm::kMwu : Algorithm::kWsu,
                                     PredictionMode::kSelectOne, {},
                                     RngStream(sim.seed, 2).derive(r, a));
      const auto trace = cumulative_regret(run.expected_losses, panel, LossFunction::quadratic());
      double gap = 0.0;
      for (std::size_t s = 0; s < t; ++s) {
        expected[a][s] += trace.regret[s] / double(sim.repetitions);
        gap += run.learner_losses[s] - run.expected_losses[s];
      }
      noise += gap * gap;
    }
  }
  const double de = max_abs_diff(expected[0], expected[1]);
  info("10f", fmt("select-one with expected per-round loss: gap %.3f, limit %.3f; "
                  "rms sampling noise per run %.2f, std error of the mean difference %.2f",
                  de, 0.1 * std::abs(expected[0].back()),
                  std::sqrt(noise / (2.0 * sim.repetitions)),
                  std::sqrt(2.0 * noise / (2.0 * sim.repetitions) / double(sim.repetitions))));
  return out;
}

void criterion10_full() {
  Stopwatch clock;
  SimulationSpec sim;
  sim.seed = 11;
  const auto algos = parse_algorithm_list(kC10Algorithms);
  const auto out = run_monte_carlo(sim, algos, {});
  const double secs = clock.seconds();
  report("10d", secs < 1800.0 && out.size() == 4 && out[0].rounds() == 2500,
         fmt("full Monte Carlo spec K=50 T=2500 50 reps, 4 variants: %.1fs; final mean regret "
             "WSU/MWU select-one %.2f/%.2f, aggregate %.2f/%.2f",
             secs, out[0].mean.back(), out[1].mean.back(), out[2].mean.back(),
             out[3].mean.back()));
}

// ---------------------------------------------------------------------------

std::vector<TraceEnsemble> c11_bench(const ForecastPanel& panel) {
  const auto groups = sample_expert_groups(panel, 10, 10, RngStream(1111, 3));
  const auto algos =
      parse_algorithm_list("WSU:select-one,WSU:aggregate,MWU:select-one,Hedge:aggregate,WSU-UX,EXP3");
  BenchmarkOptions options;
  options.repetitions = 5;
  options.seed = 1112;
  return run_benchmark(groups, algos, options);
}

void criterion11(const std::string& panel_path) {
  std::optional<IngestResult> loaded;
  try {
    loaded.emplace(ingest_panel(panel_path));
  } catch (const std::exception& e) {
    report("11", false, std::string("ingest failed: ") + e.what());
    return;
  }
  const IngestResult& ingested = *loaded;
  const auto& panel = ingested.panel;
  std::ostringstream normalized;
  write_panel_csv(panel, normalized, ingested.event_ids);
  std::istringstream again(normalized.str());
  const auto reread = ingest_panel(again, "normalized");
  std::ostringstream twice;
  write_panel_csv(reread.panel, twice, reread.event_ids);

  const auto a = c11_bench(panel);
  const auto b = c11_bench(panel);
  std::size_t invalid = 0;
  for (const auto& e : a) invalid += e.metadata.invalid_rounds;

  // Direct check of the full-information weights on the whole panel.
  std::size_t bad = 0;
  for (Algorithm alg : {Algorithm::kWsu, Algorithm::kMwu, Algorithm::kHedge}) {
    const auto run = run_full_info(panel, alg, PredictionMode::kSelectOne, {}, RngStream(5, 5));
    for (const auto& w : run.weights) bad += !is_valid_simplex(w.values());
  }
  const auto ux = run_bandit(panel, BanditAlgorithm::kWsuUx, {}, RngStream(5, 6));
  for (std::size_t s = 0; s < ux.weights.size(); ++s) {
    bad += !is_valid_simplex(ux.weights[s].values());
    bad += !is_valid_simplex(ux.sampling[s].values());
  }
  const bool stable = serialize(a) == serialize(b) && normalized.str() == twice.str();
  report("11", stable && invalid == 0 && bad == 0 && !ingested.report.dropped_experts.empty(),
         fmt("synthetic panel: %zu experts x %zu events kept, %zu dropped; 10 groups of 10, "
             "6 algorithms x 5 reps: seed-stable=%s, invalid pi rounds=%zu+%zu",
             panel.num_experts(), panel.horizon(), ingested.report.dropped_experts.size(),
             stable ? "yes" : "no", invalid, bad));
}

// ---------------------------------------------------------------------------

void criterion12(const std::vector<std::vector<TraceEnsemble>>& first2,
                 const std::vector<TraceEnsemble>& first3,
                 const std::vector<TraceEnsemble>& first9,
                 const std::vector<TraceEnsemble>& first10) {
  std::vector<std::string> differing;
  std::size_t idx = 0;
  for (std::size_t k : {5, 10, 25}) {
    if (serialize(first2[idx++]) != serialize(c2_random(k))) differing.push_back(fmt("2/random/K=%zu", k));
    if (serialize(first2[idx++]) != serialize(c2_monte_carlo(k))) differing.push_back(fmt("2/mc/K=%zu", k));
  }
  if (serialize(first3) != serialize(c3_runs())) differing.push_back("3");
  if (serialize(first9) != serialize(c9_runs())) differing.push_back("9");
  if (serialize(first10) != serialize(c10_runs())) differing.push_back("10");
  std::string detail = "rerun of criteria 2, 3, 9, 10 gives byte-identical CSV/JSON";
  if (!differing.empty()) {
    detail = "outputs differ for:";
    for (const auto& d : differing) detail += " " + d;
  }
  report("12", differing.empty(), detail);
}

}  // namespace

int main(int argc, char** argv) {
  const std::string panel_path = argc > 1 ? argv[1] : "data/synthetic_panel.csv";
  Stopwatch clock;
  criterion1();
  const auto c2 = criterion2();
  const auto c3 = criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  const auto c9 = criterion9();
  const auto c10 = criterion10();
  criterion10_full();
  criterion11(panel_path);
  criterion12(c2, c3, c9, c10);
  std::printf("total %.1fs, unexpected failures: %d\n", clock.seconds(), g_unexpected);
  return g_unexpected == 0 ? 0 : 1;
}
