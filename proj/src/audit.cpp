#include "icol/audit.hpp"

#include <cmath>
#include <sstream>

#include "icol/errors.hpp"
#include "icol/full_info.hpp"

namespace icol {

void AuditConfig::validate() const {
  auto check_grid = [](std::size_t n, const char* what) {
    if (n < 3 || n % 2 == 0) {
      throw ParameterError(std::string(what) + " must be odd and at least 3, got " +
                           std::to_string(n));
    }
  };
  check_grid(report_grid_size, "report_grid_size");
  check_grid(belief_grid_size, "belief_grid_size");
  check_grid(joint_grid_size, "joint_grid_size");
  if (!(tolerance >= 0.0)) throw ParameterError("audit tolerance must be non-negative");
  if (horizon_depth == 0) throw ParameterError("horizon_depth must be at least 1");
}

std::vector<double> unit_grid(std::size_t size) {
  if (size < 2) throw ParameterError("grid needs at least two points");
  std::vector<double> grid(size);
  const double denom = static_cast<double>(size - 1);
  for (std::size_t i = 0; i < size; ++i) grid[i] = static_cast<double>(i) / denom;
  return grid;
}

std::string_view to_string(Verdict verdict) {
  return verdict == Verdict::kIcOnGrid ? "IC-on-grid" : "violation";
}

// -- Models -------------------------------------------------------------------

namespace {

void check_rounds(std::size_t k, std::span<const std::vector<double>> reports,
                  std::span<const Outcome> outcomes) {
  if (reports.size() != outcomes.size()) {
    throw DimensionError("audit model got " + std::to_string(reports.size()) +
                         " report rows for " + std::to_string(outcomes.size()) + " outcomes");
  }
  for (const auto& row : reports) {
    if (row.size() != k) {
      throw DimensionError("audit report row has " + std::to_string(row.size()) +
                           " entries for " + std::to_string(k) + " experts");
    }
  }
}

std::vector<double> losses_for(const LossFunction& loss, std::span<const double> reports,
                               Outcome r) {
  std::vector<double> out(reports.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = loss(reports[i], r);
  return out;
}

class WsuModel final : public AuditModel {
 public:
  WsuModel(WeightVector pi, double eta, LossFunction loss)
      : pi_(std::move(pi)), eta_(eta), loss_(std::move(loss)) {
    if (!(eta > 0.0 && eta <= kMaxWsuEta)) throw ParameterError("WSU step size must lie in (0, 0.5]");
  }

  std::string name() const override { return "WSU"; }
  std::size_t num_experts() const override { return pi_.size(); }

  double final_weight(std::size_t expert, std::span<const std::vector<double>> reports,
                      std::span<const Outcome> outcomes) const override {
    check_rounds(pi_.size(), reports, outcomes);
    WeightVector pi = pi_;
    for (std::size_t t = 0; t < reports.size(); ++t) {
      pi = wsu_update(pi, losses_for(loss_, reports[t], outcomes[t]), eta_);
    }
    return pi[expert];
  }

 private:
  WeightVector pi_;
  double eta_;
  LossFunction loss_;
};

class MultiplicativeModel final : public AuditModel {
 public:
  MultiplicativeModel(Algorithm algorithm, std::vector<double> weights, double eta,
                      LossFunction loss)
      : algorithm_(algorithm), weights_(std::move(weights)), eta_(eta), loss_(std::move(loss)) {
    if (weights_.empty()) throw ParameterError("audit model needs at least one expert");
  }

  std::string name() const override { return std::string(to_string(algorithm_)); }
  std::size_t num_experts() const override { return weights_.size(); }

  double final_weight(std::size_t expert, std::span<const std::vector<double>> reports,
                      std::span<const Outcome> outcomes) const override {
    check_rounds(weights_.size(), reports, outcomes);
    std::vector<double> w = weights_;
    for (std::size_t t = 0; t < reports.size(); ++t) {
      const auto losses = losses_for(loss_, reports[t], outcomes[t]);
      w = algorithm_ == Algorithm::kMwu ? mwu_update(w, losses, eta_)
                                        : hedge_update(w, losses, eta_);
    }
    double total = 0.0;
    for (double x : w) total += x;
    return w[expert] / total;
  }

 private:
  Algorithm algorithm_;
  std::vector<double> weights_;
  double eta_;
  LossFunction loss_;
};

class WsuUxModel final : public AuditModel {
 public:
  WsuUxModel(WeightVector pi, BanditParams params, LossFunction loss)
      : pi_(std::move(pi)), params_(params), loss_(std::move(loss)) {
    params_.validate(pi_.size());
  }

  std::string name() const override { return "WSU-UX"; }
  std::size_t num_experts() const override { return pi_.size(); }
  double enumeration_cost(std::size_t depth) const override {
    return std::pow(static_cast<double>(pi_.size()), static_cast<double>(depth));
  }

  double final_weight(std::size_t expert, std::span<const std::vector<double>> reports,
                      std::span<const Outcome> outcomes) const override {
    check_rounds(pi_.size(), reports, outcomes);
    return expand(pi_, expert, reports, outcomes, 0);
  }

 private:
  double expand(const WeightVector& pi, std::size_t expert,
                std::span<const std::vector<double>> reports, std::span<const Outcome> outcomes,
                std::size_t t) const {
    if (t == reports.size()) return pi[expert];
    const WeightVector pi_tilde = exploration_mix(pi, params_.gamma);
    double total = 0.0;
    for (std::size_t j = 0; j < pi.size(); ++j) {
      if (pi_tilde[j] <= 0.0) continue;
      const double observed = loss_(reports[t][j], outcomes[t]);
      const WsuUxUpdate step = wsu_ux_update(pi, params_, j, observed);
      total += pi_tilde[j] * expand(step.next, expert, reports, outcomes, t + 1);
    }
    return total;
  }

  WeightVector pi_;
  BanditParams params_;
  LossFunction loss_;
};

class ElfXModel final : public AuditModel {
 public:
  ElfXModel(std::size_t k, std::vector<std::vector<double>> prior, LossFunction loss)
      : k_(k), loss_(std::move(loss)) {
    if (k_ == 0) throw ParameterError("audit model needs at least one expert");
    for (const auto& row : prior) prior_.push_back(elfx_round_winner_probs(row));
    for (const auto& p : prior_) {
      if (p.size() != k_) throw DimensionError("prior loss row has the wrong expert count");
    }
  }

  std::string name() const override { return "ELF-X"; }
  std::size_t num_experts() const override { return k_; }
  double enumeration_cost(std::size_t depth) const override {
    return std::pow(static_cast<double>(k_), static_cast<double>(prior_.size() + depth));
  }

  double final_weight(std::size_t expert, std::span<const std::vector<double>> reports,
                      std::span<const Outcome> outcomes) const override {
    check_rounds(k_, reports, outcomes);
    std::vector<WeightVector> rows = prior_;
    for (std::size_t t = 0; t < reports.size(); ++t) {
      rows.push_back(elfx_round_winner_probs(losses_for(loss_, reports[t], outcomes[t])));
    }
    if (rows.empty()) return 1.0 / static_cast<double>(k_);
    RngStream unused(0, 0);
    return selection_distribution(rows, SelectionMode::exact(), unused)[expert];
  }

 private:
  std::size_t k_;
  std::vector<WeightVector> prior_;
  LossFunction loss_;
};

class GradientDescentModel final : public AuditModel {
 public:
  GradientDescentModel(WeightVector pi, double eta) : pi_(std::move(pi)), eta_(eta) {
    if (!(eta > 0.0)) throw ParameterError("gradient descent step size must be positive");
  }

  std::string name() const override { return "GD"; }
  std::size_t num_experts() const override { return pi_.size(); }

  double final_weight(std::size_t expert, std::span<const std::vector<double>> reports,
                      std::span<const Outcome> outcomes) const override {
    check_rounds(pi_.size(), reports, outcomes);
    std::vector<double> pi = pi_.vector();
    for (std::size_t t = 0; t < reports.size(); ++t) {
      double prediction = 0.0;
      for (std::size_t i = 0; i < pi.size(); ++i) prediction += pi[i] * reports[t][i];
      const double step = 2.0 * eta_ * (outcome_value(outcomes[t]) - prediction);
      double total = 0.0;
      for (std::size_t i = 0; i < pi.size(); ++i) {
        pi[i] += step * reports[t][i];
        if (pi[i] < 0.0) {
          throw ParameterError("gradient step drove a weight negative; step size too large");
        }
        total += pi[i];
      }
      for (double& w : pi) w /= total;
    }
    return pi[expert];
  }

 private:
  WeightVector pi_;
  double eta_;
};

}  // namespace

std::unique_ptr<AuditModel> wsu_audit_model(WeightVector pi, double eta, LossFunction loss) {
  return std::make_unique<WsuModel>(std::move(pi), eta, std::move(loss));
}

std::unique_ptr<AuditModel> mwu_audit_model(std::vector<double> weights, double eta,
                                            LossFunction loss) {
  return std::make_unique<MultiplicativeModel>(Algorithm::kMwu, std::move(weights), eta,
                                               std::move(loss));
}

std::unique_ptr<AuditModel> hedge_audit_model(std::vector<double> weights, double eta,
                                              LossFunction loss) {
  return std::make_unique<MultiplicativeModel>(Algorithm::kHedge, std::move(weights), eta,
                                               std::move(loss));
}

std::unique_ptr<AuditModel> wsu_ux_audit_model(WeightVector pi, BanditParams params,
                                               LossFunction loss) {
  return std::make_unique<WsuUxModel>(std::move(pi), params, std::move(loss));
}

std::unique_ptr<AuditModel> elfx_audit_model(std::size_t num_experts,
                                             std::vector<std::vector<double>> prior_losses,
                                             LossFunction loss) {
  return std::make_unique<ElfXModel>(num_experts, std::move(prior_losses), std::move(loss));
}

std::unique_ptr<AuditModel> gradient_descent_audit_model(WeightVector pi, double eta) {
  return std::make_unique<GradientDescentModel>(std::move(pi), eta);
}

// -- Audits -------------------------------------------------------------------

AuditContext myopic_context(std::size_t expert, std::vector<double> reports, double belief) {
  AuditContext context;
  context.expert = expert;
  context.beliefs = {belief};
  context.reports = {std::move(reports)};
  return context;
}

namespace {

void check_context(const AuditModel& model, const AuditContext& context) {
  if (context.beliefs.empty()) throw ParameterError("audit context has no rounds");
  if (context.reports.size() != context.beliefs.size()) {
    throw DimensionError("audit context has " + std::to_string(context.reports.size()) +
                         " report rows for " + std::to_string(context.beliefs.size()) +
                         " beliefs");
  }
  if (context.expert >= model.num_experts()) {
    throw IndexError("audited expert " + std::to_string(context.expert) + " out of range");
  }
  for (double b : context.beliefs) static_cast<void>(Probability(b));
  for (const auto& row : context.reports) {
    if (row.size() != model.num_experts()) {
      throw DimensionError("audit context report row has the wrong expert count");
    }
    for (double p : row) static_cast<void>(Probability(p));
  }
}

void check_budget(const AuditModel& model, std::size_t depth) {
  const double paths = std::ldexp(1.0, static_cast<int>(depth));
  if (paths * model.enumeration_cost(depth) > kMaxExactSequences) {
    std::ostringstream os;
    os << "exact audit would enumerate " << paths * model.enumeration_cost(depth)
       << " branches (limit 2^20)";
    throw SizeError(os.str());
  }
}

class Search {
 public:
  Search(double truthful_value, std::vector<double> truthful_reports)
      : best_value_(truthful_value),
        truthful_value_(truthful_value),
        best_reports_(std::move(truthful_reports)) {}

  void offer(double value, std::span<const double> reports) {
    if (value > best_value_) {
      best_value_ = value;
      best_reports_.assign(reports.begin(), reports.end());
    }
  }

  AuditReport finish(double tolerance) const {
    AuditReport report;
    report.truthful_value = truthful_value_;
    report.best_deviation_value = best_value_;
    report.best_deviation_reports = best_reports_;
    report.gap = best_value_ - truthful_value_;
    report.verdict = report.gap > tolerance ? Verdict::kViolation : Verdict::kIcOnGrid;
    return report;
  }

 private:
  double best_value_;
  double truthful_value_;
  std::vector<double> best_reports_;
};

}  // namespace

double expected_final_weight(const AuditModel& model, const AuditContext& context,
                             std::span<const double> own_reports) {
  const std::size_t depth = context.depth();
  if (own_reports.size() != depth) {
    throw DimensionError("expected_final_weight: " + std::to_string(own_reports.size()) +
                         " own reports for " + std::to_string(depth) + " rounds");
  }
  std::vector<std::vector<double>> rows = context.reports;
  for (std::size_t d = 0; d < depth; ++d) {
    rows[d][context.expert] = Probability(own_reports[d]);
  }
  std::vector<Outcome> outcomes(depth);
  double expected = 0.0;
  const std::size_t paths = std::size_t{1} << depth;
  for (std::size_t path = 0; path < paths; ++path) {
    double prob = 1.0;
    for (std::size_t d = 0; d < depth; ++d) {
      const bool one = (path >> d) & 1U;
      outcomes[d] = one ? Outcome::kOne : Outcome::kZero;
      prob *= one ? context.beliefs[d] : 1.0 - context.beliefs[d];
    }
    if (prob == 0.0) continue;
    expected += prob * model.final_weight(context.expert, rows, outcomes);
  }
  return expected;
}

AuditReport myopic_audit(const AuditModel& model, const AuditContext& context,
                         const AuditConfig& config) {
  config.validate();
  check_context(model, context);
  if (context.depth() != 1) {
    throw ParameterError("myopic_audit audits exactly one round; use forward_audit");
  }
  check_budget(model, 1);
  const double belief = context.beliefs[0];
  Search search(expected_final_weight(model, context, std::span(&belief, 1)), {belief});
  for (double p : unit_grid(config.report_grid_size)) {
    search.offer(expected_final_weight(model, context, std::span(&p, 1)), std::span(&p, 1));
  }
  return search.finish(config.tolerance);
}

AuditReport forward_audit(const AuditModel& model, const AuditContext& context,
                          const AuditConfig& config) {
  config.validate();
  check_context(model, context);
  const std::size_t depth = context.depth();
  if (depth > config.horizon_depth) {
    throw ParameterError("forward audit depth " + std::to_string(depth) +
                         " exceeds horizon_depth " + std::to_string(config.horizon_depth));
  }
  check_budget(model, depth);
  const std::vector<double>& truthful = context.beliefs;
  Search search(expected_final_weight(model, context, truthful), truthful);

  std::vector<double> own = truthful;
  const std::vector<double> grid = unit_grid(config.report_grid_size);
  for (std::size_t d = 0; d < depth; ++d) {
    own = truthful;
    for (double p : grid) {
      own[d] = p;
      search.offer(expected_final_weight(model, context, own), own);
    }
  }
  if (depth == 2) {
    const std::vector<double> joint = unit_grid(config.joint_grid_size);
    for (double p0 : joint) {
      for (double p1 : joint) {
        own = {p0, p1};
        search.offer(expected_final_weight(model, context, own), own);
      }
    }
  }
  return search.finish(config.tolerance);
}

BeliefSweep myopic_belief_sweep(const AuditModel& model, std::size_t expert,
                                std::vector<double> reports, const AuditConfig& config) {
  BeliefSweep sweep;
  bool first = true;
  for (double b : unit_grid(config.belief_grid_size)) {
    const AuditReport report = myopic_audit(model, myopic_context(expert, reports, b), config);
    if (first || report.gap > sweep.worst.gap) {
      sweep.worst = report;
      sweep.worst_belief = b;
      first = false;
    }
  }
  return sweep;
}

double expected_next_weight_mwu(double report, std::size_t num_experts, double eta) {
  if (num_experts < 2) throw ParameterError("expected_next_weight_mwu needs K >= 2");
  if (!(eta > 0.0 && eta < 1.0)) throw ParameterError("MWU step size must lie in (0,1)");
  const double p = Probability(report);
  const double k = static_cast<double>(num_experts);
  const double miss = (1.0 - p) * (1.0 - p);
  const double hit = p * p;
  return 0.5 * ((1.0 - eta * miss) / (k - eta * miss - eta * (k - 1.0))) +
         0.5 * ((1.0 - eta * hit) / (k - eta * hit));
}

// -- Built-in scenarios -------------------------------------------------------

NamedAudit mwu_normalization_example(const AuditConfig& config) {
  const std::size_t k = 3;
  const double eta = std::sqrt(std::log(3.0) / 100.0);
  auto model = mwu_audit_model(std::vector<double>(k, 1.0), eta);
  const AuditReport report =
      myopic_audit(*model, myopic_context(0, std::vector<double>(k, 0.0), 0.5), config);
  return {"mwu-normalization",
          "MWU, K=3, unit weights, others report 0, belief 0.5, eta=sqrt(ln 3/100)", report};
}

NamedAudit gradient_descent_example(const AuditConfig& config) {
  const std::size_t k = 10;
  auto model = gradient_descent_audit_model(WeightVector::uniform(k), 0.1);
  const AuditReport report =
      myopic_audit(*model, myopic_context(0, std::vector<double>(k, 0.0), 0.6), config);
  return {"gradient-descent",
          "GD on aggregate squared loss, K=10, pi_i=0.1, others report 0, belief 0.6, eta=0.1",
          report};
}

namespace {

AuditContext wsu_forward_context() {
  AuditContext context;
  context.expert = 0;
  context.beliefs = {0.7, 0.6};
  context.reports = {{0.7, 0.4}, {0.6, 0.0}};
  return context;
}

}  // namespace

NamedAudit wsu_forward_example(double eta, const AuditConfig& config) {
  auto model = wsu_audit_model(WeightVector::uniform(2), eta);
  std::ostringstream os;
  os << "WSU, K=2, two rounds, beliefs (0.7, 0.6), other expert reports (0.4, 0), eta=" << eta;
  return {"wsu-forward", os.str(), forward_audit(*model, wsu_forward_context(), config)};
}

std::vector<NamedAudit> builtin_audits(const AuditConfig& config) {
  std::vector<NamedAudit> out;
  out.push_back(mwu_normalization_example(config));
  out.push_back(gradient_descent_example(config));
  out.push_back(wsu_forward_example(0.5, config));
  auto elfx = elfx_audit_model(2, {});
  AuditContext context = wsu_forward_context();
  out.push_back({"elfx-forward",
                 "ELF-X, K=2, same two-round context as wsu-forward",
                 forward_audit(*elfx, context, config)});
  return out;
}

}  // namespace icol
