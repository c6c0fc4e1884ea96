#pragma once

// Exact-expectation incentive auditor.
//
// An audit fixes one expert, the other experts' reports and the expert's
// beliefs, then searches a finite report grid for the report that maximizes
// the expert's expected weight after the audited rounds. Expectations are
// taken over the outcomes (Bernoulli in the expert's own belief) and over any
// internal randomness of the learner, always by enumeration, never sampling.
// A clean verdict certifies truthfulness on the grid only.

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "icol/bandit.hpp"
#include "icol/core.hpp"

namespace icol {

struct AuditConfig {
  std::size_t report_grid_size = 1001;
  std::size_t belief_grid_size = 101;
  double tolerance = 1e-9;
  // Largest number of rounds a forward audit may look ahead.
  std::size_t horizon_depth = 3;
  // Per-axis grid for the joint (all rounds deviate at once) search.
  std::size_t joint_grid_size = 101;

  void validate() const;
};

// Evenly spaced points on [0,1]; odd sizes contain 0, 0.5 and 1.
std::vector<double> unit_grid(std::size_t size);

enum class Verdict { kIcOnGrid, kViolation };
std::string_view to_string(Verdict verdict);

struct AuditReport {
  double truthful_value = 0.0;
  double best_deviation_value = 0.0;
  // One report per audited round.
  std::vector<double> best_deviation_reports;
  double gap = 0.0;
  Verdict verdict = Verdict::kIcOnGrid;
};

// A learner whose expected post-horizon weights can be computed exactly.
class AuditModel {
 public:
  virtual ~AuditModel() = default;

  virtual std::string name() const = 0;
  virtual std::size_t num_experts() const = 0;
  // Weight of `expert` after the rounds described by `reports` (one full
  // report row per round) and `outcomes`, in expectation over the learner's
  // own randomness.
  virtual double final_weight(std::size_t expert,
                              std::span<const std::vector<double>> reports,
                              std::span<const Outcome> outcomes) const = 0;
  // Number of internal branches enumerated per outcome path for `depth`.
  virtual double enumeration_cost(std::size_t /*depth*/) const { return 1.0; }
};

std::unique_ptr<AuditModel> wsu_audit_model(WeightVector pi, double eta,
                                            LossFunction loss = LossFunction::quadratic());
std::unique_ptr<AuditModel> mwu_audit_model(std::vector<double> weights, double eta,
                                            LossFunction loss = LossFunction::quadratic());
std::unique_ptr<AuditModel> hedge_audit_model(std::vector<double> weights, double eta,
                                              LossFunction loss = LossFunction::quadratic());
// The expert draw I_t is folded in exactly (K branches per round).
std::unique_ptr<AuditModel> wsu_ux_audit_model(WeightVector pi, BanditParams params,
                                               LossFunction loss = LossFunction::quadratic());
// Exact ELF-X selection distribution over prior loss rows plus audited rounds.
std::unique_ptr<AuditModel> elfx_audit_model(std::size_t num_experts,
                                             std::vector<std::vector<double>> prior_losses,
                                             LossFunction loss = LossFunction::quadratic());
// Gradient descent on the aggregate squared loss:
//   pi <- normalize(pi + 2 eta (r - <pi, p>) p).
std::unique_ptr<AuditModel> gradient_descent_audit_model(WeightVector pi, double eta);

// Expert `expert` with beliefs for rounds t .. t^f - 1; `reports` holds every
// expert's report per round (the audited expert's own entries are replaced).
struct AuditContext {
  std::size_t expert = 0;
  std::vector<double> beliefs;
  std::vector<std::vector<double>> reports;

  std::size_t depth() const noexcept { return beliefs.size(); }
};

AuditContext myopic_context(std::size_t expert, std::vector<double> reports, double belief);

// E[pi_{expert, t^f}] when the expert plays `own_reports`.
double expected_final_weight(const AuditModel& model, const AuditContext& context,
                             std::span<const double> own_reports);

// Single-round search over the report grid.
AuditReport myopic_audit(const AuditModel& model, const AuditContext& context,
                         const AuditConfig& config);

// Multi-round search: single-round deviations on the report grid plus, for
// depth <= 2, the joint grid. Throws SizeError when 2^depth outcome paths
// times the model's enumeration cost exceed 2^20.
AuditReport forward_audit(const AuditModel& model, const AuditContext& context,
                          const AuditConfig& config);

// Myopic audit for every belief on the belief grid; returns the largest gap.
struct BeliefSweep {
  AuditReport worst;
  double worst_belief = 0.0;
};
BeliefSweep myopic_belief_sweep(const AuditModel& model, std::size_t expert,
                                std::vector<double> reports, const AuditConfig& config);

// Closed form of expert 1's expected next weight under MWU with unit initial
// weights, the other K - 1 experts reporting 0, belief 1/2 and quadratic loss.
double expected_next_weight_mwu(double report, std::size_t num_experts, double eta);

// Central difference with step h of a function of one report.
template <typename F>
double central_difference(F&& f, double x, double h = 1e-6) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

// Built-in manipulation scenarios.
struct NamedAudit {
  std::string name;
  std::string description;
  AuditReport report;
};

NamedAudit mwu_normalization_example(const AuditConfig& config);
NamedAudit gradient_descent_example(const AuditConfig& config);
NamedAudit wsu_forward_example(double eta, const AuditConfig& config);
std::vector<NamedAudit> builtin_audits(const AuditConfig& config);

}  // namespace icol
