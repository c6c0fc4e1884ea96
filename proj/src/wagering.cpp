#include "icol/wagering.hpp"

#include <string>

#include "icol/errors.hpp"

namespace icol {

WagerProfile::WagerProfile(std::vector<double> reports_in, WeightVector wagers_in,
                           Outcome outcome_in)
    : reports(std::move(reports_in)), wagers(std::move(wagers_in)), outcome(outcome_in) {
  if (reports.size() != wagers.size()) {
    throw DimensionError("wager profile has " + std::to_string(reports.size()) +
                         " reports for " + std::to_string(wagers.size()) + " wagers");
  }
  for (double p : reports) static_cast<void>(Probability(p));
}

std::vector<double> wswm_payoffs_from_losses(const WeightVector& wagers,
                                             std::span<const double> losses) {
  const double weighted = wagers.dot(losses);
  std::vector<double> payoffs(losses.size());
  for (std::size_t i = 0; i < losses.size(); ++i) {
    payoffs[i] = wagers[i] * (1.0 - losses[i] + weighted);
  }
  return payoffs;
}

std::vector<double> wswm_payoffs(const WagerProfile& profile, const LossFunction& loss) {
  std::vector<double> losses(profile.reports.size());
  for (std::size_t i = 0; i < losses.size(); ++i) {
    losses[i] = loss(profile.reports[i], profile.outcome);
  }
  return wswm_payoffs_from_losses(profile.wagers, losses);
}

WageringMechanism wswm_mechanism(LossFunction loss) {
  return [loss = std::move(loss)](std::span<const double> reports, const WeightVector& wagers,
                                  Outcome outcome) {
    WagerProfile profile(std::vector<double>(reports.begin(), reports.end()), wagers, outcome);
    return wswm_payoffs(profile, loss);
  };
}

WeightVector reduce_to_learner(const WageringMechanism& mechanism, const WeightVector& pi,
                               std::span<const double> reports, Outcome outcome) {
  if (reports.size() != pi.size()) {
    throw DimensionError("reduce_to_learner: " + std::to_string(reports.size()) +
                         " reports for " + std::to_string(pi.size()) + " experts");
  }
  std::vector<double> next = mechanism(reports, pi, outcome);
  if (next.size() != pi.size() || !is_valid_simplex(next)) {
    throw MechanismContractError(
        "mechanism payoffs are not a distribution over the experts; it must be "
        "budget-balanced and non-negative");
  }
  return WeightVector(std::move(next));
}

}  // namespace icol
