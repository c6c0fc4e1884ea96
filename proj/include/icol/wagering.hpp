#pragma once

// Weighted Score Wagering Mechanism and the wagering-to-learner reduction.

#include <functional>
#include <span>
#include <vector>

#include "icol/core.hpp"

namespace icol {

// Reports, wagers and the realised outcome for one wagering round. Wagers
// are normalized to sum to one.
struct WagerProfile {
  std::vector<double> reports;
  WeightVector wagers;
  Outcome outcome;

  WagerProfile(std::vector<double> reports, WeightVector wagers, Outcome outcome);
};

// Gamma_i = w_i (1 - l_i + sum_j w_j l_j) for precomputed losses l.
std::vector<double> wswm_payoffs_from_losses(const WeightVector& wagers,
                                             std::span<const double> losses);

std::vector<double> wswm_payoffs(const WagerProfile& profile, const LossFunction& loss);

// A budget-balanced wagering mechanism: (reports, wagers, outcome) -> payoffs.
using WageringMechanism = std::function<std::vector<double>(
    std::span<const double> reports, const WeightVector& wagers, Outcome outcome)>;

WageringMechanism wswm_mechanism(LossFunction loss);

// pi_{t+1} = Gamma(p_t, pi_t, r_t). Throws MechanismContractError when the
// payoffs do not form a distribution.
WeightVector reduce_to_learner(const WageringMechanism& mechanism, const WeightVector& pi,
                               std::span<const double> reports, Outcome outcome);

}  // namespace icol
