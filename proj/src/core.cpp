#include "icol/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "icol/errors.hpp"

namespace icol {

namespace {

std::string describe(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

Probability::Probability(double value) : value_(value) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw ParameterError("probability out of [0,1]: " + describe(value));
  }
}

Outcome outcome_from_int(long long value) {
  if (value == 0) return Outcome::kZero;
  if (value == 1) return Outcome::kOne;
  throw ParameterError("outcome must be 0 or 1, got " + std::to_string(value));
}

// -- WeightVector -------------------------------------------------------------

bool is_valid_simplex(std::span<const double> weights) {
  if (weights.empty()) return false;
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= -kSimplexEntryTolerance && w <= 1.0 + kSimplexEntryTolerance)) {
      return false;
    }
    sum += w;
  }
  return std::abs(sum - 1.0) <= kSimplexSumTolerance;
}

WeightVector::WeightVector(std::vector<double> weights)
    : weights_(std::move(weights)) {
  if (weights_.empty()) throw ParameterError("weight vector is empty");
  double sum = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    const double w = weights_[i];
    if (!(w >= -kSimplexEntryTolerance && w <= 1.0 + kSimplexEntryTolerance)) {
      throw ParameterError("weight " + std::to_string(i) +
                           " outside the simplex: " + describe(w));
    }
    sum += w;
  }
  if (!(std::abs(sum - 1.0) <= kSimplexSumTolerance)) {
    throw ParameterError("weights sum to " + describe(sum) + ", expected 1");
  }
  double clamped_sum = 0.0;
  for (double& w : weights_) {
    w = std::clamp(w, 0.0, 1.0);
    clamped_sum += w;
  }
  for (double& w : weights_) w /= clamped_sum;
}

WeightVector WeightVector::uniform(std::size_t num_experts) {
  if (num_experts == 0) throw ParameterError("need at least one expert");
  return WeightVector(std::vector<double>(num_experts, 1.0 / num_experts));
}

WeightVector WeightVector::normalized(std::span<const double> raw) {
  double sum = 0.0;
  for (double w : raw) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw ParameterError("cannot normalize negative or non-finite weight " +
                           describe(w));
    }
    sum += w;
  }
  if (!(sum > 0.0)) throw ParameterError("cannot normalize weights with zero sum");
  std::vector<double> out(raw.begin(), raw.end());
  for (double& w : out) w /= sum;
  return WeightVector(std::move(out));
}

double WeightVector::dot(std::span<const double> x) const {
  if (x.size() != weights_.size()) {
    throw DimensionError("dot product of length " + std::to_string(x.size()) +
                         " against " + std::to_string(weights_.size()) + " weights");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += weights_[i] * x[i];
  return acc;
}

// -- LossFunction -------------------------------------------------------------

LossFunction LossFunction::quadratic() {
  return LossFunction(LossKind::kQuadratic, "quadratic", nullptr);
}

LossFunction LossFunction::from_name(const std::string& name) {
  if (name == "quadratic" || name == "brier") return quadratic();
  if (name == "log" || name == "logarithmic") {
    throw ParameterError("log loss is unbounded on [0,1]; only losses in [0,1] are accepted");
  }
  throw ParameterError("unknown loss function '" + name + "'");
}

LossFunction LossFunction::custom(std::string name, Evaluator evaluator) {
  if (!evaluator) throw ParameterError("custom loss needs an evaluator");
  for (int k = 0; k <= 100; ++k) {
    const double p = k / 100.0;
    for (Outcome r : kBothOutcomes) {
      const double v = evaluator(p, r);
      if (!(v >= 0.0 && v <= 1.0)) {
        throw ParameterError("loss '" + name + "' leaves [0,1] at report " +
                             describe(p) + ": " + describe(v));
      }
    }
  }
  return LossFunction(LossKind::kCustom, std::move(name), std::move(evaluator));
}

// -- ForecastPanel ------------------------------------------------------------

ForecastPanel::ForecastPanel(std::size_t num_experts, std::vector<double> reports,
                             std::vector<Outcome> outcomes,
                             std::vector<std::string> expert_ids)
    : num_experts_(num_experts),
      reports_(std::move(reports)),
      outcomes_(std::move(outcomes)),
      expert_ids_(std::move(expert_ids)) {
  if (num_experts_ == 0) throw ParameterError("panel needs at least one expert");
  if (outcomes_.empty()) throw ParameterError("panel needs at least one round");
  if (reports_.size() != num_experts_ * outcomes_.size()) {
    throw DimensionError("panel has " + std::to_string(reports_.size()) +
                         " reports for " + std::to_string(outcomes_.size()) +
                         " rounds x " + std::to_string(num_experts_) + " experts");
  }
  for (std::size_t k = 0; k < reports_.size(); ++k) {
    const double p = reports_[k];
    if (!(p >= 0.0 && p <= 1.0)) {
      throw ParameterError("report at round " + std::to_string(k / num_experts_) +
                           ", expert " + std::to_string(k % num_experts_) +
                           " out of [0,1]: " + describe(p));
    }
  }
  if (expert_ids_.empty()) {
    expert_ids_.reserve(num_experts_);
    for (std::size_t i = 0; i < num_experts_; ++i) {
      expert_ids_.push_back("expert" + std::to_string(i));
    }
  } else if (expert_ids_.size() != num_experts_) {
    throw DimensionError("panel has " + std::to_string(expert_ids_.size()) +
                         " expert ids for " + std::to_string(num_experts_) + " experts");
  }
}

std::span<const double> ForecastPanel::reports_at(std::size_t t) const {
  if (t >= horizon()) {
    throw IndexError("round " + std::to_string(t) + " outside panel of " +
                     std::to_string(horizon()) + " rounds");
  }
  return std::span<const double>(reports_).subspan(t * num_experts_, num_experts_);
}

Outcome ForecastPanel::outcome(std::size_t t) const {
  if (t >= horizon()) {
    throw IndexError("round " + std::to_string(t) + " outside panel of " +
                     std::to_string(horizon()) + " rounds");
  }
  return outcomes_[t];
}

ForecastPanel ForecastPanel::select_experts(std::span<const std::size_t> columns) const {
  if (columns.empty()) throw ParameterError("cannot select zero experts");
  std::vector<double> reports;
  reports.reserve(columns.size() * horizon());
  for (std::size_t t = 0; t < horizon(); ++t) {
    for (std::size_t c : columns) {
      if (c >= num_experts_) {
        throw IndexError("expert column " + std::to_string(c) + " out of range");
      }
      reports.push_back(report(t, c));
    }
  }
  std::vector<std::string> ids;
  ids.reserve(columns.size());
  for (std::size_t c : columns) ids.push_back(expert_ids_[c]);
  return ForecastPanel(columns.size(), std::move(reports), outcomes_, std::move(ids));
}

// -- RngStream ----------------------------------------------------------------

namespace {

std::mt19937_64 seeded_engine(std::uint64_t seed, std::uint64_t stream_id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream_id),
                    static_cast<std::uint32_t>(stream_id >> 32),
                    0x9e3779b9u};
  return std::mt19937_64(seq);
}

std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id), engine_(seeded_engine(seed, stream_id)) {}

std::size_t RngStream::uniform_index(std::size_t n) {
  if (n == 0) throw ParameterError("uniform_index over an empty range");
  // Rejection sampling keeps the draw exactly uniform.
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return static_cast<std::size_t>(x % bound);
}

std::size_t RngStream::categorical(std::span<const double> weights) {
  if (weights.empty()) throw ParameterError("categorical over no outcomes");
  double total = 0.0;
  for (double w : weights) total += w;
  if (!(total > 0.0)) throw ParameterError("categorical weights sum to zero");
  const double target = uniform() * total;
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    acc += weights[i];
    last_positive = i;
    if (target < acc) return i;
  }
  return last_positive;
}

RngStream RngStream::derive(std::uint64_t a, std::uint64_t b, std::uint64_t c) const {
  std::uint64_t key = mix64(stream_id_ ^ 0x5851f42d4c957f2dULL);
  key = mix64(key ^ a);
  key = mix64(key ^ (b + 0x632be59bd9b4e019ULL));
  key = mix64(key ^ (c + 0x8cb92ba72f3d8dd7ULL));
  return RngStream(seed_, key);
}

std::size_t sample_cumulative(std::span<const double> cumulative, double u) {
  const double target = u * cumulative.back();
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
  if (it == cumulative.end()) {
    // u * total rounded up to total; take the last index with positive mass.
    std::size_t i = cumulative.size() - 1;
    while (i > 0 && cumulative[i] == cumulative[i - 1]) --i;
    return i;
  }
  return static_cast<std::size_t>(it - cumulative.begin());
}

// -- Operations ---------------------------------------------------------------

std::vector<double> loss_row(const ForecastPanel& panel, const LossFunction& loss,
                             std::size_t t) {
  const auto reports = panel.reports_at(t);
  const Outcome r = panel.outcome(t);
  std::vector<double> out(reports.size());
  for (std::size_t i = 0; i < reports.size(); ++i) out[i] = loss(reports[i], r);
  return out;
}

std::vector<double> relative_loss(std::span<const double> losses,
                                  const WeightVector& pi) {
  if (losses.size() != pi.size()) {
    throw DimensionError("relative_loss: " + std::to_string(losses.size()) +
                         " losses for " + std::to_string(pi.size()) + " weights");
  }
  const double average = pi.dot(losses);
  std::vector<double> out(losses.size());
  for (std::size_t i = 0; i < losses.size(); ++i) out[i] = losses[i] - average;
  return out;
}

RegretTrace cumulative_regret(std::span<const double> learner_losses,
                              const ForecastPanel& panel, const LossFunction& loss) {
  const std::size_t horizon = panel.horizon();
  if (learner_losses.size() != horizon) {
    throw DimensionError("cumulative_regret: " + std::to_string(learner_losses.size()) +
                         " learner losses for a " + std::to_string(horizon) +
                         "-round panel");
  }
  const std::size_t k = panel.num_experts();
  RegretTrace trace;
  trace.learner_cumulative.reserve(horizon);
  trace.best_cumulative.reserve(horizon);
  trace.regret.reserve(horizon);
  trace.best_expert.reserve(horizon);
  std::vector<double> expert_cumulative(k, 0.0);
  double learner = 0.0;
  for (std::size_t t = 0; t < horizon; ++t) {
    learner += learner_losses[t];
    const Outcome r = panel.outcome(t);
    std::size_t best = 0;
    for (std::size_t i = 0; i < k; ++i) {
      expert_cumulative[i] += loss(panel.report(t, i), r);
      if (expert_cumulative[i] < expert_cumulative[best]) best = i;
    }
    trace.learner_cumulative.push_back(learner);
    trace.best_cumulative.push_back(expert_cumulative[best]);
    trace.regret.push_back(learner - expert_cumulative[best]);
    trace.best_expert.push_back(best);
  }
  trace.metadata.num_experts = k;
  trace.metadata.horizon = horizon;
  return trace;
}

}  // namespace icol
