#pragma once

// Domain types shared by every learner: probabilities, simplex weight
// vectors, bounded proper losses, forecast panels and seeded randomness.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace icol {

inline constexpr double kSimplexEntryTolerance = 1e-12;
inline constexpr double kSimplexSumTolerance = 1e-9;

// A value in [0,1]; NaN and anything outside the interval is rejected.
class Probability {
 public:
  explicit Probability(double value);

  double value() const noexcept { return value_; }
  operator double() const noexcept { return value_; }

 private:
  double value_;
};

enum class Outcome : std::uint8_t { kZero = 0, kOne = 1 };

Outcome outcome_from_int(long long value);
inline double outcome_value(Outcome r) { return r == Outcome::kOne ? 1.0 : 0.0; }
inline constexpr Outcome kBothOutcomes[] = {Outcome::kZero, Outcome::kOne};

// A probability distribution over K experts.
//
// Construction validates entries against [-1e-12, 1 + 1e-12] and the sum
// against 1 +/- 1e-9, then clamps entries into [0,1] and renormalizes so
// the stored vector sums to 1 up to rounding.
class WeightVector {
 public:
  explicit WeightVector(std::vector<double> weights);

  static WeightVector uniform(std::size_t num_experts);
  // Normalizes an arbitrary non-negative vector with positive sum.
  static WeightVector normalized(std::span<const double> raw);

  std::size_t size() const noexcept { return weights_.size(); }
  double operator[](std::size_t i) const { return weights_[i]; }
  std::span<const double> values() const noexcept { return weights_; }
  const std::vector<double>& vector() const noexcept { return weights_; }

  double dot(std::span<const double> x) const;

  friend bool operator==(const WeightVector&, const WeightVector&) = default;

 private:
  std::vector<double> weights_;
};

// True when `weights` would pass WeightVector validation.
bool is_valid_simplex(std::span<const double> weights);

enum class LossKind { kQuadratic, kCustom };

// A bounded loss l: [0,1] x {0,1} -> [0,1].
class LossFunction {
 public:
  using Evaluator = std::function<double(double report, Outcome outcome)>;

  static LossFunction quadratic();
  // Resolves a loss by name. Only "quadratic" is built in; "log" is
  // recognised and rejected because it is unbounded.
  static LossFunction from_name(const std::string& name);
  // Wraps a caller-supplied loss after checking its range on a 101-point
  // report grid. Callers must pre-scale into [0,1].
  static LossFunction custom(std::string name, Evaluator evaluator);

  LossKind kind() const noexcept { return kind_; }
  const std::string& name() const noexcept { return name_; }

  double operator()(double report, Outcome outcome) const {
    if (kind_ == LossKind::kQuadratic) {
      const double d = report - outcome_value(outcome);
      return d * d;
    }
    return evaluator_(report, outcome);
  }

 private:
  LossFunction(LossKind kind, std::string name, Evaluator evaluator)
      : kind_(kind), name_(std::move(name)), evaluator_(std::move(evaluator)) {}

  LossKind kind_;
  std::string name_;
  Evaluator evaluator_;
};

// T rounds x K experts of reports plus the realised outcomes. Rounds and
// experts are 0-based.
class ForecastPanel {
 public:
  ForecastPanel(std::size_t num_experts, std::vector<double> reports,
                std::vector<Outcome> outcomes,
                std::vector<std::string> expert_ids = {});

  std::size_t num_experts() const noexcept { return num_experts_; }
  std::size_t horizon() const noexcept { return outcomes_.size(); }

  double report(std::size_t t, std::size_t i) const {
    return reports_[t * num_experts_ + i];
  }
  std::span<const double> reports_at(std::size_t t) const;
  Outcome outcome(std::size_t t) const;
  const std::vector<Outcome>& outcomes() const noexcept { return outcomes_; }
  const std::vector<std::string>& expert_ids() const noexcept {
    return expert_ids_;
  }

  // Sub-panel keeping the given expert columns in the given order.
  ForecastPanel select_experts(std::span<const std::size_t> columns) const;

 private:
  std::size_t num_experts_;
  std::vector<double> reports_;
  std::vector<Outcome> outcomes_;
  std::vector<std::string> expert_ids_;
};

// Reproducible random stream keyed by (seed, stream_id).
//
// The engine is std::mt19937_64 seeded through std::seed_seq, both of which
// the standard specifies bit-for-bit; the draws below avoid the
// implementation-defined std distributions, so sequences are identical on
// every conforming platform.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  std::uint64_t next_u64() { return engine_(); }
  // Uniform on [0,1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double low, double high) { return low + (high - low) * uniform(); }
  // Uniform integer in [0, n).
  std::size_t uniform_index(std::size_t n);
  bool bernoulli(double p) { return uniform() < p; }
  // Inverse-CDF draw from non-negative weights (need not be normalized).
  std::size_t categorical(std::span<const double> weights);

  // Independent child stream; the key mixes in every index given.
  RngStream derive(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0) const;

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
};

// Draw from a prefix-summed distribution in O(log K).
std::size_t sample_cumulative(std::span<const double> cumulative, double u);

struct TraceMetadata {
  std::string algorithm;
  std::string mode;
  std::map<std::string, double> params;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::size_t num_experts = 0;
  std::size_t horizon = 0;
  std::vector<std::string> notes;
};

// Cumulative learner loss, best-expert loss and regret after each round.
struct RegretTrace {
  std::vector<double> learner_cumulative;
  std::vector<double> best_cumulative;
  std::vector<double> regret;
  std::vector<std::size_t> best_expert;
  TraceMetadata metadata;

  std::size_t rounds() const noexcept { return regret.size(); }
};

std::vector<double> loss_row(const ForecastPanel& panel, const LossFunction& loss,
                             std::size_t t);

// L_i = l_i - <pi, l>.
std::vector<double> relative_loss(std::span<const double> losses,
                                  const WeightVector& pi);

// Best expert is the lowest index attaining the prefix minimum.
RegretTrace cumulative_regret(std::span<const double> learner_losses,
                              const ForecastPanel& panel, const LossFunction& loss);

}  // namespace icol
