#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

#include "farmsift/features.hpp"
#include "farmsift/types.hpp"

namespace farmsift {

// Output probabilities are clamped to [kProbEpsilon, 1 - kProbEpsilon] so the
// log loss stays finite for every activation.
inline constexpr double kProbEpsilon = 1e-7;

enum class OutActivation { kSigmoid, kTanh, kRelu };

std::string_view to_string(OutActivation a);
std::optional<OutActivation> out_activation_from_string(std::string_view s);

// One bank of equal-width convolution filters. taps[i] is F x filters: the
// weights every filter applies to input row t + i of a window starting at t.
struct ConvKernel {
  int width = 0;
  std::vector<Matrix> taps;
  Vector bias;

  int filters() const { return static_cast<int>(bias.size()); }
  int feature_dim() const {
    return taps.empty() ? 0 : static_cast<int>(taps[0].rows());
  }
};

struct ParamTensors {
  std::vector<ConvKernel> kernels;
  Vector dense_w;
  double dense_b = 0.0;

  int pooled_size() const {
    int n = 0;
    for (const auto& k : kernels) n += k.filters();
    return n;
  }
};

struct ModelParams {
  int feature_dim = 0;
  OutActivation out_activation = OutActivation::kSigmoid;
  ParamTensors t;
};

// The published layout: kernel widths 2, 3, 4 with two filters each, biases
// zero, weights Glorot-uniform. Deterministic in the seed.
ModelParams init_params(int feature_dim, std::uint64_t seed,
                        OutActivation act = OutActivation::kSigmoid);

struct ForwardCache {
  const Matrix* x = nullptr;  // borrowed; must outlive backward()
  Index used_rows = 0;
  std::vector<int> windows;   // winning window start per pooled unit
  Vector pre_pool;            // conv pre-activation at the winning window
  Vector pooled;
  double z = 0.0;
  double prob = 0.0;
  bool clamped = false;       // output clamp engaged; gradient is cut there
};

// Returns the farm probability. Rows at and past x.used_rows must be zero;
// windows made entirely of padding collapse to the filter bias and compete
// in the max like any other window. Throws if x does not match the params.
double forward(const ModelParams& params, const FeatureMatrix& x,
               ForwardCache* cache = nullptr);

// Binary cross-entropy against label y in {0, 1}.
double bce_loss(double prob, int label);

// Gradients of bce_loss(forward(x), label) for every parameter, from the
// cache of the matching forward call.
ParamTensors backward(const ModelParams& params, const ForwardCache& cache,
                      int label);

ParamTensors zeros_like(const ParamTensors& t);

// Flat order: per kernel all taps (row index, then filter) then the bias,
// then dense weights, then the dense bias. The checkpoint uses the same
// order.
Index param_count(const ParamTensors& t);
Vector flatten(const ParamTensors& t);
void unflatten(const Vector& flat, ParamTensors& t);
void flatten_add(const ParamTensors& t, Vector& out);

class SampleSource {
 public:
  virtual ~SampleSource() = default;
  virtual std::size_t size() const = 0;
  virtual int label(std::size_t i) const = 0;
  // The reference may be invalidated by the next matrix() call.
  virtual const FeatureMatrix& matrix(std::size_t i) const = 0;
};

class InMemorySamples final : public SampleSource {
 public:
  void add(FeatureMatrix x, int label) {
    xs_.push_back(std::move(x));
    labels_.push_back(label);
  }
  std::size_t size() const override { return xs_.size(); }
  int label(std::size_t i) const override { return labels_[i]; }
  const FeatureMatrix& matrix(std::size_t i) const override { return xs_[i]; }

 private:
  std::vector<FeatureMatrix> xs_;
  std::vector<int> labels_;
};

enum class Optimizer { kAdam, kSgd };

struct TrainConfig {
  OutActivation out_activation = OutActivation::kSigmoid;
  Optimizer optimizer = Optimizer::kAdam;
  double learning_rate = 1e-3;
  int batch_size = 64;
  int max_epochs = 30;
  // Training stops once the count of consecutive non-improving validation
  // epochs exceeds patience; 0 stops at the first one.
  int patience = 3;
  std::uint64_t seed = 0;
};

struct EpochStats {
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  double valid_loss = 0.0;
  double valid_accuracy = 0.0;
};

struct FitResult {
  ModelParams params;  // parameters of the best validation epoch
  std::vector<EpochStats> history;
  int best_epoch = 0;  // 0-based index into history
};

FitResult fit(const SampleSource& train, const SampleSource& valid,
              const TrainConfig& config);

struct Metrics {
  double accuracy = 0.0;
  double mean_loss = 0.0;
};

// Threshold 0.5: prob >= 0.5 predicts farm.
Metrics evaluate(const ModelParams& params, const SampleSource& samples);

// Plain-text checkpoint, hex floats, bit-exact round trip. Only the
// published kernel layout is supported.
void save_checkpoint(const ModelParams& params,
                     const std::filesystem::path& path);
ModelParams load_checkpoint(const std::filesystem::path& path);

struct GradCheckConfig {
  int configs = 100;
  Index rows = 8;
  int feature_dim = 5;
  std::uint64_t seed = 1;
  double step = 1e-5;
  double tolerance = 1e-3;
};

struct GradCheckResult {
  double max_rel_error = 0.0;
  Index params_checked = 0;
  bool passed = false;
};

// Central finite differences against backward() over randomized reduced
// configurations, cycling the three output activations and exercising both
// padded and full inputs.
GradCheckResult gradient_check(const GradCheckConfig& config);

}  // namespace farmsift
