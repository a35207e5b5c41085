#include "farmsift/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "farmsift/rng.hpp"

namespace farmsift {

std::string_view to_string(OutActivation a) {
  switch (a) {
    case OutActivation::kSigmoid: return "sigmoid";
    case OutActivation::kTanh: return "tanh";
    case OutActivation::kRelu: return "relu";
  }
  return "?";
}

std::optional<OutActivation> out_activation_from_string(std::string_view s) {
  if (s == "sigmoid") return OutActivation::kSigmoid;
  if (s == "tanh") return OutActivation::kTanh;
  if (s == "relu") return OutActivation::kRelu;
  return std::nullopt;
}

namespace {

constexpr int kKernelWidths[] = {2, 3, 4};
constexpr int kFiltersPerKernel = 2;

double to_probability(OutActivation act, double z) {
  switch (act) {
    case OutActivation::kSigmoid: return 1.0 / (1.0 + std::exp(-z));
    case OutActivation::kTanh: return (std::tanh(z) + 1.0) / 2.0;
    case OutActivation::kRelu: return z > 0.0 ? z : 0.0;
  }
  return 0.0;
}

}  // namespace

ModelParams init_params(int feature_dim, std::uint64_t seed,
                        OutActivation act) {
  if (feature_dim <= 0) {
    throw std::invalid_argument("feature_dim must be positive");
  }
  rng::Engine eng(seed);
  ModelParams p;
  p.feature_dim = feature_dim;
  p.out_activation = act;
  for (const int width : kKernelWidths) {
    ConvKernel kernel;
    kernel.width = width;
    kernel.bias = Vector::Zero(kFiltersPerKernel);
    const double fan_in = static_cast<double>(width) * feature_dim;
    const double fan_out = static_cast<double>(width) * kFiltersPerKernel;
    const double bound = std::sqrt(6.0 / (fan_in + fan_out));
    kernel.taps.assign(static_cast<std::size_t>(width),
                       Matrix(feature_dim, kFiltersPerKernel));
    // Draw order matches the flat/checkpoint layout: tap row, feature, filter.
    for (auto& tap : kernel.taps) {
      for (Index f = 0; f < tap.rows(); ++f) {
        for (Index j = 0; j < tap.cols(); ++j) {
          tap(f, j) = rng::uniform(eng, -bound, bound);
        }
      }
    }
    p.t.kernels.push_back(std::move(kernel));
  }
  const int pooled = p.t.pooled_size();
  const double bound = std::sqrt(6.0 / (pooled + 1.0));
  p.t.dense_w = Vector(pooled);
  for (Index i = 0; i < pooled; ++i) {
    p.t.dense_w[i] = rng::uniform(eng, -bound, bound);
  }
  p.t.dense_b = 0.0;
  return p;
}

double forward(const ModelParams& params, const FeatureMatrix& x,
               ForwardCache* cache) {
  const Matrix& X = x.values;
  if (static_cast<int>(X.cols()) != params.feature_dim) {
    throw std::invalid_argument(
        "feature width mismatch: matrix has " + std::to_string(X.cols()) +
        " columns, model expects " + std::to_string(params.feature_dim));
  }
  const Index rows = X.rows();
  const Index used = std::clamp<Index>(x.used_rows, 0, rows);
  const int pooled_n = params.t.pooled_size();
  if (static_cast<int>(params.t.dense_w.size()) != pooled_n) {
    throw std::invalid_argument("dense weight count does not match filters");
  }

  Vector pooled(pooled_n);
  Vector pre_pool(pooled_n);
  std::vector<int> windows(static_cast<std::size_t>(pooled_n), 0);

  int unit = 0;
  Matrix pre;
  for (const auto& kernel : params.t.kernels) {
    const Index width = kernel.width;
    if (width <= 0 || width > rows) {
      throw std::invalid_argument("kernel wider than the feature matrix");
    }
    const int nf = kernel.filters();
    const Index total = rows - width + 1;
    // Windows starting at or past used_rows see only zero rows, so they all
    // share the value relu(bias); only windows below `used` need the GEMM.
    const Index explicit_n = std::min(total, used);
    pre.resize(explicit_n, nf);
    if (explicit_n > 0) {
      pre.rowwise() = kernel.bias.transpose();
      for (Index i = 0; i < width; ++i) {
        pre.noalias() += X.middleRows(i, explicit_n) * kernel.taps[i];
      }
    }
    for (int j = 0; j < nf; ++j) {
      double best = -1.0;
      Index best_t = 0;
      double best_pre = 0.0;
      for (Index t = 0; t < explicit_n; ++t) {
        const double a = pre(t, j) > 0.0 ? pre(t, j) : 0.0;
        if (a > best) {
          best = a;
          best_t = t;
          best_pre = pre(t, j);
        }
      }
      if (explicit_n < total) {
        const double b = kernel.bias[j];
        const double a = b > 0.0 ? b : 0.0;
        if (a > best) {
          best = a;
          best_t = explicit_n;  // first all-padding window
          best_pre = b;
        }
      }
      pooled[unit] = best;
      pre_pool[unit] = best_pre;
      windows[static_cast<std::size_t>(unit)] = static_cast<int>(best_t);
      ++unit;
    }
  }

  const double z = params.t.dense_w.dot(pooled) + params.t.dense_b;
  const double raw = to_probability(params.out_activation, z);
  const double prob =
      std::clamp(raw, kProbEpsilon, 1.0 - kProbEpsilon);

  if (cache) {
    cache->x = &X;
    cache->used_rows = used;
    cache->windows = std::move(windows);
    cache->pre_pool = std::move(pre_pool);
    cache->pooled = std::move(pooled);
    cache->z = z;
    cache->prob = prob;
    cache->clamped = raw != prob;
  }
  return prob;
}

double bce_loss(double prob, int label) {
  return label == 1 ? -std::log(prob) : -std::log(1.0 - prob);
}

ParamTensors zeros_like(const ParamTensors& t) {
  ParamTensors z;
  z.kernels.reserve(t.kernels.size());
  for (const auto& kernel : t.kernels) {
    ConvKernel k;
    k.width = kernel.width;
    k.bias = Vector::Zero(kernel.bias.size());
    k.taps.assign(kernel.taps.size(),
                  Matrix::Zero(kernel.taps[0].rows(), kernel.taps[0].cols()));
    z.kernels.push_back(std::move(k));
  }
  z.dense_w = Vector::Zero(t.dense_w.size());
  z.dense_b = 0.0;
  return z;
}

ParamTensors backward(const ModelParams& params, const ForwardCache& cache,
                      int label) {
  ParamTensors g = zeros_like(params.t);
  const double p = cache.prob;
  const double y = static_cast<double>(label);

  double dz = 0.0;
  if (!cache.clamped) {
    switch (params.out_activation) {
      case OutActivation::kSigmoid: dz = p - y; break;
      case OutActivation::kTanh: dz = 2.0 * (p - y); break;
      case OutActivation::kRelu: dz = (p - y) / (p * (1.0 - p)); break;
    }
  }
  g.dense_b = dz;
  g.dense_w = dz * cache.pooled;
  if (dz == 0.0) return g;

  const Matrix& X = *cache.x;
  int unit = 0;
  for (std::size_t ki = 0; ki < params.t.kernels.size(); ++ki) {
    const auto& kernel = params.t.kernels[ki];
    auto& gk = g.kernels[ki];
    for (int j = 0; j < kernel.filters(); ++j, ++unit) {
      // relu gate at the pooled window; padding-only windows have zero rows,
      // so only their bias picks up gradient.
      if (cache.pre_pool[unit] <= 0.0) continue;
      const double dpre = dz * params.t.dense_w[unit];
      if (dpre == 0.0) continue;
      const Index t = cache.windows[static_cast<std::size_t>(unit)];
      for (Index i = 0; i < kernel.width; ++i) {
        gk.taps[static_cast<std::size_t>(i)].col(j) +=
            dpre * X.row(t + i).transpose();
      }
      gk.bias[j] += dpre;
    }
  }
  return g;
}

namespace {

template <typename Tensors, typename Fn>
void visit_values(Tensors& t, Fn&& fn) {
  for (auto& kernel : t.kernels) {
    for (auto& tap : kernel.taps) {
      for (Index f = 0; f < tap.rows(); ++f) {
        for (Index j = 0; j < tap.cols(); ++j) fn(tap(f, j));
      }
    }
    for (Index j = 0; j < kernel.bias.size(); ++j) fn(kernel.bias[j]);
  }
  for (Index i = 0; i < t.dense_w.size(); ++i) fn(t.dense_w[i]);
  fn(t.dense_b);
}

}  // namespace

Index param_count(const ParamTensors& t) {
  Index n = 0;
  visit_values(t, [&](const double&) { ++n; });
  return n;
}

Vector flatten(const ParamTensors& t) {
  Vector flat(param_count(t));
  Index i = 0;
  visit_values(t, [&](const double& v) { flat[i++] = v; });
  return flat;
}

void unflatten(const Vector& flat, ParamTensors& t) {
  if (flat.size() != param_count(t)) {
    throw std::invalid_argument("flat parameter size mismatch");
  }
  Index i = 0;
  visit_values(t, [&](double& v) { v = flat[i++]; });
}

void flatten_add(const ParamTensors& t, Vector& out) {
  if (out.size() != param_count(t)) {
    throw std::invalid_argument("flat parameter size mismatch");
  }
  Index i = 0;
  visit_values(t, [&](const double& v) { out[i++] += v; });
}

Metrics evaluate(const ModelParams& params, const SampleSource& samples) {
  const std::size_t n = samples.size();
  if (n == 0) throw std::invalid_argument("empty dataset");
  double loss = 0.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const int y = samples.label(i);
    const double p = forward(params, samples.matrix(i));
    loss += bce_loss(p, y);
    correct += (p >= 0.5) == (y == 1);
  }
  return {static_cast<double>(correct) / static_cast<double>(n),
          loss / static_cast<double>(n)};
}

FitResult fit(const SampleSource& train, const SampleSource& valid,
              const TrainConfig& config) {
  if (train.size() == 0 || valid.size() == 0) {
    throw std::invalid_argument("empty dataset");
  }
  if (config.learning_rate <= 0.0) {
    throw std::invalid_argument("learning_rate must be positive");
  }
  if (config.batch_size < 1) {
    throw std::invalid_argument("batch_size must be at least 1");
  }
  if (config.max_epochs < 1) {
    throw std::invalid_argument("max_epochs must be at least 1");
  }
  for (std::size_t i = 0; i < train.size(); ++i) {
    if (train.label(i) != 0 && train.label(i) != 1) {
      throw std::invalid_argument("labels must be 0 or 1");
    }
  }

  const int feature_dim = static_cast<int>(train.matrix(0).values.cols());
  ModelParams params =
      init_params(feature_dim, rng::derive_seed(config.seed, "init"),
                  config.out_activation);

  Vector theta = flatten(params.t);
  Vector m = Vector::Zero(theta.size());
  Vector v = Vector::Zero(theta.size());
  Vector grad = Vector::Zero(theta.size());
  constexpr double kBeta1 = 0.9;
  constexpr double kBeta2 = 0.999;
  constexpr double kAdamEps = 1e-8;
  long steps = 0;

  rng::Engine shuffle_eng(rng::derive_seed(config.seed, "shuffle"));
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0u);

  FitResult result;
  Vector best_theta = theta;
  double best_loss = std::numeric_limits<double>::infinity();
  int bad_epochs = 0;

  for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
    rng::shuffle(order, shuffle_eng);
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t batch =
          std::min<std::size_t>(config.batch_size, order.size() - start);
      grad.setZero();
      ForwardCache cache;
      for (std::size_t b = 0; b < batch; ++b) {
        const std::size_t i = order[start + b];
        forward(params, train.matrix(i), &cache);
        flatten_add(backward(params, cache, train.label(i)), grad);
      }
      grad /= static_cast<double>(batch);

      if (config.optimizer == Optimizer::kAdam) {
        ++steps;
        m = kBeta1 * m + (1.0 - kBeta1) * grad;
        v = kBeta2 * v.array() + (1.0 - kBeta2) * grad.array().square();
        const double mc = 1.0 - std::pow(kBeta1, static_cast<double>(steps));
        const double vc = 1.0 - std::pow(kBeta2, static_cast<double>(steps));
        theta.array() -= config.learning_rate * (m.array() / mc) /
                         ((v.array() / vc).sqrt() + kAdamEps);
      } else {
        theta -= config.learning_rate * grad;
      }
      unflatten(theta, params.t);
    }

    const Metrics on_train = evaluate(params, train);
    const Metrics on_valid = evaluate(params, valid);
    result.history.push_back({on_train.mean_loss, on_train.accuracy,
                              on_valid.mean_loss, on_valid.accuracy});

    if (on_valid.mean_loss < best_loss) {
      best_loss = on_valid.mean_loss;
      best_theta = theta;
      result.best_epoch = epoch;
      bad_epochs = 0;
    } else {
      ++bad_epochs;
      if (bad_epochs > config.patience) break;
    }
  }

  unflatten(best_theta, params.t);
  result.params = std::move(params);
  return result;
}

namespace {

bool canonical_shape(const ParamTensors& t) {
  if (t.kernels.size() != 3) return false;
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& k = t.kernels[i];
    if (k.width != kKernelWidths[i]) return false;
    if (k.filters() != kFiltersPerKernel) return false;
    if (static_cast<int>(k.taps.size()) != k.width) return false;
  }
  return t.dense_w.size() == 3 * kFiltersPerKernel;
}

void write_value(std::ofstream& out, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  out << buf << '\n';
}

class LineReader {
 public:
  LineReader(const std::filesystem::path& path) : path_(path), in_(path) {
    if (!in_) {
      throw std::runtime_error("cannot open checkpoint: " + path.string());
    }
  }

  std::string next(const char* what) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) return line;
    }
    throw std::runtime_error(path_.string() +
                             ": truncated checkpoint, expected " +
                             std::string(what));
  }

  bool at_end() {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (!line.empty() && line != "\r") return false;
    }
    return true;
  }

  [[noreturn]] void fail(const std::string& what) {
    throw std::runtime_error(path_.string() + ":" + std::to_string(line_no_) +
                             ": " + what);
  }

 private:
  std::filesystem::path path_;
  std::ifstream in_;
  std::size_t line_no_ = 0;
};

}  // namespace

void save_checkpoint(const ModelParams& params,
                     const std::filesystem::path& path) {
  if (!canonical_shape(params.t)) {
    throw std::invalid_argument(
        "checkpoint format only covers the (2,3,4)-width two-filter layout");
  }
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write checkpoint: " + path.string());
  }
  out << "farmsift-ckpt v1\n";
  out << params.feature_dim << ' ' << to_string(params.out_activation)
      << '\n';
  for (const auto& kernel : params.t.kernels) {
    out << 'W' << kernel.width << '\n';
    for (const auto& tap : kernel.taps) {
      for (Index f = 0; f < tap.rows(); ++f) {
        for (Index j = 0; j < tap.cols(); ++j) write_value(out, tap(f, j));
      }
    }
    out << 'b' << kernel.width << '\n';
    for (Index j = 0; j < kernel.bias.size(); ++j) {
      write_value(out, kernel.bias[j]);
    }
  }
  out << "w\n";
  for (Index i = 0; i < params.t.dense_w.size(); ++i) {
    write_value(out, params.t.dense_w[i]);
  }
  out << "b0\n";
  write_value(out, params.t.dense_b);
}

ModelParams load_checkpoint(const std::filesystem::path& path) {
  LineReader reader(path);
  if (reader.next("header") != "farmsift-ckpt v1") {
    reader.fail("not a farmsift-ckpt v1 file");
  }
  int feature_dim = 0;
  OutActivation act = OutActivation::kSigmoid;
  {
    std::istringstream hdr(reader.next("feature width and activation"));
    std::string act_name, extra;
    if (!(hdr >> feature_dim >> act_name) || feature_dim <= 0 ||
        (hdr >> extra)) {
      reader.fail("header must be \"F out_activation\"");
    }
    const auto parsed = out_activation_from_string(act_name);
    if (!parsed) reader.fail("unknown out_activation: " + act_name);
    act = *parsed;
  }

  ModelParams params;
  params.feature_dim = feature_dim;
  params.out_activation = act;

  const auto read_value = [&](const char* what) {
    const std::string line = reader.next(what);
    const char* begin = line.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end != begin + line.size() || !std::isfinite(v)) {
      reader.fail(std::string("bad value in block ") + what);
    }
    return v;
  };
  const auto expect_block = [&](const std::string& name) {
    const std::string line = reader.next(name.c_str());
    if (line != name) reader.fail("expected block \"" + name + "\"");
  };

  for (const int width : kKernelWidths) {
    ConvKernel kernel;
    kernel.width = width;
    expect_block("W" + std::to_string(width));
    kernel.taps.assign(static_cast<std::size_t>(width),
                       Matrix(feature_dim, kFiltersPerKernel));
    for (auto& tap : kernel.taps) {
      for (Index f = 0; f < tap.rows(); ++f) {
        for (Index j = 0; j < tap.cols(); ++j) tap(f, j) = read_value("W");
      }
    }
    expect_block("b" + std::to_string(width));
    kernel.bias = Vector(kFiltersPerKernel);
    for (Index j = 0; j < kernel.bias.size(); ++j) {
      kernel.bias[j] = read_value("b");
    }
    params.t.kernels.push_back(std::move(kernel));
  }
  expect_block("w");
  params.t.dense_w = Vector(params.t.pooled_size());
  for (Index i = 0; i < params.t.dense_w.size(); ++i) {
    params.t.dense_w[i] = read_value("w");
  }
  expect_block("b0");
  params.t.dense_b = read_value("b0");
  if (!reader.at_end()) {
    reader.fail("unexpected content after final block");
  }
  return params;
}

GradCheckResult gradient_check(const GradCheckConfig& config) {
  rng::Engine eng(config.seed);
  GradCheckResult result;
  ModelParams probe;

  for (int c = 0; c < config.configs; ++c) {
    const auto act = static_cast<OutActivation>(c % 3);
    ModelParams params = init_params(config.feature_dim, eng(), act);
    Vector theta = flatten(params.t);
    // Randomize everything, biases included, so every gradient path is live.
    for (Index i = 0; i < theta.size(); ++i) {
      theta[i] = rng::uniform(eng, -0.9, 0.9);
    }
    unflatten(theta, params.t);

    FeatureMatrix x;
    x.values = Matrix::Zero(config.rows, config.feature_dim);
    // Odd configs leave padding rows so the implicit-window path is checked.
    x.used_rows = (c % 2 == 0) ? config.rows
                               : std::max<Index>(1, config.rows - 3);
    for (Index t = 0; t < x.used_rows; ++t) {
      for (Index f = 0; f < config.feature_dim; ++f) {
        x.values(t, f) = rng::uniform(eng, -1.0, 1.0);
      }
    }
    const int label = (c / 2) % 2;

    ForwardCache cache;
    forward(params, x, &cache);
    const Vector analytic = flatten(backward(params, cache, label));

    probe = params;
    for (Index i = 0; i < theta.size(); ++i) {
      const double original = theta[i];
      theta[i] = original + config.step;
      unflatten(theta, probe.t);
      const double up = bce_loss(forward(probe, x), label);
      theta[i] = original - config.step;
      unflatten(theta, probe.t);
      const double down = bce_loss(forward(probe, x), label);
      theta[i] = original;

      const double numeric = (up - down) / (2.0 * config.step);
      const double scale =
          std::max({std::abs(analytic[i]), std::abs(numeric), 1e-8});
      const double rel = std::abs(analytic[i] - numeric) / scale;
      result.max_rel_error = std::max(result.max_rel_error, rel);
      ++result.params_checked;
    }
    unflatten(theta, params.t);
  }
  result.passed = result.max_rel_error < config.tolerance;
  return result;
}

}  // namespace farmsift
