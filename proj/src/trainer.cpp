// Copyright 2026 The lobmix Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "lobmix/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>

#include "lobmix/csv.hpp"
#include "lobmix/rng.hpp"
#include "lobmix/samplers.hpp"

namespace lobmix {

std::string_view to_string(Architecture arch) { return arch == Architecture::linear ? "linear" : "mlp1"; }

Architecture parse_architecture(std::string_view text) {
  if (text == "linear") return Architecture::linear;
  if (text == "mlp1" || text == "mlp") return Architecture::mlp1;
  throw std::invalid_argument("unknown architecture '" + std::string(text) + "'");
}

std::string_view to_string(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::erm: return "erm";
    case StrategyKind::mixup: return "mixup";
    case StrategyKind::lob: return "lob";
    case StrategyKind::deferred: return "deferred";
  }
  return "unknown";
}

StrategyKind parse_strategy(std::string_view text) {
  if (text == "erm") return StrategyKind::erm;
  if (text == "mixup") return StrategyKind::mixup;
  if (text == "lob") return StrategyKind::lob;
  if (text == "deferred") return StrategyKind::deferred;
  throw std::invalid_argument("unknown strategy '" + std::string(text) + "'");
}

// ---------------------------------------------------------------------------
// Model

ModelParams ModelParams::zeros(Architecture arch, std::size_t input_dim, std::size_t num_classes,
                               std::size_t hidden) {
  if (input_dim == 0 || num_classes == 0) throw std::invalid_argument("model needs D >= 1 and C >= 1");
  ModelParams p;
  p.arch = arch;
  p.input_dim = input_dim;
  p.num_classes = num_classes;
  if (arch == Architecture::linear) {
    p.w1.assign(num_classes * input_dim, 0.0);
    p.b1.assign(num_classes, 0.0);
  } else {
    if (hidden == 0) throw std::invalid_argument("mlp1 needs a hidden width >= 1");
    p.hidden = hidden;
    p.w1.assign(hidden * input_dim, 0.0);
    p.b1.assign(hidden, 0.0);
    p.w2.assign(num_classes * hidden, 0.0);
    p.b2.assign(num_classes, 0.0);
  }
  return p;
}

std::vector<double> ModelParams::flat() const {
  std::vector<double> out;
  out.reserve(parameter_count());
  for (const auto* t : {&w1, &b1, &w2, &b2}) out.insert(out.end(), t->begin(), t->end());
  return out;
}

void ModelParams::set_flat(std::span<const double> values) {
  if (values.size() != parameter_count()) throw std::invalid_argument("set_flat: wrong parameter count");
  auto it = values.begin();
  for (auto* t : {&w1, &b1, &w2, &b2}) {
    std::copy(it, it + static_cast<std::ptrdiff_t>(t->size()), t->begin());
    it += static_cast<std::ptrdiff_t>(t->size());
  }
}

namespace {

constexpr double kProbFloor = 1e-12;

struct Activations {
  std::vector<double> hidden;  // tanh outputs, mlp1 only
  std::vector<double> log_probs;
};

void affine(std::span<const double> w, std::span<const double> b, std::span<const double> x,
            std::vector<double>& out) {
  const std::size_t rows = b.size();
  const std::size_t cols = x.size();
  out.resize(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const double* wr = w.data() + r * cols;
    double acc = b[r];
    for (std::size_t c = 0; c < cols; ++c) acc += wr[c] * x[c];
    out[r] = acc;
  }
}

void log_softmax_inplace(std::vector<double>& z) {
  const double m = *std::max_element(z.begin(), z.end());
  double s = 0.0;
  for (double v : z) s += std::exp(v - m);
  const double lse = m + std::log(s);
  for (double& v : z) v -= lse;
}

void check_input(const ModelParams& params, std::span<const double> x) {
  if (x.size() != params.input_dim) {
    throw std::invalid_argument("input has dimension " + std::to_string(x.size()) + ", model expects " +
                                std::to_string(params.input_dim));
  }
  for (double v : x) {
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite input feature");
  }
}

void run_forward(const ModelParams& p, std::span<const double> x, Activations& act) {
  if (p.arch == Architecture::linear) {
    affine(p.w1, p.b1, x, act.log_probs);
  } else {
    affine(p.w1, p.b1, x, act.hidden);
    for (double& h : act.hidden) h = std::tanh(h);
    affine(p.w2, p.b2, act.hidden, act.log_probs);
  }
  log_softmax_inplace(act.log_probs);
}

double clamped_ce(std::span<const double> log_probs, std::span<const double> target) {
  const double floor = std::log(kProbFloor);
  double loss = 0.0;
  for (std::size_t k = 0; k < target.size(); ++k) {
    if (target[k] != 0.0) loss -= target[k] * std::max(log_probs[k], floor);
  }
  return loss;
}

}  // namespace

std::vector<double> forward(const ModelParams& params, std::span<const double> x) {
  check_input(params, x);
  Activations act;
  run_forward(params, x, act);
  std::vector<double> probs(act.log_probs.size());
  std::transform(act.log_probs.begin(), act.log_probs.end(), probs.begin(), [](double l) { return std::exp(l); });
  return probs;
}

double soft_cross_entropy(std::span<const double> probs, std::span<const double> target) {
  if (probs.size() != target.size()) throw std::invalid_argument("soft_cross_entropy: size mismatch");
  double loss = 0.0;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    if (target[k] != 0.0) loss -= target[k] * std::log(std::max(probs[k], kProbFloor));
  }
  return std::max(loss, 0.0);
}

SoftBatch to_soft_batch(const MixedBatch& batch) {
  if (batch.examples.empty()) throw std::invalid_argument("empty batch");
  SoftBatch out;
  out.dim = batch.examples.front().features.size();
  out.num_classes = batch.examples.front().label.weights.size();
  if (out.dim == 0) throw std::invalid_argument("batch was built without features");
  out.features.reserve(out.dim * batch.size());
  out.targets.reserve(out.num_classes * batch.size());
  for (const auto& ex : batch.examples) {
    if (ex.features.size() != out.dim || ex.label.weights.size() != out.num_classes) {
      throw std::invalid_argument("inconsistent example shapes in batch");
    }
    out.features.insert(out.features.end(), ex.features.begin(), ex.features.end());
    out.targets.insert(out.targets.end(), ex.label.weights.begin(), ex.label.weights.end());
  }
  return out;
}

LossAndGradient loss_and_grad(const ModelParams& p, const SoftBatch& batch) {
  const std::size_t n = batch.size();
  if (n == 0) throw std::invalid_argument("loss_and_grad: empty batch");
  if (batch.dim != p.input_dim || batch.num_classes != p.num_classes) {
    throw std::invalid_argument("loss_and_grad: batch shape does not match model");
  }
  LossAndGradient out;
  out.grad = ModelParams::zeros(p.arch, p.input_dim, p.num_classes, p.hidden);
  ModelParams& g = out.grad;
  const std::size_t d = p.input_dim, c = p.num_classes, h = p.hidden;
  const double inv_n = 1.0 / static_cast<double>(n);

  Activations act;
  std::vector<double> delta(c), delta_hidden(h);
  for (std::size_t e = 0; e < n; ++e) {
    const auto x = batch.x(e);
    const auto t = batch.t(e);
    run_forward(p, x, act);
    out.loss += clamped_ce(act.log_probs, t) * inv_n;

    // d(loss)/d(logits) = sum(t) * softmax - t
    const double t_sum = std::accumulate(t.begin(), t.end(), 0.0);
    for (std::size_t k = 0; k < c; ++k) delta[k] = (t_sum * std::exp(act.log_probs[k]) - t[k]) * inv_n;

    if (p.arch == Architecture::linear) {
      for (std::size_t k = 0; k < c; ++k) {
        double* gw = g.w1.data() + k * d;
        for (std::size_t j = 0; j < d; ++j) gw[j] += delta[k] * x[j];
        g.b1[k] += delta[k];
      }
    } else {
      std::fill(delta_hidden.begin(), delta_hidden.end(), 0.0);
      for (std::size_t k = 0; k < c; ++k) {
        double* gw = g.w2.data() + k * h;
        const double* w = p.w2.data() + k * h;
        for (std::size_t j = 0; j < h; ++j) {
          gw[j] += delta[k] * act.hidden[j];
          delta_hidden[j] += delta[k] * w[j];
        }
        g.b2[k] += delta[k];
      }
      for (std::size_t j = 0; j < h; ++j) {
        const double dz = delta_hidden[j] * (1.0 - act.hidden[j] * act.hidden[j]);
        double* gw = g.w1.data() + j * d;
        for (std::size_t i = 0; i < d; ++i) gw[i] += dz * x[i];
        g.b1[j] += dz;
      }
    }
  }
  return out;
}

double mean_loss(const ModelParams& p, const SoftBatch& batch) {
  const std::size_t n = batch.size();
  if (n == 0) throw std::invalid_argument("mean_loss: empty batch");
  Activations act;
  double loss = 0.0;
  for (std::size_t e = 0; e < n; ++e) {
    run_forward(p, batch.x(e), act);
    loss += clamped_ce(act.log_probs, batch.t(e));
  }
  return loss / static_cast<double>(n);
}

ModelParams grad(const ModelParams& params, const MixedBatch& batch) {
  return loss_and_grad(params, to_soft_batch(batch)).grad;
}

// ---------------------------------------------------------------------------
// Config

void TrainConfig::validate() const {
  if (epochs == 0) throw std::invalid_argument("epochs must be >= 1");
  if (batch_size == 0) throw std::invalid_argument("batch size must be >= 1");
  if (!(lr >= 0.0) || !std::isfinite(lr)) throw std::invalid_argument("learning rate must be finite and >= 0");
  if (!(lr_decay_factor > 0.0)) throw std::invalid_argument("lr decay factor must be > 0");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("alpha must be > 0");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw std::invalid_argument("momentum must lie in [0, 1)");
  if (!(weight_decay >= 0.0)) throw std::invalid_argument("weight decay must be >= 0");
  if (arch == Architecture::mlp1 && hidden == 0) throw std::invalid_argument("mlp1 needs hidden >= 1");
  for (std::size_t i = 1; i < lr_decay_epochs.size(); ++i) {
    if (lr_decay_epochs[i] <= lr_decay_epochs[i - 1]) {
      throw std::invalid_argument("lr decay epochs must be strictly increasing");
    }
  }
  if (strategy == StrategyKind::deferred) {
    const std::size_t t = resolved_defer_epoch();
    if (t >= epochs) {
      throw std::invalid_argument("defer epoch " + std::to_string(t) + " must be < epochs (" +
                                  std::to_string(epochs) + ")");
    }
  } else if (defer_epoch) {
    throw std::invalid_argument("defer_epoch only applies to the deferred strategy");
  }
}

std::size_t TrainConfig::resolved_defer_epoch() const {
  if (defer_epoch) return *defer_epoch;
  if (lr_decay_epochs.empty()) {
    throw std::invalid_argument("deferred strategy needs a defer epoch or at least one lr decay epoch");
  }
  return lr_decay_epochs.front();
}

double TrainConfig::lr_at(std::size_t epoch) const {
  double rate = lr;
  for (std::size_t e : lr_decay_epochs) {
    if (epoch >= e) rate *= lr_decay_factor;
  }
  return rate;
}

nlohmann::json TrainConfig::to_json() const {
  nlohmann::json j = {
      {"epochs", epochs},
      {"batches_per_epoch", batches_per_epoch},
      {"batch_size", batch_size},
      {"lr", lr},
      {"lr_decay_epochs", lr_decay_epochs},
      {"lr_decay_factor", lr_decay_factor},
      {"alpha", alpha},
      {"strategy", to_string(strategy)},
      {"momentum", momentum},
      {"weight_decay", weight_decay},
      {"arch", to_string(arch)},
      {"hidden", hidden},
      {"standardize", standardize},
      {"seed", seed},
  };
  j["defer_epoch"] = defer_epoch ? nlohmann::json(*defer_epoch) : nlohmann::json(nullptr);
  return j;
}

TrainConfig TrainConfig::from_json(const nlohmann::json& j) {
  TrainConfig c;
  c.epochs = j.value("epochs", c.epochs);
  c.batches_per_epoch = j.value("batches_per_epoch", c.batches_per_epoch);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.lr = j.value("lr", c.lr);
  c.lr_decay_epochs = j.value("lr_decay_epochs", c.lr_decay_epochs);
  c.lr_decay_factor = j.value("lr_decay_factor", c.lr_decay_factor);
  c.alpha = j.value("alpha", c.alpha);
  if (j.contains("strategy")) c.strategy = parse_strategy(j.at("strategy").get<std::string>());
  if (j.contains("defer_epoch") && !j.at("defer_epoch").is_null()) c.defer_epoch = j.at("defer_epoch").get<std::size_t>();
  c.momentum = j.value("momentum", c.momentum);
  c.weight_decay = j.value("weight_decay", c.weight_decay);
  if (j.contains("arch")) c.arch = parse_architecture(j.at("arch").get<std::string>());
  c.hidden = j.value("hidden", c.hidden);
  c.standardize = j.value("standardize", c.standardize);
  c.seed = j.value("seed", c.seed);
  return c;
}

ModelParams initial_params(const TrainConfig& cfg, std::size_t input_dim, std::size_t num_classes) {
  ModelParams p = ModelParams::zeros(cfg.arch, input_dim, num_classes, cfg.hidden);
  if (cfg.arch == Architecture::mlp1) {
    Rng rng(derive_seed(cfg.seed, "init"));
    const double s1 = 1.0 / std::sqrt(static_cast<double>(input_dim));
    const double s2 = 1.0 / std::sqrt(static_cast<double>(cfg.hidden));
    for (double& w : p.w1) w = s1 * rng.normal();
    for (double& w : p.w2) w = s2 * rng.normal();
  }
  return p;
}

// ---------------------------------------------------------------------------
// Evaluation

std::vector<ClassGroup> groups_by_size(std::span<const std::size_t> class_sizes) {
  const std::size_t c = class_sizes.size();
  std::vector<std::size_t> order(c);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return class_sizes[a] > class_sizes[b]; });
  std::vector<ClassGroup> groups(c, ClassGroup::medium);
  if (c == 0) return groups;
  const std::size_t head = std::max<std::size_t>(1, c / 3);
  const std::size_t tail = c == 1 ? 0 : std::max<std::size_t>(1, c / 3);
  for (std::size_t r = 0; r < c; ++r) {
    if (r < head) groups[order[r]] = ClassGroup::head;
    else if (r >= c - tail) groups[order[r]] = ClassGroup::tail;
  }
  return groups;
}

nlohmann::json EvalReport::to_json() const {
  auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
  return {
      {"per_class_recall", per_class_recall},
      {"balanced_accuracy", balanced_accuracy},
      {"overall_accuracy", overall_accuracy},
      {"head_accuracy", opt(head_accuracy)},
      {"medium_accuracy", opt(medium_accuracy)},
      {"tail_accuracy", opt(tail_accuracy)},
  };
}

EvalReport evaluate(const ModelParams& params, const LabeledDataset& test, std::span<const ClassGroup> groups) {
  const std::size_t c = params.num_classes;
  if (test.num_classes() != c) throw std::invalid_argument("evaluate: class count mismatch");
  if (groups.size() != c) throw std::invalid_argument("evaluate: need one group per class");
  std::vector<std::size_t> total(c, 0), correct(c, 0);
  for (std::size_t i = 0; i < test.size(); ++i) {
    const auto probs = forward(params, test.row(i));
    const auto pred = static_cast<std::size_t>(std::max_element(probs.begin(), probs.end()) - probs.begin());
    ++total[test.label(i)];
    if (pred == test.label(i)) ++correct[test.label(i)];
  }
  EvalReport r;
  r.per_class_recall.resize(c);
  std::size_t all_correct = 0;
  for (std::size_t k = 0; k < c; ++k) {
    if (total[k] == 0) throw std::invalid_argument("evaluate: test set has no examples of class " + std::to_string(k));
    r.per_class_recall[k] = static_cast<double>(correct[k]) / static_cast<double>(total[k]);
    all_correct += correct[k];
  }
  r.balanced_accuracy =
      std::accumulate(r.per_class_recall.begin(), r.per_class_recall.end(), 0.0) / static_cast<double>(c);
  r.overall_accuracy = static_cast<double>(all_correct) / static_cast<double>(test.size());

  auto group_mean = [&](ClassGroup which) -> std::optional<double> {
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t k = 0; k < c; ++k) {
      if (groups[k] == which) {
        sum += r.per_class_recall[k];
        ++n;
      }
    }
    if (n == 0) return std::nullopt;
    return sum / static_cast<double>(n);
  };
  r.head_accuracy = group_mean(ClassGroup::head);
  r.medium_accuracy = group_mean(ClassGroup::medium);
  r.tail_accuracy = group_mean(ClassGroup::tail);
  return r;
}

void write_history_csv(std::ostream& out, std::span<const EpochRecord> history) {
  out << "epoch,lr,train_loss,balanced_acc,head_acc,med_acc,tail_acc\n";
  for (const auto& h : history) {
    out << h.epoch << ',' << format_float(h.lr) << ',' << format_float(h.train_loss) << ','
        << format_float(h.balanced_acc) << ',' << format_float(h.head_acc) << ',' << format_float(h.med_acc) << ','
        << format_float(h.tail_acc) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Training

namespace {

struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;

  static Standardizer fit(const LabeledDataset& data, bool enabled) {
    Standardizer s;
    const std::size_t d = data.dim();
    s.mean.assign(d, 0.0);
    s.scale.assign(d, 1.0);
    if (!enabled || data.empty()) return s;
    const double n = static_cast<double>(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
      const auto r = data.row(i);
      for (std::size_t j = 0; j < d; ++j) s.mean[j] += r[j];
    }
    for (double& m : s.mean) m /= n;
    std::vector<double> var(d, 0.0);
    for (std::size_t i = 0; i < data.size(); ++i) {
      const auto r = data.row(i);
      for (std::size_t j = 0; j < d; ++j) var[j] += (r[j] - s.mean[j]) * (r[j] - s.mean[j]);
    }
    for (std::size_t j = 0; j < d; ++j) {
      const double sd = std::sqrt(var[j] / n);
      s.scale[j] = sd > 0.0 ? sd : 1.0;
    }
    return s;
  }

  LabeledDataset apply(const LabeledDataset& data) const {
    std::vector<double> f = data.features();
    const std::size_t d = data.dim();
    for (std::size_t i = 0; i < data.size(); ++i) {
      for (std::size_t j = 0; j < d; ++j) f[i * d + j] = (f[i * d + j] - mean[j]) / scale[j];
    }
    return LabeledDataset(d, data.num_classes(), std::move(f), data.labels());
  }

  // Rewrites the first layer so the model consumes raw features.
  void fold_into(ModelParams& p) const {
    const std::size_t rows = p.b1.size(), d = p.input_dim;
    for (std::size_t r = 0; r < rows; ++r) {
      double shift = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        double& w = p.w1[r * d + j];
        w /= scale[j];
        shift += w * mean[j];
      }
      p.b1[r] -= shift;
    }
  }
};

SoftBatch one_hot_batch(const LabeledDataset& data, std::span<const std::size_t> indices) {
  SoftBatch b;
  b.dim = data.dim();
  b.num_classes = data.num_classes();
  b.features.reserve(indices.size() * b.dim);
  b.targets.assign(indices.size() * b.num_classes, 0.0);
  for (std::size_t n = 0; n < indices.size(); ++n) {
    const auto r = data.row(indices[n]);
    b.features.insert(b.features.end(), r.begin(), r.end());
    b.targets[n * b.num_classes + data.label(indices[n])] = 1.0;
  }
  return b;
}

class SgdOptimizer {
public:
  SgdOptimizer(const ModelParams& shape, double momentum, double weight_decay)
      : momentum_(momentum), weight_decay_(weight_decay), velocity_(shape.parameter_count(), 0.0) {
    // Decay applies to weight matrices, not biases.
    decay_mask_.reserve(shape.parameter_count());
    for (const auto* t : {&shape.w1, &shape.b1, &shape.w2, &shape.b2}) {
      decay_mask_.insert(decay_mask_.end(), t->size(), (t == &shape.w1 || t == &shape.w2) ? 1.0 : 0.0);
    }
  }

  void step(ModelParams& params, const ModelParams& grad, double lr) {
    std::vector<double> p = params.flat();
    const std::vector<double> g = grad.flat();
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double gi = g[i] + weight_decay_ * decay_mask_[i] * p[i];
      velocity_[i] = momentum_ * velocity_[i] + gi;
      p[i] -= lr * velocity_[i];
    }
    params.set_flat(p);
  }

private:
  double momentum_;
  double weight_decay_;
  std::vector<double> velocity_;
  std::vector<double> decay_mask_;
};

bool uses_lob(const TrainConfig& cfg, std::size_t epoch) {
  switch (cfg.strategy) {
    case StrategyKind::lob: return true;
    case StrategyKind::deferred: return epoch >= cfg.resolved_defer_epoch();
    default: return false;
  }
}

}  // namespace

TrainResult train(const LabeledDataset& train_set, const LabeledDataset& test_set, const TrainConfig& cfg,
                  const BatchObserver& observer) {
  cfg.validate();
  if (train_set.empty()) throw std::invalid_argument("train: empty training set");
  if (train_set.dim() != test_set.dim() || train_set.num_classes() != test_set.num_classes()) {
    throw std::invalid_argument("train: train and test sets disagree on feature dim or class count");
  }

  const Standardizer standardizer = Standardizer::fit(train_set, cfg.standardize);
  const LabeledDataset train_std = standardizer.apply(train_set);
  const LabeledDataset test_std = standardizer.apply(test_set);
  const auto index = std::make_shared<const ClassIndex>(train_std);

  TrainResult result;
  result.groups = groups_by_size(index->class_sizes());
  ModelParams params = initial_params(cfg, train_set.dim(), train_set.num_classes());
  SgdOptimizer optimizer(params, cfg.momentum, cfg.weight_decay);

  const std::size_t steps = cfg.batches_per_epoch != 0
                                ? cfg.batches_per_epoch
                                : (train_std.size() + cfg.batch_size - 1) / cfg.batch_size;

  std::unique_ptr<Sampler> erm_sampler;
  std::unique_ptr<BatchStream> vanilla, lob;
  if (cfg.strategy == StrategyKind::erm) {
    erm_sampler = std::make_unique<Sampler>(SamplerKind::instance_balanced, index, derive_seed(cfg.seed, "erm"));
  }
  if (cfg.strategy == StrategyKind::mixup || cfg.strategy == StrategyKind::deferred) {
    vanilla = std::make_unique<BatchStream>(train_std, index, SamplerKind::instance_balanced,
                                            SamplerKind::instance_balanced, cfg.alpha, derive_seed(cfg.seed, "mixup"));
  }
  if (cfg.strategy == StrategyKind::lob || cfg.strategy == StrategyKind::deferred) {
    lob = std::make_unique<BatchStream>(train_std, index, SamplerKind::class_balanced, SamplerKind::class_balanced,
                                        cfg.alpha, derive_seed(cfg.seed, "lob"));
  }

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double lr = cfg.lr_at(epoch);
    double loss_sum = 0.0;
    for (std::size_t step = 0; step < steps; ++step) {
      SoftBatch batch;
      if (erm_sampler) {
        batch = one_hot_batch(train_std, erm_sampler->sample_batch(cfg.batch_size));
      } else {
        BatchStream& stream = uses_lob(cfg, epoch) ? *lob : *vanilla;
        const MixedBatch mixed = stream.next_batch(cfg.batch_size);
        if (observer) observer(mixed, epoch);
        batch = to_soft_batch(mixed);
      }
      const LossAndGradient lg = loss_and_grad(params, batch);
      if (!std::isfinite(lg.loss)) {
        throw DivergenceError("training diverged at epoch " + std::to_string(epoch) + ", step " +
                              std::to_string(step) + " (lr " + format_float(lr) + ")");
      }
      loss_sum += lg.loss;
      optimizer.step(params, lg.grad, lr);
    }
    for (double v : params.flat()) {
      if (!std::isfinite(v)) {
        throw DivergenceError("non-finite parameters after epoch " + std::to_string(epoch));
      }
    }
    const EvalReport eval = evaluate(params, test_std, result.groups);
    result.history.push_back({epoch, lr, loss_sum / static_cast<double>(steps), eval.balanced_accuracy,
                              eval.head_accuracy, eval.medium_accuracy, eval.tail_accuracy});
  }

  standardizer.fold_into(params);
  result.params = std::move(params);
  return result;
}

}  // namespace lobmix
