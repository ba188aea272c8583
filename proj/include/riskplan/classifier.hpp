#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "riskplan/scene.hpp"

namespace riskplan {

/// One-hidden-layer ReLU network mapping a pixel feature vector to class
/// probabilities. Dropout acts on the hidden activations only.
class TinyClassifier {
 public:
  TinyClassifier() = default;
  TinyClassifier(int inputs, int hidden, int outputs, double dropout_rate);

  int inputs() const { return inputs_; }
  int hidden() const { return hidden_; }
  int outputs() const { return outputs_; }
  double dropout_rate() const { return dropout_rate_; }

  /// Deterministic (expected-activation) forward pass.
  void predict(std::span<const double> x, std::span<double> probs) const;

  /// Forward pass through the hidden units listed in `active` only, each
  /// scaled by `scale` (inverted dropout).
  void predict_masked(std::span<const double> x, std::span<const int> active, double scale,
                      std::span<double> probs) const;

  /// Parameters in checkpoint order: W1 (hidden x inputs, row-major), b1,
  /// W2 (outputs x hidden, row-major), b2.
  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }

  std::span<double> w1() { return {params_.data(), std::size_t(hidden_) * inputs_}; }
  std::span<double> b1() { return {params_.data() + w1_size(), std::size_t(hidden_)}; }
  std::span<double> w2() { return {params_.data() + w1_size() + hidden_, std::size_t(outputs_) * hidden_}; }
  std::span<double> b2() { return {params_.data() + w1_size() + hidden_ + w2_size(), std::size_t(outputs_)}; }
  std::span<const double> w1() const { return {params_.data(), std::size_t(hidden_) * inputs_}; }
  std::span<const double> b1() const { return {params_.data() + w1_size(), std::size_t(hidden_)}; }
  std::span<const double> w2() const {
    return {params_.data() + w1_size() + hidden_, std::size_t(outputs_) * hidden_};
  }
  std::span<const double> b2() const {
    return {params_.data() + w1_size() + hidden_ + w2_size(), std::size_t(outputs_)};
  }

  friend bool operator==(const TinyClassifier&, const TinyClassifier&) = default;

 private:
  std::size_t w1_size() const { return std::size_t(hidden_) * inputs_; }
  std::size_t w2_size() const { return std::size_t(outputs_) * hidden_; }

  int inputs_ = 0;
  int hidden_ = 0;
  int outputs_ = 0;
  double dropout_rate_ = 0.0;
  std::vector<double> params_;
};

/// Numerically stable in-place softmax.
void softmax_inplace(std::span<double> z);

/// Flattened per-pixel training set.
struct PixelDataset {
  int feature_dim = 0;
  int num_classes = 0;
  std::vector<double> features;  // N * feature_dim
  std::vector<std::uint16_t> labels;

  std::size_t size() const { return labels.size(); }
  std::span<const double> row(std::size_t i) const {
    return {features.data() + i * feature_dim, std::size_t(feature_dim)};
  }
};

PixelDataset make_dataset(std::span<const Scene> scenes);

struct TrainOptions {
  int hidden_units = 32;
  double dropout_rate = 0.5;
  int epochs = 50;
  double learning_rate = 0.05;
  int batch_size = 64;
  std::uint64_t seed = 0;
};

/// Mini-batch SGD on cross-entropy with a fresh Bernoulli dropout mask per
/// sample and step. Deterministic in (data, options). If `epoch_losses` is
/// given it receives the mean training loss of every epoch. Throws
/// TrainingError if the loss becomes non-finite.
TinyClassifier train_classifier(const PixelDataset& data, const TrainOptions& options,
                                std::vector<double>* epoch_losses = nullptr);
TinyClassifier train_classifier(std::span<const Scene> scenes, const TrainOptions& options,
                                std::vector<double>* epoch_losses = nullptr);

/// Fraction of pixels whose deterministic argmax equals the label.
double accuracy(const TinyClassifier& model, const PixelDataset& data);

/// K members, member k trained without dropout on a with-replacement
/// resample of the pixel set (same size), seeded by derive_seed(seed, k).
/// `threads` > 1 trains members concurrently; the result does not depend on it.
std::vector<TinyClassifier> train_bootstrap_ensemble(std::span<const Scene> scenes, int members,
                                                     const TrainOptions& options, int threads = 1);

// Checkpoint: ASCII `TNY1 F H C dropout_rate\n`, then little-endian float64
// parameters in params() order.
void save_classifier(const TinyClassifier& model, const std::filesystem::path& path);
TinyClassifier load_classifier(const std::filesystem::path& path);
std::string encode_classifier(const TinyClassifier& model);
TinyClassifier decode_classifier(const std::string& bytes);

/// Ensemble member files are `<base>.k<index>`.
std::filesystem::path ensemble_member_path(const std::filesystem::path& base, int index);
std::vector<std::filesystem::path> save_ensemble(std::span<const TinyClassifier> members,
                                                 const std::filesystem::path& base);
std::vector<TinyClassifier> load_ensemble(const std::filesystem::path& base, int members);

}  // namespace riskplan
