#include "riskplan/classifier.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstring>
#include <numeric>
#include <thread>

#include "riskplan/error.hpp"
#include "riskplan/rng.hpp"
#include "text_util.hpp"

namespace riskplan {

TinyClassifier::TinyClassifier(int inputs, int hidden, int outputs, double dropout_rate)
    : inputs_(inputs), hidden_(hidden), outputs_(outputs), dropout_rate_(dropout_rate) {
  if (inputs < 1 || hidden < 1 || outputs < 2) throw DimensionError("classifier needs F>=1, H>=1, C>=2");
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) throw DimensionError("dropout rate must be in [0,1)");
  params_.assign(w1_size() + hidden_ + w2_size() + outputs_, 0.0);
}

void softmax_inplace(std::span<double> z) {
  const double zmax = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (double& v : z) {
    v = std::exp(v - zmax);
    sum += v;
  }
  for (double& v : z) v /= sum;
}

void TinyClassifier::predict(std::span<const double> x, std::span<double> probs) const {
  auto W1 = w1();
  auto B1 = b1();
  auto W2 = w2();
  auto B2 = b2();
  std::copy(B2.begin(), B2.end(), probs.begin());
  for (int h = 0; h < hidden_; ++h) {
    double a = B1[h];
    const double* w = W1.data() + std::size_t(h) * inputs_;
    for (int f = 0; f < inputs_; ++f) a += w[f] * x[f];
    if (a <= 0.0) continue;
    for (int c = 0; c < outputs_; ++c) probs[c] += W2[std::size_t(c) * hidden_ + h] * a;
  }
  softmax_inplace(probs);
}

void TinyClassifier::predict_masked(std::span<const double> x, std::span<const int> active, double scale,
                                    std::span<double> probs) const {
  auto W1 = w1();
  auto B1 = b1();
  auto W2 = w2();
  auto B2 = b2();
  std::copy(B2.begin(), B2.end(), probs.begin());
  for (int h : active) {
    double a = B1[h];
    const double* w = W1.data() + std::size_t(h) * inputs_;
    for (int f = 0; f < inputs_; ++f) a += w[f] * x[f];
    if (a <= 0.0) continue;
    a *= scale;
    for (int c = 0; c < outputs_; ++c) probs[c] += W2[std::size_t(c) * hidden_ + h] * a;
  }
  softmax_inplace(probs);
}

PixelDataset make_dataset(std::span<const Scene> scenes) {
  if (scenes.empty()) throw DimensionError("need at least one scene");
  PixelDataset d;
  d.feature_dim = scenes.front().feature_dim;
  d.num_classes = scenes.front().truth.num_classes;
  for (const auto& s : scenes) {
    if (s.feature_dim != d.feature_dim || s.truth.num_classes != d.num_classes)
      throw DimensionError("scenes disagree on feature dimension or class count");
    d.features.insert(d.features.end(), s.features.begin(), s.features.end());
    for (auto id : s.truth.labels.data()) d.labels.push_back(id.index);
  }
  return d;
}

namespace {

void init_params(TinyClassifier& m, Rng& rng) {
  std::normal_distribution<double> n1(0.0, std::sqrt(2.0 / m.inputs()));
  std::normal_distribution<double> n2(0.0, std::sqrt(2.0 / m.hidden()));
  for (double& w : m.w1()) w = n1(rng);
  for (double& w : m.w2()) w = n2(rng);
}

}  // namespace

TinyClassifier train_classifier(const PixelDataset& data, const TrainOptions& opt,
                                std::vector<double>* epoch_losses) {
  if (data.size() == 0) throw DimensionError("empty training set");
  if (opt.hidden_units < 1) throw DimensionError("hidden_units must be >= 1");
  if (opt.epochs < 1 || opt.batch_size < 1) throw DimensionError("epochs and batch size must be >= 1");
  if (!(opt.learning_rate > 0.0)) throw DimensionError("learning rate must be positive");

  // Softmax needs at least two outputs; a single-class problem still gets C=2.
  const int C = std::max(2, data.num_classes);
  const int F = data.feature_dim;
  const int H = opt.hidden_units;
  TinyClassifier model(F, H, C, opt.dropout_rate);
  Rng rng = make_rng(opt.seed, {0x7261696E});
  init_params(model, rng);

  const double keep = 1.0 - opt.dropout_rate;
  const double scale = 1.0 / keep;
  std::bernoulli_distribution keep_unit(keep);

  std::vector<double> grad(model.params().size());
  std::vector<double> pre(H), act(H), probs(C), dact(H);
  std::vector<std::uint8_t> mask(H);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (epoch_losses) epoch_losses->clear();

  const std::size_t w1n = std::size_t(H) * F, b1o = w1n, w2o = w1n + H, b2o = w2o + std::size_t(C) * H;
  for (int epoch = 1; epoch <= opt.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += opt.batch_size) {
      const std::size_t end = std::min(order.size(), start + std::size_t(opt.batch_size));
      std::fill(grad.begin(), grad.end(), 0.0);
      const auto& P = model.params();
      for (std::size_t i = start; i < end; ++i) {
        const std::size_t n = order[i];
        auto x = data.row(n);
        const int y = data.labels[n];
        for (int h = 0; h < H; ++h) {
          double a = P[b1o + h];
          for (int f = 0; f < F; ++f) a += P[std::size_t(h) * F + f] * x[f];
          pre[h] = a;
          mask[h] = opt.dropout_rate > 0.0 ? keep_unit(rng) : 1;
          act[h] = (a > 0.0 && mask[h]) ? a * scale : 0.0;
        }
        for (int c = 0; c < C; ++c) {
          double z = P[b2o + c];
          for (int h = 0; h < H; ++h) z += P[w2o + std::size_t(c) * H + h] * act[h];
          probs[c] = z;
        }
        softmax_inplace(probs);
        loss_sum += -std::log(std::max(probs[y], 1e-300));

        std::fill(dact.begin(), dact.end(), 0.0);
        for (int c = 0; c < C; ++c) {
          const double dz = probs[c] - (c == y ? 1.0 : 0.0);
          grad[b2o + c] += dz;
          for (int h = 0; h < H; ++h) {
            grad[w2o + std::size_t(c) * H + h] += dz * act[h];
            dact[h] += dz * P[w2o + std::size_t(c) * H + h];
          }
        }
        for (int h = 0; h < H; ++h) {
          if (!(pre[h] > 0.0 && mask[h])) continue;
          const double dpre = dact[h] * scale;
          grad[b1o + h] += dpre;
          for (int f = 0; f < F; ++f) grad[std::size_t(h) * F + f] += dpre * x[f];
        }
      }
      const double step = opt.learning_rate / double(end - start);
      auto& params = model.params();
      for (std::size_t k = 0; k < params.size(); ++k) params[k] -= step * grad[k];
    }
    const double mean_loss = loss_sum / double(order.size());
    if (!std::isfinite(mean_loss))
      throw TrainingError("training diverged: non-finite loss at epoch " + std::to_string(epoch), epoch);
    if (epoch_losses) epoch_losses->push_back(mean_loss);
  }
  return model;
}

TinyClassifier train_classifier(std::span<const Scene> scenes, const TrainOptions& options,
                                std::vector<double>* epoch_losses) {
  return train_classifier(make_dataset(scenes), options, epoch_losses);
}

double accuracy(const TinyClassifier& model, const PixelDataset& data) {
  if (data.size() == 0) return 0.0;
  std::vector<double> probs(model.outputs());
  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    model.predict(data.row(i), probs);
    auto best = std::max_element(probs.begin(), probs.end()) - probs.begin();
    correct += best == data.labels[i];
  }
  return double(correct) / double(data.size());
}

std::vector<TinyClassifier> train_bootstrap_ensemble(std::span<const Scene> scenes, int members,
                                                     const TrainOptions& options, int threads) {
  if (members < 1) throw DimensionError("ensemble needs at least one member");
  const PixelDataset full = make_dataset(scenes);
  std::vector<TinyClassifier> out(members);

  auto train_member = [&](int k) {
    Rng rng = make_rng(options.seed, {0x626F6F74, std::uint64_t(k)});
    std::uniform_int_distribution<std::size_t> pick(0, full.size() - 1);
    PixelDataset sample;
    sample.feature_dim = full.feature_dim;
    sample.num_classes = full.num_classes;
    sample.features.reserve(full.features.size());
    sample.labels.reserve(full.size());
    for (std::size_t i = 0; i < full.size(); ++i) {
      const std::size_t n = pick(rng);
      auto row = full.row(n);
      sample.features.insert(sample.features.end(), row.begin(), row.end());
      sample.labels.push_back(full.labels[n]);
    }
    TrainOptions member_opt = options;
    member_opt.dropout_rate = 0.0;
    member_opt.seed = derive_seed(options.seed, {std::uint64_t(k)});
    out[k] = train_classifier(sample, member_opt);
  };

  if (threads <= 1) {
    for (int k = 0; k < members; ++k) train_member(k);
  } else {
    std::vector<std::exception_ptr> errors(members);
    std::vector<std::jthread> pool;
    std::atomic<int> next{0};
    for (int w = 0; w < std::min(threads, members); ++w)
      pool.emplace_back([&] {
        for (int k; (k = next.fetch_add(1)) < members;) {
          try {
            train_member(k);
          } catch (...) {
            errors[k] = std::current_exception();
          }
        }
      });
    pool.clear();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  return out;
}

// ---- checkpoints -----------------------------------------------------------

namespace {

std::uint64_t to_le64(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::little) return v;
  std::uint64_t r = 0;
  for (int i = 0; i < 8; ++i) r = (r << 8) | ((v >> (8 * i)) & 0xFF);
  return r;
}

}  // namespace

std::string encode_classifier(const TinyClassifier& model) {
  std::string out = "TNY1 " + std::to_string(model.inputs()) + ' ' + std::to_string(model.hidden()) + ' ' +
                    std::to_string(model.outputs()) + ' ' + detail::format_exact(model.dropout_rate()) + '\n';
  const std::size_t head = out.size();
  out.resize(head + model.params().size() * 8);
  char* dst = out.data() + head;
  for (double p : model.params()) {
    std::uint64_t bits = to_le64(std::bit_cast<std::uint64_t>(p));
    std::memcpy(dst, &bits, 8);
    dst += 8;
  }
  return out;
}

TinyClassifier decode_classifier(const std::string& bytes) {
  auto nl = bytes.find('\n');
  if (bytes.compare(0, 5, "TNY1 ") != 0 || nl == std::string::npos || nl > 128)
    throw ParseError("classifier: bad magic (expected 'TNY1')");
  auto h = detail::tokens(std::string_view(bytes).substr(0, nl));
  if (h.size() != 5) throw ParseError("classifier: expected header 'TNY1 F H C dropout_rate'");
  auto F = detail::parse_int<int>(h[1]);
  auto H = detail::parse_int<int>(h[2]);
  auto C = detail::parse_int<int>(h[3]);
  auto rate = detail::parse_double(h[4]);
  if (!F || !H || !C || !rate) throw ParseError("classifier: malformed header");

  TinyClassifier model;
  try {
    model = TinyClassifier(*F, *H, *C, *rate);
  } catch (const DimensionError& e) {
    throw ParseError(std::string("classifier: ") + e.what());
  }
  const std::size_t expected = model.params().size() * 8;
  if (bytes.size() - (nl + 1) != expected)
    throw ParseError("classifier: length error, expected " + std::to_string(expected) + " payload bytes");
  const char* src = bytes.data() + nl + 1;
  for (double& p : model.params()) {
    std::uint64_t bits;
    std::memcpy(&bits, src, 8);
    p = std::bit_cast<double>(to_le64(bits));
    if (!std::isfinite(p)) throw ParseError("classifier: non-finite parameter");
    src += 8;
  }
  return model;
}

void save_classifier(const TinyClassifier& model, const std::filesystem::path& path) {
  detail::write_file(path, encode_classifier(model));
}

TinyClassifier load_classifier(const std::filesystem::path& path) {
  return decode_classifier(detail::read_file(path));
}

std::filesystem::path ensemble_member_path(const std::filesystem::path& base, int index) {
  auto p = base;
  p += ".k" + std::to_string(index);
  return p;
}

std::vector<std::filesystem::path> save_ensemble(std::span<const TinyClassifier> members,
                                                 const std::filesystem::path& base) {
  std::vector<std::filesystem::path> paths;
  for (std::size_t k = 0; k < members.size(); ++k) {
    paths.push_back(ensemble_member_path(base, int(k)));
    save_classifier(members[k], paths.back());
  }
  return paths;
}

std::vector<TinyClassifier> load_ensemble(const std::filesystem::path& base, int members) {
  std::vector<TinyClassifier> out;
  for (int k = 0; k < members; ++k) out.push_back(load_classifier(ensemble_member_path(base, k)));
  return out;
}

}  // namespace riskplan
