#include "rwprior/harness/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "rwprior/harness/metrics.hpp"
#include "rwprior/ops.hpp"

namespace rwprior {

namespace {

// Stream indices for derive_epoch_seed, far from any loss-network index.
constexpr std::uint64_t kModelStream = 0xD0000001;
constexpr std::uint64_t kShuffleStream = 0xD0000002;

Tensor gather(const Tensor& set, const std::vector<std::size_t>& order, std::size_t first, std::size_t count) {
  const Shape s = set.shape();
  Tensor out({count, s.c, s.h, s.w});
  const std::size_t item = s.c * s.plane();
  for (std::size_t b = 0; b < count; ++b)
    std::copy_n(set.plane(order[first + b], 0), item, out.data() + b * item);
  return out;
}

QualityScores score(const Tensor& restored, const Tensor& clean) {
  QualityScores q;
  const std::size_t n = clean.shape().n;
  for (std::size_t i = 0; i < n; ++i) {
    const Tensor a = batch_item(restored, i);
    const Tensor b = batch_item(clean, i);
    q.psnr += psnr(a, b);
    q.ssim += ssim(a, b);
  }
  q.psnr /= static_cast<double>(n);
  q.ssim /= static_cast<double>(n);
  return q;
}

}  // namespace

std::uint64_t model_init_seed(std::uint64_t seed) { return derive_epoch_seed(seed, kModelStream, 0); }

ImageSet load_images(const SyntheticDatasetSpec& spec, std::size_t first, std::size_t count) {
  std::vector<Tensor> clean, noisy;
  clean.reserve(count);
  noisy.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    ImagePair p = gen_synthetic_pair(spec, first + i);
    clean.push_back(std::move(p.clean));
    noisy.push_back(std::move(p.noisy));
  }
  return {stack_batch(clean), stack_batch(noisy)};
}

QualityScores evaluate(const DenoiserModel& model, const ImageSet& images) {
  return score(model.forward(images.noisy), images.clean);
}

QualityScores evaluate_identity(const ImageSet& images) { return score(images.noisy, images.clean); }

TrainResult train(const ExperimentConfig& cfg, std::uint64_t seed, const EpochCallback& on_epoch) {
  cfg.validate();
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();

  const ImageSet train_set = load_images(cfg.dataset, 0, cfg.dataset.count);
  const ImageSet val_set = load_images(cfg.dataset, cfg.dataset.count, cfg.dataset.val_count);
  const std::size_t channels = train_set.clean.shape().c;

  TrainResult result;
  result.model = make_denoiser(cfg.model, channels, model_init_seed(seed));
  Adam adam(cfg.optimizer.lr);

  const bool use_prior = cfg.loss.lambda != 0.0 && !cfg.loss.nets.empty();
  bool per_step = false;
  for (const RandomNetConfig& n : cfg.loss.nets) per_step |= n.reinit == ReinitPolicy::EachStep;

  std::vector<std::size_t> order(cfg.dataset.count);
  const std::size_t batch = std::min(cfg.optimizer.batch, cfg.dataset.count);
  const std::size_t steps_per_epoch = (cfg.dataset.count + batch - 1) / batch;
  NetworkSet nets;
  std::uint64_t global_step = 0;

  for (std::size_t epoch = 0; epoch < cfg.optimizer.epochs; ++epoch) {
    if (use_prior) nets = refresh_weights(cfg.loss, seed, epoch, channels);

    std::iota(order.begin(), order.end(), std::size_t{0});
    SeededRng shuffle(derive_epoch_seed(seed, kShuffleStream, epoch));
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[shuffle.below(i)]);

    MetricsRecord rec;
    rec.epoch = epoch + 1;
    bool finite = true;
    for (std::size_t step = 0; step < steps_per_epoch; ++step, ++global_step) {
      const std::size_t first = step * batch;
      const std::size_t count = std::min(batch, cfg.dataset.count - first);
      const Tensor noisy = gather(train_set.noisy, order, first, count);
      const Tensor clean = gather(train_set.clean, order, first, count);

      if (use_prior && per_step) {
        // EachStep nets are redrawn per step; the others keep their epoch weights.
        const NetworkSet fresh = refresh_weights(cfg.loss, seed, global_step, channels);
        for (std::size_t i = 0; i < nets.size(); ++i)
          if (cfg.loss.nets[i].reinit == ReinitPolicy::EachStep) nets[i] = fresh[i];
      }

      ConvStack::Trace trace;
      const Tensor pred = result.model.forward(noisy, trace);
      Tensor grad;
      const LossBreakdown loss =
          use_prior ? total_loss_and_grad(cfg.loss, nets, clean, pred, grad)
                    : total_loss_and_grad(LossSpec{cfg.loss.base_norm, 0.0, {}, cfg.loss.ensemble_reduce}, {}, clean,
                                          pred, grad);
      rec.base_loss += loss.base;
      rec.prior_loss += loss.prior;
      rec.total_loss += loss.total;
      if (!std::isfinite(loss.total) || !grad.all_finite()) {
        finite = false;
        break;
      }
      std::vector<ConvKernel> grads = result.model.backward(trace, grad);
      adam.step(result.model.body.layers, grads);
    }
    const auto denom = static_cast<double>(steps_per_epoch);
    rec.base_loss /= denom;
    rec.prior_loss /= denom;
    rec.total_loss /= denom;
    // An aborted epoch always carries a non-finite total so the CSV alone identifies it.
    if (!finite && std::isfinite(rec.total_loss)) rec.total_loss = std::nan("");

    const QualityScores q = evaluate(result.model, val_set);
    rec.val_psnr = q.psnr;
    rec.val_ssim = q.ssim;
    rec.seconds = std::chrono::duration<double>(clock::now() - start).count();
    result.records.push_back(rec);
    if (on_epoch) on_epoch(rec);
    if (!finite) {
      result.aborted = true;
      break;
    }
  }
  return result;
}

}  // namespace rwprior
