#include <cmath>
#include <string>

#include "ctxsal/architectures.hpp"
#include "ctxsal/error.hpp"
#include "ctxsal/simd/kernels.hpp"

namespace ctxsal {

ConvNetModel::Dims ConvNetModel::dims(const ModelConfig& config, const ModelShape& shape) {
  if (config.group_size == 0 || shape.channels % config.group_size != 0) {
    throw InvalidArgument("convnet: channels (" + std::to_string(shape.channels) +
                          ") must be divisible by group_size (" +
                          std::to_string(config.group_size) + ")");
  }
  if (config.kernel == 0 || config.kernel > shape.timesteps) {
    throw InvalidArgument("convnet: kernel must be in [1, timesteps]");
  }
  if (config.filters == 0 || config.hidden == 0 || config.pool == 0) {
    throw InvalidArgument("convnet: filters, hidden and pool must be positive");
  }
  Dims d{};
  d.groups = shape.channels / config.group_size;
  d.filters = config.filters;
  d.group_size = config.group_size;
  d.kernel = config.kernel;
  d.conv_len = shape.timesteps - config.kernel + 1;
  d.pool = config.pool;
  d.pooled_len = d.conv_len / config.pool;
  if (d.pooled_len == 0) throw InvalidArgument("convnet: pool wider than convolution output");
  d.features = d.groups * d.filters * d.pooled_len;
  d.hidden = config.hidden;
  return d;
}

ConvNetModel::ConvNetModel(ModelShape shape, ModelConfig config, std::vector<double> params)
    : DifferentiableModel(shape, config, 0), d_(dims(config, shape)) {
  params_ = std::move(params);
}

std::unique_ptr<DifferentiableModel> ConvNetModel::clone() const {
  return std::make_unique<ConvNetModel>(*this);
}

std::size_t ConvNetModel::count(const ModelConfig& config, const ModelShape& shape) {
  const Dims d = dims(config, shape);
  const std::size_t conv = d.groups * d.filters * (d.group_size * d.kernel + 1);
  return conv + d.hidden * d.features + d.hidden + shape.num_classes * d.hidden +
         shape.num_classes;
}

namespace {

struct Offsets {
  std::size_t conv_w, conv_b, wh, bh, wo, bo;
};

}  // namespace

// act.buffers: [0] tanh(conv) per (g, f) of length To, [1] pooled features,
// [2] dense hidden activations.
void ConvNetModel::compute_logits(const EegMatrix& x, Activations& act,
                                  std::span<double> logits) const {
  const Dims& d = d_;
  const std::size_t C = shape_.num_classes;
  const std::size_t maps = d.groups * d.filters;
  Offsets o{};
  o.conv_w = 0;
  o.conv_b = maps * d.group_size * d.kernel;
  o.wh = o.conv_b + maps;
  o.bh = o.wh + d.hidden * d.features;
  o.wo = o.bh + d.hidden;
  o.bo = o.wo + C * d.hidden;
  std::span<const double> p(params_);

  act.buffers.assign(3, {});
  auto& u = act.buffers[0];
  auto& phi = act.buffers[1];
  auto& h = act.buffers[2];
  u.assign(maps * d.conv_len, 0.0);
  phi.assign(d.features, 0.0);
  h.assign(d.hidden, 0.0);

  for (std::size_t g = 0; g < d.groups; ++g) {
    for (std::size_t f = 0; f < d.filters; ++f) {
      const std::size_t map = g * d.filters + f;
      std::span<double> out(u.data() + map * d.conv_len, d.conv_len);
      std::fill(out.begin(), out.end(), p[o.conv_b + map]);
      const double* w = p.data() + o.conv_w + map * d.group_size * d.kernel;
      for (std::size_t c = 0; c < d.group_size; ++c) {
        auto row = x.row(g * d.group_size + c);
        for (std::size_t k = 0; k < d.kernel; ++k) {
          simd::axpy(w[c * d.kernel + k], row.subspan(k, d.conv_len), out);
        }
      }
      const double inv_pool = 1.0 / static_cast<double>(d.pool);
      for (std::size_t t = 0; t < d.conv_len; ++t) out[t] = std::tanh(out[t]);
      for (std::size_t q = 0; q < d.pooled_len; ++q) {
        double s = 0.0;
        for (std::size_t r = 0; r < d.pool; ++r) s += out[q * d.pool + r];
        phi[map * d.pooled_len + q] = s * inv_pool;
      }
    }
  }
  for (std::size_t j = 0; j < d.hidden; ++j) {
    h[j] = std::tanh(simd::dot(p.subspan(o.wh + j * d.features, d.features), phi) + p[o.bh + j]);
  }
  for (std::size_t c = 0; c < C; ++c) {
    logits[c] = simd::dot(p.subspan(o.wo + c * d.hidden, d.hidden), h) + p[o.bo + c];
  }
}

void ConvNetModel::backprop(const EegMatrix& x, const Activations& act,
                            std::span<const double> dlogits, EegMatrix* dx,
                            std::span<double> dparams) const {
  const Dims& d = d_;
  const std::size_t C = shape_.num_classes;
  const std::size_t maps = d.groups * d.filters;
  Offsets o{};
  o.conv_w = 0;
  o.conv_b = maps * d.group_size * d.kernel;
  o.wh = o.conv_b + maps;
  o.bh = o.wh + d.hidden * d.features;
  o.wo = o.bh + d.hidden;
  o.bo = o.wo + C * d.hidden;
  std::span<const double> p(params_);
  const auto& u = act.buffers[0];
  const auto& phi = act.buffers[1];
  const auto& h = act.buffers[2];
  const bool want_params = !dparams.empty();

  std::vector<double> da(d.hidden, 0.0);
  for (std::size_t c = 0; c < C; ++c) {
    if (dlogits[c] != 0.0) simd::axpy(dlogits[c], p.subspan(o.wo + c * d.hidden, d.hidden), da);
  }
  for (std::size_t j = 0; j < d.hidden; ++j) da[j] *= 1.0 - h[j] * h[j];

  std::vector<double> dphi(d.features, 0.0);
  for (std::size_t j = 0; j < d.hidden; ++j) {
    if (da[j] != 0.0) simd::axpy(da[j], p.subspan(o.wh + j * d.features, d.features), dphi);
  }

  if (want_params) {
    for (std::size_t c = 0; c < C; ++c) {
      simd::axpy(dlogits[c], h, dparams.subspan(o.wo + c * d.hidden, d.hidden));
      dparams[o.bo + c] += dlogits[c];
    }
    for (std::size_t j = 0; j < d.hidden; ++j) {
      if (da[j] != 0.0) simd::axpy(da[j], phi, dparams.subspan(o.wh + j * d.features, d.features));
      dparams[o.bh + j] += da[j];
    }
  }

  const double inv_pool = 1.0 / static_cast<double>(d.pool);
  std::vector<double> dconv(d.conv_len);
  for (std::size_t g = 0; g < d.groups; ++g) {
    for (std::size_t f = 0; f < d.filters; ++f) {
      const std::size_t map = g * d.filters + f;
      const double* um = u.data() + map * d.conv_len;
      std::fill(dconv.begin(), dconv.end(), 0.0);
      for (std::size_t q = 0; q < d.pooled_len; ++q) {
        const double gq = dphi[map * d.pooled_len + q] * inv_pool;
        for (std::size_t r = 0; r < d.pool; ++r) {
          const std::size_t t = q * d.pool + r;
          dconv[t] = gq * (1.0 - um[t] * um[t]);
        }
      }
      const double* w = p.data() + o.conv_w + map * d.group_size * d.kernel;
      for (std::size_t c = 0; c < d.group_size; ++c) {
        const std::size_t ch = g * d.group_size + c;
        for (std::size_t k = 0; k < d.kernel; ++k) {
          if (dx != nullptr) {
            simd::axpy(w[c * d.kernel + k], dconv, dx->row(ch).subspan(k, d.conv_len));
          }
          if (want_params) {
            dparams[o.conv_w + map * d.group_size * d.kernel + c * d.kernel + k] +=
                simd::dot(dconv, x.row(ch).subspan(k, d.conv_len));
          }
        }
      }
      if (want_params) {
        double s = 0.0;
        for (double v : dconv) s += v;
        dparams[o.conv_b + map] += s;
      }
    }
  }
}

}  // namespace ctxsal
