#include "hardattn/backward.hpp"

#include <algorithm>
#include <cmath>

#include "hardattn/error.hpp"
#include "hardattn/transformer.hpp"

namespace hardattn {

Gradients Gradients::zeros_like(const ModelParams& params) {
  Gradients g{params};
  for_each_tensor(g.tensors, [](const std::string&, std::span<double> v) {
    std::fill(v.begin(), v.end(), 0.0);
  });
  return g;
}

namespace {

/// dx for y = layer_norm(x); `y` is the normalized output before any sublayer scale.
Vector norm_backward(std::span<const double> x, std::span<const double> y,
                     std::span<const double> dy, const NormMode& mode) {
  if (mode.is_none()) return Vector(dy.begin(), dy.end());
  const auto [mean, var] = mean_var(x);
  const double inv = 1.0 / std::sqrt(var + mode.eps);
  const double m = static_cast<double>(x.size());
  double mean_dy = 0.0;
  double mean_dy_y = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mean_dy += dy[k];
    mean_dy_y += dy[k] * y[k];
  }
  mean_dy /= m;
  mean_dy_y /= m;
  Vector dx(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) dx[k] = inv * (dy[k] - mean_dy - y[k] * mean_dy_y);
  return dx;
}

Matrix project(const Matrix& w, const std::vector<Vector>& xs, std::size_t count) {
  Matrix out(count, w.rows());
  for (std::size_t i = 0; i < count; ++i) matvec_into(w, xs[i], out.row(i));
  return out;
}

}  // namespace

double loss_nats(const ModelParams& params, const TokenSeq& seq, bool label) {
  return cross_entropy_nats_from_logit(encoder_forward(params, seq).logit, label);
}

BackwardResult backward(const ModelParams& params, const TokenSeq& seq, bool label) {
  if (!params.norm.is_none() && params.norm.eps == 0.0) {
    throw InvalidArgument("backward: exact layer normalization (eps = 0) is evaluation-only");
  }
  if (!params.sublayer_scales.empty()) {
    throw InvalidArgument("backward: models with sublayer scales are not trainable");
  }
  const ActivationTrace trace = encoder_forward(params, seq);
  const std::size_t n = seq.size();
  const std::size_t d = params.width;
  const double scale = attention_logit_scale(params.scaling, n, d);

  BackwardResult result{cross_entropy_nats_from_logit(trace.logit, label), trace.logit,
                        Gradients::zeros_like(params)};
  ModelParams& g = result.grads.tensors;

  const double ds = trace.probability - (label ? 1.0 : 0.0);
  const auto cls = trace.cls_encoding();
  for (std::size_t k = 0; k < d; ++k) g.output_weights[k] += ds * cls[k];
  g.output_bias += ds;

  // Gradient w.r.t. the outputs of the layer being processed (one entry per query position).
  std::vector<Vector> d_out(1, Vector(d));
  for (std::size_t k = 0; k < d; ++k) d_out[0][k] = ds * params.output_weights[k];

  for (std::size_t l = params.layers.size(); l-- > 0;) {
    const LayerParams& layer = params.layers[l];
    const LayerTrace& lt = trace.layers[l];
    LayerParams& gl = g.layers[l];
    const std::vector<Vector>& inputs = l == 0 ? trace.input : trace.layers[l - 1].output;
    const std::size_t queries = lt.output.size();
    const std::size_t ff = layer.ffn_width();

    std::vector<Vector> d_in(n, Vector(d, 0.0));
    std::vector<Vector> d_att(queries);

    for (std::size_t i = 0; i < queries; ++i) {
      const Vector d_pre_a = norm_backward(lt.ffn_sum[i], lt.output[i], d_out[i], params.norm);
      add_outer(gl.ffn_out, d_pre_a, lt.hidden[i]);
      for (std::size_t k = 0; k < d; ++k) gl.ffn_out_bias[k] += d_pre_a[k];

      Vector dz(ff, 0.0);
      matvec_transposed_add(layer.ffn_out, d_pre_a, dz);
      for (std::size_t k = 0; k < ff; ++k) {
        if (!(lt.hidden[i][k] > 0.0)) dz[k] = 0.0;
      }
      add_outer(gl.ffn_in, dz, lt.attended[i]);
      for (std::size_t k = 0; k < ff; ++k) gl.ffn_in_bias[k] += dz[k];

      Vector dc = d_pre_a;
      matvec_transposed_add(layer.ffn_in, dz, dc);

      Vector d_pre_c = norm_backward(lt.attention_sum[i], lt.attended[i], dc, params.norm);
      for (std::size_t k = 0; k < d; ++k) d_in[i][k] += d_pre_c[k];
      d_att[i] = std::move(d_pre_c);
    }

    for (std::size_t h = 0; h < layer.heads.size(); ++h) {
      const HeadParams& head = layer.heads[h];
      HeadParams& gh = gl.heads[h];
      const AttentionMap& map = lt.heads[h];
      const Matrix qs = project(head.query, inputs, queries);
      const Matrix keys = project(head.key, inputs, n);
      const Matrix values = project(head.value, inputs, n);

      Matrix dq(queries, d);
      Matrix dk(n, d);
      Matrix dv(n, d);
      Vector dz(n);
      for (std::size_t i = 0; i < queries; ++i) {
        const auto w = map.row(i);
        const auto dout = std::span<const double>(d_att[i]);
        double mean = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
          const double da = dot(dout, values.row(j));
          dz[j] = da;
          mean += w[j] * da;
          auto dvj = dv.row(j);
          for (std::size_t k = 0; k < d; ++k) dvj[k] += w[j] * dout[k];
        }
        auto dqi = dq.row(i);
        const auto qi = qs.row(i);
        for (std::size_t j = 0; j < n; ++j) {
          const double g_logit = scale * w[j] * (dz[j] - mean);
          if (g_logit == 0.0) continue;
          const auto kj = keys.row(j);
          auto dkj = dk.row(j);
          for (std::size_t k = 0; k < d; ++k) {
            dqi[k] += g_logit * kj[k];
            dkj[k] += g_logit * qi[k];
          }
        }
      }

      for (std::size_t i = 0; i < queries; ++i) {
        add_outer(gh.query, dq.row(i), inputs[i]);
        matvec_transposed_add(head.query, dq.row(i), d_in[i]);
      }
      for (std::size_t j = 0; j < n; ++j) {
        add_outer(gh.key, dk.row(j), inputs[j]);
        matvec_transposed_add(head.key, dk.row(j), d_in[j]);
        add_outer(gh.value, dv.row(j), inputs[j]);
        matvec_transposed_add(head.value, dv.row(j), d_in[j]);
      }
    }
    d_out = std::move(d_in);
  }

  for (std::size_t i = 0; i < n; ++i) {
    auto& ge = g.word_embeddings[static_cast<std::size_t>(seq[i])];
    for (std::size_t k = 0; k < d; ++k) ge[k] += d_out[i][k];
  }
  return result;
}

namespace {

std::vector<bool> active_units(const ActivationTrace& trace) {
  std::vector<bool> pattern;
  for (const auto& layer : trace.layers) {
    for (const auto& h : layer.hidden) {
      for (double v : h) pattern.push_back(v > 0.0);
    }
  }
  return pattern;
}

}  // namespace

GradCheckReport check_gradients(const ModelParams& params, const TokenSeq& seq, bool label,
                                const Gradients& analytic, double h, double rel_tol,
                                double small_grad, double small_grad_rel_tol) {
  GradCheckReport report;
  ModelParams probe = params;
  const std::vector<bool> base_pattern = active_units(encoder_forward(params, seq));

  std::vector<std::span<double>> probe_tensors;
  std::vector<std::string> names;
  for_each_tensor(probe, [&](const std::string& name, std::span<double> v) {
    names.push_back(name);
    probe_tensors.push_back(v);
  });
  std::vector<std::span<const double>> grads;
  for_each_tensor(analytic.tensors,
                  [&](const std::string&, std::span<const double> v) { grads.push_back(v); });
  if (grads.size() != probe_tensors.size()) {
    throw DimensionError("check_gradients: gradient tree does not match the model");
  }

  for (std::size_t t = 0; t < probe_tensors.size(); ++t) {
    auto values = probe_tensors[t];
    const auto ga = grads[t];
    if (ga.size() != values.size()) {
      throw DimensionError("check_gradients: tensor " + names[t] + " has the wrong size");
    }
    TensorCheck tc{names[t], values.size()};
    for (std::size_t e = 0; e < values.size(); ++e) {
      const double saved = values[e];
      values[e] = saved + h;
      const ActivationTrace plus = encoder_forward(probe, seq);
      values[e] = saved - h;
      const ActivationTrace minus = encoder_forward(probe, seq);
      values[e] = saved;
      if (active_units(plus) != base_pattern || active_units(minus) != base_pattern) {
        ++tc.kinks;
        continue;
      }
      const double up = cross_entropy_nats_from_logit(plus.logit, label);
      const double down = cross_entropy_nats_from_logit(minus.logit, label);
      const double fd = (up - down) / (2.0 * h);
      const double a = ga[e];
      const double mag = std::max(std::abs(a), std::abs(fd));
      const double rel = mag == 0.0 ? 0.0 : std::abs(a - fd) / mag;
      const double tol = mag < small_grad ? small_grad_rel_tol : rel_tol;
      tc.max_rel_error = std::max(tc.max_rel_error, rel);
      tc.max_abs_grad = std::max(tc.max_abs_grad, std::abs(a));
      if (!(rel < tol)) tc.passed = false;
    }
    report.max_rel_error = std::max(report.max_rel_error, tc.max_rel_error);
    report.passed = report.passed && tc.passed;
    report.kinks += tc.kinks;
    report.tensors.push_back(std::move(tc));
  }
  return report;
}

}  // namespace hardattn
