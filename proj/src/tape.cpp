#include "turngraph/tape.hpp"

#include <cmath>
#include <limits>

namespace turngraph::ad {

namespace {
constexpr double kMaskedLogitPenalty = 1e9;
constexpr double kInvSqrt2 = 0.7071067811865475244;
constexpr double kInvSqrt2Pi = 0.3989422804014326779;

void require(bool ok, const char* what) {
  if (!ok) throw numeric_error("SHAPE_MISMATCH", what);
}
}  // namespace

int Tape::push(Mat value, std::function<void()> back) {
  Node n;
  n.grad = Mat::Zero(value.rows(), value.cols());
  n.value = std::move(value);
  n.back = std::move(back);
  nodes_.push_back(std::move(n));
  return static_cast<int>(nodes_.size()) - 1;
}

int Tape::leaf(Mat value) { return push(std::move(value)); }

void Tape::backward(int root) {
  Node& r = nodes_[static_cast<size_t>(root)];
  if (r.value.rows() != 1 || r.value.cols() != 1)
    throw numeric_error("BACKWARD_NON_SCALAR", "backward root must be 1x1");
  r.grad(0, 0) = 1.0;
  for (int i = root; i >= 0; --i) {
    auto& back = nodes_[static_cast<size_t>(i)].back;
    if (back) back();
  }
}

int Tape::add(int a, int b) {
  require(val(a).rows() == val(b).rows() && val(a).cols() == val(b).cols(), "add");
  int out = push(val(a) + val(b));
  nodes_[static_cast<size_t>(out)].back = [this, a, b, out] {
    grad_mut(a) += grad(out);
    grad_mut(b) += grad(out);
  };
  return out;
}

int Tape::scale(int a, double s) {
  int out = push(val(a) * s);
  nodes_[static_cast<size_t>(out)].back = [this, a, s, out] {
    grad_mut(a) += s * grad(out);
  };
  return out;
}

int Tape::add_row_broadcast(int a, int bias) {
  require(val(bias).rows() == 1 && val(bias).cols() == val(a).cols(), "add_row_broadcast");
  Mat v = val(a);
  v.rowwise() += val(bias).row(0);
  int out = push(std::move(v));
  nodes_[static_cast<size_t>(out)].back = [this, a, bias, out] {
    grad_mut(a) += grad(out);
    grad_mut(bias).row(0) += grad(out).colwise().sum();
  };
  return out;
}

int Tape::relu(int a) {
  int out = push(val(a).cwiseMax(0.0));
  nodes_[static_cast<size_t>(out)].back = [this, a, out] {
    grad_mut(a).array() += (val(a).array() > 0.0).cast<double>() * grad(out).array();
  };
  return out;
}

int Tape::gelu(int a) {
  const Mat& x = val(a);
  Mat y = x.unaryExpr([](double t) { return 0.5 * t * (1.0 + std::erf(t * kInvSqrt2)); });
  int out = push(std::move(y));
  nodes_[static_cast<size_t>(out)].back = [this, a, out] {
    Mat deriv = val(a).unaryExpr([](double t) {
      double cdf = 0.5 * (1.0 + std::erf(t * kInvSqrt2));
      double pdf = std::exp(-0.5 * t * t) * kInvSqrt2Pi;
      return cdf + t * pdf;
    });
    grad_mut(a) += deriv.cwiseProduct(grad(out));
  };
  return out;
}

int Tape::slice_cols(int a, int col0, int ncols) {
  require(col0 >= 0 && col0 + ncols <= val(a).cols(), "slice_cols");
  int out = push(val(a).middleCols(col0, ncols));
  nodes_[static_cast<size_t>(out)].back = [this, a, col0, ncols, out] {
    grad_mut(a).middleCols(col0, ncols) += grad(out);
  };
  return out;
}

int Tape::concat_cols(const std::vector<int>& parts) {
  require(!parts.empty(), "concat_cols: empty");
  Eigen::Index rows = val(parts[0]).rows();
  Eigen::Index cols = 0;
  for (int p : parts) {
    require(val(p).rows() == rows, "concat_cols: row mismatch");
    cols += val(p).cols();
  }
  Mat v(rows, cols);
  Eigen::Index at = 0;
  for (int p : parts) {
    v.middleCols(at, val(p).cols()) = val(p);
    at += val(p).cols();
  }
  int out = push(std::move(v));
  std::vector<int> ps = parts;
  nodes_[static_cast<size_t>(out)].back = [this, ps, out] {
    Eigen::Index at = 0;
    for (int p : ps) {
      grad_mut(p) += grad(out).middleCols(at, val(p).cols());
      at += val(p).cols();
    }
  };
  return out;
}

int Tape::concat_rows(const std::vector<int>& parts) {
  require(!parts.empty(), "concat_rows: empty");
  Eigen::Index cols = val(parts[0]).cols();
  Eigen::Index rows = 0;
  for (int p : parts) {
    require(val(p).cols() == cols, "concat_rows: col mismatch");
    rows += val(p).rows();
  }
  Mat v(rows, cols);
  Eigen::Index at = 0;
  for (int p : parts) {
    v.middleRows(at, val(p).rows()) = val(p);
    at += val(p).rows();
  }
  int out = push(std::move(v));
  std::vector<int> ps = parts;
  nodes_[static_cast<size_t>(out)].back = [this, ps, out] {
    Eigen::Index at = 0;
    for (int p : ps) {
      grad_mut(p) += grad(out).middleRows(at, val(p).rows());
      at += val(p).rows();
    }
  };
  return out;
}

int Tape::pick_rows(int a, std::vector<int> rows) {
  const Mat& src = val(a);
  Mat v(static_cast<Eigen::Index>(rows.size()), src.cols());
  for (size_t i = 0; i < rows.size(); ++i) {
    require(rows[i] >= 0 && rows[i] < src.rows(), "pick_rows: out of range");
    v.row(static_cast<Eigen::Index>(i)) = src.row(rows[i]);
  }
  int out = push(std::move(v));
  nodes_[static_cast<size_t>(out)].back = [this, a, rows = std::move(rows), out] {
    for (size_t i = 0; i < rows.size(); ++i)
      grad_mut(a).row(rows[i]) += grad(out).row(static_cast<Eigen::Index>(i));
  };
  return out;
}

int Tape::embed_rows_zero_guarded(int table, std::vector<int> ids) {
  const Mat& src = val(table);
  Mat v = Mat::Zero(static_cast<Eigen::Index>(ids.size()), src.cols());
  for (size_t i = 0; i < ids.size(); ++i) {
    require(ids[i] >= 0 && ids[i] < src.rows(), "embed: id out of range");
    if (ids[i] > 0) v.row(static_cast<Eigen::Index>(i)) = src.row(ids[i]);
  }
  int out = push(std::move(v));
  nodes_[static_cast<size_t>(out)].back = [this, table, ids = std::move(ids), out] {
    for (size_t i = 0; i < ids.size(); ++i)
      if (ids[i] > 0)
        grad_mut(table).row(ids[i]) += grad(out).row(static_cast<Eigen::Index>(i));
  };
  return out;
}

int Tape::mean_rows_segments(int a, std::vector<std::pair<int, int>> segments) {
  const Mat& src = val(a);
  Mat v = Mat::Zero(static_cast<Eigen::Index>(segments.size()), src.cols());
  for (size_t i = 0; i < segments.size(); ++i) {
    auto [s, e] = segments[i];
    require(s >= 0 && s < e && e <= src.rows(), "mean_rows_segments: bad segment");
    v.row(static_cast<Eigen::Index>(i)) =
        src.middleRows(s, e - s).colwise().mean();
  }
  int out = push(std::move(v));
  nodes_[static_cast<size_t>(out)].back =
      [this, a, segments = std::move(segments), out] {
        for (size_t i = 0; i < segments.size(); ++i) {
          auto [s, e] = segments[i];
          double inv = 1.0 / static_cast<double>(e - s);
          for (int r = s; r < e; ++r)
            grad_mut(a).row(r) += inv * grad(out).row(static_cast<Eigen::Index>(i));
        }
      };
  return out;
}

int Tape::pad_rows(int a, int total_rows) {
  const Mat& src = val(a);
  require(total_rows >= src.rows(), "pad_rows");
  Mat v = Mat::Zero(total_rows, src.cols());
  v.topRows(src.rows()) = src;
  int out = push(std::move(v));
  nodes_[static_cast<size_t>(out)].back = [this, a, out] {
    grad_mut(a) += grad(out).topRows(val(a).rows());
  };
  return out;
}

int Tape::reshape_to_row(int a) {
  const Mat& src = val(a);
  Mat v(1, src.rows() * src.cols());
  for (Eigen::Index i = 0; i < src.rows(); ++i)
    for (Eigen::Index j = 0; j < src.cols(); ++j)
      v(0, i * src.cols() + j) = src(i, j);
  int out = push(std::move(v));
  nodes_[static_cast<size_t>(out)].back = [this, a, out] {
    const Mat& g = grad(out);
    Mat& ga = grad_mut(a);
    for (Eigen::Index i = 0; i < ga.rows(); ++i)
      for (Eigen::Index j = 0; j < ga.cols(); ++j)
        ga(i, j) += g(0, i * ga.cols() + j);
  };
  return out;
}

int Tape::dropout(int a, double rate, std::mt19937_64& rng) {
  require(rate >= 0.0 && rate < 1.0, "dropout rate");
  if (rate == 0.0) return a;
  const Mat& src = val(a);
  const double keep = 1.0 - rate;
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  Mat mask(src.rows(), src.cols());
  for (Eigen::Index i = 0; i < src.rows(); ++i)
    for (Eigen::Index j = 0; j < src.cols(); ++j)
      mask(i, j) = uni(rng) < keep ? 1.0 / keep : 0.0;
  int out = push(src.cwiseProduct(mask));
  nodes_[static_cast<size_t>(out)].back = [this, a, mask = std::move(mask), out] {
    grad_mut(a) += grad(out).cwiseProduct(mask);
  };
  return out;
}

int Tape::matmul(int a, int b) {
  require(val(a).cols() == val(b).rows(), "matmul");
  int out = push(val(a) * val(b));
  nodes_[static_cast<size_t>(out)].back = [this, a, b, out] {
    grad_mut(a).noalias() += grad(out) * val(b).transpose();
    grad_mut(b).noalias() += val(a).transpose() * grad(out);
  };
  return out;
}

int Tape::matmul_nt(int a, int b) {
  require(val(a).cols() == val(b).cols(), "matmul_nt");
  int out = push(val(a) * val(b).transpose());
  nodes_[static_cast<size_t>(out)].back = [this, a, b, out] {
    grad_mut(a).noalias() += grad(out) * val(b);
    grad_mut(b).noalias() += grad(out).transpose() * val(a);
  };
  return out;
}

int Tape::masked_softmax_rows(int logits, AttentionMask mask) {
  const Mat& x = val(logits);
  require(x.rows() == mask.n && x.cols() == mask.n, "masked_softmax_rows");

  Mat p(x.rows(), x.cols());
  for (int i = 0; i < mask.n; ++i) {
    if (mask.row_sum(i) == 0)
      throw numeric_error("EMPTY_MASK_ROW",
                          "attention row " + std::to_string(i) + " allows no key");
    // Additive penalty on disallowed logits; exp underflows to exact zero
    // after max subtraction, and the mask multiply pins it there.
    double rowmax = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < mask.n; ++j) {
      double v = x(i, j) - (mask.at(i, j) ? 0.0 : kMaskedLogitPenalty);
      rowmax = std::max(rowmax, v);
    }
    double denom = 0.0;
    for (int j = 0; j < mask.n; ++j) {
      double v = x(i, j) - (mask.at(i, j) ? 0.0 : kMaskedLogitPenalty);
      double e = std::exp(v - rowmax);
      p(i, j) = e;
      denom += e;
    }
    for (int j = 0; j < mask.n; ++j)
      p(i, j) = mask.at(i, j) ? p(i, j) / denom : 0.0;
  }

  int out = push(std::move(p));
  nodes_[static_cast<size_t>(out)].back = [this, logits, out] {
    const Mat& pv = val(out);
    const Mat& g = grad(out);
    for (Eigen::Index i = 0; i < pv.rows(); ++i) {
      double dot = g.row(i).cwiseProduct(pv.row(i)).sum();
      grad_mut(logits).row(i).array() +=
          pv.row(i).array() * (g.row(i).array() - dot);
    }
  };
  return out;
}

int Tape::layer_norm_rows(int x, int gain, int bias, double eps) {
  const Mat& xv = val(x);
  require(val(gain).rows() == 1 && val(gain).cols() == xv.cols(), "layer_norm gain");
  require(val(bias).rows() == 1 && val(bias).cols() == xv.cols(), "layer_norm bias");

  Mat xhat(xv.rows(), xv.cols());
  Mat y(xv.rows(), xv.cols());
  Eigen::VectorXd inv_sigma(xv.rows());
  for (Eigen::Index i = 0; i < xv.rows(); ++i) {
    double mu = xv.row(i).mean();
    Eigen::RowVectorXd c = xv.row(i).array() - mu;
    double var = c.squaredNorm() / static_cast<double>(xv.cols());
    inv_sigma(i) = 1.0 / std::sqrt(var + eps);
    xhat.row(i) = c * inv_sigma(i);
    y.row(i) = xhat.row(i).cwiseProduct(val(gain).row(0)) + val(bias).row(0);
  }
  int out = push(std::move(y));
  nodes_[static_cast<size_t>(out)].back =
      [this, x, gain, bias, out, xhat = std::move(xhat),
       inv_sigma = std::move(inv_sigma)] {
        const Mat& g = grad(out);
        const double d = static_cast<double>(g.cols());
        grad_mut(bias).row(0) += g.colwise().sum();
        grad_mut(gain).row(0) += g.cwiseProduct(xhat).colwise().sum();
        for (Eigen::Index i = 0; i < g.rows(); ++i) {
          Eigen::RowVectorXd dxhat =
              g.row(i).cwiseProduct(val(gain).row(0));
          double m1 = dxhat.sum() / d;
          double m2 = dxhat.cwiseProduct(xhat.row(i)).sum() / d;
          grad_mut(x).row(i).array() +=
              inv_sigma(i) *
              (dxhat.array() - m1 - xhat.row(i).array() * m2);
        }
      };
  return out;
}

int Tape::row_normalize_self_loops(int a) {
  const Mat& av = val(a);
  require(av.rows() == av.cols(), "row_normalize_self_loops: square");
  Mat m = av + Mat::Identity(av.rows(), av.cols());
  Eigen::VectorXd rowsum = m.rowwise().sum();
  Mat v = (m.array().colwise() / rowsum.array()).matrix();
  int out = push(std::move(v));
  nodes_[static_cast<size_t>(out)].back =
      [this, a, out, m = std::move(m), rowsum = std::move(rowsum)] {
        const Mat& g = grad(out);
        for (Eigen::Index i = 0; i < g.rows(); ++i) {
          double r = rowsum(i);
          double s = g.row(i).cwiseProduct(m.row(i)).sum();
          grad_mut(a).row(i).array() += g.row(i).array() / r - s / (r * r);
        }
      };
  return out;
}

int Tape::channel_mix(int logits, std::vector<Mat> channels) {
  const Mat& lv = val(logits);
  require(lv.rows() == 1 && lv.cols() == static_cast<Eigen::Index>(channels.size()),
          "channel_mix: logits shape");
  require(!channels.empty(), "channel_mix: channels");

  // softmax over the channel logits
  double m = lv.row(0).maxCoeff();
  Eigen::RowVectorXd w = (lv.row(0).array() - m).exp();
  w /= w.sum();

  Mat v = Mat::Zero(channels[0].rows(), channels[0].cols());
  for (size_t c = 0; c < channels.size(); ++c) v += w(static_cast<Eigen::Index>(c)) * channels[c];
  int out = push(std::move(v));
  nodes_[static_cast<size_t>(out)].back =
      [this, logits, out, w = std::move(w), channels = std::move(channels)] {
        const Mat& g = grad(out);
        Eigen::RowVectorXd dw(w.size());
        for (Eigen::Index c = 0; c < w.size(); ++c)
          dw(c) = g.cwiseProduct(channels[static_cast<size_t>(c)]).sum();
        double dot = w.cwiseProduct(dw).sum();
        grad_mut(logits).row(0).array() += w.array() * (dw.array() - dot);
      };
  return out;
}

int Tape::cross_entropy_row(int logits, int gold) {
  const Mat& lv = val(logits);
  require(lv.rows() == 1, "cross_entropy: logits must be 1 x C");
  require(gold >= 0 && gold < lv.cols(), "cross_entropy: gold out of range");

  double m = lv.row(0).maxCoeff();
  Eigen::RowVectorXd z = (lv.row(0).array() - m).exp();
  double denom = z.sum();
  double loss = std::log(denom) + m - lv(0, gold);
  Eigen::RowVectorXd p = z / denom;

  Mat v(1, 1);
  v(0, 0) = loss;
  int out = push(std::move(v));
  nodes_[static_cast<size_t>(out)].back = [this, logits, gold, out, p = std::move(p)] {
    double g = grad(out)(0, 0);
    grad_mut(logits).row(0) += g * p;
    grad_mut(logits)(0, gold) -= g;
  };
  return out;
}

}  // namespace turngraph::ad
