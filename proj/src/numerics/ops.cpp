#include "graphdst/numerics/ops.hpp"

#include "graphdst/errors.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <string>

namespace gdst::nn {

namespace {

std::atomic<testing::Fault> g_fault{testing::Fault::kNone};
thread_local ReluPatternScope* t_relu_scope = nullptr;

// Multiplier applied to a backward rule under fault injection.
double fault_factor(testing::Fault site) { return g_fault.load() == site ? 1.5 : 1.0; }

std::string shape_of(const Tensor& t) {
  return std::to_string(t.rows()) + "x" + std::to_string(t.cols());
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError(std::string(op) + ": shape mismatch " + shape_of(a) + " vs " + shape_of(b));
  }
}

void require_row(const Tensor& a, const Tensor& row, const char* op) {
  if (row.rows() != 1 || row.cols() != a.cols()) {
    throw ShapeError(std::string(op) + ": expected 1x" + std::to_string(a.cols()) + " row, got " +
                     shape_of(row));
  }
}

template <typename F>
Tensor unary(const Tensor& a, Matrix out, F&& local_grad) {
  auto an = a.node();
  return make_result(std::move(out), {&a},
                     [an, local_grad = std::forward<F>(local_grad)](const Matrix& g) {
                       an->accumulate(local_grad(g));
                     });
}

}  // namespace

namespace testing {
void inject_backward_fault(Fault fault) { g_fault.store(fault); }
Fault injected_backward_fault() { return g_fault.load(); }
}  // namespace testing

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: " + shape_of(a) + " * " + shape_of(b));
  }
  auto an = a.node();
  auto bn = b.node();
  return make_result(a.value() * b.value(), {&a, &b}, [an, bn](const Matrix& g) {
    if (an->tape) an->accumulate(g * bn->value.transpose());
    if (bn->tape) bn->accumulate(an->value.transpose() * g);
  });
}

Tensor matmul_nt(const Tensor& a, const Tensor& b) {
  if (a.cols() != b.cols()) {
    throw ShapeError("matmul_nt: " + shape_of(a) + " * " + shape_of(b) + "^T");
  }
  auto an = a.node();
  auto bn = b.node();
  return make_result(a.value() * b.value().transpose(), {&a, &b}, [an, bn](const Matrix& g) {
    if (an->tape) an->accumulate(g * bn->value);
    if (bn->tape) bn->accumulate(g.transpose() * an->value);
  });
}

Tensor add(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "add");
  auto an = a.node();
  auto bn = b.node();
  return make_result(a.value() + b.value(), {&a, &b}, [an, bn](const Matrix& g) {
    an->accumulate(g);
    bn->accumulate(g);
  });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "sub");
  auto an = a.node();
  auto bn = b.node();
  return make_result(a.value() - b.value(), {&a, &b}, [an, bn](const Matrix& g) {
    an->accumulate(g);
    bn->accumulate(-g);
  });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "mul");
  auto an = a.node();
  auto bn = b.node();
  return make_result(a.value().cwiseProduct(b.value()), {&a, &b}, [an, bn](const Matrix& g) {
    if (an->tape) an->accumulate(g.cwiseProduct(bn->value));
    if (bn->tape) bn->accumulate(g.cwiseProduct(an->value));
  });
}

Tensor scale(const Tensor& a, double factor) {
  return unary(a, a.value() * factor, [factor](const Matrix& g) -> Matrix { return g * factor; });
}

Tensor one_minus(const Tensor& a) {
  Matrix out = (1.0 - a.value().array()).matrix();
  return unary(a, std::move(out), [](const Matrix& g) -> Matrix { return -g; });
}

Tensor add_row(const Tensor& a, const Tensor& row) {
  require_row(a, row, "add_row");
  Matrix out = a.value().rowwise() + row.value().row(0);
  auto an = a.node();
  auto rn = row.node();
  return make_result(std::move(out), {&a, &row}, [an, rn](const Matrix& g) {
    an->accumulate(g);
    if (rn->tape) rn->accumulate(g.colwise().sum());
  });
}

Tensor sub_row(const Tensor& a, const Tensor& row) {
  require_row(a, row, "sub_row");
  Matrix out = a.value().rowwise() - row.value().row(0);
  auto an = a.node();
  auto rn = row.node();
  return make_result(std::move(out), {&a, &row}, [an, rn](const Matrix& g) {
    an->accumulate(g);
    if (rn->tape) rn->accumulate(-g.colwise().sum());
  });
}

Tensor scale_rows(const Tensor& a, const Tensor& col) {
  if (col.cols() != 1 || col.rows() != a.rows()) {
    throw ShapeError("scale_rows: " + shape_of(a) + " by " + shape_of(col));
  }
  Matrix out = a.value().array().colwise() * col.value().col(0).array();
  auto an = a.node();
  auto cn = col.node();
  return make_result(std::move(out), {&a, &col}, [an, cn](const Matrix& g) {
    if (an->tape) {
      Matrix ga = g.array().colwise() * cn->value.col(0).array();
      an->accumulate(ga);
    }
    if (cn->tape) cn->accumulate(g.cwiseProduct(an->value).rowwise().sum());
  });
}

Tensor sigmoid(const Tensor& a) {
  Matrix s = (1.0 / (1.0 + (-a.value().array()).exp())).matrix();
  if (!a.tracked()) return Tensor::constant(std::move(s));
  Matrix ds = (s.array() * (1.0 - s.array())).matrix();
  return unary(a, std::move(s), [ds = std::move(ds)](const Matrix& g) -> Matrix {
    return g.cwiseProduct(ds) * fault_factor(testing::Fault::kSigmoid);
  });
}

Tensor tanh(const Tensor& a) {
  Matrix t = a.value().array().tanh().matrix();
  Matrix dt = (1.0 - t.array().square()).matrix();
  return unary(a, std::move(t), [dt = std::move(dt)](const Matrix& g) -> Matrix {
    return g.cwiseProduct(dt) * fault_factor(testing::Fault::kTanh);
  });
}

ReluPatternScope::ReluPatternScope() : outer_(t_relu_scope) { t_relu_scope = this; }
ReluPatternScope::~ReluPatternScope() { t_relu_scope = outer_; }

Tensor relu(const Tensor& a) {
  Matrix mask = (a.value().array() > 0.0).cast<double>().matrix();
  if (t_relu_scope != nullptr) {
    std::uint64_t& h = t_relu_scope->hash_;
    for (Index i = 0; i < mask.size(); ++i) {
      h = (h ^ (mask.data()[i] > 0.0 ? 0x9eU : 0x5bU)) * 0x100000001b3ULL;
    }
  }
  Matrix out = a.value().cwiseProduct(mask);
  return unary(a, std::move(out), [mask = std::move(mask)](const Matrix& g) -> Matrix {
    return g.cwiseProduct(mask) * fault_factor(testing::Fault::kRelu);
  });
}

Tensor gelu(const Tensor& a) {
  const auto& x = a.value();
  constexpr double kInvSqrt2 = 0.70710678118654752440;
  constexpr double kInvSqrt2Pi = 0.39894228040143267794;
  Matrix cdf(x.rows(), x.cols());
  for (Index i = 0; i < x.size(); ++i) cdf.data()[i] = 0.5 * (1.0 + std::erf(x.data()[i] * kInvSqrt2));
  Matrix out = x.cwiseProduct(cdf);
  if (!a.tracked()) return Tensor::constant(std::move(out));
  Matrix d = (cdf.array() + x.array() * kInvSqrt2Pi * (-0.5 * x.array().square()).exp()).matrix();
  return unary(a, std::move(out), [d = std::move(d)](const Matrix& g) -> Matrix {
    return g.cwiseProduct(d) * fault_factor(testing::Fault::kGelu);
  });
}

Tensor log(const Tensor& a) {
  Matrix out = a.value().array().log().matrix();
  auto an = a.node();
  return make_result(std::move(out), {&a}, [an](const Matrix& g) {
    an->accumulate(g.cwiseQuotient(an->value));
  });
}

Tensor sum(const Tensor& a) {
  Matrix out(1, 1);
  out(0, 0) = a.value().sum();
  const Index r = a.rows();
  const Index c = a.cols();
  return unary(a, std::move(out),
               [r, c](const Matrix& g) -> Matrix { return Matrix::Constant(r, c, g(0, 0)); });
}

Tensor pick(const Tensor& a, Index r, Index c) {
  if (r < 0 || r >= a.rows() || c < 0 || c >= a.cols()) {
    throw ShapeError("pick: index out of range for " + shape_of(a));
  }
  Matrix out(1, 1);
  out(0, 0) = a.value()(r, c);
  const Index rows = a.rows();
  const Index cols = a.cols();
  return unary(a, std::move(out), [=](const Matrix& g) -> Matrix {
    Matrix d = Matrix::Zero(rows, cols);
    d(r, c) = g(0, 0);
    return d;
  });
}

Tensor softmax_rows(const Tensor& a, std::span<const std::uint8_t> allowed) {
  const auto& x = a.value();
  if (!allowed.empty() && static_cast<Index>(allowed.size()) != x.cols()) {
    throw ShapeError("softmax_rows: mask width " + std::to_string(allowed.size()) + " vs " +
                     shape_of(a));
  }
  Matrix y = x;
  constexpr double kMasked = -std::numeric_limits<double>::infinity();
  if (!allowed.empty()) {
    for (Index c = 0; c < x.cols(); ++c) {
      if (!allowed[static_cast<std::size_t>(c)]) y.col(c).setConstant(kMasked);
    }
  }
  Eigen::VectorXd mx = y.rowwise().maxCoeff();
  if (!mx.allFinite()) {
    for (Index r = 0; r < x.rows(); ++r) {
      if (mx(r) == kMasked) throw Error("softmax_rows: row has no admissible entries");
    }
  }
  y = (y.colwise() - mx).array().exp().matrix();
  if (!allowed.empty()) {
    for (Index c = 0; c < x.cols(); ++c) {
      if (!allowed[static_cast<std::size_t>(c)]) y.col(c).setZero();
    }
  }
  y.array().colwise() /= y.rowwise().sum().array();
  if (!a.tracked()) return Tensor::constant(std::move(y));
  Matrix yc = y;
  return unary(a, std::move(y), [yc = std::move(yc)](const Matrix& g) -> Matrix {
    Matrix dot = g.cwiseProduct(yc).rowwise().sum();
    Matrix d = yc.cwiseProduct((g.colwise() - dot.col(0)));
    return d * fault_factor(testing::Fault::kSoftmax);
  });
}

Tensor cross_entropy_rows(const Tensor& logits, std::span<const Index> targets) {
  const auto& x = logits.value();
  if (static_cast<Index>(targets.size()) != x.rows()) {
    throw ShapeError("cross_entropy_rows: " + std::to_string(targets.size()) + " targets for " +
                     shape_of(logits));
  }
  Matrix p(x.rows(), x.cols());
  double total = 0.0;
  for (Index r = 0; r < x.rows(); ++r) {
    const Index t = targets[static_cast<std::size_t>(r)];
    if (t < 0 || t >= x.cols()) throw ShapeError("cross_entropy_rows: target out of range");
    const double mx = x.row(r).maxCoeff();
    p.row(r) = (x.row(r).array() - mx).exp();
    const double z = p.row(r).sum();
    p.row(r) /= z;
    total += mx + std::log(z) - x(r, t);
  }
  Matrix out(1, 1);
  out(0, 0) = total;
  std::vector<Index> tg(targets.begin(), targets.end());
  return unary(logits, std::move(out),
               [p = std::move(p), tg = std::move(tg)](const Matrix& g) -> Matrix {
                 Matrix d = p;
                 for (std::size_t r = 0; r < tg.size(); ++r) d(static_cast<Index>(r), tg[r]) -= 1.0;
                 return d * g(0, 0) * fault_factor(testing::Fault::kSoftmax);
               });
}

Tensor layer_norm(const Tensor& a, const Tensor& gain, const Tensor& bias, double eps) {
  require_row(a, gain, "layer_norm(gain)");
  require_row(a, bias, "layer_norm(bias)");
  const auto& x = a.value();
  const Index n = x.cols();
  if (n < 2) throw ShapeError("layer_norm: need at least 2 features");
  Matrix xhat(x.rows(), n);
  Matrix inv(x.rows(), 1);
  for (Index r = 0; r < x.rows(); ++r) {
    const double mean = x.row(r).mean();
    const double var = (x.row(r).array() - mean).square().mean();
    inv(r, 0) = 1.0 / std::sqrt(var + eps);
    xhat.row(r) = (x.row(r).array() - mean) * inv(r, 0);
  }
  Matrix out = (xhat.array().rowwise() * gain.value().row(0).array()).matrix();
  out.rowwise() += bias.value().row(0);

  auto an = a.node();
  auto gn = gain.node();
  auto bn = bias.node();
  return make_result(
      std::move(out), {&a, &gain, &bias},
      [an, gn, bn, xhat = std::move(xhat), inv = std::move(inv), n](const Matrix& g) {
        if (gn->tape) gn->accumulate(g.cwiseProduct(xhat).colwise().sum());
        if (bn->tape) bn->accumulate(g.colwise().sum());
        if (!an->tape) return;
        Matrix dxhat = g.array().rowwise() * gn->value.row(0).array();
        Matrix dx(g.rows(), n);
        for (Index r = 0; r < g.rows(); ++r) {
          const double s1 = dxhat.row(r).sum();
          const double s2 = dxhat.row(r).dot(xhat.row(r));
          dx.row(r) = (inv(r, 0) / static_cast<double>(n)) *
                      (static_cast<double>(n) * dxhat.row(r).array() - s1 -
                       xhat.row(r).array() * s2);
        }
        an->accumulate(dx * fault_factor(testing::Fault::kLayerNorm));
      });
}

Tensor gather_rows(const Tensor& a, std::span<const Index> rows) {
  Matrix out(static_cast<Index>(rows.size()), a.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] < 0 || rows[i] >= a.rows()) {
      throw ShapeError("gather_rows: row " + std::to_string(rows[i]) + " out of range for " +
                       shape_of(a));
    }
    out.row(static_cast<Index>(i)) = a.value().row(rows[i]);
  }
  std::vector<Index> idx(rows.begin(), rows.end());
  const Index r = a.rows();
  const Index c = a.cols();
  return unary(a, std::move(out), [idx = std::move(idx), r, c](const Matrix& g) -> Matrix {
    Matrix d = Matrix::Zero(r, c);
    for (std::size_t i = 0; i < idx.size(); ++i) d.row(idx[i]) += g.row(static_cast<Index>(i));
    return d;
  });
}

Tensor scatter_rows(const Tensor& a, std::span<const Index> rows, const Tensor& replacement) {
  if (replacement.rows() != static_cast<Index>(rows.size()) || replacement.cols() != a.cols()) {
    throw ShapeError("scatter_rows: replacement " + shape_of(replacement) + " for " +
                     std::to_string(rows.size()) + " rows of " + shape_of(a));
  }
  Matrix out = a.value();
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(a.rows()), 0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] < 0 || rows[i] >= a.rows()) throw ShapeError("scatter_rows: row out of range");
    if (seen[static_cast<std::size_t>(rows[i])]++) throw ShapeError("scatter_rows: repeated row");
    out.row(rows[i]) = replacement.value().row(static_cast<Index>(i));
  }
  std::vector<Index> idx(rows.begin(), rows.end());
  auto an = a.node();
  auto rn = replacement.node();
  return make_result(std::move(out), {&a, &replacement}, [an, rn, idx](const Matrix& g) {
    if (an->tape) {
      Matrix d = g;
      for (Index r : idx) d.row(r).setZero();
      an->accumulate(d);
    }
    if (rn->tape) {
      Matrix d(static_cast<Index>(idx.size()), g.cols());
      for (std::size_t i = 0; i < idx.size(); ++i) d.row(static_cast<Index>(i)) = g.row(idx[i]);
      rn->accumulate(d);
    }
  });
}

Tensor scatter_add_cols(const Tensor& a, std::span<const Index> ids, Index width) {
  if (static_cast<Index>(ids.size()) != a.cols()) {
    throw ShapeError("scatter_add_cols: " + std::to_string(ids.size()) + " ids for " + shape_of(a));
  }
  Matrix out = Matrix::Zero(a.rows(), width);
  for (std::size_t k = 0; k < ids.size(); ++k) {
    if (ids[k] < 0 || ids[k] >= width) throw ShapeError("scatter_add_cols: id out of range");
    out.col(ids[k]) += a.value().col(static_cast<Index>(k));
  }
  std::vector<Index> idx(ids.begin(), ids.end());
  return unary(a, std::move(out), [idx = std::move(idx)](const Matrix& g) -> Matrix {
    Matrix d(g.rows(), static_cast<Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) d.col(static_cast<Index>(k)) = g.col(idx[k]);
    return d;
  });
}

Tensor concat_cols(std::span<const Tensor> parts) {
  if (parts.empty()) throw ShapeError("concat_cols: no inputs");
  const Index r = parts[0].rows();
  Index total = 0;
  for (const auto& p : parts) {
    if (p.rows() != r) throw ShapeError("concat_cols: row count mismatch");
    total += p.cols();
  }
  Matrix out(r, total);
  Index off = 0;
  std::vector<std::shared_ptr<detail::Node>> nodes;
  std::vector<Index> widths;
  const Tensor* anchor = &parts[0];
  Tape* tape = nullptr;
  for (const auto& p : parts) {
    out.middleCols(off, p.cols()) = p.value();
    off += p.cols();
    nodes.push_back(p.node());
    widths.push_back(p.cols());
    if (p.tracked()) {
      if (tape != nullptr && p.tape() != tape) throw Error("tensors recorded on different tapes");
      tape = p.tape();
      anchor = &p;
    }
  }
  return make_result(std::move(out), {anchor}, [nodes, widths](const Matrix& g) {
    Index o = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      nodes[i]->accumulate(g.middleCols(o, widths[i]));
      o += widths[i];
    }
  });
}

Tensor concat_rows(std::span<const Tensor> parts) {
  if (parts.empty()) throw ShapeError("concat_rows: no inputs");
  const Index c = parts[0].cols();
  Index total = 0;
  for (const auto& p : parts) {
    if (p.cols() != c) throw ShapeError("concat_rows: column count mismatch");
    total += p.rows();
  }
  Matrix out(total, c);
  Index off = 0;
  std::vector<std::shared_ptr<detail::Node>> nodes;
  std::vector<Index> heights;
  const Tensor* anchor = &parts[0];
  Tape* tape = nullptr;
  for (const auto& p : parts) {
    out.middleRows(off, p.rows()) = p.value();
    off += p.rows();
    nodes.push_back(p.node());
    heights.push_back(p.rows());
    if (p.tracked()) {
      if (tape != nullptr && p.tape() != tape) throw Error("tensors recorded on different tapes");
      tape = p.tape();
      anchor = &p;
    }
  }
  return make_result(std::move(out), {anchor}, [nodes, heights](const Matrix& g) {
    Index o = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      nodes[i]->accumulate(g.middleRows(o, heights[i]));
      o += heights[i];
    }
  });
}

Tensor slice_cols(const Tensor& a, Index start, Index count) {
  if (start < 0 || count < 0 || start + count > a.cols()) {
    throw ShapeError("slice_cols: [" + std::to_string(start) + ", +" + std::to_string(count) +
                     ") of " + shape_of(a));
  }
  const Index r = a.rows();
  const Index c = a.cols();
  return unary(a, a.value().middleCols(start, count), [=](const Matrix& g) -> Matrix {
    Matrix d = Matrix::Zero(r, c);
    d.middleCols(start, count) = g;
    return d;
  });
}

Tensor slice_rows(const Tensor& a, Index start, Index count) {
  if (start < 0 || count < 0 || start + count > a.rows()) {
    throw ShapeError("slice_rows: [" + std::to_string(start) + ", +" + std::to_string(count) +
                     ") of " + shape_of(a));
  }
  const Index r = a.rows();
  const Index c = a.cols();
  return unary(a, a.value().middleRows(start, count), [=](const Matrix& g) -> Matrix {
    Matrix d = Matrix::Zero(r, c);
    d.middleRows(start, count) = g;
    return d;
  });
}

Tensor dropout(const Tensor& a, double rate, std::mt19937_64& rng) {
  if (rate <= 0.0) return a;
  if (rate >= 1.0) throw Error("dropout: rate must be < 1");
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix mask(a.rows(), a.cols());
  const double keep = 1.0 / (1.0 - rate);
  for (Index i = 0; i < mask.size(); ++i) mask.data()[i] = u(rng) < rate ? 0.0 : keep;
  Matrix out = a.value().cwiseProduct(mask);
  return unary(a, std::move(out),
               [mask = std::move(mask)](const Matrix& g) -> Matrix { return g.cwiseProduct(mask); });
}

}  // namespace gdst::nn
