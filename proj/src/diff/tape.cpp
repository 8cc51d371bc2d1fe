#include "ptv/diff/tape.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>

#include "ptv/common/error.hpp"
#include "ptv/common/math.hpp"

namespace ptv::diff {

namespace {
constexpr double kInvSqrtPi = 0.56418958354775628695;  // 1/sqrt(pi)
}

int Value::size() const { return tape->node_size(id); }

double Value::scalar() const {
  auto v = tape->node_values(id);
  if (v.size() != 1) throw DomainError("Value::scalar: node is not a scalar");
  return v[0];
}

std::span<const double> Value::values() const { return tape->node_values(id); }

const char* op_name(Op op) {
  switch (op) {
    case Op::kInput: return "input";
    case Op::kConstant: return "constant";
    case Op::kAdd: return "add";
    case Op::kSub: return "sub";
    case Op::kMul: return "mul";
    case Op::kDiv: return "div";
    case Op::kAddC: return "add_const";
    case Op::kSubC: return "sub_const";
    case Op::kRSubC: return "rsub_const";
    case Op::kMulC: return "mul_const";
    case Op::kRDivC: return "rdiv_const";
    case Op::kNeg: return "neg";
    case Op::kExp: return "exp";
    case Op::kLog: return "log";
    case Op::kSqrt: return "sqrt";
    case Op::kTanh: return "tanh";
    case Op::kLogistic: return "logistic";
    case Op::kSoftplus: return "softplus";
    case Op::kAbs: return "abs";
    case Op::kErf: return "erf";
    case Op::kSin: return "sin";
    case Op::kCos: return "cos";
    case Op::kAsin: return "asin";
    case Op::kPowC: return "pow_const";
    case Op::kNormCdf: return "norm_cdf";
    case Op::kNormQuantile: return "norm_quantile";
    case Op::kExpintE1: return "expint_e1";
    case Op::kMin: return "min";
    case Op::kMax: return "max";
    case Op::kMinC: return "min_const";
    case Op::kMaxC: return "max_const";
    case Op::kSelectGe: return "select_ge";
    case Op::kSum: return "sum";
    case Op::kMean: return "mean";
    case Op::kDot: return "dot";
    case Op::kSlice: return "slice";
    case Op::kConcat: return "concat";
    case Op::kWeightedWindowSum: return "weighted_window_sum";
    case Op::kMatMul: return "matmul";
    case Op::kMatMulNT: return "matmul_nt";
    case Op::kRowBcastAdd: return "row_bcast_add";
    case Op::kColMean: return "col_mean";
    case Op::kSoftmaxRows: return "softmax_rows";
    case Op::kLayerNorm: return "layer_norm";
  }
  return "?";
}

std::uint32_t Tape::new_node(int size) {
  Node node{static_cast<std::uint32_t>(values_.size()),
            static_cast<std::uint32_t>(size)};
  nodes_.push_back(node);
  values_.resize(values_.size() + size, 0.0);
  return static_cast<std::uint32_t>(nodes_.size() - 1);
}

double* Tape::data(std::uint32_t id) { return values_.data() + nodes_[id].offset; }
const double* Tape::data(std::uint32_t id) const {
  return values_.data() + nodes_[id].offset;
}
double* Tape::adj(std::uint32_t id) { return adjoints_.data() + nodes_[id].offset; }

std::span<const double> Tape::node_values(std::uint32_t id) const {
  return {data(id), nodes_[id].size};
}

Value Tape::input(double v) { return input(std::span<const double>(&v, 1)); }

Value Tape::input(std::span<const double> v) {
  const std::uint32_t id = new_node(static_cast<int>(v.size()));
  std::copy(v.begin(), v.end(), data(id));
  records_.push_back(Record{Op::kInput, id});
  inputs_.push_back(id);
  check_finite(records_.back());
  return make_value(id);
}

Value Tape::constant(double v) { return constant(std::span<const double>(&v, 1)); }

Value Tape::constant(std::span<const double> v) {
  const std::uint32_t id = new_node(static_cast<int>(v.size()));
  std::copy(v.begin(), v.end(), data(id));
  records_.push_back(Record{Op::kConstant, id});
  check_finite(records_.back());
  return make_value(id);
}

namespace {

[[noreturn]] void domain_failure(Op op, const std::string& what, double value,
                                 int index) {
  std::ostringstream msg;
  msg << "op '" << op_name(op) << "': " << what << " (value=" << value
      << ", element=" << index << ")";
  throw DomainError(msg.str());
}

}  // namespace

void Tape::check_finite(const Record& rec) {
  const double* out = data(rec.out);
  const int n = static_cast<int>(nodes_[rec.out].size);
  double guard = 0.0;
  for (int i = 0; i < n; ++i) guard += out[i];
  if (std::isfinite(guard)) return;
  for (int i = 0; i < n; ++i) {
    if (!std::isfinite(out[i])) {
      domain_failure(rec.op, "non-finite forward value", out[i], i);
    }
  }
}

Value Tape::binary(Op op, const Value& a, const Value& b) {
  if (a.tape != this || b.tape != this) {
    throw DomainError("binary op: operands belong to different tapes");
  }
  const int na = static_cast<int>(nodes_[a.id].size);
  const int nb = static_cast<int>(nodes_[b.id].size);
  if (na != nb && na != 1 && nb != 1) {
    domain_failure(op, "size mismatch", static_cast<double>(na), nb);
  }
  const int n = std::max(na, nb);
  const std::uint32_t out = new_node(n);
  Record rec{op, out, a.id, b.id};
  records_.push_back(rec);
  exec_forward(rec);
  check_finite(rec);
  return make_value(out);
}

Value Tape::binary_const(Op op, const Value& a, double c) {
  const int n = static_cast<int>(nodes_[a.id].size);
  const std::uint32_t out = new_node(n);
  Record rec{op, out, a.id};
  rec.s0 = c;
  records_.push_back(rec);
  exec_forward(rec);
  check_finite(rec);
  return make_value(out);
}

Value Tape::unary(Op op, const Value& a) {
  const int n = static_cast<int>(nodes_[a.id].size);
  const std::uint32_t out = new_node(n);
  Record rec{op, out, a.id};
  records_.push_back(rec);
  exec_forward(rec);
  check_finite(rec);
  return make_value(out);
}

Value Tape::pow_const(const Value& a, double exponent) {
  return binary_const(Op::kPowC, a, exponent);
}

Value Tape::select_ge(const Value& cond, double threshold, const Value& if_ge,
                      const Value& if_lt) {
  const int nc = static_cast<int>(nodes_[cond.id].size);
  const int ng = static_cast<int>(nodes_[if_ge.id].size);
  const int nl = static_cast<int>(nodes_[if_lt.id].size);
  const int n = std::max({nc, ng, nl});
  for (int s : {nc, ng, nl}) {
    if (s != n && s != 1) {
      domain_failure(Op::kSelectGe, "size mismatch", s, n);
    }
  }
  const std::uint32_t out = new_node(n);
  Record rec{Op::kSelectGe, out, cond.id, if_ge.id, if_lt.id};
  rec.s0 = threshold;
  records_.push_back(rec);
  exec_forward(rec);
  check_finite(rec);
  return make_value(out);
}

Value Tape::sum(const Value& a) {
  const std::uint32_t out = new_node(1);
  Record rec{Op::kSum, out, a.id};
  records_.push_back(rec);
  exec_forward(rec);
  check_finite(rec);
  return make_value(out);
}

Value Tape::mean(const Value& a) {
  const std::uint32_t out = new_node(1);
  Record rec{Op::kMean, out, a.id};
  records_.push_back(rec);
  exec_forward(rec);
  check_finite(rec);
  return make_value(out);
}

Value Tape::dot(const Value& a, const Value& b) {
  if (nodes_[a.id].size != nodes_[b.id].size) {
    domain_failure(Op::kDot, "size mismatch", nodes_[a.id].size, nodes_[b.id].size);
  }
  const std::uint32_t out = new_node(1);
  Record rec{Op::kDot, out, a.id, b.id};
  records_.push_back(rec);
  exec_forward(rec);
  check_finite(rec);
  return make_value(out);
}

Value Tape::slice(const Value& a, int offset, int length) {
  if (offset < 0 || length <= 0 ||
      offset + length > static_cast<int>(nodes_[a.id].size)) {
    domain_failure(Op::kSlice, "slice out of range", offset, length);
  }
  const std::uint32_t out = new_node(length);
  Record rec{Op::kSlice, out, a.id};
  rec.i0 = offset;
  rec.i1 = length;
  records_.push_back(rec);
  exec_forward(rec);
  check_finite(rec);
  return make_value(out);
}

Value Tape::concat(std::span<const Value> parts) {
  if (parts.empty()) throw DomainError("concat: no inputs");
  int total = 0;
  for (const Value& part : parts) {
    if (part.tape != this) throw DomainError("concat: foreign tape operand");
    total += static_cast<int>(nodes_[part.id].size);
  }
  const std::uint32_t out = new_node(total);
  Record rec{Op::kConcat, out};
  rec.i0 = static_cast<std::int32_t>(parts.size());
  rec.aux = static_cast<std::uint32_t>(aux_u32_.size());
  for (const Value& part : parts) aux_u32_.push_back(part.id);
  records_.push_back(rec);
  exec_forward(rec);
  check_finite(rec);
  return make_value(out);
}

Value Tape::weighted_window_sum(const Value& a, int offset,
                                const double* weights, int length) {
  if (offset < 0 || length <= 0 ||
      offset + length > static_cast<int>(nodes_[a.id].size)) {
    domain_failure(Op::kWeightedWindowSum, "window out of range", offset, length);
  }
  const std::uint32_t out = new_node(1);
  Record rec{Op::kWeightedWindowSum, out, a.id};
  rec.i0 = offset;
  rec.i1 = length;
  rec.aux = static_cast<std::uint32_t>(aux_ptr_.size());
  aux_ptr_.push_back(weights);
  records_.push_back(rec);
  exec_forward(rec);
  check_finite(rec);
  return make_value(out);
}

Value Tape::matmul(const Value& a, const Value& b, int m, int k, int n) {
  if (static_cast<int>(nodes_[a.id].size) != m * k ||
      static_cast<int>(nodes_[b.id].size) != k * n) {
    domain_failure(Op::kMatMul, "shape mismatch", nodes_[a.id].size, nodes_[b.id].size);
  }
  const std::uint32_t out = new_node(m * n);
  Record rec{Op::kMatMul, out, a.id, b.id};
  rec.i0 = m;
  rec.i1 = k;
  rec.i2 = n;
  records_.push_back(rec);
  exec_forward(rec);
  check_finite(rec);
  return make_value(out);
}

Value Tape::matmul_nt(const Value& a, const Value& b, int m, int k, int n) {
  if (static_cast<int>(nodes_[a.id].size) != m * k ||
      static_cast<int>(nodes_[b.id].size) != n * k) {
    domain_failure(Op::kMatMulNT, "shape mismatch", nodes_[a.id].size, nodes_[b.id].size);
  }
  const std::uint32_t out = new_node(m * n);
  Record rec{Op::kMatMulNT, out, a.id, b.id};
  rec.i0 = m;
  rec.i1 = k;
  rec.i2 = n;
  records_.push_back(rec);
  exec_forward(rec);
  check_finite(rec);
  return make_value(out);
}

Value Tape::row_bcast_add(const Value& a, const Value& bias, int rows, int cols) {
  if (static_cast<int>(nodes_[a.id].size) != rows * cols ||
      static_cast<int>(nodes_[bias.id].size) != cols) {
    domain_failure(Op::kRowBcastAdd, "shape mismatch", nodes_[a.id].size, cols);
  }
  const std::uint32_t out = new_node(rows * cols);
  Record rec{Op::kRowBcastAdd, out, a.id, bias.id};
  rec.i0 = rows;
  rec.i1 = cols;
  records_.push_back(rec);
  exec_forward(rec);
  check_finite(rec);
  return make_value(out);
}

Value Tape::col_mean(const Value& a, int rows, int cols) {
  if (static_cast<int>(nodes_[a.id].size) != rows * cols) {
    domain_failure(Op::kColMean, "shape mismatch", nodes_[a.id].size, rows * cols);
  }
  const std::uint32_t out = new_node(cols);
  Record rec{Op::kColMean, out, a.id};
  rec.i0 = rows;
  rec.i1 = cols;
  records_.push_back(rec);
  exec_forward(rec);
  check_finite(rec);
  return make_value(out);
}

Value Tape::softmax_rows(const Value& a, int rows, int cols) {
  if (static_cast<int>(nodes_[a.id].size) != rows * cols) {
    domain_failure(Op::kSoftmaxRows, "shape mismatch", nodes_[a.id].size, rows * cols);
  }
  const std::uint32_t out = new_node(rows * cols);
  Record rec{Op::kSoftmaxRows, out, a.id};
  rec.i0 = rows;
  rec.i1 = cols;
  records_.push_back(rec);
  exec_forward(rec);
  check_finite(rec);
  return make_value(out);
}

Value Tape::layer_norm(const Value& x, const Value& gamma, const Value& beta,
                       int rows, int cols, double eps) {
  if (static_cast<int>(nodes_[x.id].size) != rows * cols ||
      static_cast<int>(nodes_[gamma.id].size) != cols ||
      static_cast<int>(nodes_[beta.id].size) != cols) {
    domain_failure(Op::kLayerNorm, "shape mismatch", nodes_[x.id].size, cols);
  }
  const std::uint32_t out = new_node(rows * cols);
  Record rec{Op::kLayerNorm, out, x.id, gamma.id, beta.id};
  rec.i0 = rows;
  rec.i1 = cols;
  rec.s0 = eps;
  rec.aux = static_cast<std::uint32_t>(aux_f64_.size());
  aux_f64_.resize(aux_f64_.size() + 2 * rows, 0.0);
  records_.push_back(rec);
  exec_forward(rec);
  check_finite(rec);
  return make_value(out);
}

void Tape::exec_forward(const Record& rec) {
  double* out = data(rec.out);
  const int n = static_cast<int>(nodes_[rec.out].size);
  switch (rec.op) {
    case Op::kInput:
    case Op::kConstant:
      return;  // leaf values already live in the arena

    case Op::kAdd: case Op::kSub: case Op::kMul: case Op::kDiv:
    case Op::kMin: case Op::kMax: {
      const double* av = data(rec.a);
      const double* bv = data(rec.b);
      const int sa = nodes_[rec.a].size == 1 ? 0 : 1;
      const int sb = nodes_[rec.b].size == 1 ? 0 : 1;
      switch (rec.op) {
        case Op::kAdd:
          for (int i = 0; i < n; ++i) out[i] = av[i * sa] + bv[i * sb];
          break;
        case Op::kSub:
          for (int i = 0; i < n; ++i) out[i] = av[i * sa] - bv[i * sb];
          break;
        case Op::kMul:
          for (int i = 0; i < n; ++i) out[i] = av[i * sa] * bv[i * sb];
          break;
        case Op::kDiv:
          for (int i = 0; i < n; ++i) {
            if (bv[i * sb] == 0.0) domain_failure(Op::kDiv, "division by zero", 0.0, i);
            out[i] = av[i * sa] / bv[i * sb];
          }
          break;
        case Op::kMin:
          for (int i = 0; i < n; ++i) out[i] = std::min(av[i * sa], bv[i * sb]);
          break;
        default:
          for (int i = 0; i < n; ++i) out[i] = std::max(av[i * sa], bv[i * sb]);
          break;
      }
      return;
    }

    case Op::kAddC: case Op::kSubC: case Op::kRSubC: case Op::kMulC:
    case Op::kRDivC: case Op::kMinC: case Op::kMaxC: case Op::kPowC: {
      const double* av = data(rec.a);
      const double c = rec.s0;
      switch (rec.op) {
        case Op::kAddC: for (int i = 0; i < n; ++i) out[i] = av[i] + c; break;
        case Op::kSubC: for (int i = 0; i < n; ++i) out[i] = av[i] - c; break;
        case Op::kRSubC: for (int i = 0; i < n; ++i) out[i] = c - av[i]; break;
        case Op::kMulC: for (int i = 0; i < n; ++i) out[i] = av[i] * c; break;
        case Op::kRDivC:
          for (int i = 0; i < n; ++i) {
            if (av[i] == 0.0) domain_failure(Op::kRDivC, "division by zero", 0.0, i);
            out[i] = c / av[i];
          }
          break;
        case Op::kMinC: for (int i = 0; i < n; ++i) out[i] = std::min(av[i], c); break;
        case Op::kMaxC: for (int i = 0; i < n; ++i) out[i] = std::max(av[i], c); break;
        default: for (int i = 0; i < n; ++i) out[i] = std::pow(av[i], c); break;
      }
      return;
    }

    case Op::kNeg: case Op::kExp: case Op::kLog: case Op::kSqrt:
    case Op::kTanh: case Op::kLogistic: case Op::kSoftplus: case Op::kAbs:
    case Op::kErf: case Op::kSin: case Op::kCos: case Op::kAsin:
    case Op::kNormCdf: case Op::kNormQuantile: case Op::kExpintE1: {
      const double* av = data(rec.a);
      switch (rec.op) {
        case Op::kNeg: for (int i = 0; i < n; ++i) out[i] = -av[i]; break;
        case Op::kExp: for (int i = 0; i < n; ++i) out[i] = std::exp(av[i]); break;
        case Op::kLog:
          for (int i = 0; i < n; ++i) {
            if (!(av[i] > 0.0)) domain_failure(Op::kLog, "log domain error", av[i], i);
            out[i] = std::log(av[i]);
          }
          break;
        case Op::kSqrt:
          for (int i = 0; i < n; ++i) {
            if (av[i] < 0.0) domain_failure(Op::kSqrt, "negative input", av[i], i);
            out[i] = std::sqrt(av[i]);
          }
          break;
        case Op::kTanh: for (int i = 0; i < n; ++i) out[i] = std::tanh(av[i]); break;
        case Op::kLogistic:
          for (int i = 0; i < n; ++i) out[i] = 1.0 / (1.0 + std::exp(-av[i]));
          break;
        case Op::kSoftplus:
          for (int i = 0; i < n; ++i) {
            out[i] = std::max(av[i], 0.0) + std::log1p(std::exp(-std::fabs(av[i])));
          }
          break;
        case Op::kAbs: for (int i = 0; i < n; ++i) out[i] = std::fabs(av[i]); break;
        case Op::kErf: for (int i = 0; i < n; ++i) out[i] = std::erf(av[i]); break;
        case Op::kSin: for (int i = 0; i < n; ++i) out[i] = std::sin(av[i]); break;
        case Op::kCos: for (int i = 0; i < n; ++i) out[i] = std::cos(av[i]); break;
        case Op::kAsin:
          for (int i = 0; i < n; ++i) {
            if (std::fabs(av[i]) > 1.0) domain_failure(Op::kAsin, "argument outside [-1,1]", av[i], i);
            out[i] = std::asin(av[i]);
          }
          break;
        case Op::kNormCdf:
          for (int i = 0; i < n; ++i) out[i] = math::norm_cdf(av[i]);
          break;
        case Op::kNormQuantile:
          for (int i = 0; i < n; ++i) {
            if (!(av[i] > 0.0 && av[i] < 1.0)) {
              domain_failure(Op::kNormQuantile, "probability outside (0,1)", av[i], i);
            }
            out[i] = math::norm_quantile(av[i]);
          }
          break;
        default:
          for (int i = 0; i < n; ++i) {
            if (!(av[i] > 0.0)) domain_failure(Op::kExpintE1, "non-positive input", av[i], i);
            out[i] = math::expint_e1(av[i]);
          }
          break;
      }
      return;
    }

    case Op::kSelectGe: {
      const double* cv = data(rec.a);
      const double* gv = data(rec.b);
      const double* lv = data(rec.c);
      const int sc = nodes_[rec.a].size == 1 ? 0 : 1;
      const int sg = nodes_[rec.b].size == 1 ? 0 : 1;
      const int sl = nodes_[rec.c].size == 1 ? 0 : 1;
      for (int i = 0; i < n; ++i) {
        out[i] = cv[i * sc] >= rec.s0 ? gv[i * sg] : lv[i * sl];
      }
      return;
    }

    case Op::kSum: {
      const double* av = data(rec.a);
      const int na = static_cast<int>(nodes_[rec.a].size);
      double acc = 0.0;
      for (int i = 0; i < na; ++i) acc += av[i];
      out[0] = acc;
      return;
    }
    case Op::kMean: {
      const double* av = data(rec.a);
      const int na = static_cast<int>(nodes_[rec.a].size);
      double acc = 0.0;
      for (int i = 0; i < na; ++i) acc += av[i];
      out[0] = acc / na;
      return;
    }
    case Op::kDot: {
      const double* av = data(rec.a);
      const double* bv = data(rec.b);
      const int na = static_cast<int>(nodes_[rec.a].size);
      double acc = 0.0;
      for (int i = 0; i < na; ++i) acc += av[i] * bv[i];
      out[0] = acc;
      return;
    }
    case Op::kSlice: {
      const double* av = data(rec.a) + rec.i0;
      std::memcpy(out, av, sizeof(double) * rec.i1);
      return;
    }
    case Op::kConcat: {
      int pos = 0;
      for (int p = 0; p < rec.i0; ++p) {
        const std::uint32_t src = aux_u32_[rec.aux + p];
        const int ns = static_cast<int>(nodes_[src].size);
        std::memcpy(out + pos, data(src), sizeof(double) * ns);
        pos += ns;
      }
      return;
    }
    case Op::kWeightedWindowSum: {
      const double* av = data(rec.a) + rec.i0;
      const double* w = aux_ptr_[rec.aux];
      double acc = 0.0;
      for (int i = 0; i < rec.i1; ++i) acc += w[i] * av[i];
      out[0] = acc;
      return;
    }

    case Op::kMatMul: {
      const double* A = data(rec.a);
      const double* B = data(rec.b);
      const int m = rec.i0, k = rec.i1, nn = rec.i2;
      for (int i = 0; i < m; ++i) {
        double* orow = out + i * nn;
        std::fill(orow, orow + nn, 0.0);
        const double* arow = A + i * k;
        for (int p = 0; p < k; ++p) {
          const double a = arow[p];
          const double* brow = B + p * nn;
          for (int j = 0; j < nn; ++j) orow[j] += a * brow[j];
        }
      }
      return;
    }
    case Op::kMatMulNT: {
      const double* A = data(rec.a);
      const double* B = data(rec.b);
      const int m = rec.i0, k = rec.i1, nn = rec.i2;
      for (int i = 0; i < m; ++i) {
        const double* arow = A + i * k;
        for (int j = 0; j < nn; ++j) {
          const double* brow = B + j * k;
          double acc = 0.0;
          for (int p = 0; p < k; ++p) acc += arow[p] * brow[p];
          out[i * nn + j] = acc;
        }
      }
      return;
    }
    case Op::kRowBcastAdd: {
      const double* A = data(rec.a);
      const double* bias = data(rec.b);
      const int rows = rec.i0, cols = rec.i1;
      for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) out[r * cols + c] = A[r * cols + c] + bias[c];
      }
      return;
    }
    case Op::kColMean: {
      const double* A = data(rec.a);
      const int rows = rec.i0, cols = rec.i1;
      for (int c = 0; c < cols; ++c) out[c] = 0.0;
      for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) out[c] += A[r * cols + c];
      }
      for (int c = 0; c < cols; ++c) out[c] /= rows;
      return;
    }
    case Op::kSoftmaxRows: {
      const double* A = data(rec.a);
      const int rows = rec.i0, cols = rec.i1;
      for (int r = 0; r < rows; ++r) {
        const double* in = A + r * cols;
        double* o = out + r * cols;
        double mx = in[0];
        for (int c = 1; c < cols; ++c) mx = std::max(mx, in[c]);
        double denom = 0.0;
        for (int c = 0; c < cols; ++c) {
          o[c] = std::exp(in[c] - mx);
          denom += o[c];
        }
        for (int c = 0; c < cols; ++c) o[c] /= denom;
      }
      return;
    }
    case Op::kLayerNorm: {
      const double* X = data(rec.a);
      const double* gamma = data(rec.b);
      const double* beta = data(rec.c);
      const int rows = rec.i0, cols = rec.i1;
      for (int r = 0; r < rows; ++r) {
        const double* x = X + r * cols;
        double* o = out + r * cols;
        double meanv = 0.0;
        for (int c = 0; c < cols; ++c) meanv += x[c];
        meanv /= cols;
        double var = 0.0;
        for (int c = 0; c < cols; ++c) {
          const double d = x[c] - meanv;
          var += d * d;
        }
        var /= cols;
        const double inv = 1.0 / std::sqrt(var + rec.s0);
        aux_f64_[rec.aux + 2 * r] = meanv;
        aux_f64_[rec.aux + 2 * r + 1] = inv;
        for (int c = 0; c < cols; ++c) {
          o[c] = gamma[c] * (x[c] - meanv) * inv + beta[c];
        }
      }
      return;
    }
  }
}

void Tape::exec_backward(const Record& rec) {
  const double* g = adjoints_.data() + nodes_[rec.out].offset;
  const double* out = data(rec.out);
  const int n = static_cast<int>(nodes_[rec.out].size);
  switch (rec.op) {
    case Op::kInput:
    case Op::kConstant:
      return;

    case Op::kAdd: case Op::kSub: case Op::kMul: case Op::kDiv:
    case Op::kMin: case Op::kMax: {
      double* ga = adj(rec.a);
      double* gb = adj(rec.b);
      const double* av = data(rec.a);
      const double* bv = data(rec.b);
      const int sa = nodes_[rec.a].size == 1 ? 0 : 1;
      const int sb = nodes_[rec.b].size == 1 ? 0 : 1;
      for (int i = 0; i < n; ++i) {
        const double gi = g[i];
        switch (rec.op) {
          case Op::kAdd:
            ga[i * sa] += gi;
            gb[i * sb] += gi;
            break;
          case Op::kSub:
            ga[i * sa] += gi;
            gb[i * sb] -= gi;
            break;
          case Op::kMul:
            ga[i * sa] += gi * bv[i * sb];
            gb[i * sb] += gi * av[i * sa];
            break;
          case Op::kDiv:
            ga[i * sa] += gi / bv[i * sb];
            gb[i * sb] -= gi * out[i] / bv[i * sb];
            break;
          case Op::kMin:
            // ties route to the first operand
            if (av[i * sa] <= bv[i * sb]) ga[i * sa] += gi; else gb[i * sb] += gi;
            break;
          default:
            if (av[i * sa] >= bv[i * sb]) ga[i * sa] += gi; else gb[i * sb] += gi;
            break;
        }
      }
      return;
    }

    case Op::kAddC: case Op::kSubC: case Op::kRSubC: case Op::kMulC:
    case Op::kRDivC: case Op::kMinC: case Op::kMaxC: case Op::kPowC: {
      double* ga = adj(rec.a);
      const double* av = data(rec.a);
      const double c = rec.s0;
      for (int i = 0; i < n; ++i) {
        const double gi = g[i];
        switch (rec.op) {
          case Op::kAddC: case Op::kSubC: ga[i] += gi; break;
          case Op::kRSubC: ga[i] -= gi; break;
          case Op::kMulC: ga[i] += gi * c; break;
          case Op::kRDivC: ga[i] -= gi * out[i] / av[i]; break;
          case Op::kMinC: if (av[i] <= c) ga[i] += gi; break;
          case Op::kMaxC: if (av[i] >= c) ga[i] += gi; break;
          default: ga[i] += gi * c * std::pow(av[i], c - 1.0); break;
        }
      }
      return;
    }

    case Op::kNeg: case Op::kExp: case Op::kLog: case Op::kSqrt:
    case Op::kTanh: case Op::kLogistic: case Op::kSoftplus: case Op::kAbs:
    case Op::kErf: case Op::kSin: case Op::kCos: case Op::kAsin:
    case Op::kNormCdf: case Op::kNormQuantile: case Op::kExpintE1: {
      double* ga = adj(rec.a);
      const double* av = data(rec.a);
      for (int i = 0; i < n; ++i) {
        const double gi = g[i];
        switch (rec.op) {
          case Op::kNeg: ga[i] -= gi; break;
          case Op::kExp: ga[i] += gi * out[i]; break;
          case Op::kLog: ga[i] += gi / av[i]; break;
          case Op::kSqrt: ga[i] += gi * 0.5 / out[i]; break;
          case Op::kTanh: ga[i] += gi * (1.0 - out[i] * out[i]); break;
          case Op::kLogistic: ga[i] += gi * out[i] * (1.0 - out[i]); break;
          case Op::kSoftplus: ga[i] += gi / (1.0 + std::exp(-av[i])); break;
          case Op::kAbs: ga[i] += av[i] >= 0.0 ? gi : -gi; break;
          case Op::kErf:
            ga[i] += gi * 2.0 * kInvSqrtPi * std::exp(-av[i] * av[i]);
            break;
          case Op::kSin: ga[i] += gi * std::cos(av[i]); break;
          case Op::kCos: ga[i] -= gi * std::sin(av[i]); break;
          case Op::kAsin: ga[i] += gi / std::sqrt(1.0 - av[i] * av[i]); break;
          case Op::kNormCdf: ga[i] += gi * math::norm_pdf(av[i]); break;
          case Op::kNormQuantile: ga[i] += gi / math::norm_pdf(out[i]); break;
          default: ga[i] -= gi * std::exp(-av[i]) / av[i]; break;  // E1
        }
      }
      return;
    }

    case Op::kSelectGe: {
      const double* cv = data(rec.a);
      double* gg = adj(rec.b);
      double* gl = adj(rec.c);
      const int sc = nodes_[rec.a].size == 1 ? 0 : 1;
      const int sg = nodes_[rec.b].size == 1 ? 0 : 1;
      const int sl = nodes_[rec.c].size == 1 ? 0 : 1;
      for (int i = 0; i < n; ++i) {
        if (cv[i * sc] >= rec.s0) gg[i * sg] += g[i]; else gl[i * sl] += g[i];
      }
      return;
    }

    case Op::kSum: {
      double* ga = adj(rec.a);
      const int na = static_cast<int>(nodes_[rec.a].size);
      for (int i = 0; i < na; ++i) ga[i] += g[0];
      return;
    }
    case Op::kMean: {
      double* ga = adj(rec.a);
      const int na = static_cast<int>(nodes_[rec.a].size);
      const double gi = g[0] / na;
      for (int i = 0; i < na; ++i) ga[i] += gi;
      return;
    }
    case Op::kDot: {
      double* ga = adj(rec.a);
      double* gb = adj(rec.b);
      const double* av = data(rec.a);
      const double* bv = data(rec.b);
      const int na = static_cast<int>(nodes_[rec.a].size);
      for (int i = 0; i < na; ++i) {
        ga[i] += g[0] * bv[i];
        gb[i] += g[0] * av[i];
      }
      return;
    }
    case Op::kSlice: {
      double* ga = adj(rec.a) + rec.i0;
      for (int i = 0; i < rec.i1; ++i) ga[i] += g[i];
      return;
    }
    case Op::kConcat: {
      int pos = 0;
      for (int p = 0; p < rec.i0; ++p) {
        const std::uint32_t src = aux_u32_[rec.aux + p];
        double* gs = adj(src);
        const int ns = static_cast<int>(nodes_[src].size);
        for (int i = 0; i < ns; ++i) gs[i] += g[pos + i];
        pos += ns;
      }
      return;
    }
    case Op::kWeightedWindowSum: {
      double* ga = adj(rec.a) + rec.i0;
      const double* w = aux_ptr_[rec.aux];
      for (int i = 0; i < rec.i1; ++i) ga[i] += g[0] * w[i];
      return;
    }

    case Op::kMatMul: {
      double* gA = adj(rec.a);
      double* gB = adj(rec.b);
      const double* A = data(rec.a);
      const double* B = data(rec.b);
      const int m = rec.i0, k = rec.i1, nn = rec.i2;
      for (int i = 0; i < m; ++i) {
        const double* grow = g + i * nn;
        for (int p = 0; p < k; ++p) {
          const double* brow = B + p * nn;
          double acc = 0.0;
          for (int j = 0; j < nn; ++j) acc += grow[j] * brow[j];
          gA[i * k + p] += acc;
        }
      }
      for (int p = 0; p < k; ++p) {
        double* gbrow = gB + p * nn;
        for (int i = 0; i < m; ++i) {
          const double a = A[i * k + p];
          const double* grow = g + i * nn;
          for (int j = 0; j < nn; ++j) gbrow[j] += a * grow[j];
        }
      }
      return;
    }
    case Op::kMatMulNT: {
      double* gA = adj(rec.a);
      double* gB = adj(rec.b);
      const double* A = data(rec.a);
      const double* B = data(rec.b);
      const int m = rec.i0, k = rec.i1, nn = rec.i2;
      for (int i = 0; i < m; ++i) {
        const double* grow = g + i * nn;
        double* garow = gA + i * k;
        const double* arow = A + i * k;
        for (int j = 0; j < nn; ++j) {
          const double gij = grow[j];
          const double* brow = B + j * k;
          double* gbrow = gB + j * k;
          for (int p = 0; p < k; ++p) {
            garow[p] += gij * brow[p];
            gbrow[p] += gij * arow[p];
          }
        }
      }
      return;
    }
    case Op::kRowBcastAdd: {
      double* gA = adj(rec.a);
      double* gbias = adj(rec.b);
      const int rows = rec.i0, cols = rec.i1;
      for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
          gA[r * cols + c] += g[r * cols + c];
          gbias[c] += g[r * cols + c];
        }
      }
      return;
    }
    case Op::kColMean: {
      double* gA = adj(rec.a);
      const int rows = rec.i0, cols = rec.i1;
      for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) gA[r * cols + c] += g[c] / rows;
      }
      return;
    }
    case Op::kSoftmaxRows: {
      double* gA = adj(rec.a);
      const int rows = rec.i0, cols = rec.i1;
      for (int r = 0; r < rows; ++r) {
        const double* y = out + r * cols;
        const double* gr = g + r * cols;
        double dot = 0.0;
        for (int c = 0; c < cols; ++c) dot += gr[c] * y[c];
        for (int c = 0; c < cols; ++c) gA[r * cols + c] += y[c] * (gr[c] - dot);
      }
      return;
    }
    case Op::kLayerNorm: {
      double* gX = adj(rec.a);
      double* gGamma = adj(rec.b);
      double* gBeta = adj(rec.c);
      const double* X = data(rec.a);
      const double* gamma = data(rec.b);
      const int rows = rec.i0, cols = rec.i1;
      for (int r = 0; r < rows; ++r) {
        const double meanv = aux_f64_[rec.aux + 2 * r];
        const double inv = aux_f64_[rec.aux + 2 * r + 1];
        const double* x = X + r * cols;
        const double* gr = g + r * cols;
        double m1 = 0.0, m2 = 0.0;
        for (int c = 0; c < cols; ++c) {
          const double xh = (x[c] - meanv) * inv;
          const double gg = gr[c] * gamma[c];
          m1 += gg;
          m2 += gg * xh;
          gGamma[c] += gr[c] * xh;
          gBeta[c] += gr[c];
        }
        m1 /= cols;
        m2 /= cols;
        for (int c = 0; c < cols; ++c) {
          const double xh = (x[c] - meanv) * inv;
          const double gg = gr[c] * gamma[c];
          gX[r * cols + c] += inv * (gg - m1 - xh * m2);
        }
      }
      return;
    }
  }
}

void Tape::backward(const Value& seed) {
  if (seed.tape != this) throw DomainError("backward: seed from another tape");
  if (nodes_[seed.id].size != 1) throw DomainError("backward: seed must be scalar");
  adjoints_.assign(values_.size(), 0.0);
  adjoints_[nodes_[seed.id].offset] = 1.0;
  for (auto it = records_.rbegin(); it != records_.rend(); ++it) {
    exec_backward(*it);
  }
}

std::span<const double> Tape::adjoint(const Value& v) const {
  return {adjoints_.data() + nodes_[v.id].offset, nodes_[v.id].size};
}

double Tape::adjoint_scalar(const Value& v) const {
  const auto a = adjoint(v);
  if (a.size() != 1) throw DomainError("adjoint_scalar: node is not a scalar");
  return a[0];
}

void Tape::replay_forward() {
  for (const Record& rec : records_) {
    exec_forward(rec);
    check_finite(rec);
  }
}

void Tape::reset() {
  nodes_.clear();
  records_.clear();
  values_.clear();
  adjoints_.clear();
  aux_u32_.clear();
  aux_f64_.clear();
  aux_ptr_.clear();
  inputs_.clear();
}

}  // namespace ptv::diff
