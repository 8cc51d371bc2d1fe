#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace ptv::diff {

class Tape;

// Handle to one tape node (a scalar or a fixed-length vector of values).
struct Value {
  Tape* tape = nullptr;
  std::uint32_t id = 0;

  bool valid() const { return tape != nullptr; }
  int size() const;
  double scalar() const;          // requires size() == 1
  std::span<const double> values() const;
};

enum class Op : std::uint8_t {
  kInput, kConstant,
  kAdd, kSub, kMul, kDiv,
  kAddC, kSubC, kRSubC, kMulC, kRDivC,
  kNeg, kExp, kLog, kSqrt, kTanh, kLogistic, kSoftplus, kAbs, kErf,
  kSin, kCos, kAsin, kPowC,
  kNormCdf, kNormQuantile, kExpintE1,
  kMin, kMax, kMinC, kMaxC, kSelectGe,
  kSum, kMean, kDot, kSlice, kConcat, kWeightedWindowSum,
  kMatMul, kMatMulNT, kRowBcastAdd, kColMean,
  kSoftmaxRows, kLayerNorm,
};

const char* op_name(Op op);

// Reverse-mode tape: eager forward evaluation, one backward sweep per seed.
// Values and adjoints live in contiguous arenas that are recycled by
// reset(), so a tape can be reused across many samples without reallocating.
// Every forward record is checked for non-finite outputs as it is produced;
// violations raise DomainError naming the producing operation.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // leaves -----------------------------------------------------------------
  Value input(double v);
  Value input(std::span<const double> v);
  Value constant(double v);
  Value constant(std::span<const double> v);

  // elementwise; operands broadcast when one side is scalar ----------------
  Value binary(Op op, const Value& a, const Value& b);
  Value binary_const(Op op, const Value& a, double c);
  Value unary(Op op, const Value& a);
  Value pow_const(const Value& a, double exponent);
  // out[i] = cond[i] >= threshold ? if_ge[i] : if_lt[i]
  Value select_ge(const Value& cond, double threshold, const Value& if_ge,
                  const Value& if_lt);

  // reductions and structure ------------------------------------------------
  Value sum(const Value& a);
  Value mean(const Value& a);
  Value dot(const Value& a, const Value& b);
  Value slice(const Value& a, int offset, int length);
  Value concat(std::span<const Value> parts);
  // sum_i weights[i] * a[offset + i]; `weights` must outlive the tape use.
  Value weighted_window_sum(const Value& a, int offset,
                            const double* weights, int length);

  // dense linear algebra (row-major flat buffers) ---------------------------
  Value matmul(const Value& a, const Value& b, int m, int k, int n);
  Value matmul_nt(const Value& a, const Value& b, int m, int k, int n);
  Value row_bcast_add(const Value& a, const Value& bias, int rows, int cols);
  Value col_mean(const Value& a, int rows, int cols);
  Value softmax_rows(const Value& a, int rows, int cols);
  Value layer_norm(const Value& x, const Value& gamma, const Value& beta,
                   int rows, int cols, double eps);

  // gradients ----------------------------------------------------------------
  void backward(const Value& seed);      // seed must be scalar
  std::span<const double> adjoint(const Value& v) const;
  double adjoint_scalar(const Value& v) const;

  // replays all recorded forward kernels in order over the current leaf
  // values; outputs must reproduce the eager pass bit for bit.
  void replay_forward();

  void reset();
  std::size_t num_records() const { return records_.size(); }
  std::size_t num_nodes() const { return nodes_.size(); }

  // ids of nodes created by input(), in registration order
  std::span<const std::uint32_t> input_ids() const { return inputs_; }

  int node_size(std::uint32_t id) const { return nodes_[id].size; }
  std::span<const double> node_values(std::uint32_t id) const;

 private:
  struct Node {
    std::uint32_t offset;
    std::uint32_t size;
  };

  struct Record {
    Op op;
    std::uint32_t out;
    std::uint32_t a = kNone;
    std::uint32_t b = kNone;
    std::uint32_t c = kNone;
    double s0 = 0.0;
    double s1 = 0.0;
    std::int32_t i0 = 0;
    std::int32_t i1 = 0;
    std::int32_t i2 = 0;
    std::uint32_t aux = kNone;  // index into aux_u32_/aux_f64_/aux_ptr_
  };

  static constexpr std::uint32_t kNone = 0xFFFFFFFFu;

  std::uint32_t new_node(int size);
  double* data(std::uint32_t id);
  const double* data(std::uint32_t id) const;
  double* adj(std::uint32_t id);
  void exec_forward(const Record& rec);
  void exec_backward(const Record& rec);
  void check_finite(const Record& rec);
  Value make_value(std::uint32_t id) { return Value{this, id}; }

  std::vector<Node> nodes_;
  std::vector<Record> records_;
  std::vector<double> values_;
  std::vector<double> adjoints_;
  std::vector<std::uint32_t> aux_u32_;
  std::vector<double> aux_f64_;
  std::vector<const double*> aux_ptr_;
  std::vector<std::uint32_t> inputs_;

  friend struct Value;
};

// convenience wrappers -------------------------------------------------------

inline Value operator+(const Value& a, const Value& b) { return a.tape->binary(Op::kAdd, a, b); }
inline Value operator-(const Value& a, const Value& b) { return a.tape->binary(Op::kSub, a, b); }
inline Value operator*(const Value& a, const Value& b) { return a.tape->binary(Op::kMul, a, b); }
inline Value operator/(const Value& a, const Value& b) { return a.tape->binary(Op::kDiv, a, b); }
inline Value operator+(const Value& a, double c) { return a.tape->binary_const(Op::kAddC, a, c); }
inline Value operator+(double c, const Value& a) { return a + c; }
inline Value operator-(const Value& a, double c) { return a.tape->binary_const(Op::kSubC, a, c); }
inline Value operator-(double c, const Value& a) { return a.tape->binary_const(Op::kRSubC, a, c); }
inline Value operator*(const Value& a, double c) { return a.tape->binary_const(Op::kMulC, a, c); }
inline Value operator*(double c, const Value& a) { return a * c; }
inline Value operator/(const Value& a, double c) { return a.tape->binary_const(Op::kMulC, a, 1.0 / c); }
inline Value operator/(double c, const Value& a) { return a.tape->binary_const(Op::kRDivC, a, c); }
inline Value operator-(const Value& a) { return a.tape->unary(Op::kNeg, a); }

inline Value exp(const Value& a) { return a.tape->unary(Op::kExp, a); }
inline Value log(const Value& a) { return a.tape->unary(Op::kLog, a); }
inline Value sqrt(const Value& a) { return a.tape->unary(Op::kSqrt, a); }
inline Value tanh(const Value& a) { return a.tape->unary(Op::kTanh, a); }
inline Value logistic(const Value& a) { return a.tape->unary(Op::kLogistic, a); }
inline Value softplus(const Value& a) { return a.tape->unary(Op::kSoftplus, a); }
inline Value abs(const Value& a) { return a.tape->unary(Op::kAbs, a); }
inline Value erf(const Value& a) { return a.tape->unary(Op::kErf, a); }
inline Value sin(const Value& a) { return a.tape->unary(Op::kSin, a); }
inline Value cos(const Value& a) { return a.tape->unary(Op::kCos, a); }
inline Value asin(const Value& a) { return a.tape->unary(Op::kAsin, a); }
inline Value pow(const Value& a, double c) { return a.tape->pow_const(a, c); }
inline Value norm_cdf(const Value& a) { return a.tape->unary(Op::kNormCdf, a); }
inline Value norm_quantile(const Value& a) { return a.tape->unary(Op::kNormQuantile, a); }
inline Value expint_e1(const Value& a) { return a.tape->unary(Op::kExpintE1, a); }
inline Value min(const Value& a, const Value& b) { return a.tape->binary(Op::kMin, a, b); }
inline Value max(const Value& a, const Value& b) { return a.tape->binary(Op::kMax, a, b); }
inline Value min(const Value& a, double c) { return a.tape->binary_const(Op::kMinC, a, c); }
inline Value max(const Value& a, double c) { return a.tape->binary_const(Op::kMaxC, a, c); }
inline Value clamp(const Value& a, double lo, double hi) { return min(max(a, lo), hi); }
inline Value sum(const Value& a) { return a.tape->sum(a); }
inline Value mean(const Value& a) { return a.tape->mean(a); }
inline Value dot(const Value& a, const Value& b) { return a.tape->dot(a, b); }
inline Value select_ge(const Value& cond, double threshold, const Value& if_ge,
                       const Value& if_lt) {
  return cond.tape->select_ge(cond, threshold, if_ge, if_lt);
}
inline Value square(const Value& a) { return a * a; }

}  // namespace ptv::diff
