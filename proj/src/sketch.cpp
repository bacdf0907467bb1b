#include "sketchkrr/sketch.hpp"

#include <bit>
#include <cmath>
#include <random>
#include <sstream>
#include <unordered_map>

#include "sketchkrr/errors.hpp"

namespace sketchkrr {

std::string to_string(SketchKind kind) {
  switch (kind) {
    case SketchKind::kGaussian:
      return "gaussian";
    case SketchKind::kRos:
      return "ros";
    case SketchKind::kSubSample:
      return "subsample";
  }
  return "unknown";
}

SketchKind parse_sketch_kind(const std::string& text) {
  if (text == "gaussian") return SketchKind::kGaussian;
  if (text == "ros") return SketchKind::kRos;
  if (text == "subsample" || text == "nystrom") return SketchKind::kSubSample;
  throw DomainError("unknown sketch kind '" + text + "'");
}

bool is_power_of_two(std::size_t n) { return n > 0 && (n & (n - 1)) == 0; }

void fwht_inplace(std::span<double> v, bool normalized) {
  const std::size_t len = v.size();
  if (!is_power_of_two(len)) {
    std::ostringstream os;
    os << "fwht: length " << len << " is not a power of two";
    throw DomainError(os.str());
  }
  for (std::size_t h = 1; h < len; h *= 2) {
    for (std::size_t i = 0; i < len; i += 2 * h) {
      for (std::size_t j = i; j < i + h; ++j) {
        const double a = v[j];
        const double b = v[j + h];
        v[j] = a + b;
        v[j + h] = a - b;
      }
    }
  }
  if (normalized) {
    const double s = 1.0 / std::sqrt(static_cast<double>(len));
    for (double& x : v) x *= s;
  }
}

std::vector<double> fwht(std::vector<double> v, bool normalized) {
  fwht_inplace(v, normalized);
  return v;
}

namespace {

Eigen::Index next_power_of_two(Eigen::Index n) {
  Eigen::Index p = 1;
  while (p < n) p <<= 1;
  return p;
}

// First m entries of a uniform random permutation of {0..pool-1}; sparse
// Fisher–Yates keeps only the displaced slots.
std::vector<Eigen::Index> sample_without_replacement(Eigen::Index pool, Eigen::Index m,
                                                     std::mt19937_64& rng) {
  std::unordered_map<Eigen::Index, Eigen::Index> displaced;
  auto at = [&](Eigen::Index i) {
    auto it = displaced.find(i);
    return it == displaced.end() ? i : it->second;
  };
  std::vector<Eigen::Index> out(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) {
    std::uniform_int_distribution<Eigen::Index> pick(i, pool - 1);
    const Eigen::Index j = pick(rng);
    const Eigen::Index vi = at(i);
    const Eigen::Index vj = at(j);
    displaced[j] = vi;
    displaced[i] = vj;
    out[static_cast<std::size_t>(i)] = vj;
  }
  return out;
}

void check_rows(Eigen::Index rows, Eigen::Index expected, const char* what) {
  if (rows != expected) {
    std::ostringstream os;
    os << what << ": expected " << expected << " rows, got " << rows;
    throw DomainError(os.str());
  }
}

}  // namespace

SketchOperator draw_sketch(SketchKind kind, Eigen::Index m, Eigen::Index n, std::uint64_t seed) {
  if (m < 1 || m > n) {
    std::ostringstream os;
    os << "draw_sketch: need 1 <= m <= n, got m=" << m << " n=" << n;
    throw DomainError(os.str());
  }
  SketchOperator s(kind, m, n, seed);
  std::mt19937_64 rng(seed);
  switch (kind) {
    case SketchKind::kGaussian: {
      std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(static_cast<double>(m)));
      s.dense_.resize(m, n);
      for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < m; ++i) s.dense_(i, j) = normal(rng);
      }
      break;
    }
    case SketchKind::kRos: {
      s.n_pad_ = next_power_of_two(n);
      s.signs_.resize(static_cast<std::size_t>(s.n_pad_));
      std::bernoulli_distribution coin(0.5);
      for (double& r : s.signs_) r = coin(rng) ? 1.0 : -1.0;
      s.indices_ = sample_without_replacement(s.n_pad_, m, rng);
      s.scale_ = std::sqrt(static_cast<double>(s.n_pad_) / static_cast<double>(m));
      break;
    }
    case SketchKind::kSubSample:
      s.indices_ = sample_without_replacement(n, m, rng);
      s.scale_ = std::sqrt(static_cast<double>(n) / static_cast<double>(m));
      break;
  }
  return s;
}

SketchOperator SketchOperator::subsample_with_indices(Eigen::Index n,
                                                      std::vector<Eigen::Index> indices) {
  const auto m = static_cast<Eigen::Index>(indices.size());
  if (m < 1 || m > n) throw DomainError("subsample_with_indices: need 1 <= m <= n");
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  for (Eigen::Index i : indices) {
    if (i < 0 || i >= n || seen[static_cast<std::size_t>(i)]) {
      throw DomainError("subsample_with_indices: indices must be distinct and in [0, n)");
    }
    seen[static_cast<std::size_t>(i)] = true;
  }
  SketchOperator s(SketchKind::kSubSample, m, n, 0);
  s.indices_ = std::move(indices);
  s.scale_ = std::sqrt(static_cast<double>(n) / static_cast<double>(m));
  return s;
}

SketchOperator SketchOperator::identity(Eigen::Index n) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
  return subsample_with_indices(n, std::move(idx));
}

Vector SketchOperator::apply_column(const Eigen::Ref<const Vector>& col) const {
  Vector out(m_);
  switch (kind_) {
    case SketchKind::kGaussian:
      out.noalias() = dense_ * col;
      break;
    case SketchKind::kRos: {
      std::vector<double> buf(static_cast<std::size_t>(n_pad_), 0.0);
      for (Eigen::Index i = 0; i < n_; ++i) {
        buf[static_cast<std::size_t>(i)] = col(i) * signs_[static_cast<std::size_t>(i)];
      }
      fwht_inplace(buf, true);
      for (Eigen::Index r = 0; r < m_; ++r) {
        out(r) = scale_ * buf[static_cast<std::size_t>(indices_[static_cast<std::size_t>(r)])];
      }
      break;
    }
    case SketchKind::kSubSample:
      for (Eigen::Index r = 0; r < m_; ++r) out(r) = scale_ * col(indices_[static_cast<std::size_t>(r)]);
      break;
  }
  return out;
}

Vector SketchOperator::apply_transpose_column(const Eigen::Ref<const Vector>& col) const {
  Vector out = Vector::Zero(n_);
  switch (kind_) {
    case SketchKind::kGaussian:
      out.noalias() = dense_.transpose() * col;
      break;
    case SketchKind::kRos: {
      // Sᵀa = scale · R H Pᵀ a, truncated to the first n coordinates.
      std::vector<double> buf(static_cast<std::size_t>(n_pad_), 0.0);
      for (Eigen::Index r = 0; r < m_; ++r) {
        buf[static_cast<std::size_t>(indices_[static_cast<std::size_t>(r)])] = col(r);
      }
      fwht_inplace(buf, true);
      for (Eigen::Index i = 0; i < n_; ++i) {
        out(i) = scale_ * signs_[static_cast<std::size_t>(i)] * buf[static_cast<std::size_t>(i)];
      }
      break;
    }
    case SketchKind::kSubSample:
      for (Eigen::Index r = 0; r < m_; ++r) out(indices_[static_cast<std::size_t>(r)]) += scale_ * col(r);
      break;
  }
  return out;
}

Matrix SketchOperator::apply(const Matrix& mat) const {
  check_rows(mat.rows(), n_, "SketchOperator::apply");
  if (kind_ == SketchKind::kGaussian) return dense_ * mat;
  Matrix out(m_, mat.cols());
  for (Eigen::Index c = 0; c < mat.cols(); ++c) out.col(c) = apply_column(mat.col(c));
  return out;
}

Vector SketchOperator::apply(const Vector& v) const {
  check_rows(v.size(), n_, "SketchOperator::apply");
  return apply_column(v);
}

Matrix SketchOperator::apply_transpose(const Matrix& mat) const {
  check_rows(mat.rows(), m_, "SketchOperator::apply_transpose");
  if (kind_ == SketchKind::kGaussian) return dense_.transpose() * mat;
  Matrix out(n_, mat.cols());
  for (Eigen::Index c = 0; c < mat.cols(); ++c) out.col(c) = apply_transpose_column(mat.col(c));
  return out;
}

Vector SketchOperator::apply_transpose(const Vector& v) const {
  check_rows(v.size(), m_, "SketchOperator::apply_transpose");
  return apply_transpose_column(v);
}

Matrix SketchOperator::materialize() const {
  switch (kind_) {
    case SketchKind::kGaussian:
      return dense_;
    case SketchKind::kSubSample: {
      Matrix s = Matrix::Zero(m_, n_);
      for (Eigen::Index r = 0; r < m_; ++r) s(r, indices_[static_cast<std::size_t>(r)]) = scale_;
      return s;
    }
    case SketchKind::kRos: {
      // Row r is scale · (H row p_r) ∘ signs, dropping padded columns.
      Matrix s(m_, n_);
      const double h = 1.0 / std::sqrt(static_cast<double>(n_pad_));
      for (Eigen::Index r = 0; r < m_; ++r) {
        const auto p = static_cast<unsigned long long>(indices_[static_cast<std::size_t>(r)]);
        for (Eigen::Index c = 0; c < n_; ++c) {
          const int parity = std::popcount(p & static_cast<unsigned long long>(c)) & 1;
          s(r, c) = scale_ * signs_[static_cast<std::size_t>(c)] * (parity ? -h : h);
        }
      }
      return s;
    }
  }
  return {};
}

}  // namespace sketchkrr
