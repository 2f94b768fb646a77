#include "fraclab/matrix.hpp"

namespace fraclab {

RatMat::RatMat(int rows, int cols, std::initializer_list<Rat> entries)
    : rows_(rows), cols_(cols), a_(entries) {
  if (static_cast<int>(a_.size()) != rows * cols)
    throw DomainError("matrix initializer size mismatch");
}

RatMat RatMat::identity(int n) {
  RatMat m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

RatMat RatMat::diagonal(const RatVec& d) {
  RatMat m(static_cast<int>(d.size()), static_cast<int>(d.size()));
  for (std::size_t i = 0; i < d.size(); ++i) m(int(i), int(i)) = d[i];
  return m;
}

RatMat RatMat::operator*(const RatMat& o) const {
  if (cols_ != o.rows_) throw DomainError("matrix product shape mismatch");
  RatMat r(rows_, o.cols_);
  for (int i = 0; i < rows_; ++i)
    for (int k = 0; k < cols_; ++k) {
      const Rat& aik = (*this)(i, k);
      if (aik == 0) continue;
      for (int j = 0; j < o.cols_; ++j) r(i, j) += aik * o(k, j);
    }
  return r;
}

RatVec RatMat::operator*(const RatVec& v) const {
  if (cols_ != static_cast<int>(v.size()))
    throw DomainError("matrix-vector shape mismatch");
  RatVec r(rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j)
      if ((*this)(i, j) != 0) r[i] += (*this)(i, j) * v[j];
  return r;
}

RatMat RatMat::operator*(const Rat& c) const {
  RatMat r(*this);
  for (auto& x : r.a_) x *= c;
  return r;
}

RatMat RatMat::operator+(const RatMat& o) const {
  RatMat r(*this);
  for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] += o.a_[i];
  return r;
}

RatMat RatMat::operator-(const RatMat& o) const {
  RatMat r(*this);
  for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] -= o.a_[i];
  return r;
}

bool RatMat::operator==(const RatMat& o) const {
  return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_;
}

RatMat RatMat::transpose() const {
  RatMat r(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
  return r;
}

Rat RatMat::det() const {
  if (rows_ != cols_) throw DomainError("det of non-square matrix");
  RatMat m(*this);
  int n = rows_;
  Rat d(1);
  for (int k = 0; k < n; ++k) {
    int piv = -1;
    for (int i = k; i < n; ++i)
      if (m(i, k) != 0) { piv = i; break; }
    if (piv < 0) return Rat(0);
    if (piv != k) {
      for (int j = k; j < n; ++j) std::swap(m(piv, j), m(k, j));
      d = -d;
    }
    d *= m(k, k);
    for (int i = k + 1; i < n; ++i) {
      if (m(i, k) == 0) continue;
      Rat f = m(i, k) / m(k, k);
      for (int j = k; j < n; ++j) m(i, j) -= f * m(k, j);
    }
  }
  return d;
}

RatMat RatMat::inverse() const {
  if (rows_ != cols_) throw DomainError("inverse of non-square matrix");
  int n = rows_;
  RatMat m(*this);
  RatMat inv = identity(n);
  for (int k = 0; k < n; ++k) {
    int piv = -1;
    for (int i = k; i < n; ++i)
      if (m(i, k) != 0) { piv = i; break; }
    if (piv < 0) throw DomainError("singular matrix");
    if (piv != k)
      for (int j = 0; j < n; ++j) {
        std::swap(m(piv, j), m(k, j));
        std::swap(inv(piv, j), inv(k, j));
      }
    Rat p = m(k, k);
    for (int j = 0; j < n; ++j) {
      m(k, j) /= p;
      inv(k, j) /= p;
    }
    for (int i = 0; i < n; ++i) {
      if (i == k || m(i, k) == 0) continue;
      Rat f = m(i, k);
      for (int j = 0; j < n; ++j) {
        m(i, j) -= f * m(k, j);
        inv(i, j) -= f * inv(k, j);
      }
    }
  }
  return inv;
}

bool RatMat::is_identity() const {
  if (rows_ != cols_) return false;
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j)
      if ((*this)(i, j) != (i == j ? 1 : 0)) return false;
  return true;
}

bool RatMat::is_zero() const {
  for (const auto& x : a_)
    if (x != 0) return false;
  return true;
}

RatVec vec_add(const RatVec& a, const RatVec& b) {
  RatVec r(a);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] += b[i];
  return r;
}

RatVec vec_sub(const RatVec& a, const RatVec& b) {
  RatVec r(a);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
  return r;
}

RatVec vec_scale(const Rat& c, const RatVec& a) {
  RatVec r(a);
  for (auto& x : r) x *= c;
  return r;
}

Rat vec_max_abs(const RatVec& a) {
  Rat m(0);
  for (const auto& x : a) {
    Rat ax = rat_abs(x);
    if (ax > m) m = ax;
  }
  return m;
}

Rat vec_norm2_sq(const RatVec& a) {
  Rat s(0);
  for (const auto& x : a) s += x * x;
  return s;
}

}  // namespace fraclab
