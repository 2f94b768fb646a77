#pragma once

#include <initializer_list>
#include <vector>

#include "fraclab/rat.hpp"

namespace fraclab {

using RatVec = std::vector<Rat>;

// Dense matrix with exact rational entries. Sizes in this project never
// exceed (d+1) x (d+1) with d <= 3, so no attempt is made at being clever.
class RatMat {
 public:
  RatMat() : rows_(0), cols_(0) {}
  RatMat(int rows, int cols) : rows_(rows), cols_(cols), a_(rows * cols) {}
  RatMat(int rows, int cols, std::initializer_list<Rat> entries);

  static RatMat identity(int n);
  static RatMat diagonal(const RatVec& d);

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  Rat& operator()(int i, int j) { return a_[i * cols_ + j]; }
  const Rat& operator()(int i, int j) const { return a_[i * cols_ + j]; }

  RatMat operator*(const RatMat& o) const;
  RatVec operator*(const RatVec& v) const;
  RatMat operator*(const Rat& c) const;
  RatMat operator+(const RatMat& o) const;
  RatMat operator-(const RatMat& o) const;
  bool operator==(const RatMat& o) const;

  RatMat transpose() const;
  Rat det() const;
  RatMat inverse() const;  // throws DomainError on singular input

  bool is_identity() const;
  bool is_zero() const;

 private:
  int rows_, cols_;
  std::vector<Rat> a_;
};

RatVec vec_add(const RatVec& a, const RatVec& b);
RatVec vec_sub(const RatVec& a, const RatVec& b);
RatVec vec_scale(const Rat& c, const RatVec& a);
Rat vec_max_abs(const RatVec& a);        // sup norm, exact
Rat vec_norm2_sq(const RatVec& a);       // squared Euclidean norm, exact

}  // namespace fraclab
