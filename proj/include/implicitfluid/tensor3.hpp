#pragma once

#include <array>
#include <cstdint>

namespace ifluid {

/// Cartesian 3-vector. Holds density gradients and body forces.
struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  double norm2() const { return dot(*this); }
  bool is_finite() const;

  friend bool operator==(const Vec3&, const Vec3&) = default;
};

/// General (possibly nonsymmetric) 3x3 matrix, row-major.
struct Mat3 {
  std::array<std::array<double, 3>, 3> a{};

  double operator()(int i, int j) const { return a[i][j]; }
  double& operator()(int i, int j) { return a[i][j]; }

  static Mat3 identity();
  Mat3 transposed() const;
  Vec3 apply(const Vec3& v) const;
  double determinant() const;
  double max_abs() const;

  friend Mat3 operator*(const Mat3& l, const Mat3& r);
  friend bool operator==(const Mat3&, const Mat3&) = default;
};

/// Symmetric 3x3 tensor stored as its six independent components.
class SymTensor3 {
 public:
  double xx = 0.0, yy = 0.0, zz = 0.0;
  double xy = 0.0, xz = 0.0, yz = 0.0;

  constexpr SymTensor3() = default;
  constexpr SymTensor3(double xx_, double yy_, double zz_, double xy_, double xz_, double yz_)
      : xx(xx_), yy(yy_), zz(zz_), xy(xy_), xz(xz_), yz(yz_) {}

  static constexpr SymTensor3 zero() { return {}; }
  static constexpr SymTensor3 identity() { return {1, 1, 1, 0, 0, 0}; }
  static constexpr SymTensor3 spherical(double s) { return {s, s, s, 0, 0, 0}; }
  /// Components in the order xx, yy, zz, xy, xz, yz.
  static SymTensor3 from_array(const std::array<double, 6>& c);
  /// Symmetric part (M + M^T)/2.
  static SymTensor3 symmetric_part(const Mat3& m);

  std::array<double, 6> to_array() const { return {xx, yy, zz, xy, xz, yz}; }
  Mat3 to_matrix() const;

  double operator()(int i, int j) const;
  double trace() const { return xx + yy + zz; }
  Vec3 apply(const Vec3& v) const;
  /// Largest absolute component.
  double max_abs() const;
  bool is_finite() const;

  SymTensor3& operator+=(const SymTensor3& o);
  SymTensor3& operator-=(const SymTensor3& o);
  SymTensor3& operator*=(double s);

  friend SymTensor3 operator+(SymTensor3 l, const SymTensor3& r) { return l += r; }
  friend SymTensor3 operator-(SymTensor3 l, const SymTensor3& r) { return l -= r; }
  friend SymTensor3 operator*(double s, SymTensor3 t) { return t *= s; }
  friend SymTensor3 operator*(SymTensor3 t, double s) { return t *= s; }
  friend bool operator==(const SymTensor3&, const SymTensor3&) = default;
};

/// The six scalar invariants of a (stress, density gradient) pair.
struct InvariantSet {
  double i1 = 0.0;  // tr T
  double i2 = 0.0;  // tr T^2
  double i3 = 0.0;  // tr T^3
  double i4 = 0.0;  // tr(g x g)
  double i5 = 0.0;  // tr(g x T g)
  double i6 = 0.0;  // tr(g x T^2 g)

  std::array<double, 6> to_array() const { return {i1, i2, i3, i4, i5, i6}; }
  friend bool operator==(const InvariantSet&, const InvariantSet&) = default;
};

/// Q with Q^T Q = I.
class OrthogonalMatrix {
 public:
  /// Throws std::invalid_argument when m is not orthogonal to 1e-12 per entry.
  explicit OrthogonalMatrix(const Mat3& m);

  const Mat3& matrix() const { return q_; }
  double determinant() const { return q_.determinant(); }
  Vec3 apply(const Vec3& v) const { return q_.apply(v); }
  /// Q T Q^T.
  SymTensor3 rotate(const SymTensor3& t) const;

 private:
  Mat3 q_;
};

/// Symmetrized tensor product (u x v + v x u)/2; exactly u_i u_j when u == v.
SymTensor3 outer(const Vec3& u, const Vec3& v);

InvariantSet invariants(const SymTensor3& t, const Vec3& g);

Mat3 matmul(const SymTensor3& a, const SymTensor3& b);

/// T^2, computed with symmetric storage.
SymTensor3 square(const SymTensor3& t);

/// Haar-distributed element of O(3), deterministic in the seed.
OrthogonalMatrix random_orthogonal(std::uint64_t seed);

}  // namespace ifluid
