#include "implicitfluid/tensor3.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace ifluid {

bool Vec3::is_finite() const {
  return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
}

Mat3 Mat3::identity() {
  Mat3 m;
  m.a[0][0] = m.a[1][1] = m.a[2][2] = 1.0;
  return m;
}

Mat3 Mat3::transposed() const {
  Mat3 t;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) t.a[i][j] = a[j][i];
  return t;
}

Vec3 Mat3::apply(const Vec3& v) const {
  return {a[0][0] * v.x + a[0][1] * v.y + a[0][2] * v.z,
          a[1][0] * v.x + a[1][1] * v.y + a[1][2] * v.z,
          a[2][0] * v.x + a[2][1] * v.y + a[2][2] * v.z};
}

double Mat3::determinant() const {
  return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
         a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
         a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
}

double Mat3::max_abs() const {
  double m = 0.0;
  for (const auto& row : a)
    for (double v : row) m = std::max(m, std::abs(v));
  return m;
}

Mat3 operator*(const Mat3& l, const Mat3& r) {
  Mat3 p;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      p.a[i][j] = l.a[i][0] * r.a[0][j] + l.a[i][1] * r.a[1][j] + l.a[i][2] * r.a[2][j];
  return p;
}

SymTensor3 SymTensor3::from_array(const std::array<double, 6>& c) {
  return {c[0], c[1], c[2], c[3], c[4], c[5]};
}

SymTensor3 SymTensor3::symmetric_part(const Mat3& m) {
  return {m(0, 0),
          m(1, 1),
          m(2, 2),
          0.5 * (m(0, 1) + m(1, 0)),
          0.5 * (m(0, 2) + m(2, 0)),
          0.5 * (m(1, 2) + m(2, 1))};
}

Mat3 SymTensor3::to_matrix() const {
  Mat3 m;
  m.a = {{{xx, xy, xz}, {xy, yy, yz}, {xz, yz, zz}}};
  return m;
}

double SymTensor3::operator()(int i, int j) const {
  if (i > j) std::swap(i, j);
  switch (i * 3 + j) {
    case 0: return xx;
    case 1: return xy;
    case 2: return xz;
    case 4: return yy;
    case 5: return yz;
    case 8: return zz;
    default: throw std::out_of_range("SymTensor3 index");
  }
}

Vec3 SymTensor3::apply(const Vec3& v) const {
  return {xx * v.x + xy * v.y + xz * v.z,
          xy * v.x + yy * v.y + yz * v.z,
          xz * v.x + yz * v.y + zz * v.z};
}

double SymTensor3::max_abs() const {
  double m = 0.0;
  for (double c : to_array()) m = std::max(m, std::abs(c));
  return m;
}

bool SymTensor3::is_finite() const {
  for (double c : to_array())
    if (!std::isfinite(c)) return false;
  return true;
}

SymTensor3& SymTensor3::operator+=(const SymTensor3& o) {
  xx += o.xx; yy += o.yy; zz += o.zz;
  xy += o.xy; xz += o.xz; yz += o.yz;
  return *this;
}

SymTensor3& SymTensor3::operator-=(const SymTensor3& o) {
  xx -= o.xx; yy -= o.yy; zz -= o.zz;
  xy -= o.xy; xz -= o.xz; yz -= o.yz;
  return *this;
}

SymTensor3& SymTensor3::operator*=(double s) {
  xx *= s; yy *= s; zz *= s;
  xy *= s; xz *= s; yz *= s;
  return *this;
}

OrthogonalMatrix::OrthogonalMatrix(const Mat3& m) : q_(m) {
  const Mat3 qtq = m.transposed() * m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (std::abs(qtq(i, j) - (i == j ? 1.0 : 0.0)) > 1e-12)
        throw std::invalid_argument("matrix is not orthogonal");
}

SymTensor3 OrthogonalMatrix::rotate(const SymTensor3& t) const {
  return SymTensor3::symmetric_part(q_ * t.to_matrix() * q_.transposed());
}

SymTensor3 outer(const Vec3& u, const Vec3& v) {
  if (u == v) return {u.x * u.x, u.y * u.y, u.z * u.z, u.x * u.y, u.x * u.z, u.y * u.z};
  return {u.x * v.x,
          u.y * v.y,
          u.z * v.z,
          0.5 * (u.x * v.y + v.x * u.y),
          0.5 * (u.x * v.z + v.x * u.z),
          0.5 * (u.y * v.z + v.y * u.z)};
}

SymTensor3 square(const SymTensor3& t) {
  return {t.xx * t.xx + t.xy * t.xy + t.xz * t.xz,
          t.xy * t.xy + t.yy * t.yy + t.yz * t.yz,
          t.xz * t.xz + t.yz * t.yz + t.zz * t.zz,
          t.xx * t.xy + t.xy * t.yy + t.xz * t.yz,
          t.xx * t.xz + t.xy * t.yz + t.xz * t.zz,
          t.xy * t.xz + t.yy * t.yz + t.yz * t.zz};
}

Mat3 matmul(const SymTensor3& a, const SymTensor3& b) { return a.to_matrix() * b.to_matrix(); }

InvariantSet invariants(const SymTensor3& t, const Vec3& g) {
  const SymTensor3 t2 = square(t);
  const Vec3 tg = t.apply(g);
  InvariantSet s;
  s.i1 = t.trace();
  s.i2 = t2.trace();
  // tr T^3 = sum_ij (T^2)_ij T_ji
  s.i3 = t2.xx * t.xx + t2.yy * t.yy + t2.zz * t.zz +
         2.0 * (t2.xy * t.xy + t2.xz * t.xz + t2.yz * t.yz);
  s.i4 = g.norm2();
  s.i5 = g.dot(tg);
  s.i6 = tg.norm2();  // g.T^2 g == |T g|^2 for symmetric T
  return s;
}

OrthogonalMatrix random_orthogonal(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  // Gram-Schmidt on the columns of a Gaussian matrix (QR with positive R
  // diagonal) gives Haar measure on O(3); det is +1 or -1 with equal odds.
  std::array<Vec3, 3> col;
  for (auto& c : col) c = {normal(rng), normal(rng), normal(rng)};

  auto sub = [](Vec3 a, const Vec3& b, double s) {
    return Vec3{a.x - s * b.x, a.y - s * b.y, a.z - s * b.z};
  };
  auto normalize = [](const Vec3& a) {
    const double n = std::sqrt(a.norm2());
    return Vec3{a.x / n, a.y / n, a.z / n};
  };
  for (int k = 0; k < 3; ++k) {
    // two passes of modified Gram-Schmidt keep orthogonality near eps
    for (int pass = 0; pass < 2; ++pass)
      for (int j = 0; j < k; ++j) col[k] = sub(col[k], col[j], col[k].dot(col[j]));
    col[k] = normalize(col[k]);
  }

  Mat3 q;
  for (int j = 0; j < 3; ++j) {
    q.a[0][j] = col[j].x;
    q.a[1][j] = col[j].y;
    q.a[2][j] = col[j].z;
  }
  return OrthogonalMatrix(q);
}

}  // namespace ifluid
