#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace kitres {

// Bivariate polynomial truncated at a fixed total degree. Coefficients are
// stored densely: c(i,j) multiplies x^i y^j, kept only for i+j <= order.
class Poly2 {
public:
  explicit Poly2(int order) : order_(order), c_(Eigen::MatrixXd::Zero(order + 1, order + 1)) {
    if (order < 0) throw std::invalid_argument("Poly2: negative truncation order");
  }

  static Poly2 constant(double v, int order) {
    Poly2 p(order);
    p.c_(0, 0) = v;
    return p;
  }
  static Poly2 var_x(int order) {
    Poly2 p(order);
    if (order >= 1) p.c_(1, 0) = 1.0;
    return p;
  }
  static Poly2 var_y(int order) {
    Poly2 p(order);
    if (order >= 1) p.c_(0, 1) = 1.0;
    return p;
  }

  int order() const { return order_; }
  double coeff(int i, int j) const {
    if (i < 0 || j < 0 || i + j > order_) return 0.0;
    return c_(i, j);
  }
  void set_coeff(int i, int j, double v) {
    if (i < 0 || j < 0 || i + j > order_) throw std::invalid_argument("Poly2: monomial beyond truncation order");
    c_(i, j) = v;
  }

  Poly2& operator+=(const Poly2& o) {
    check(o);
    c_ += o.c_;
    return *this;
  }
  Poly2& operator-=(const Poly2& o) {
    check(o);
    c_ -= o.c_;
    return *this;
  }
  Poly2& operator*=(double s) {
    c_ *= s;
    return *this;
  }
  friend Poly2 operator+(Poly2 a, const Poly2& b) { return a += b; }
  friend Poly2 operator-(Poly2 a, const Poly2& b) { return a -= b; }
  friend Poly2 operator*(Poly2 a, double s) { return a *= s; }
  friend Poly2 operator*(double s, Poly2 a) { return a *= s; }

  // Product, truncated at the common order.
  friend Poly2 operator*(const Poly2& a, const Poly2& b) {
    a.check(b);
    Poly2 r(a.order_);
    for (int i = 0; i <= a.order_; ++i)
      for (int j = 0; i + j <= a.order_; ++j) {
        const double ca = a.c_(i, j);
        if (ca == 0.0) continue;
        for (int k = 0; i + j + k <= a.order_; ++k)
          for (int l = 0; i + j + k + l <= a.order_; ++l) r.c_(i + k, j + l) += ca * b.c_(k, l);
      }
    return r;
  }

  Poly2 pow(int n) const {
    Poly2 r = constant(1.0, order_);
    for (int i = 0; i < n; ++i) r = r * (*this);
    return r;
  }

  // Substitute polynomials for x and y.
  Poly2 compose(const Poly2& px, const Poly2& py) const {
    Poly2 r(order_);
    // Horner over powers, cached
    std::vector<Poly2> xp, yp;
    xp.reserve(order_ + 1);
    yp.reserve(order_ + 1);
    xp.push_back(constant(1.0, order_));
    yp.push_back(constant(1.0, order_));
    for (int k = 1; k <= order_; ++k) {
      xp.push_back(xp.back() * px);
      yp.push_back(yp.back() * py);
    }
    for (int i = 0; i <= order_; ++i)
      for (int j = 0; i + j <= order_; ++j)
        if (c_(i, j) != 0.0) r += c_(i, j) * (xp[i] * yp[j]);
    return r;
  }

  double evaluate(double x, double y) const {
    double r = 0.0;
    for (int i = order_; i >= 0; --i) {
      double row = 0.0;
      for (int j = order_ - i; j >= 0; --j) row = row * y + c_(i, j);
      r += row * std::pow(x, i);
    }
    return r;
  }

  // Largest |coeff| * sx^i * sy^j over monomials with total degree in [dmin, dmax];
  // used for scale-aware residual checks.
  double scaled_max_abs(double sx, double sy, int dmin = 0, int dmax = -1) const {
    if (dmax < 0) dmax = order_;
    double m = 0.0;
    for (int i = 0; i <= order_; ++i)
      for (int j = 0; i + j <= order_; ++j) {
        const int d = i + j;
        if (d < dmin || d > dmax) continue;
        m = std::max(m, std::abs(c_(i, j)) * std::pow(sx, i) * std::pow(sy, j));
      }
    return m;
  }

private:
  void check(const Poly2& o) const {
    if (o.order_ != order_) throw std::invalid_argument("Poly2: order mismatch");
  }
  int order_;
  Eigen::MatrixXd c_;
};

}  // namespace kitres
