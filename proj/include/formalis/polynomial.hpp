#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

namespace formalis {

// Polynomial in q with integer coefficients, lowest degree first, no trailing zeros.
class Polynomial {
 public:
  Polynomial() = default;
  Polynomial(std::initializer_list<std::int64_t> c) : c_(c) { trim(); }
  explicit Polynomial(std::vector<std::int64_t> c) : c_(std::move(c)) { trim(); }

  static Polynomial constant(std::int64_t a) { return Polynomial({a}); }
  static Polynomial monomial(std::int64_t a, std::size_t degree) {
    std::vector<std::int64_t> c(degree + 1, 0);
    c[degree] = a;
    return Polynomial(std::move(c));
  }

  bool is_zero() const { return c_.empty(); }
  // -1 for the zero polynomial.
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  std::int64_t coefficient(std::size_t k) const { return k < c_.size() ? c_[k] : 0; }
  const std::vector<std::int64_t>& coefficients() const { return c_; }

  Polynomial shifted(std::size_t k) const {
    if (is_zero()) return {};
    std::vector<std::int64_t> c(k, 0);
    c.insert(c.end(), c_.begin(), c_.end());
    return Polynomial(std::move(c));
  }

  Polynomial& operator+=(const Polynomial& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), 0);
    for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] += o.c_[k];
    trim();
    return *this;
  }
  Polynomial& operator-=(const Polynomial& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), 0);
    for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] -= o.c_[k];
    trim();
    return *this;
  }
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<std::int64_t> c(a.c_.size() + b.c_.size() - 1, 0);
    for (std::size_t i = 0; i < a.c_.size(); ++i)
      for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
    return Polynomial(std::move(c));
  }
  friend Polynomial operator*(std::int64_t s, const Polynomial& a) { return Polynomial::constant(s) * a; }
  friend bool operator==(const Polynomial&, const Polynomial&) = default;

  // "0", "1+q", "1+2q+q^2", "1-q^3".
  std::string to_string() const {
    if (is_zero()) return "0";
    std::string out;
    for (std::size_t k = 0; k < c_.size(); ++k) {
      const std::int64_t a = c_[k];
      if (a == 0) continue;
      const std::int64_t mag = a < 0 ? -a : a;
      if (a < 0)
        out += "-";
      else if (!out.empty())
        out += "+";
      if (k == 0 || mag != 1) out += std::to_string(mag);
      if (k >= 1) out += "q";
      if (k >= 2) out += "^" + std::to_string(k);
    }
    return out;
  }

 private:
  void trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
  }
  std::vector<std::int64_t> c_;
};

}  // namespace formalis
