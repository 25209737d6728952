#pragma once

#include <cstdint>
#include <numeric>
#include <optional>
#include <vector>

#include "formalis/error.hpp"

namespace formalis {

inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

inline std::uint64_t powmod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
  if (m == 1) return 0;
  std::uint64_t result = 1;
  base %= m;
  while (exp > 0) {
    if (exp & 1) result = mulmod(result, base, m);
    base = mulmod(base, base, m);
    exp >>= 1;
  }
  return result;
}

// Deterministic Miller-Rabin; the witness set is exact for all 64-bit inputs.
inline bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    if (n % p == 0) return n == p;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    std::uint64_t x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

inline void require_prime(std::uint64_t l) {
  if (!is_prime(l)) throw DomainError("l = " + std::to_string(l) + " is not prime");
}

inline std::uint64_t next_prime(std::uint64_t n) {
  while (!is_prime(n)) ++n;
  return n;
}

// Distinct prime factors in increasing order (trial division).
inline std::vector<std::uint64_t> prime_factors(std::uint64_t n) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t p = 2; p * p <= n; ++p) {
    if (n % p == 0) {
      out.push_back(p);
      while (n % p == 0) n /= p;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

// Order of q in (Z/l)^*, for l prime and q coprime to l.
inline std::uint64_t multiplicative_order(std::uint64_t q, std::uint64_t l) {
  require_prime(l);
  if (q % l == 0) throw DomainError("q is divisible by l; no multiplicative order");
  std::uint64_t order = l - 1;
  for (std::uint64_t p : prime_factors(l - 1)) {
    while (order % p == 0 && powmod(q, order / p, l) == 1) order /= p;
  }
  return order;
}

// Inverse of a modulo prime l (a not divisible by l).
inline std::uint64_t inverse_mod(std::uint64_t a, std::uint64_t l) { return powmod(a % l, l - 2, l); }

}  // namespace formalis
