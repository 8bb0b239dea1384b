#pragma once

// Gelfand-Tsetlin basis of an SU(3) irrep h = (h1, h2, h3).
//
// A pattern is the triangle
//
//     h1  h2  h3
//       q1  q2
//         r
//
// with betweenness h1 >= q1 >= h2 >= q2 >= h3 and q1 >= r >= q2. In the
// atomic reading, r atoms sit in level 1, q1 + q2 - r in level 2 and
// N - q1 - q2 in level 3.

#include <algorithm>
#include <array>
#include <cstddef>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace su3qpt {

/// Thrown for any input that violates a documented precondition.
class InvalidInput : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class IrrepSpec {
public:
  IrrepSpec(int h1, int h2, int h3) : h_{h1, h2, h3} {
    if (h3 < 0 || h2 < h3 || h1 < h2) {
      std::ostringstream os;
      os << "invalid SU(3) irrep (" << h1 << "," << h2 << "," << h3
         << "): need h1 >= h2 >= h3 >= 0";
      throw InvalidInput(os.str());
    }
  }

  /// Parses "h1,h2,h3" (whitespace around the numbers is ignored).
  static IrrepSpec parse(std::string_view text) {
    std::array<int, 3> v{};
    std::string s(text);
    for (char &c : s)
      if (c == ',')
        c = ' ';
    std::istringstream is(s);
    for (int &x : v)
      if (!(is >> x))
        throw InvalidInput("irrep must be given as h1,h2,h3: '" +
                           std::string(text) + "'");
    std::string rest;
    if (is >> rest)
      throw InvalidInput("trailing characters in irrep '" + std::string(text) +
                         "'");
    return IrrepSpec(v[0], v[1], v[2]);
  }

  int h1() const { return h_[0]; }
  int h2() const { return h_[1]; }
  int h3() const { return h_[2]; }
  int atoms() const { return h_[0] + h_[1] + h_[2]; }
  int cooperation_number() const { return h_[0] - h_[2]; }

  /// (h1-h2+1)(h2-h3+1)(h1-h3+2)/2
  std::size_t dimension() const {
    const auto a = static_cast<std::size_t>(h_[0] - h_[1] + 1);
    const auto b = static_cast<std::size_t>(h_[1] - h_[2] + 1);
    const auto c = static_cast<std::size_t>(h_[0] - h_[2] + 2);
    return a * b * c / 2;
  }

  std::string to_string() const {
    return std::to_string(h_[0]) + "," + std::to_string(h_[1]) + "," +
           std::to_string(h_[2]);
  }

  friend bool operator==(const IrrepSpec &, const IrrepSpec &) = default;

private:
  std::array<int, 3> h_;
};

inline std::ostream &operator<<(std::ostream &os, const IrrepSpec &h) {
  return os << '(' << h.to_string() << ')';
}

inline int cooperation_number(const IrrepSpec &irrep) {
  return irrep.cooperation_number();
}

struct GTPattern {
  int h1, h2, h3;
  int q1, q2;
  int r;

  int n1() const { return r; }
  int n2() const { return q1 + q2 - r; }
  int n3() const { return h1 + h2 + h3 - q1 - q2; }
  std::array<int, 3> populations() const { return {n1(), n2(), n3()}; }

  /// Half population differences (n2-n1)/2 and (n3-n2)/2.
  double jz1() const { return 0.5 * (n2() - n1()); }
  double jz2() const { return 0.5 * (n3() - n2()); }

  bool satisfies_betweenness() const {
    return h1 >= q1 && q1 >= h2 && h2 >= q2 && q2 >= h3 && q1 >= r && r >= q2;
  }

  friend bool operator==(const GTPattern &, const GTPattern &) = default;
};

/// All patterns of the irrep, sorted by (q1, q2, r) descending. The first
/// entry is the lowest-weight pattern (q1, q2, r) = (h1, h2, h1).
inline std::vector<GTPattern> enumerate_patterns(const IrrepSpec &irrep) {
  std::vector<GTPattern> out;
  out.reserve(irrep.dimension());
  for (int q1 = irrep.h1(); q1 >= irrep.h2(); --q1)
    for (int q2 = irrep.h2(); q2 >= irrep.h3(); --q2)
      for (int r = q1; r >= q2; --r)
        out.push_back({irrep.h1(), irrep.h2(), irrep.h3(), q1, q2, r});
  return out;
}

/// Index lookup from (q1, q2, r) into the canonical ordering.
class PatternIndex {
public:
  explicit PatternIndex(const IrrepSpec &irrep)
      : h1_(irrep.h1()), h2_(irrep.h2()), h3_(irrep.h3()),
        span_q2_(irrep.h2() - irrep.h3() + 1), span_r_(irrep.h1() - irrep.h3() + 1),
        table_(static_cast<std::size_t>((irrep.h1() - irrep.h2() + 1) * span_q2_ *
                                        span_r_),
               -1) {
    int k = 0;
    for (const auto &p : enumerate_patterns(irrep))
      table_[slot(p.q1, p.q2, p.r)] = k++;
  }

  /// Returns -1 when (q1, q2, r) is not a pattern of the irrep.
  int find(int q1, int q2, int r) const {
    if (q1 > h1_ || q1 < h2_ || q2 > h2_ || q2 < h3_ || r > q1 || r < q2)
      return -1;
    return table_[slot(q1, q2, r)];
  }

private:
  std::size_t slot(int q1, int q2, int r) const {
    return static_cast<std::size_t>(((h1_ - q1) * span_q2_ + (h2_ - q2)) * span_r_ +
                                    (h1_ - r));
  }

  int h1_, h2_, h3_;
  int span_q2_, span_r_;
  std::vector<int> table_;
};

/// Index of the pattern with all atoms pushed to the lowest levels:
/// populations (h1, h2, h3).
inline std::size_t lowest_weight_index(const IrrepSpec &irrep) {
  const auto basis = enumerate_patterns(irrep);
  for (std::size_t k = 0; k < basis.size(); ++k)
    if (basis[k].q1 == irrep.h1() && basis[k].q2 == irrep.h2() &&
        basis[k].r == irrep.h1())
      return k;
  throw std::logic_error("lowest-weight pattern missing from enumeration");
}

/// Every irrep h1 >= h2 >= h3 >= 0 with h1 + h2 + h3 = atoms, ordered by
/// decreasing cooperation number (then decreasing h1).
inline std::vector<IrrepSpec> irreps_for_atoms(int atoms) {
  if (atoms < 0)
    throw InvalidInput("atom count must be non-negative");
  std::vector<IrrepSpec> out;
  for (int h1 = atoms; h1 >= 0; --h1)
    for (int h2 = std::min(h1, atoms - h1); h2 >= 0; --h2) {
      const int h3 = atoms - h1 - h2;
      if (h3 <= h2)
        out.emplace_back(h1, h2, h3);
    }
  std::stable_sort(out.begin(), out.end(), [](const IrrepSpec &a, const IrrepSpec &b) {
    return a.cooperation_number() > b.cooperation_number();
  });
  return out;
}

} // namespace su3qpt
