#include <gtest/gtest.h>

#include <map>
#include <set>

#include "su3qpt/gt_basis.hpp"

using namespace su3qpt;

TEST(IrrepSpec, RejectsUnorderedRows) {
  EXPECT_THROW(IrrepSpec(1, 2, 0), InvalidInput);
  EXPECT_THROW(IrrepSpec(2, 1, 2), InvalidInput);
  EXPECT_THROW(IrrepSpec(1, 0, -1), InvalidInput);
  EXPECT_NO_THROW(IrrepSpec(0, 0, 0));
}

TEST(IrrepSpec, ParsesCommaList) {
  EXPECT_EQ(IrrepSpec::parse("3,1,0"), IrrepSpec(3, 1, 0));
  EXPECT_EQ(IrrepSpec::parse(" 2, 2 ,0"), IrrepSpec(2, 2, 0));
  EXPECT_THROW(IrrepSpec::parse("3,1"), InvalidInput);
  EXPECT_THROW(IrrepSpec::parse("3,1,0,1"), InvalidInput);
  EXPECT_THROW(IrrepSpec::parse("0,1,0"), InvalidInput);
}

TEST(Enumerate, KnownCounts) {
  EXPECT_EQ(enumerate_patterns(IrrepSpec(1, 0, 0)).size(), 3u);
  EXPECT_EQ(enumerate_patterns(IrrepSpec(4, 0, 0)).size(), 15u);
  EXPECT_EQ(enumerate_patterns(IrrepSpec(2, 1, 1)).size(), 3u);
}

// Brute-force enumeration over a bounding box, independent of the nested loops.
static std::set<std::array<int, 3>> brute_force(const IrrepSpec &h) {
  std::set<std::array<int, 3>> out;
  for (int q1 = 0; q1 <= h.h1(); ++q1)
    for (int q2 = 0; q2 <= h.h1(); ++q2)
      for (int r = 0; r <= h.h1(); ++r) {
        GTPattern p{h.h1(), h.h2(), h.h3(), q1, q2, r};
        if (p.satisfies_betweenness())
          out.insert({q1, q2, r});
      }
  return out;
}

TEST(Enumerate, MatchesBruteForceAndDimensionFormula) {
  for (int n = 0; n <= 7; ++n)
    for (const auto &h : irreps_for_atoms(n)) {
      const auto basis = enumerate_patterns(h);
      EXPECT_EQ(basis.size(), h.dimension()) << h;
      std::set<std::array<int, 3>> seen;
      for (const auto &p : basis) {
        EXPECT_TRUE(p.satisfies_betweenness());
        const auto pop = p.populations();
        EXPECT_GE(pop[0], 0);
        EXPECT_GE(pop[1], 0);
        EXPECT_GE(pop[2], 0);
        EXPECT_EQ(pop[0] + pop[1] + pop[2], n);
        seen.insert({p.q1, p.q2, p.r});
      }
      EXPECT_EQ(seen, brute_force(h)) << h;
    }
}

TEST(Enumerate, CanonicalOrderIsDescending) {
  const auto basis = enumerate_patterns(IrrepSpec(3, 1, 0));
  for (std::size_t k = 1; k < basis.size(); ++k) {
    const auto a = std::array{basis[k - 1].q1, basis[k - 1].q2, basis[k - 1].r};
    const auto b = std::array{basis[k].q1, basis[k].q2, basis[k].r};
    EXPECT_GT(a, b);
  }
}

TEST(PatternIndex, RoundTripsCanonicalOrder) {
  const IrrepSpec h(4, 2, 1);
  const PatternIndex index(h);
  const auto basis = enumerate_patterns(h);
  for (std::size_t k = 0; k < basis.size(); ++k)
    EXPECT_EQ(index.find(basis[k].q1, basis[k].q2, basis[k].r), static_cast<int>(k));
  EXPECT_EQ(index.find(4, 2, 1), -1); // r below q2
  EXPECT_EQ(index.find(5, 2, 2), -1);
}

TEST(CooperationNumber, Values) {
  EXPECT_EQ(cooperation_number(IrrepSpec(4, 0, 0)), 4);
  EXPECT_EQ(cooperation_number(IrrepSpec(3, 1, 0)), 3);
  EXPECT_EQ(cooperation_number(IrrepSpec(2, 2, 0)), 2);
  EXPECT_EQ(cooperation_number(IrrepSpec(2, 1, 1)), 1);
  for (int k = 0; k < 4; ++k)
    EXPECT_EQ(cooperation_number(IrrepSpec(k, k, k)), 0);
}

TEST(LowestWeight, PopulationsAndWeights) {
  {
    const IrrepSpec h(4, 0, 0);
    const auto p = enumerate_patterns(h)[lowest_weight_index(h)];
    EXPECT_EQ((std::array{p.q1, p.q2, p.r}), (std::array{4, 0, 4}));
    EXPECT_EQ(p.populations(), (std::array{4, 0, 0}));
  }
  {
    const IrrepSpec h(3, 1, 0);
    const auto p = enumerate_patterns(h)[lowest_weight_index(h)];
    EXPECT_EQ(p.populations(), (std::array{3, 1, 0}));
    EXPECT_DOUBLE_EQ(p.jz1(), -1.0);
    EXPECT_DOUBLE_EQ(p.jz2(), -0.5);
  }
  {
    const IrrepSpec h(2, 1, 1);
    const auto p = enumerate_patterns(h)[lowest_weight_index(h)];
    EXPECT_DOUBLE_EQ(p.jz1(), -0.5);
    EXPECT_DOUBLE_EQ(p.jz2(), 0.0);
  }
  for (int n = 1; n <= 6; ++n)
    for (const auto &h : irreps_for_atoms(n))
      EXPECT_EQ(lowest_weight_index(h), 0u);
}

TEST(IrrepsForAtoms, FourAtoms) {
  const auto v = irreps_for_atoms(4);
  ASSERT_EQ(v.size(), 4u);
  EXPECT_EQ(v[0], IrrepSpec(4, 0, 0));
  EXPECT_EQ(v[1], IrrepSpec(3, 1, 0));
  EXPECT_EQ(v[2], IrrepSpec(2, 2, 0));
  EXPECT_EQ(v[3], IrrepSpec(2, 1, 1));
}
