#include <doctest.h>

#include "oracles.hpp"
#include "pinch/word.hpp"

using namespace pinch;

namespace {

Word W(const char* text) { return parse_word(text); }

}  // namespace

TEST_CASE("parse and format") {
  const Word w = W("a1 b^-1 a2^2 1");
  CHECK(w.size() == 4);
  CHECK(w.at(0) == Letter{2, 1});  // rightmost letter acts first
  CHECK(w.at(3) == Letter{1, 1});
  CHECK(format_word(w) == "a1 b^-1 a2 a2");
  CHECK(format_word(Word{}) == "1");
  CHECK(parse_word("a1*b*a1^-1") == W("a1 b a1^-1"));
  CHECK(format_word(parse_word("x2 b", Alphabet{"x", "b"}), Alphabet{"x", "b"}) == "x2 b");
  CHECK_THROWS_AS(parse_word("a0"), PreconditionError);
  CHECK_THROWS_AS(parse_word("q1"), PreconditionError);
  CHECK_THROWS_AS(parse_word("a1^"), PreconditionError);

  std::mt19937 rng(3);
  for (int t = 0; t < 200; ++t) {
    const Word r(oracle::random_letters(rng, 3, rng() % 12));
    CHECK(parse_word(format_word(r)) == r);
  }
}

TEST_CASE("free_reduce") {
  CHECK(free_reduce(W("b a1^-1 a1")) == W("b"));
  CHECK(free_reduce(W("b^-1 a2 b")) == W("b^-1 a2 b"));
  CHECK(free_reduce(W("a1 b b^-1 a1^-1")).empty());

  SUBCASE("agrees with the scan oracle on every word of length <= 6, rank 2") {
    for (std::size_t n = 0; n <= 6; ++n) {
      oracle::for_each_word(2, n, [](const oracle::Letters& l) {
        const Word r = free_reduce(Word(l));
        REQUIRE(oracle::letters_of(r) == oracle::reduce(l));
      });
    }
  }
  SUBCASE("idempotent and length-nonincreasing") {
    std::mt19937 rng(5);
    for (int t = 0; t < 2000; ++t) {
      const Word w(oracle::random_letters(rng, 2, rng() % 30));
      const Word r = free_reduce(w);
      CHECK(is_reduced(r));
      CHECK(free_reduce(r) == r);
      CHECK(r.size() <= w.size());
    }
  }
}

TEST_CASE("cyclic_reduce") {
  const auto cr = cyclic_reduce(W("b^-1 a1 b"));
  CHECK(cr.conjugator == W("b^-1"));
  CHECK(cr.core == W("a1"));
  const auto id = cyclic_reduce(W("a1 b a1^-1 b^-1"));
  CHECK(id.conjugator.empty());
  CHECK(id.core == W("a1 b a1^-1 b^-1"));

  std::mt19937 rng(9);
  for (int t = 0; t < 1000; ++t) {
    // v r v^-1 with r cyclically reduced
    oracle::Letters r;
    do {
      r = oracle::random_reduced(rng, 2, 1 + rng() % 8);
    } while (!is_cyclically_reduced(Word(r)));
    const auto v = oracle::random_reduced(rng, 2, rng() % 6);
    const Word w(oracle::product(oracle::product(v, r), oracle::inverse(v)));
    const auto c = cyclic_reduce(w);
    CHECK(c.core.size() == r.size());
    CHECK(is_cyclically_reduced(c.core));
    CHECK(free_reduce(c.conjugator * c.core * c.conjugator.inverse()) == free_reduce(w));
    CHECK(oracle::is_rotation(oracle::letters_of(c.core), oracle::cyclic_core(oracle::letters_of(w))));
  }
}

TEST_CASE("cyclic core is invariant under rotation") {
  std::mt19937 rng(10);
  for (int t = 0; t < 500; ++t) {
    const Word w(oracle::random_reduced(rng, 2, 1 + rng() % 10));
    const auto core = oracle::letters_of(cyclic_reduce(w).core);
    for (std::size_t k = 0; k < w.size(); ++k) {
      CHECK(oracle::is_rotation(oracle::letters_of(cyclic_reduce(w.rotated(k)).core), core));
    }
  }
}

TEST_CASE("exponent sums") {
  const Word c = W("a1 b^-1 a2 b^-1 a3 a3 b b");
  CHECK(exponent_sums(c, kBeta) == ExponentReport{0, 2, -2});
  CHECK(exponent_sums(W("a1 a2 a1^-1"), kBeta).positive == 0);
  CHECK(exponent_sums(W("b^3 a1 b^-3"), kBeta) == ExponentReport{0, 3, -3});

  std::mt19937 rng(11);
  for (int t = 0; t < 1000; ++t) {
    const Word u(oracle::random_letters(rng, 2, rng() % 20));
    const Word v(oracle::random_letters(rng, 2, rng() % 20));
    for (int g = 0; g <= 2; ++g) {
      const auto e = exponent_sums(u, g);
      CHECK(e.total == e.positive + e.negative);
      CHECK(e.positive >= 0);
      CHECK(e.negative <= 0);
      CHECK(exponent_sums(free_reduce(u), g).total == e.total);
      CHECK(exponent_sums(u * v, g).total == e.total + exponent_sums(v, g).total);
    }
  }
}

TEST_CASE("is_power_of") {
  const Word c = W("a1 b a1^-1 b^-1");
  CHECK(is_power_of(c * c, c) == 2);
  CHECK(is_power_of(Word{}, c) == 0);
  CHECK(is_power_of(c.inverse(), c) == -1);
  CHECK_FALSE(is_power_of(W("a1 b"), W("b a1")).has_value());

  // oracle: compare with c^k for every |k| <= |w| / |c| + 1
  std::mt19937 rng(12);
  for (int t = 0; t < 500; ++t) {
    const Word base(oracle::random_reduced(rng, 1, 1 + rng() % 3));
    const Word w = rng() % 2 ? power(base, static_cast<int>(rng() % 5) - 2)
                             : Word(oracle::random_letters(rng, 1, rng() % 8));
    std::optional<std::int64_t> expect;
    const auto bound = static_cast<std::int64_t>(w.size() / base.size()) + 1;
    for (std::int64_t k = -bound; k <= bound && !expect; ++k) {
      if (free_reduce(w) == free_reduce(power(base, k))) expect = k;
    }
    CHECK(is_power_of(w, free_reduce(base)) == expect);
  }
}

TEST_CASE("cyclic_conjugacy_check") {
  CHECK(cyclic_conjugacy_check(W("a1 b"), W("b a1")));
  CHECK_FALSE(cyclic_conjugacy_check(W("a1"), W("a1^-1")));

  std::mt19937 rng(13);
  for (int t = 0; t < 1000; ++t) {
    const auto u = oracle::random_letters(rng, 2, rng() % 12);
    const auto g = oracle::random_letters(rng, 2, rng() % 6);
    const auto v = oracle::product(oracle::product(g, u), oracle::inverse(g));
    CHECK(cyclic_conjugacy_check(Word(u), Word(v)));
    CHECK(cyclic_conjugacy_check(Word(v), Word(u)));
    const auto x = oracle::random_letters(rng, 2, rng() % 12);
    CHECK(cyclic_conjugacy_check(Word(u), Word(x)) == oracle::conjugate(u, x));
    CHECK(cyclic_conjugacy_check(Word(x), Word(u)) == cyclic_conjugacy_check(Word(u), Word(x)));
  }
}

TEST_CASE("apply_moves") {
  const Word w = W("a1 b a2^-1");
  CHECK(apply_moves({}, w, 3) == w);
  const std::vector<NielsenMove> inv{NielsenMove::invert(1)};
  CHECK(apply_moves(inv, W("a1"), 2) == W("a1^-1"));
  const std::vector<NielsenMove> bad{NielsenMove::swap(0, 4)};
  CHECK_THROWS_AS(apply_moves(bad, w, 3), PreconditionError);

  std::mt19937 rng(14);
  for (int t = 0; t < 300; ++t) {
    std::vector<NielsenMove> moves;
    for (int k = 0; k < 4; ++k) {
      const int i = static_cast<int>(rng() % 3);
      const int j = (i + 1 + static_cast<int>(rng() % 2)) % 3;
      switch (rng() % 3) {
        case 0: moves.push_back(NielsenMove::invert(i)); break;
        case 1: moves.push_back(NielsenMove::swap(i, j)); break;
        default:
          moves.push_back(NielsenMove::multiply(i, j, rng() % 2 ? NielsenMove::Side::Left : NielsenMove::Side::Right,
                                                rng() % 2 ? 1 : -1));
      }
    }
    const Word u(oracle::random_letters(rng, 2, rng() % 10));
    const Word v(oracle::random_letters(rng, 2, rng() % 10));
    CHECK(apply_moves(moves, u * v, 3) == free_reduce(apply_moves(moves, u, 3) * apply_moves(moves, v, 3)));
    const auto m = abelianized_matrix(moves, 3);
    CHECK(abelianize(apply_moves(moves, u, 3), 3) == multiply(m, abelianize(u, 3)));
    CHECK(std::abs(determinant(m)) == 1);
  }
}

TEST_CASE("zero_sum_automorphism") {
  SUBCASE("sums (2, 3)") {
    const auto m = bezout_matrix(2, 3);
    const IntMatrix expect{{3, -2}, {-1, 1}};
    CHECK(m == expect);
    CHECK(determinant(m) == 1);
    const std::vector<std::int64_t> v{2, 3};
    CHECK(multiply(m, v) == std::vector<std::int64_t>{0, 1});

    const Word c = W("a1^3 b^2");
    const auto z = zero_sum_automorphism(abelianize(c, 2), c);
    CHECK(abelianize(z.image, 2)[static_cast<std::size_t>(z.witness)] == 0);
    CHECK(std::abs(determinant(z.matrix)) == 1);
  }
  SUBCASE("sums (1, k)") {
    for (int k = -4; k <= 4; ++k) {
      if (k == 0) continue;
      const Word c = W("b") * power(W("a1"), k);
      const auto z = zero_sum_automorphism(abelianize(c, 2), c);
      // multiply moves carry exponent +-1, plus a conjugation if a1 would vanish
      CHECK(z.moves.size() <= static_cast<std::size_t>(std::abs(k)) + 2);
      if (std::abs(k) > 1) CHECK(z.witness == 1);
      CHECK(abelianize(z.image, 2)[static_cast<std::size_t>(z.witness)] == 0);
    }
  }
  SUBCASE("an occurring generator already sums to zero") {
    const Word c = W("a1 b a1^-1 a2");
    const auto z = zero_sum_automorphism(abelianize(c, 3), c);
    CHECK(z.moves.empty());
    CHECK(z.image == c);
    CHECK(z.witness == 1);
  }
  SUBCASE("rank 1 power has no solution") {
    const Word c = W("b^3");
    CHECK_THROWS_AS(zero_sum_automorphism(abelianize(c, 1), c), PreconditionError);
  }
  SUBCASE("single occurring generator in a larger basis") {
    const Word c = W("a1^3");
    const auto z = zero_sum_automorphism(abelianize(c, 2), c);
    CHECK(abelianize(z.image, 2)[static_cast<std::size_t>(z.witness)] == 0);
  }
  SUBCASE("random sums") {
    std::mt19937 rng(15);
    std::uniform_int_distribution<int> entry(-9, 9);
    for (int t = 0; t < 300; ++t) {
      const int n = 2 + static_cast<int>(rng() % 3);
      Word c;
      for (int g = 0; g < n; ++g) {
        int e = 0;
        while (e == 0) e = entry(rng);
        c = power(Word::letter(g), e) * c;
      }
      const auto sums = abelianize(c, n);
      const auto z = zero_sum_automorphism(sums, c);
      const auto image_sums = abelianize(z.image, n);
      CHECK(image_sums[static_cast<std::size_t>(z.witness)] == 0);
      CHECK(multiply(z.matrix, sums) == image_sums);
      CHECK(std::abs(determinant(z.matrix)) == 1);
      bool occurs = false;
      for (const auto& l : z.image.letters()) occurs = occurs || l.gen == z.witness;
      CHECK(occurs);
    }
  }
}
