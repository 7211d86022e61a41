#include "doctest.h"
#include "mitf/rational.hpp"

#include <random>

using namespace mitf;

TEST_CASE("rational arithmetic is exact and normalized") {
  Rat a(1, 3), b(1, 6);
  CHECK(a + b == Rat(1, 2));
  CHECK(a - b == Rat(1, 6));
  CHECK(a * b == Rat(1, 18));
  CHECK(a / b == Rat(2));
  CHECK(Rat(2, 4) == Rat(1, 2));
  CHECK(Rat(-2, -4) == Rat(1, 2));
  CHECK(Rat(2, -4) == Rat(-1, 2));
  CHECK(Rat(7, 11) < Rat(8, 11));
  CHECK(Rat::pow2(-5) == Rat(1, 32));
  CHECK(Rat::pow2(5) == Rat(32));
}

TEST_CASE("floor handles negatives") {
  CHECK(Rat(7, 2).floor() == 3);
  CHECK(Rat(-7, 2).floor() == -4);
  CHECK(Rat(-4, 2).floor() == -2);
  CHECK(Rat(0).floor() == 0);
}

TEST_CASE("randomized field identities") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::int64_t> num(-1000, 1000);
  std::uniform_int_distribution<std::int64_t> den(1, 1000);
  for (int i = 0; i < 500; ++i) {
    Rat a(num(rng), den(rng)), b(num(rng), den(rng)), c(num(rng), den(rng));
    CHECK((a + b) * c == a * c + b * c);
    CHECK(a + b == b + a);
    CHECK((a - b) + b == a);
    if (!b.is_zero()) CHECK((a / b) * b == a);
  }
}

TEST_CASE("interval predicates") {
  RatIv i{Rat(0), Rat(1)};
  CHECK(i.dilate_center(Rat(3)).lo == Rat(-1));
  CHECK(i.dilate_center(Rat(3)).hi == Rat(2));
  CHECK(i.dilate_center(Rat(1)).lo == Rat(0));
  RatIv j{Rat(1), Rat(2)};
  CHECK(j.dilate_origin(Rat(2)).lo == Rat(2));
  CHECK(j.dilate_origin(Rat(2)).hi == Rat(4));
  RatIv neg{Rat(-2), Rat(-1)};
  CHECK(neg.dilate_origin(Rat(3)).lo == Rat(-6));
  CHECK(neg.dilate_origin(Rat(3)).hi == Rat(-3));
  CHECK(neg.dilate_origin(Rat(1)).lo == Rat(-2));
  CHECK(i.intersects(j));
  CHECK(!i.intersects(RatIv{Rat(3), Rat(4)}));
}
