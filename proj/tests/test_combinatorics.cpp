#include <doctest.h>

#include "carrots/combinatorics.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

using namespace carrots;

namespace {

// Orbit point of rotation number p/q written down symbol by symbol:
// digit j is 1 iff frac(j p / q) lies in [1 - p/q, 1).
Angle rotation_orbit_point(int p, int q) {
  std::string word;
  for (int j = 0; j < q; ++j) word.push_back((j * p) % q >= q - p ? '1' : '0');
  return BinaryItinerary{"", word}.value();
}

// Independent wake oracle: the two cyclically adjacent orbit points that
// are closest together.
std::pair<Angle, Angle> wake_oracle(int p, int q) {
  std::vector<Angle> orbit = forward_orbit(rotation_orbit_point(p, q));
  std::sort(orbit.begin(), orbit.end());
  std::pair<Angle, Angle> best{orbit[0], orbit[1]};
  Rational gap = 2;
  for (std::size_t j = 0; j + 1 < orbit.size(); ++j) {
    Rational d = orbit[j + 1].rational() - orbit[j].rational();
    if (d < gap) {
      gap = d;
      best = {orbit[j], orbit[j + 1]};
    }
  }
  return best;
}

Rational pow2_inv(int n) { return Rational(1, BigInt(1) << n); }

}  // namespace

TEST_CASE("doubling is exact") {
  CHECK(doubling(Angle(0, 1)) == Angle(0, 1));
  CHECK(doubling(Angle(1, 3)) == Angle(2, 3));
  CHECK(doubling(Angle(5, 12)) == Angle(5, 6));
  CHECK(doubling(Angle(1, 2)) == Angle(0, 1));
  CHECK(Angle(7, 3) == Angle(1, 3));
  CHECK(Angle(-1, 3) == Angle(2, 3));
  CHECK_THROWS_AS(Angle(1, 0), CombinatoricsError);
}

TEST_CASE("itinerary examples") {
  CHECK(itinerary(Angle(1, 3)).str() == ".(01)");
  CHECK(itinerary(Angle(2, 7)).str() == ".(010)");
  CHECK(itinerary(Angle(3, 4)).str() == ".11(0)");
  CHECK(itinerary(Angle(0, 1)).str() == ".(0)");
  CHECK(itinerary(Angle(5, 12)).str() == ".01(10)");
}

TEST_CASE("itinerary round trip") {
  for (long long den = 1; den <= 400; ++den)
    for (long long num = 0; num < den; ++num) {
      Angle a(num, den);
      BinaryItinerary it = itinerary(a);
      CHECK(it.value() == a);
      CHECK(it.represents(a));
      CHECK(it.normalized() == it);
    }
  std::mt19937_64 rng(7);
  for (int i = 0; i < 300; ++i) {
    long long den = 1 + static_cast<long long>(rng() % 1000000);
    Angle a(static_cast<long long>(rng() % static_cast<unsigned long long>(den)), den);
    CHECK(itinerary(a).value() == a);
  }
}

TEST_CASE("itinerary normalization and order") {
  BinaryItinerary loose{"0101", "0101"};
  CHECK(loose.normalized().str() == ".(01)");
  CHECK(loose.normalized().value() == loose.value());
  CHECK(BinaryItinerary::parse(".1(0)").value() == Angle(1, 2));
  CHECK(BinaryItinerary::parse("011").value() == Angle(3, 8));
  CHECK_THROWS_AS(BinaryItinerary::parse(".1(2)"), CombinatoricsError);
  CHECK(lex_compare(BinaryItinerary::parse(".(01)"), BinaryItinerary::parse(".(0)")) > 0);
  CHECK(lex_compare(BinaryItinerary::parse(".0(1)"), BinaryItinerary::parse(".1(0)")) < 0);
  CHECK(lex_compare(BinaryItinerary::parse(".(01)"), BinaryItinerary::parse(".0101(01)")) == 0);
  // .(1) evaluates to 1, which is 0 modulo 1
  CHECK(BinaryItinerary::parse(".(1)").exact_value() == 1);
  CHECK(BinaryItinerary::parse(".(1)").represents(Angle(0, 1)));
}

TEST_CASE("dyadic representations") {
  auto [a, b] = dyadic_representations(1, 1);
  CHECK(a.str() == ".1(0)");
  CHECK(b.str() == ".0(1)");
  auto [c, d] = dyadic_representations(3, 2);
  CHECK(c.str() == ".11(0)");
  CHECK(d.str() == ".10(1)");
  auto [e, f] = dyadic_representations(1, 2);
  CHECK(e.str() == ".01(0)");
  CHECK(f.str() == ".00(1)");
  CHECK_THROWS_AS(dyadic_representations(2, 3), CombinatoricsError);
  CHECK_THROWS_AS(dyadic_representations(9, 3), CombinatoricsError);
  CHECK_THROWS_AS(dyadic_representations(-1, 3), CombinatoricsError);

  for (int n = 1; n <= 16; ++n)
    for (long long p = 1; p < (1LL << n); p += 2) {
      auto [hi, lo] = dyadic_representations(p, n);
      Rational expected(p, BigInt(1) << n);
      REQUIRE(hi.exact_value() == expected);
      REQUIRE(lo.exact_value() == expected);
    }
}

TEST_CASE("wake angle examples") {
  CHECK(wake_angles(1, 2) == std::pair{Angle(1, 3), Angle(2, 3)});
  CHECK(wake_angles(1, 3) == std::pair{Angle(1, 7), Angle(2, 7)});
  CHECK(wake_angles(2, 5) == std::pair{Angle(9, 31), Angle(10, 31)});
  CHECK_THROWS_AS(wake_angles(2, 4), CombinatoricsError);
  CHECK_THROWS_AS(wake_angles(0, 3), CombinatoricsError);
}

TEST_CASE("wake angles agree with the symbolic oracle for q <= 12") {
  for (int q = 2; q <= 12; ++q)
    for (int p = 1; p < q; ++p) {
      if (std::gcd(p, q) != 1) continue;
      CAPTURE(p);
      CAPTURE(q);
      auto [lo, hi] = wake_angles(p, q);
      CHECK(std::pair{lo, hi} == wake_oracle(p, q));
      CHECK(orbit_shape(lo).preperiod == 0);
      CHECK(orbit_shape(lo).period == static_cast<std::size_t>(q));
      CHECK(orbit_shape(hi).period == static_cast<std::size_t>(q));
      CHECK(hi.rational() - lo.rational() == Rational(1, (BigInt(1) << q) - 1));
      CHECK(rotation_number(lo) == std::pair{p, q});
      CHECK(rotation_number(hi) == std::pair{p, q});
      CHECK(orbit_avoids_interval(lo, hi));
    }
}

TEST_CASE("rotation numbers") {
  CHECK(rotation_number(Angle(1, 3)) == std::pair{1, 2});
  CHECK(rotation_number(Angle(1, 7)) == std::pair{1, 3});
  CHECK(rotation_number(Angle(9, 31)) == std::pair{2, 5});
  CHECK(rotation_number(Angle(0, 1)) == std::pair{0, 1});
  CHECK_FALSE(rotation_number(Angle(1, 4)).has_value());  // not periodic
  // {1,2,4,8,16}/31 ... 3/31 has orbit {3,6,12,24,17}: not a rotation
  CHECK_FALSE(rotation_number(Angle(3, 31)).has_value());
  // Under the second iterate, the period-4 satellite angles of the basilica rotate by 1/2.
  CHECK(rotation_number(Angle(6, 15), 2) == std::pair{1, 2});
}

TEST_CASE("tuning examples") {
  TuningWords basilica("01", "10");
  CHECK(tune(basilica, BinaryItinerary::parse(".(0)")) == Angle(1, 3));
  CHECK(tune(basilica, BinaryItinerary::parse(".1(0)")) == Angle(7, 12));
  CHECK(tune(basilica, BinaryItinerary::parse(".0(1)")) == Angle(5, 12));
  CHECK(decoration_wake_angles(basilica, 1, 1) == std::pair{Angle(7, 12), Angle(5, 12)});
  CHECK(decoration_wake_angles(basilica, 1, 2) == std::pair{Angle(19, 48), Angle(17, 48)});
  CHECK(decoration_wake_angles(TuningWords::identity(), 1, 1) == std::pair{Angle(1, 2), Angle(1, 2)});
  CHECK_THROWS_AS(TuningWords("01", "01"), CombinatoricsError);
  CHECK_THROWS_AS(TuningWords("01", "1"), CombinatoricsError);
  CHECK_THROWS_AS(TuningWords("0a", "10"), CombinatoricsError);
}

TEST_CASE("tuning preserves the order of addresses") {
  std::mt19937_64 rng(11);
  auto word = [&](std::size_t len) {
    std::string w;
    for (std::size_t i = 0; i < len; ++i) w.push_back(rng() & 1 ? '1' : '0');
    return w;
  };
  std::vector<TuningWords> families = {TuningWords::identity(), TuningWords("01", "10"),
                                       TuningWords("001", "010"), TuningWords("0110", "1001")};
  for (const TuningWords& words : families)
    for (int i = 0; i < 500; ++i) {
      BinaryItinerary a{word(rng() % 5), word(1 + rng() % 4)};
      BinaryItinerary b{word(rng() % 5), word(1 + rng() % 4)};
      auto order = lex_compare(a, b);
      Rational ta = tune_exact(words, a), tb = tune_exact(words, b);
      // the identity words glue .x0(1) and .x1(0) together, so only weak order there
      const bool strict = words.period() > 1;
      if (order < 0) CHECK((strict ? ta < tb : ta <= tb));
      if (order > 0) CHECK((strict ? ta > tb : ta >= tb));
      if (order == 0) CHECK(ta == tb);
    }
}

TEST_CASE("smallest denominator dyadic") {
  auto d = smallest_denominator_dyadic(Rational(1, 3), Rational(2, 3));
  CHECK(d.p == 1);
  CHECK(d.m == 1);
  d = smallest_denominator_dyadic(Rational(1, 7), Rational(2, 7));
  CHECK(d.p == 1);
  CHECK(d.m == 2);
  d = smallest_denominator_dyadic(Rational(5, 12), Rational(7, 12));
  CHECK(d.value() == Rational(1, 2));
  d = smallest_denominator_dyadic(Rational(0), Rational(1));
  CHECK(d.m == 0);
  CHECK(d.p == 0);  // tie between 0 and 1 goes to the smaller numerator
  d = smallest_denominator_dyadic(Rational(9, 31), Rational(10, 31));
  CHECK(d.m == 4);
  CHECK(d.p == 5);

  // brute force over all intervals with small denominators
  for (int den = 2; den <= 40; ++den)
    for (int a = 0; a < den; ++a)
      for (int b = a + 1; b <= den; ++b) {
        Rational lo(a, den), hi(b, den);
        auto got = smallest_denominator_dyadic(lo, hi);
        REQUIRE(got.value() >= lo);
        REQUIRE(got.value() <= hi);
        for (int m = 0; m < got.m; ++m)
          for (int p = 0; p <= (1 << m); ++p) REQUIRE_FALSE((Rational(p, 1 << m) >= lo && Rational(p, 1 << m) <= hi));
      }
}

TEST_CASE("component descriptors") {
  ComponentDescriptor h0 = ComponentDescriptor::main_cardioid();
  CHECK(h0.period == 1);
  CHECK(h0.theta_minus == 0);
  CHECK(h0.theta_plus == 1);
  CHECK(h0.m_prime == 1);

  ComponentDescriptor b = ComponentDescriptor::basilica();
  CHECK(b.period == 2);
  CHECK(b.words.word0 == "01");
  CHECK(b.words.word1 == "10");
  CHECK(b.theta_minus == Rational(1, 3));
  CHECK(b.theta_plus == Rational(2, 3));
  CHECK(b.m_prime == 1);

  ComponentDescriptor rabbit = ComponentDescriptor::satellite(h0, 1, 3);
  CHECK(rabbit.theta_minus == Rational(1, 7));
  CHECK(rabbit.theta_plus == Rational(2, 7));
  CHECK(rabbit.m_prime == 2);

  ComponentDescriptor b2 = ComponentDescriptor::satellite(b, 1, 2);
  CHECK(b2.period == 4);
  CHECK(b2.theta_minus == Rational(6, 15));
  CHECK(b2.theta_plus == Rational(9, 15));
}

TEST_CASE("wake proposition on the main cardioid and the basilica") {
  auto r = check_wake_proposition(ComponentDescriptor::main_cardioid(), 1, 2);
  CHECK(r.gap == Rational(1, 3));
  CHECK(r.lower_bound == Rational(1, 4));
  CHECK(r.m == 1);
  CHECK(r.pass());
  r = check_wake_proposition(ComponentDescriptor::main_cardioid(), 1, 3);
  CHECK(r.gap == Rational(1, 7));
  CHECK(r.m == 2);
  CHECK(r.pass());
  r = check_wake_proposition(ComponentDescriptor::main_cardioid(), 2, 5);
  CHECK(r.gap == Rational(1, 31));
  CHECK(r.m == 4);
  CHECK(r.pass());

  for (const auto& h : {ComponentDescriptor::main_cardioid(), ComponentDescriptor::basilica()})
    for (int q = 2; q <= 7; ++q)
      for (int p = 1; p < q; ++p) {
        if (std::gcd(p, q) != 1) continue;
        CAPTURE(h.period);
        CAPTURE(p);
        CAPTURE(q);
        auto rep = check_wake_proposition(h, p, q);
        CHECK(rep.gap >= pow2_inv(h.period * q));
        CHECK(rep.m == h.m_prime + h.period * (q - 2));
        CHECK(rep.pass());
        CHECK(orbit_avoids_interval(rep.eta_minus, rep.eta_plus));
        CHECK(rep.eta_minus.rational() > h.theta_minus);
        CHECK(rep.eta_plus.rational() < h.theta_plus);
      }
}

TEST_CASE("orbit avoidance") {
  CHECK(orbit_avoids_interval(Angle(1, 7), Angle(2, 7)));
  CHECK(orbit_avoids_interval(Angle(1, 3), Angle(2, 3)));
  CHECK(orbit_avoids_interval(Angle(5, 12), Angle(7, 12)));
  CHECK_FALSE(orbit_avoids_interval(Angle(1, 7), Angle(4, 7)));  // 2/7 sits inside
  CHECK_FALSE(orbit_avoids_interval(Angle(1, 15), Angle(4, 15)));
}

TEST_CASE("fraction parsing") {
  CHECK(parse_fraction("2/5") == std::pair{2, 5});
  CHECK_THROWS_AS(parse_fraction("2"), CombinatoricsError);
  CHECK_THROWS_AS(parse_fraction("2/x"), CombinatoricsError);
  CHECK(Angle::parse("10/4") == Angle(1, 2));
  CHECK_THROWS_AS(Angle::parse("a/b"), CombinatoricsError);
}
