#include "carrots/combinatorics.hpp"

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <numeric>

namespace carrots {

namespace {

BigInt pow2(std::size_t n) {
  BigInt r = 1;
  r <<= n;
  return r;
}

bool is_binary_word(std::string_view w) {
  return std::all_of(w.begin(), w.end(), [](char ch) { return ch == '0' || ch == '1'; });
}

BigInt word_value(std::string_view w) {
  BigInt v = 0;
  for (char ch : w) {
    v <<= 1;
    if (ch == '1') v += 1;
  }
  return v;
}

std::size_t order_of_two(const BigInt& m) {
  if (m == 1) return 1;
  if (m <= BigInt(std::numeric_limits<std::uint32_t>::max())) {
    const auto mod = m.convert_to<std::uint64_t>();
    std::uint64_t x = 2 % mod;
    std::size_t k = 1;
    while (x != 1) {
      x = (2 * x) % mod;
      ++k;
    }
    return k;
  }
  BigInt x = 2 % m;
  std::size_t k = 1;
  while (x != 1) {
    x = (2 * x) % m;
    ++k;
  }
  return k;
}

// Sorted-position rotation test: returns the shift s with
// next(sorted[j]) == sorted[(j + s) mod n] for all j, if it exists.
template <class T, class Next>
std::optional<int> rotation_shift(const std::vector<T>& points, Next next) {
  std::vector<T> sorted = points;
  std::sort(sorted.begin(), sorted.end());
  const int n = static_cast<int>(sorted.size());
  auto position = [&](const T& x) {
    auto it = std::lower_bound(sorted.begin(), sorted.end(), x);
    return static_cast<int>(it - sorted.begin());
  };
  std::optional<int> shift;
  for (int j = 0; j < n; ++j) {
    int s = ((position(next(sorted[j])) - j) % n + n) % n;
    if (shift && *shift != s) return std::nullopt;
    shift = s;
  }
  return shift;
}

}  // namespace

// ---------------------------------------------------------------- Angle

Angle::Angle(BigInt num, BigInt den) {
  if (den <= 0) throw CombinatoricsError("angle denominator must be positive");
  num %= den;
  if (num < 0) num += den;
  BigInt g = boost::multiprecision::gcd(num, den);
  if (g == 0) g = 1;
  num_ = num / g;
  den_ = den / g;
  if (num_ == 0) den_ = 1;
}

Angle::Angle(const Rational& r)
    : Angle(boost::multiprecision::numerator(r), boost::multiprecision::denominator(r)) {}

Angle Angle::parse(std::string_view text) {
  auto slash = text.find('/');
  try {
    if (slash == std::string_view::npos) return Angle(BigInt(std::string(text)), BigInt(1));
    return Angle(BigInt(std::string(text.substr(0, slash))), BigInt(std::string(text.substr(slash + 1))));
  } catch (const std::runtime_error&) {
    throw CombinatoricsError("cannot parse angle '" + std::string(text) + "'");
  }
}

double Angle::to_double() const { return Rational(num_, den_).convert_to<double>(); }

std::string Angle::str() const { return num_.str() + "/" + den_.str(); }

Angle Angle::doubled() const {
  Angle r;
  BigInt n = num_ * 2;
  if (n >= den_) n -= den_;
  // Doubling keeps gcd(n, den) = 1 unless den is even.
  if (den_ % 2 == 0) return Angle(n, den_);
  r.num_ = n;
  r.den_ = den_;
  if (r.num_ == 0) r.den_ = 1;
  return r;
}

std::strong_ordering operator<=>(const Angle& a, const Angle& b) {
  BigInt lhs = a.num_ * b.den_;
  BigInt rhs = b.num_ * a.den_;
  if (lhs < rhs) return std::strong_ordering::less;
  if (lhs > rhs) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

OrbitShape orbit_shape(const Angle& theta) {
  const BigInt& den = theta.denominator();
  std::size_t l = boost::multiprecision::lsb(den);
  BigInt m = den >> l;
  return {l, order_of_two(m)};
}

std::vector<Angle> forward_orbit(const Angle& theta) {
  OrbitShape shape = orbit_shape(theta);
  std::vector<Angle> orbit;
  orbit.reserve(shape.preperiod + shape.period);
  Angle x = theta;
  for (std::size_t i = 0; i < shape.preperiod + shape.period; ++i) {
    orbit.push_back(x);
    x = x.doubled();
  }
  return orbit;
}

// ---------------------------------------------------------------- itineraries

BinaryItinerary BinaryItinerary::parse(std::string_view text) {
  if (!text.empty() && text.front() == '.') text.remove_prefix(1);
  BinaryItinerary it;
  auto open = text.find('(');
  if (open == std::string_view::npos) {
    it.head = std::string(text);
    it.tail = "0";
  } else {
    if (text.back() != ')') throw CombinatoricsError("itinerary must end with ')'");
    it.head = std::string(text.substr(0, open));
    it.tail = std::string(text.substr(open + 1, text.size() - open - 2));
  }
  if (!is_binary_word(it.head) || !is_binary_word(it.tail) || it.tail.empty())
    throw CombinatoricsError("malformed itinerary '" + std::string(text) + "'");
  return it;
}

std::string BinaryItinerary::str() const { return "." + head + "(" + tail + ")"; }

Rational BinaryItinerary::exact_value() const {
  BigInt period_den = pow2(tail.size()) - 1;
  BigInt num = word_value(head) * period_den + word_value(tail);
  BigInt den = pow2(head.size()) * period_den;
  return Rational(num, den);
}

Angle BinaryItinerary::value() const { return Angle(exact_value()); }

bool BinaryItinerary::represents(const Angle& theta) const {
  BigInt period_den = pow2(tail.size()) - 1;
  BigInt num = word_value(head) * period_den + word_value(tail);
  BigInt den = pow2(head.size()) * period_den;
  if (num == den) return theta.is_zero();
  return num * theta.denominator() == theta.numerator() * den;
}

BinaryItinerary BinaryItinerary::normalized() const {
  BinaryItinerary r = *this;
  const std::size_t n = r.tail.size();
  for (std::size_t d = 1; d < n; ++d) {
    if (n % d != 0) continue;
    bool repeats = true;
    for (std::size_t i = d; i < n && repeats; ++i) repeats = r.tail[i] == r.tail[i - d];
    if (repeats) {
      r.tail.resize(d);
      break;
    }
  }
  while (!r.head.empty() && r.head.back() == r.tail.back()) {
    r.tail.insert(r.tail.begin(), r.tail.back());
    r.tail.pop_back();
    r.head.pop_back();
  }
  return r;
}

char BinaryItinerary::digit(std::size_t i) const {
  if (i < head.size()) return head[i];
  return tail[(i - head.size()) % tail.size()];
}

std::strong_ordering lex_compare(const BinaryItinerary& a, const BinaryItinerary& b) {
  const std::size_t n = std::max(a.head.size(), b.head.size()) + std::lcm(a.tail.size(), b.tail.size());
  for (std::size_t i = 0; i < n; ++i) {
    char x = a.digit(i), y = b.digit(i);
    if (x != y) return x < y ? std::strong_ordering::less : std::strong_ordering::greater;
  }
  return std::strong_ordering::equal;
}

BinaryItinerary itinerary(const Angle& theta) {
  OrbitShape shape = orbit_shape(theta);
  std::string bits;
  bits.reserve(shape.preperiod + shape.period);
  const BigInt& den = theta.denominator();
  if (den < BigInt(1) << 62) {
    const auto d = den.convert_to<std::uint64_t>();
    auto x = theta.numerator().convert_to<std::uint64_t>();
    for (std::size_t i = 0; i < shape.preperiod + shape.period; ++i) {
      x *= 2;
      bits.push_back(x >= d ? '1' : '0');
      if (x >= d) x -= d;
    }
  } else {
    BigInt x = theta.numerator();
    for (std::size_t i = 0; i < shape.preperiod + shape.period; ++i) {
      x *= 2;
      bits.push_back(x >= den ? '1' : '0');
      if (x >= den) x -= den;
    }
  }
  BinaryItinerary it;
  it.head = bits.substr(0, shape.preperiod);
  it.tail = bits.substr(shape.preperiod);
  return it;
}

std::pair<BinaryItinerary, BinaryItinerary> dyadic_representations(long long p, int n) {
  if (n < 1 || n > 62) throw CombinatoricsError("dyadic level must be in [1, 62]");
  if (p <= 0 || p >= (1LL << n) || p % 2 == 0)
    throw CombinatoricsError("dyadic numerator must be odd and in (0, 2^n)");
  std::string eps(static_cast<std::size_t>(n), '0');
  for (int i = 0; i < n; ++i)
    if ((p >> (n - 1 - i)) & 1) eps[static_cast<std::size_t>(i)] = '1';
  BinaryItinerary upper{eps, "0"};
  std::string low = eps;
  low.back() = '0';
  BinaryItinerary lower{low, "1"};
  return {upper, lower};
}

// ---------------------------------------------------------------- rotation sets

std::optional<std::pair<int, int>> rotation_number(const Angle& theta, std::size_t step) {
  if (step == 0) throw CombinatoricsError("rotation step must be positive");
  OrbitShape shape = orbit_shape(theta);
  if (shape.preperiod != 0 || shape.period % step != 0) return std::nullopt;
  const std::size_t count = shape.period / step;
  std::vector<Angle> points;
  points.reserve(count);
  auto advance = [step](Angle x) {
    for (std::size_t i = 0; i < step; ++i) x = x.doubled();
    return x;
  };
  Angle x = theta;
  for (std::size_t i = 0; i < count; ++i) {
    points.push_back(x);
    x = advance(x);
  }
  auto shift = rotation_shift(points, advance);
  if (!shift) return std::nullopt;
  const int n = static_cast<int>(count);
  if (std::gcd(*shift, n) != 1 && n != 1) return std::nullopt;
  return std::pair{n == 1 ? 0 : *shift, n};
}

std::optional<std::pair<int, int>> rotation_number(const Angle& theta) { return rotation_number(theta, 1); }

std::pair<Angle, Angle> wake_angles(int p, int q) {
  if (q < 2 || p <= 0 || p >= q || std::gcd(p, q) != 1)
    throw CombinatoricsError("wake angles need a reduced 0 < p/q < 1");
  if (q > 30) throw CombinatoricsError("wake search is limited to q <= 30");
  const std::uint64_t mod = (std::uint64_t{1} << q) - 1;
  auto next = [mod](std::uint64_t x) { return (2 * x) % mod; };
  std::vector<std::uint64_t> orbit(static_cast<std::size_t>(q));
  for (std::uint64_t v = 1; v < mod; ++v) {
    // Visit each cycle once, from its smallest element, and require exact period q.
    std::uint64_t x = v;
    bool minimal = true;
    int length = 0;
    do {
      if (length == q || x < v) {
        minimal = false;
        break;
      }
      orbit[static_cast<std::size_t>(length++)] = x;
      x = next(x);
    } while (x != v);
    if (!minimal || length != q) continue;
    auto shift = rotation_shift(orbit, next);
    if (!shift || *shift != p) continue;
    std::vector<std::uint64_t> sorted = orbit;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t j = 0; j + 1 < sorted.size(); ++j) {
      if (sorted[j + 1] - sorted[j] == 1)
        return {Angle(static_cast<long long>(sorted[j]), static_cast<long long>(mod)),
                Angle(static_cast<long long>(sorted[j + 1]), static_cast<long long>(mod))};
    }
  }
  throw CombinatoricsError("no rotation cycle found");  // unreachable for valid p/q
}

// ---------------------------------------------------------------- tuning

TuningWords::TuningWords(std::string w0, std::string w1) : word0(std::move(w0)), word1(std::move(w1)) {
  if (word0.empty() || word0.size() != word1.size() || !is_binary_word(word0) || !is_binary_word(word1))
    throw CombinatoricsError("tuning words must be binary words of equal positive length");
  if (word0 == word1) throw CombinatoricsError("tuning words must differ");
}

namespace {

BinaryItinerary substitute(const TuningWords& words, const BinaryItinerary& address) {
  BinaryItinerary out;
  out.tail.clear();
  for (char ch : address.head) out.head += ch == '0' ? words.word0 : words.word1;
  for (char ch : address.tail) out.tail += ch == '0' ? words.word0 : words.word1;
  return out;
}

}  // namespace

Rational tune_exact(const TuningWords& words, const BinaryItinerary& address) {
  return substitute(words, address).exact_value();
}

Angle tune(const TuningWords& words, const BinaryItinerary& address) { return Angle(tune_exact(words, address)); }

std::pair<Angle, Angle> decoration_wake_angles(const TuningWords& words, long long p, int n) {
  auto [upper, lower] = dyadic_representations(p, n);
  return {tune(words, upper), tune(words, lower)};
}

Rational Dyadic::value() const { return Rational(p, pow2(static_cast<std::size_t>(m))); }

Dyadic smallest_denominator_dyadic(const Rational& a, const Rational& b) {
  if (a < 0 || b > 1 || a > b) throw CombinatoricsError("need 0 <= a <= b <= 1");
  const BigInt an = boost::multiprecision::numerator(a), ad = boost::multiprecision::denominator(a);
  const BigInt bn = boost::multiprecision::numerator(b), bd = boost::multiprecision::denominator(b);
  for (int m = 0;; ++m) {
    BigInt scale = pow2(static_cast<std::size_t>(m));
    BigInt p = (an * scale + ad - 1) / ad;  // ceil(a 2^m)
    if (p * bd <= bn * scale) return {p, m};
  }
}

namespace {

int smallest_interior_dyadic_level(const Rational& a, const Rational& b) {
  const BigInt an = boost::multiprecision::numerator(a), ad = boost::multiprecision::denominator(a);
  for (int m = 0; m < 4096; ++m) {
    BigInt scale = pow2(static_cast<std::size_t>(m));
    BigInt p = (an * scale) / ad + 1;  // smallest p with p/2^m > a
    if (Rational(p, scale) < b) return m;
  }
  throw CombinatoricsError("interval too small");
}

std::string periodic_word(const Angle& theta, std::size_t length) {
  BinaryItinerary it = itinerary(theta);
  if (!it.head.empty() || length % it.tail.size() != 0)
    throw CombinatoricsError("angle " + theta.str() + " is not periodic with period dividing " + std::to_string(length));
  std::string w;
  for (std::size_t i = 0; i < length; ++i) w.push_back(it.digit(i));
  return w;
}

}  // namespace

ComponentDescriptor ComponentDescriptor::main_cardioid() { return from_words(TuningWords::identity()); }

ComponentDescriptor ComponentDescriptor::from_words(const TuningWords& words) {
  ComponentDescriptor h;
  h.words = words;
  h.period = static_cast<int>(words.period());
  h.theta_minus = BinaryItinerary{"", words.word0}.exact_value();
  h.theta_plus = BinaryItinerary{"", words.word1}.exact_value();
  if (!(h.theta_minus < h.theta_plus)) throw CombinatoricsError("tuning words must satisfy theta- < theta+");
  h.m_prime = smallest_interior_dyadic_level(h.theta_minus, h.theta_plus);
  return h;
}

ComponentDescriptor ComponentDescriptor::satellite(const ComponentDescriptor& parent, int p, int q) {
  auto [lo, hi] = relative_wake_angles(parent, p, q);
  const auto length = static_cast<std::size_t>(parent.period * q);
  return from_words(TuningWords(periodic_word(lo, length), periodic_word(hi, length)));
}

std::pair<Angle, Angle> relative_wake_angles(const ComponentDescriptor& h, int p, int q) {
  auto [lo, hi] = wake_angles(p, q);
  if (h.is_main_cardioid()) return {lo, hi};
  return {tune(h.words, itinerary(lo)), tune(h.words, itinerary(hi))};
}

WakePropositionReport check_wake_proposition(const ComponentDescriptor& h, int p, int q) {
  WakePropositionReport r;
  std::tie(r.eta_minus, r.eta_plus) = relative_wake_angles(h, p, q);
  r.gap = r.eta_plus.rational() - r.eta_minus.rational();
  r.lower_bound = Rational(1, pow2(static_cast<std::size_t>(h.period * q)));
  r.m = smallest_denominator_dyadic(r.eta_minus.rational(), r.eta_plus.rational()).m;
  r.expected_m = h.m_prime + h.period * (q - 2);
  r.gap_ok = r.gap >= r.lower_bound;
  r.m_ok = r.m == r.expected_m;
  return r;
}

bool orbit_avoids_interval(const Angle& a, const Angle& b) {
  const Angle& lo = std::min(a, b);
  const Angle& hi = std::max(a, b);
  for (const Angle* start : {&a, &b})
    for (const Angle& x : forward_orbit(*start))
      if (lo < x && x < hi) return false;
  return true;
}

std::pair<int, int> parse_fraction(std::string_view text) {
  auto slash = text.find('/');
  if (slash == std::string_view::npos) throw CombinatoricsError("expected p/q, got '" + std::string(text) + "'");
  int p = 0, q = 0;
  auto r1 = std::from_chars(text.data(), text.data() + slash, p);
  auto r2 = std::from_chars(text.data() + slash + 1, text.data() + text.size(), q);
  if (r1.ec != std::errc{} || r2.ec != std::errc{} || r1.ptr != text.data() + slash ||
      r2.ptr != text.data() + text.size() || q <= 0)
    throw CombinatoricsError("expected p/q, got '" + std::string(text) + "'");
  return {p, q};
}

}  // namespace carrots
