#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace uep {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int subdivisions = 0;
};

// Thrown when the subdivision budget runs out before the tolerance is met.
// Carries the best value and the achieved error so callers can report it.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(double value, double achieved, double requested)
      : std::runtime_error("adaptive quadrature did not converge: achieved " +
                           std::to_string(achieved) + ", requested " +
                           std::to_string(requested)),
        value(value),
        achieved(achieved),
        requested(requested) {}
  double value;
  double achieved;
  double requested;
};

namespace detail {

// 15-point Kronrod nodes/weights with the embedded 7-point Gauss rule.
inline constexpr double kXgk[8] = {
    0.9914553711208126, 0.9491079123427585, 0.8648644233597691,
    0.7415311855993944, 0.5860872354676911, 0.4058451513773972,
    0.2077849550078985, 0.0};
inline constexpr double kWgk[8] = {
    0.02293532201052922, 0.06309209262997855, 0.1047900103222502,
    0.1406532597155259,  0.1690047266392679,  0.1903505780647854,
    0.2044329400752989,  0.2094821410847278};
inline constexpr double kWg[4] = {0.1294849661688697, 0.2797053914892767,
                                  0.3818300505051189, 0.4179591836734694};

template <class F>
void gk15(F&& f, double a, double b, double& result, double& abserr) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);

  double fv[15];
  fv[7] = f(center);
  for (int i = 0; i < 7; ++i) {
    double dx = half * kXgk[i];
    fv[i] = f(center - dx);
    fv[8 + i] = f(center + dx);
  }

  double resk = kWgk[7] * fv[7];
  double resg = kWg[3] * fv[7];
  double resabs = std::fabs(resk);
  for (int i = 0; i < 7; ++i) {
    double s = fv[i] + fv[8 + i];
    resk += kWgk[i] * s;
    resabs += kWgk[i] * (std::fabs(fv[i]) + std::fabs(fv[8 + i]));
    if (i % 2 == 1) resg += kWg[i / 2] * s;
  }

  double reskh = resk * 0.5;
  double resasc = kWgk[7] * std::fabs(fv[7] - reskh);
  for (int i = 0; i < 7; ++i)
    resasc += kWgk[i] * (std::fabs(fv[i] - reskh) + std::fabs(fv[8 + i] - reskh));

  result = resk * half;
  resabs *= std::fabs(half);
  resasc *= std::fabs(half);

  abserr = std::fabs((resk - resg) * half);
  if (resasc != 0.0 && abserr != 0.0)
    abserr = resasc * std::min(1.0, std::pow(200.0 * abserr / resasc, 1.5));
  const double eps = std::numeric_limits<double>::epsilon();
  const double tiny = std::numeric_limits<double>::min();
  if (resabs > tiny / (50.0 * eps)) abserr = std::max(abserr, 50.0 * eps * resabs);
}

}  // namespace detail

// Adaptive Gauss-Kronrod integration of f over [a, b]. The worst interval is
// split until the summed error estimate drops below abs_tol; endpoints are
// never evaluated (all Kronrod nodes are interior), so integrable endpoint
// singularities are fine. Throws QuadratureError when the budget runs out.
//
// initial_intervals pre-partitions [a, b] uniformly before adapting. The
// embedded rule pair can agree by accident when a feature is much narrower
// than the interval (both rules miss it and report near-zero error), so
// integrands with localized mass in a wide range should start from enough
// intervals that at least one lands on the feature.
template <class F>
QuadratureResult integrate(F&& f, double a, double b, double abs_tol = 1e-10,
                           int max_subdivisions = 10000,
                           int initial_intervals = 1) {
  struct Interval {
    double a, b, value, error;
    bool operator<(const Interval& o) const { return error < o.error; }
  };

  if (initial_intervals < 1)
    throw std::invalid_argument("initial_intervals must be >= 1");

  std::vector<Interval> heap;
  heap.reserve(static_cast<std::size_t>(initial_intervals));
  double total = 0.0;
  double toterr = 0.0;
  for (int i = 0; i < initial_intervals; ++i) {
    Interval seg{};
    seg.a = a + (b - a) * i / initial_intervals;
    seg.b = a + (b - a) * (i + 1) / initial_intervals;
    detail::gk15(f, seg.a, seg.b, seg.value, seg.error);
    total += seg.value;
    toterr += seg.error;
    heap.push_back(seg);
  }
  std::make_heap(heap.begin(), heap.end());
  int splits = 0;

  while (toterr > abs_tol) {
    if (splits >= max_subdivisions) throw QuadratureError(total, toterr, abs_tol);
    std::pop_heap(heap.begin(), heap.end());
    Interval worst = heap.back();
    heap.pop_back();

    double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b)  // interval narrower than one ulp
      throw QuadratureError(total, toterr, abs_tol);

    Interval lo{}, hi{};
    lo.a = worst.a;
    lo.b = mid;
    hi.a = mid;
    hi.b = worst.b;
    detail::gk15(f, lo.a, lo.b, lo.value, lo.error);
    detail::gk15(f, hi.a, hi.b, hi.value, hi.error);

    total += lo.value + hi.value - worst.value;
    toterr += lo.error + hi.error - worst.error;

    heap.push_back(lo);
    std::push_heap(heap.begin(), heap.end());
    heap.push_back(hi);
    std::push_heap(heap.begin(), heap.end());
    ++splits;
  }

  return {total, toterr, splits};
}

}  // namespace uep
