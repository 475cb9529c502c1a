#include "uavvlc/stats.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

namespace uavvlc {

PairedTest paired_t_test_less(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("paired_t_test_less: length mismatch");
  if (a.size() < 2) throw std::invalid_argument("paired_t_test_less: need at least two pairs");
  PairedTest r;
  r.n = static_cast<int>(a.size());
  std::vector<double> d(a.size());
  double mean = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    d[i] = a[i] - b[i];
    mean += d[i];
  }
  mean /= r.n;
  double ss = 0.0;
  for (double x : d) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / (r.n - 1));
  r.mean_difference = mean;
  if (sd == 0.0) {
    r.t_statistic = mean < 0.0 ? -INFINITY : (mean > 0.0 ? INFINITY : 0.0);
    r.p_value = mean < 0.0 ? 0.0 : 1.0;
    return r;
  }
  r.t_statistic = mean / (sd / std::sqrt(static_cast<double>(r.n)));
  const boost::math::students_t dist(r.n - 1);
  r.p_value = boost::math::cdf(dist, r.t_statistic);
  return r;
}

}  // namespace uavvlc
