#pragma once

#include <span>

namespace uavvlc {

struct PairedTest {
  int n = 0;
  double mean_difference = 0.0;  // mean(a - b)
  double t_statistic = 0.0;
  double p_value = 1.0;          // one-sided, H1: mean(a - b) < 0
};

/// Paired one-sided Student t-test that a is smaller than b. Needs n >= 2;
/// throws std::invalid_argument otherwise or on a length mismatch.
PairedTest paired_t_test_less(std::span<const double> a, std::span<const double> b);

}  // namespace uavvlc
