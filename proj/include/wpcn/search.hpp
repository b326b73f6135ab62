#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "wpcn/error.hpp"

namespace wpcn::search {

struct SearchConfig {
  int prescan_points = 32;
  double x_tol = 1e-10;  ///< absolute tolerance on the search variable
  int max_iter = 200;

  void validate() const {
    wpcn::detail::require(prescan_points >= 3, "SearchConfig", "prescan_points must be >= 3");
    wpcn::detail::require(x_tol > 0.0, "SearchConfig", "x_tol must be > 0");
    wpcn::detail::require(max_iter >= 1, "SearchConfig", "max_iter must be >= 1");
  }
};

struct Maximum {
  double x = 0.0;
  double value = 0.0;
};

/// Maximizes f on [lo, hi]: a uniform pre-scan locates the best cell, then
/// golden-section search refines within its two neighbours. Throws SearchError
/// when f is non-positive at every scanned point.
inline Maximum golden_section_max(const std::function<double(double)>& f, double lo, double hi,
                                  const SearchConfig& cfg = {}) {
  cfg.validate();
  wpcn::detail::require(lo < hi, "golden_section_max", "requires lo < hi");
  const int k = cfg.prescan_points;
  std::vector<double> xs(k);
  std::vector<double> ys(k);
  int best = 0;
  for (int i = 0; i < k; ++i) {
    xs[i] = lo + (hi - lo) * i / (k - 1);
    ys[i] = f(xs[i]);
    if (ys[i] > ys[best]) best = i;
  }
  if (!(ys[best] > 0.0)) throw SearchError("golden_section_max: objective is zero over the whole bracket");

  double a = xs[best > 0 ? best - 1 : 0];
  double b = xs[best < k - 1 ? best + 1 : k - 1];
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < cfg.max_iter && b - a > cfg.x_tol; ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  Maximum out{xs[best], ys[best]};
  if (fc > out.value) out = {c, fc};
  if (fd > out.value) out = {d, fd};
  return out;
}

}  // namespace wpcn::search
