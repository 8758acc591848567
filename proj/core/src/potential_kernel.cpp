#include "gff/potential_kernel.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <cstdlib>

#include "gff/constants.hpp"
#include "gff/errors.hpp"

namespace gff {

namespace {

using boost::multiprecision::cpp_bin_float_100;
using boost::multiprecision::cpp_rational;

// Kernel value p + q/pi with exact rational p, q.
struct RatVal {
  cpp_rational p;
  cpp_rational q;
};

RatVal combine4(const RatVal& a, const RatVal& b, const RatVal& c, const RatVal& d) {
  // 4a - b - c - d
  return {4 * a.p - b.p - c.p - d.p, 4 * a.q - b.q - c.q - d.q};
}

}  // namespace

PotentialKernelTable::PotentialKernelTable() {
  const int r = k_kernel_exact_radius;
  // Octant columns col[x][y], 0 <= y <= x. Column x+1 follows from columns
  // x and x-1 by harmonicity at (x,y); the new diagonal entry is the series
  // a(n,n) = (4/pi) sum_{k=1..n} 1/(2k-1).
  std::vector<std::vector<RatVal>> col(static_cast<std::size_t>(r) + 1);
  col[0] = {{0, 0}};
  col[1] = {{1, 0}, {0, 4}};
  cpp_rational diag_q = 4;  // q of a(x,x) for current x
  for (int x = 1; x < r; ++x) {
    const auto& cur = col[static_cast<std::size_t>(x)];
    const auto& prev = col[static_cast<std::size_t>(x - 1)];
    std::vector<RatVal> next(static_cast<std::size_t>(x) + 2);
    // y = 0: neighbors (x-1,0), (x+1,0), (x,1), (x,-1) with a(x,-1)=a(x,1).
    next[0] = {4 * cur[0].p - prev[0].p - 2 * cur[1].p,
               4 * cur[0].q - prev[0].q - 2 * cur[1].q};
    for (int y = 1; y <= x - 1; ++y) {
      next[static_cast<std::size_t>(y)] =
          combine4(cur[static_cast<std::size_t>(y)], prev[static_cast<std::size_t>(y)],
                   cur[static_cast<std::size_t>(y + 1)], cur[static_cast<std::size_t>(y - 1)]);
    }
    // y = x: harmonicity at (x,x) with the two diagonal-adjacent pairs equal.
    next[static_cast<std::size_t>(x)] = {2 * cur[static_cast<std::size_t>(x)].p -
                                             cur[static_cast<std::size_t>(x - 1)].p,
                                         2 * cur[static_cast<std::size_t>(x)].q -
                                             cur[static_cast<std::size_t>(x - 1)].q};
    diag_q += cpp_rational(4, 2 * (x + 1) - 1);
    next[static_cast<std::size_t>(x) + 1] = {0, diag_q};
    col[static_cast<std::size_t>(x) + 1] = std::move(next);
  }

  const cpp_bin_float_100 inv_pi =
      1 / boost::math::constants::pi<cpp_bin_float_100>();
  quad_.assign(static_cast<std::size_t>(r + 1) * static_cast<std::size_t>(r + 1), 0.0);
  for (int x = 0; x <= r; ++x) {
    for (int y = 0; y <= x; ++y) {
      const RatVal& v = col[static_cast<std::size_t>(x)][static_cast<std::size_t>(y)];
      const cpp_bin_float_100 val =
          static_cast<cpp_bin_float_100>(v.p) + static_cast<cpp_bin_float_100>(v.q) * inv_pi;
      const double d = static_cast<double>(val);
      quad_[static_cast<std::size_t>(x) * (r + 1) + y] = d;
      quad_[static_cast<std::size_t>(y) * (r + 1) + x] = d;
    }
  }
}

const PotentialKernelTable& PotentialKernelTable::instance() {
  static const PotentialKernelTable table;
  return table;
}

double PotentialKernelTable::exact_at(int x, int y) const {
  const int ax = std::abs(x), ay = std::abs(y);
  const int r = k_kernel_exact_radius;
  if (ax > r || ay > r) throw ValidationError("potential kernel: point outside exact window");
  return quad_[static_cast<std::size_t>(ax) * (r + 1) + ay];
}

double PotentialKernelTable::asymptotic(int x, int y) {
  const double nrm2 = static_cast<double>(x) * x + static_cast<double>(y) * y;
  return (1.0 / k_pi) * std::log(nrm2) + k_kernel_const;
}

double PotentialKernelTable::at(int x, int y) const {
  const int ax = std::abs(x), ay = std::abs(y);
  if (ax <= k_kernel_exact_radius && ay <= k_kernel_exact_radius) return exact_at(ax, ay);
  return asymptotic(x, y);
}

double potential_kernel(int x, int y) { return PotentialKernelTable::instance().at(x, y); }

}  // namespace gff
