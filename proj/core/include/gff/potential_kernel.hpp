#pragma once

#include <vector>

namespace gff {

inline constexpr int k_kernel_exact_radius = 32;

// Potential kernel of planar simple random walk. Exact values on the window
// |x|_inf <= k_kernel_exact_radius come from the harmonicity bootstrap seeded
// by a(0)=0, a(1,0)=1, a(1,1)=4/pi, carried in exact rational arithmetic
// (values live in Q + Q/pi; double recurrences diverge past x ~ 15). Outside
// the window the asymptotic expansion is used.
class PotentialKernelTable {
 public:
  static const PotentialKernelTable& instance();

  double at(int x, int y) const;

  // Table lookup only; |x|_inf and |y| must lie inside the window.
  double exact_at(int x, int y) const;

  // (2/pi) log|x| + (2 gamma + log 8)/pi
  static double asymptotic(int x, int y);

  int radius() const { return k_kernel_exact_radius; }

 private:
  PotentialKernelTable();
  std::vector<double> quad_;  // quadrant x,y in [0,R], row-major
};

double potential_kernel(int x, int y);

}  // namespace gff
