#include "gff/greens.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "gff/errors.hpp"

namespace gff {

GreenMatrix green_exact(const Lattice& lat, std::size_t dense_cap) {
  const std::size_t n = lat.size();
  if (n < 1) throw ValidationError("green_exact: lattice is empty");
  if (n > dense_cap) {
    char msg[192];
    std::snprintf(msg, sizeof(msg),
                  "green_exact: %zu sites exceed the dense cap of %zu "
                  "(matrix footprint 8*|sites|^2 = %.3g bytes)",
                  n, dense_cap, 8.0 * static_cast<double>(n) * static_cast<double>(n));
    throw ResourceCapError(msg);
  }
  const Eigen::Index ni = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(ni, ni);
  for (std::size_t i = 0; i < n; ++i) {
    for (int j : lat.neighbor_slots[i]) {
      if (j >= 0) A(static_cast<Eigen::Index>(i), j) = -0.25;
    }
  }
  Eigen::LLT<Eigen::MatrixXd> llt(A);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("green_exact: I - P is not positive definite");
  }

  GreenMatrix gm;
  gm.lattice = lat;
  gm.G.resize(ni, ni);
  const Eigen::Index block = 1024;
  for (Eigen::Index c = 0; c < ni; c += block) {
    const Eigen::Index w = std::min(block, ni - c);
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(ni, w);
    for (Eigen::Index k = 0; k < w; ++k) rhs(c + k, k) = 1.0;
    gm.G.middleCols(c, w) = llt.solve(rhs);
  }
  // Symmetrize away solver noise and clamp the tiny negative tails.
  gm.G = ((gm.G + gm.G.transpose()) * 0.5).eval();
  gm.G = gm.G.cwiseMax(0.0);

  Eigen::Index arg = 0;
  gm.max_diag = gm.G.diagonal().maxCoeff(&arg);
  gm.argmax_diag = static_cast<int>(arg);
  return gm;
}

GreenMcRow green_mc(const Lattice& lat, Site x, long long walks, RngStream& rng) {
  if (walks < 1) throw ValidationError("green_mc: walks must be >= 1");
  const int start = lat.index_of(x);
  if (start < 0) throw ValidationError("green_mc: start site not in lattice");
  const std::size_t n = lat.size();
  constexpr long long k_step_cap = 10'000'000;

  std::vector<double> sum(n, 0.0), sum2(n, 0.0), visits(n, 0.0);
  std::vector<int> touched;
  touched.reserve(64);
  for (long long w = 0; w < walks; ++w) {
    int cur = start;
    visits[static_cast<std::size_t>(cur)] += 1.0;
    touched.push_back(cur);
    long long steps = 0;
    for (;;) {
      if (++steps > k_step_cap) {
        throw ResourceCapError("green_mc: walk exceeded the 1e7 step cap");
      }
      const int slot = static_cast<int>(rng.uniform_index(4));
      const int nxt = lat.neighbor_slots[static_cast<std::size_t>(cur)][
          static_cast<std::size_t>(slot)];
      if (nxt < 0) break;
      cur = nxt;
      if (visits[static_cast<std::size_t>(cur)] == 0.0) touched.push_back(cur);
      visits[static_cast<std::size_t>(cur)] += 1.0;
    }
    for (int i : touched) {
      const double v = visits[static_cast<std::size_t>(i)];
      sum[static_cast<std::size_t>(i)] += v;
      sum2[static_cast<std::size_t>(i)] += v * v;
      visits[static_cast<std::size_t>(i)] = 0.0;
    }
    touched.clear();
  }

  GreenMcRow row;
  row.walks = walks;
  row.mean.resize(n);
  row.se.resize(n);
  const double wd = static_cast<double>(walks);
  for (std::size_t i = 0; i < n; ++i) {
    const double m = sum[i] / wd;
    row.mean[i] = m;
    if (walks > 1) {
      const double var = std::max(0.0, (sum2[i] - wd * m * m) / (wd - 1.0));
      row.se[i] = std::sqrt(var / wd);
    } else {
      row.se[i] = 0.0;
    }
  }
  return row;
}

double overlap_by_index(const GreenMatrix& G, int i, int j) {
  const double q = G.G(i, j) / G.max_diag;
  return std::clamp(q, 0.0, 1.0);
}

double overlap(const GreenMatrix& G, Site x, Site y) {
  const int i = G.lattice.index_of(x);
  const int j = G.lattice.index_of(y);
  if (i < 0 || j < 0) throw ValidationError("overlap: site not in lattice");
  return overlap_by_index(G, i, j);
}

CholFactor cholesky(const GreenMatrix& gm) {
  CholFactor f;
  Eigen::LLT<Eigen::MatrixXd> llt(gm.G);
  if (llt.info() == Eigen::Success) {
    f.L = llt.matrixL();
    return f;
  }
  const double jitter = 1e-10 * gm.max_diag;
  Eigen::MatrixXd J = gm.G;
  J.diagonal().array() += jitter;
  Eigen::LLT<Eigen::MatrixXd> retry(J);
  if (retry.info() != Eigen::Success) {
    throw NumericalError("cholesky: matrix not positive definite even with jitter");
  }
  f.L = retry.matrixL();
  f.jitter = jitter;
  return f;
}

}  // namespace gff
