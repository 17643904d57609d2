#include "pma/nelder_mead.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace pma {

namespace {

Eigen::VectorXd project(Eigen::VectorXd x, const Eigen::VectorXd& lo,
                        const Eigen::VectorXd& hi) {
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    x[i] = std::clamp(x[i], lo[i], hi[i]);
  }
  return x;
}

}  // namespace

NelderMeadResult nelder_mead_minimize(
    const std::function<double(const Eigen::VectorXd&)>& objective,
    const Eigen::VectorXd& start, const Eigen::VectorXd& lo,
    const Eigen::VectorXd& hi, const NelderMeadOptions& options) {
  const Eigen::Index n = start.size();
  if (n < 1 || lo.size() != n || hi.size() != n) {
    throw std::invalid_argument("nelder_mead: dimension mismatch");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(lo[i] < hi[i])) {
      throw std::invalid_argument("nelder_mead: need lo < hi");
    }
  }

  // Initial simplex: the start plus one displaced vertex per axis, flipped
  // inward when the displacement would leave the box.
  std::vector<Eigen::VectorXd> verts;
  verts.push_back(project(start, lo, hi));
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::VectorXd v = verts[0];
    const double h = options.initial_scale * (hi[i] - lo[i]);
    v[i] = (v[i] + h <= hi[i]) ? v[i] + h : v[i] - h;
    verts.push_back(project(std::move(v), lo, hi));
  }
  std::vector<double> costs(verts.size());
  std::transform(verts.begin(), verts.end(), costs.begin(),
                 [&](const Eigen::VectorXd& v) { return objective(v); });

  std::vector<size_t> order(verts.size());
  auto sort_order = [&] {
    std::iota(order.begin(), order.end(), size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
      return costs[a] < costs[b];
    });
  };

  int iter = 0;
  bool converged = false;
  for (; iter < options.max_iterations; ++iter) {
    sort_order();
    const size_t best = order.front();
    const size_t worst = order.back();
    if (costs[worst] - costs[best] < options.spread_tolerance) {
      converged = true;
      break;
    }

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (size_t idx : order) {
      if (idx != worst) {
        centroid += verts[idx];
      }
    }
    centroid /= double(n);

    auto try_point = [&](double coeff) {
      Eigen::VectorXd cand =
          project(centroid + coeff * (centroid - verts[worst]), lo, hi);
      const double c = objective(cand);
      return std::pair<Eigen::VectorXd, double>(std::move(cand), c);
    };

    const size_t second_worst = order[order.size() - 2];
    auto [refl, c_refl] = try_point(1.0);
    if (c_refl < costs[best]) {
      auto [expd, c_expd] = try_point(2.0);
      if (c_expd < c_refl) {
        verts[worst] = std::move(expd);
        costs[worst] = c_expd;
      } else {
        verts[worst] = std::move(refl);
        costs[worst] = c_refl;
      }
    } else if (c_refl < costs[second_worst]) {
      verts[worst] = std::move(refl);
      costs[worst] = c_refl;
    } else {
      // Contract toward the better of {worst, reflected}.
      const bool outside = c_refl < costs[worst];
      auto [ctr, c_ctr] = try_point(outside ? 0.5 : -0.5);
      if (c_ctr < std::min(c_refl, costs[worst])) {
        verts[worst] = std::move(ctr);
        costs[worst] = c_ctr;
      } else {
        // Shrink everything toward the best vertex.
        for (size_t idx : order) {
          if (idx == best) {
            continue;
          }
          verts[idx] = project(verts[best] + 0.5 * (verts[idx] - verts[best]),
                               lo, hi);
          costs[idx] = objective(verts[idx]);
        }
      }
    }
  }

  sort_order();
  NelderMeadResult result;
  result.x = verts[order.front()];
  result.cost = costs[order.front()];
  result.iterations = iter;
  result.converged = converged;
  return result;
}

}  // namespace pma
