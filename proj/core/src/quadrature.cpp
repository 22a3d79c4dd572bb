#include "thfortin/quadrature.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace thfortin {

namespace {

// All compositions of total into n nonnegative parts.
void compositions(int total, int n, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (n == 1) {
    cur.push_back(total);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (int head = total; head >= 0; --head) {
    cur.push_back(head);
    compositions(total - head, n - 1, cur, out);
    cur.pop_back();
  }
}

long double factorial_ld(int n) {
  long double f = 1;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

}  // namespace

QuadratureRule simplex_rule(int dim, int degree) {
  if (dim < 1) throw std::invalid_argument("simplex_rule: dim must be >= 1");
  if (degree < 0) throw std::invalid_argument("simplex_rule: degree must be >= 0");
  if (degree > kMaxQuadratureDegree)
    throw std::invalid_argument("simplex_rule: degree " + std::to_string(degree) +
                                " unsupported, maximum available degree is " +
                                std::to_string(kMaxQuadratureDegree));

  const int k = degree / 2;  // smallest k with exactness 2k+1 >= degree
  const int s = 2 * k + 1;

  std::vector<Eigen::VectorXd> pts;
  std::vector<long double> wts;

  for (int i = 0; i <= k; ++i) {
    const int denom = dim + s - 2 * i;  // d + 2k + 1 - 2i
    // Weight of every point on level i, for the unit simplex of volume 1/d!.
    long double w = std::pow(static_cast<long double>(denom), s);
    w /= std::pow(2.0L, 2 * k) * factorial_ld(i) * factorial_ld(dim + s - i);
    if (i % 2 == 1) w = -w;
    w *= factorial_ld(dim);  // normalize: weights sum to 1

    std::vector<std::vector<int>> beta;
    std::vector<int> cur;
    compositions(k - i, dim + 1, cur, beta);
    for (const auto& b : beta) {
      Eigen::VectorXd lambda(dim + 1);
      for (int j = 0; j <= dim; ++j) lambda[j] = static_cast<double>(2 * b[j] + 1) / denom;
      pts.push_back(std::move(lambda));
      wts.push_back(w);
    }
  }

  QuadratureRule rule;
  rule.dim = dim;
  rule.exactness = s;
  rule.points.resize(dim + 1, static_cast<int>(pts.size()));
  rule.weights.resize(static_cast<int>(pts.size()));
  for (std::size_t q = 0; q < pts.size(); ++q) {
    rule.points.col(static_cast<int>(q)) = pts[q];
    rule.weights[static_cast<int>(q)] = static_cast<double>(wts[q]);
  }
  return rule;
}

}  // namespace thfortin
