#include "icgame/spectral.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>

namespace icg {

InterferenceOperator build_operator(const GameSpec& spec,
                                    const StateSpace& space) {
  const int n = spec.players;
  InterferenceOperator op;
  op.players = n;
  op.hhat.resize(n, static_cast<Eigen::Index>(space.size()));
  op.blocks.reserve(space.size());
  op.smax = Matrix::Zero(n, n);

  for (std::size_t h = 0; h < space.size(); ++h) {
    const Matrix& g = space.states[h].gains;
    Matrix b = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      const double direct = spec.effective_direct(i, g(i, i));
      op.hhat(i, static_cast<Eigen::Index>(h)) = 1.0 / direct;
      for (int j = 0; j < n; ++j) {
        if (j != i) b(i, j) = g(i, j) / direct;
      }
    }
    op.smax = op.smax.cwiseMax(b);
    op.blocks.push_back(std::move(b));
  }
  return op;
}

namespace {

/// Power iteration on A + I for an irreducible block; A + I is then
/// primitive, so the Collatz-Wielandt bounds close geometrically.
double irreducible_radius(const Matrix& a, int max_iter) {
  const Eigen::Index n = a.rows();
  Vector v = Vector::Ones(n);
  double estimate = 0.0;
  int stalled = 0;
  for (int it = 0; it < max_iter; ++it) {
    const Vector w = a * v;
    const Vector ratio = w.cwiseQuotient(v);
    const double lo = ratio.minCoeff();
    const double hi = ratio.maxCoeff();
    if (hi - lo <= 1e-13 * std::max(1.0, hi)) return lo == hi ? hi : 0.5 * (lo + hi);

    Vector next = w + v;
    const double scale = next.maxCoeff();
    next /= scale;
    const double prev = estimate;
    estimate = std::clamp(scale - 1.0, lo, hi);
    v = std::move(next);

    if (it > 0 && std::abs(estimate - prev) <= 1e-15 * std::max(1.0, estimate)) {
      if (++stalled >= 10) break;
    } else {
      stalled = 0;
    }
  }
  return estimate;
}

}  // namespace

double spectral_radius(const Matrix& a, int max_iter) {
  if (a.rows() != a.cols())
    throw std::invalid_argument("spectral_radius: matrix is not square");
  if ((a.array() < 0.0).any())
    throw std::invalid_argument("spectral_radius: matrix has negative entries");
  const Eigen::Index n = a.rows();
  if (n == 0) return 0.0;
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> reach = (a.array() > 0.0);
  reach.diagonal().setConstant(true);
  if (reach.all()) return irreducible_radius(a, max_iter);

  // rho(A) is the max over the strongly connected components of the graph
  // of A; reachability by transitive closure is fine at these sizes.
  for (Eigen::Index k = 0; k < n; ++k)
    for (Eigen::Index i = 0; i < n; ++i)
      if (reach(i, k))
        for (Eigen::Index j = 0; j < n; ++j) reach(i, j) = reach(i, j) || reach(k, j);

  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  double rho = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (seen[static_cast<std::size_t>(i)]) continue;
    std::vector<Eigen::Index> comp{i};
    seen[static_cast<std::size_t>(i)] = true;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (!seen[static_cast<std::size_t>(j)] && reach(i, j) && reach(j, i)) {
        comp.push_back(j);
        seen[static_cast<std::size_t>(j)] = true;
      }
    }
    if (comp.size() == 1) {
      rho = std::max(rho, a(i, i));
      continue;
    }
    rho = std::max(rho, irreducible_radius(a(comp, comp), max_iter));
  }
  return rho;
}

double rho_blockdiag(const InterferenceOperator& op) {
  double rho = 0.0;
  for (const auto& b : op.blocks) rho = std::max(rho, spectral_radius(b));
  return rho;
}

ContractionCheck contraction_condition(const GameSpec& spec) {
  ContractionCheck c;
  if (spec.players < 2) return c;
  const double max_cross =
      *std::max_element(spec.gains.cross.begin(), spec.gains.cross.end());
  const double min_direct =
      *std::min_element(spec.gains.direct.begin(), spec.gains.direct.end());
  const double min_alpha =
      *std::min_element(spec.alpha.begin(), spec.alpha.end());
  c.ratio = (spec.players - 1) * max_cross / (min_alpha * min_direct);
  c.ok = c.ratio < 1.0;
  return c;
}

Definiteness definiteness(const InterferenceOperator& op) {
  Definiteness d;
  d.min_sym_eig = std::numeric_limits<double>::infinity();
  const Matrix eye = Matrix::Identity(op.players, op.players);
  Eigen::SelfAdjointEigenSolver<Matrix> es;
  for (const auto& b : op.blocks) {
    const Matrix sym = eye + 0.5 * (b + b.transpose());
    es.compute(sym, Eigen::EigenvaluesOnly);
    d.min_sym_eig = std::min(d.min_sym_eig, es.eigenvalues().minCoeff());
  }
  if (op.blocks.empty()) d.min_sym_eig = 1.0;
  d.psd = d.min_sym_eig >= -kDefinitenessTol;
  d.pd = d.min_sym_eig > kDefinitenessTol;
  return d;
}

double htilde_norm(const InterferenceOperator& op) {
  const Matrix eye = Matrix::Identity(op.players, op.players);
  double norm = 0.0;
  for (const auto& b : op.blocks) {
    const Matrix t = eye + b;
    norm = std::max(norm, std::sqrt(spectral_radius(t.transpose() * t)));
  }
  return norm;
}

ConditionReport analyze_conditions(const GameSpec& spec,
                                   const InterferenceOperator& op) {
  ConditionReport r;
  r.rho_smax = spectral_radius(op.smax);
  r.rho_hhat = rho_blockdiag(op);
  const auto c = contraction_condition(spec);
  r.ratio_bound = c.ratio;
  r.contraction_ok = r.rho_smax < 1.0;
  const auto d = definiteness(op);
  r.htilde_psd = d.psd;
  r.htilde_pd = d.pd;
  r.min_sym_eig = d.min_sym_eig;
  return r;
}

}  // namespace icg
