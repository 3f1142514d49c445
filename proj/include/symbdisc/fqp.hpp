#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "symbdisc/error.hpp"

namespace symbdisc::fqp {

enum class SolveStatus { CertifiedOptimal, GapOpen, Degenerate };

inline const char* status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::CertifiedOptimal: return "certified_optimal";
    case SolveStatus::GapOpen: return "gap_open";
    case SolveStatus::Degenerate: return "degenerate";
  }
  return "unknown";
}

// max gamma' B gamma / gamma' W gamma over the nonnegative orthant.
struct FqpInstance {
  Eigen::MatrixXd between;
  Eigen::MatrixXd within;

  static FqpInstance make(Eigen::MatrixXd b, Eigen::MatrixXd w) {
    if (b.rows() < 1 || b.rows() != b.cols() || w.rows() != b.rows() || w.cols() != b.cols())
      fail(ErrorCode::InvalidParameters, "ratio matrices must be square and equal-sized");
    const double scale_b = std::max(1.0, b.cwiseAbs().maxCoeff());
    const double scale_w = std::max(1.0, w.cwiseAbs().maxCoeff());
    if ((b - b.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale_b ||
        (w - w.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale_w)
      fail(ErrorCode::InvalidParameters, "ratio matrices must be symmetric");
    b = 0.5 * (b + b.transpose()).eval();
    w = 0.5 * (w + w.transpose()).eval();
    return FqpInstance{std::move(b), std::move(w)};
  }

  Eigen::Index dim() const { return between.rows(); }
};

struct FqpSolution {
  Eigen::VectorXd gamma;  // unit Euclidean norm, entrywise >= 0
  double lower = 0.0;     // achieved ratio
  double upper = std::numeric_limits<double>::infinity();
  double gap = std::numeric_limits<double>::infinity();
  SolveStatus status = SolveStatus::Degenerate;
  bool eigen_fallback = false;  // best upper bound came from the plain pencil bound
  std::string diagnostic;
};

struct SolveOptions {
  double epsilon = 1e-4;
  int multistart_count = 24;
  int multistart_iterations = 500;
  int dnn_max_iterations = 20000;
  double dnn_tolerance = 1e-8;
  int certificate_iterations = 250;
  std::uint64_t seed = 0x9e3779b97f4a7c15ULL;
};

namespace detail {

inline double quad(const Eigen::MatrixXd& m, const Eigen::VectorXd& v) {
  return v.dot(m * v);
}

struct RatioPoint {
  Eigen::VectorXd gamma;
  double lambda = 0.0;
  std::vector<int> support;
};

inline std::vector<int> support_of(const Eigen::VectorXd& v) {
  std::vector<int> s;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (v[i] > 0.0) s.push_back(static_cast<int>(i));
  return s;
}

// Prefer larger lambda; on exact ties the lexicographically smallest support.
inline bool better(const RatioPoint& cand, const std::optional<RatioPoint>& best) {
  if (!best) return true;
  if (cand.lambda != best->lambda) return cand.lambda > best->lambda;
  return std::lexicographical_compare(cand.support.begin(), cand.support.end(),
                                      best->support.begin(), best->support.end());
}

// Evaluates a candidate direction: clips to the orthant, checks the
// denominator, and returns the achieved ratio point.
inline std::optional<RatioPoint> evaluate_candidate(const FqpInstance& inst,
                                                    Eigen::VectorXd gamma) {
  gamma = gamma.cwiseMax(0.0);
  const double norm = gamma.norm();
  if (norm == 0.0) return std::nullopt;
  gamma /= norm;
  const double den = quad(inst.within, gamma);
  const double w_scale = std::max(1.0, inst.within.cwiseAbs().maxCoeff());
  if (den <= 1e-14 * w_scale) return std::nullopt;
  const double num = quad(inst.between, gamma);
  return RatioPoint{std::move(gamma), num / den, {}};
}

struct EnumerationOutcome {
  std::optional<RatioPoint> best;
  bool unbounded = false;
  std::string diagnostic;
};

inline EnumerationOutcome enumerate_faces(const FqpInstance& inst) {
  const int d = static_cast<int>(inst.dim());
  EnumerationOutcome out;
  const double b_scale = std::max(1.0, inst.between.cwiseAbs().maxCoeff());
  std::vector<int> idx;
  for (std::uint32_t mask = 1; mask < (1u << d); ++mask) {
    idx.clear();
    for (int i = 0; i < d; ++i)
      if (mask & (1u << i)) idx.push_back(i);
    const int k = static_cast<int>(idx.size());
    Eigen::MatrixXd bs(k, k), ws(k, k);
    for (int r = 0; r < k; ++r)
      for (int c = 0; c < k; ++c) {
        bs(r, c) = inst.between(idx[r], idx[c]);
        ws(r, c) = inst.within(idx[r], idx[c]);
      }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es_w(ws);
    if (es_w.info() != Eigen::Success)
      fail(ErrorCode::NumericalFailure, "within-matrix eigendecomposition failed");
    const double w_max = std::max(0.0, es_w.eigenvalues().maxCoeff());
    const double tau = 1e-12 * std::max(1.0, w_max);

    int null_dim = 0;
    while (null_dim < k && es_w.eigenvalues()[null_dim] <= tau) ++null_dim;
    if (null_dim > 0 && !out.unbounded) {
      // a nonnegative direction annihilating W but not B makes the ratio blow up
      const Eigen::MatrixXd null_basis = es_w.eigenvectors().leftCols(null_dim);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es_n(null_basis.transpose() *
                                                          bs * null_basis);
      if (es_n.eigenvalues().maxCoeff() > 1e-10 * b_scale) {
        Eigen::VectorXd v = null_basis * es_n.eigenvectors().col(null_dim - 1);
        const double amax = v.cwiseAbs().maxCoeff();
        if (v.minCoeff() >= -1e-9 * amax || (-v).minCoeff() >= -1e-9 * amax) {
          out.unbounded = true;
          out.diagnostic = "ratio unbounded: a nonnegative direction has zero "
                           "within-variability but positive between-variability";
        }
      }
    }
    if (null_dim == k) continue;  // W vanishes on this face

    // critical points of the ratio restricted to the face, via the
    // range-space reduction of the generalized eigenproblem
    const int rk = k - null_dim;
    const Eigen::MatrixXd range = es_w.eigenvectors().rightCols(rk);
    const Eigen::VectorXd dvals = es_w.eigenvalues().tail(rk);
    const Eigen::VectorXd dinv_sqrt = dvals.cwiseSqrt().cwiseInverse();
    const Eigen::MatrixXd lift = range * dinv_sqrt.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es_m(lift.transpose() * bs * lift);
    if (es_m.info() != Eigen::Success)
      fail(ErrorCode::NumericalFailure, "reduced eigendecomposition failed");
    for (int e = 0; e < rk; ++e) {
      const Eigen::VectorXd w_vec = lift * es_m.eigenvectors().col(e);
      const double amax = w_vec.cwiseAbs().maxCoeff();
      if (amax == 0.0) continue;
      for (const double sign : {1.0, -1.0}) {
        const Eigen::VectorXd v = sign * w_vec;
        if (v.minCoeff() < -1e-8 * amax) continue;
        Eigen::VectorXd full = Eigen::VectorXd::Zero(d);
        for (int r = 0; r < k; ++r) full[idx[r]] = v[r];
        if (auto cand = evaluate_candidate(inst, std::move(full))) {
          cand->support = support_of(cand->gamma);
          if (better(*cand, out.best)) out.best = std::move(*cand);
        }
        break;  // at most one orientation can be nonnegative for nonzero v
      }
    }
  }
  return out;
}

inline std::optional<RatioPoint> multistart_impl(const FqpInstance& inst, int starts,
                                                 int iterations, std::uint64_t seed) {
  const Eigen::Index d = inst.dim();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double w_scale = std::max(1.0, inst.within.cwiseAbs().maxCoeff());

  std::vector<Eigen::VectorXd> seeds;
  for (Eigen::Index i = 0; i < d; ++i) seeds.push_back(Eigen::VectorXd::Unit(d, i));
  while (static_cast<int>(seeds.size()) < std::max<int>(starts, static_cast<int>(d))) {
    Eigen::VectorXd v(d);
    for (Eigen::Index i = 0; i < d; ++i) v[i] = unit(rng);
    seeds.push_back(std::move(v));
  }

  std::optional<RatioPoint> best;
  for (const auto& start : seeds) {
    Eigen::VectorXd gamma = start.cwiseMax(0.0);
    double den = quad(inst.within, gamma);
    if (den <= 1e-14 * w_scale) continue;
    gamma /= std::sqrt(den);
    double lambda = quad(inst.between, gamma);
    double alpha = 1.0;
    for (int it = 0; it < iterations; ++it) {
      const Eigen::VectorXd grad =
          2.0 * (inst.between * gamma - lambda * (inst.within * gamma));
      const double gnorm = grad.norm();
      if (gnorm <= 1e-15 * (1.0 + std::abs(lambda))) break;
      bool improved = false;
      for (int trial = 0; trial < 40; ++trial) {
        Eigen::VectorXd cand = (gamma + (alpha / gnorm) * grad).cwiseMax(0.0);
        const double cden = quad(inst.within, cand);
        if (cden > 1e-14 * w_scale) {
          cand /= std::sqrt(cden);
          const double clambda = quad(inst.between, cand);
          if (clambda > lambda + 1e-15 * (1.0 + std::abs(lambda))) {
            gamma = std::move(cand);
            lambda = clambda;
            improved = true;
            break;
          }
        }
        alpha *= 0.5;
      }
      if (!improved) break;
      alpha = std::min(alpha * 2.0, 1e6);
    }
    if (auto cand = evaluate_candidate(inst, gamma)) {
      cand->support = support_of(cand->gamma);
      if (better(*cand, best)) best = std::move(*cand);
    }
  }
  return best;
}

// Smallest y with y*W - A positive semidefinite; +inf when none exists.
// Any y returned here certifies an upper bound for the ratio problem via the
// dual pair (y, S = yW - A - N, N), so a small safety pad keeps it valid.
inline double min_y_psd(const Eigen::MatrixXd& a, const Eigen::MatrixXd& w) {
  const Eigen::Index d = a.rows();
  const double a_scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  const double w_norm = w.cwiseAbs().maxCoeff();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es_w(w);
  const double w_max = std::max(0.0, es_w.eigenvalues().maxCoeff());
  const double w_min = es_w.eigenvalues().minCoeff();

  const auto pad = [&](double y) { return y + 1e-9 * (1.0 + std::abs(y)); };

  if (w_min > 1e-10 * std::max(1.0, w_max)) {
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(a, w);
    if (ges.info() == Eigen::Success) return pad(ges.eigenvalues().maxCoeff());
  }

  const auto psd_at = [&](double y) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(y * w - a,
                                                      Eigen::EigenvaluesOnly);
    const double floor = -1e-12 * (1.0 + std::abs(y) * w_norm + a_scale);
    return es.eigenvalues().minCoeff() >= floor;
  };
  (void)d;
  double hi = std::max(1.0, a_scale);
  int grow = 0;
  while (!psd_at(hi)) {
    hi *= 4.0;
    if (++grow > 40) return std::numeric_limits<double>::infinity();
  }
  double lo = -hi;
  if (psd_at(lo)) return pad(lo);  // effectively unbounded below; not expected
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (psd_at(mid))
      hi = mid;
    else
      lo = mid;
  }
  return pad(hi);
}

struct DnnOutcome {
  double upper = std::numeric_limits<double>::infinity();
  bool eigen_fallback = false;
  bool converged = false;
};

// Projection of V onto {Z >= 0 entrywise, W.Z = 1}; returns the multiplier of
// the trace constraint. W.max(0, V + nu W) is nondecreasing in nu.
inline double project_nonneg_slice(Eigen::MatrixXd& z, const Eigen::MatrixXd& v,
                                   const Eigen::MatrixXd& w) {
  const auto phi = [&](double nu) {
    return (w.array() * (v.array() + nu * w.array()).max(0.0)).sum();
  };
  double lo = 0.0, hi = 0.0;
  if (phi(0.0) < 1.0) {
    hi = 1.0;
    while (phi(hi) < 1.0 && hi < 1e18) {
      lo = hi;
      hi *= 2.0;
    }
  } else {
    lo = -1.0;
    while (phi(lo) > 1.0 && lo > -1e18) {
      hi = lo;
      lo *= 2.0;
    }
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (phi(mid) < 1.0 ? lo : hi) = mid;
  }
  const double nu = 0.5 * (lo + hi);
  z = (v.array() + nu * w.array()).max(0.0).matrix();
  return nu;
}

inline DnnOutcome dnn_upper_bound_impl(const FqpInstance& inst, const SolveOptions& opts) {
  const Eigen::Index d = inst.dim();
  DnnOutcome out;
  const double tr_w = inst.within.trace();
  if (!(tr_w > 0.0)) return out;  // handled upstream as degenerate

  // scale so trace(W) = d; the optimal value is unchanged
  const double s = static_cast<double>(d) / tr_w;
  const Eigen::MatrixXd bs = s * inst.between;
  const Eigen::MatrixXd ws = s * inst.within;

  double best = min_y_psd(bs, ws);  // N = 0: the plain pencil bound
  bool best_is_fallback = true;
  const auto consider = [&](const Eigen::MatrixXd& n) {
    const double y = min_y_psd(bs + n, ws);
    if (y < best) {
      best = y;
      best_is_fallback = false;
    }
    return y;
  };

  // operator splitting on max{B.Z : W.Z = 1, Z psd, Z >= 0}
  Eigen::MatrixXd z = Eigen::MatrixXd::Identity(d, d) / static_cast<double>(d);
  Eigen::MatrixXd x = z, u = Eigen::MatrixXd::Zero(d, d);
  double rho = 1.0, nu = 0.0;
  const double tol = opts.dnn_tolerance;
  for (int it = 0; it < opts.dnn_max_iterations; ++it) {
    Eigen::MatrixXd v1 = z - u + bs / rho;
    v1 = 0.5 * (v1 + v1.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(v1);
    x = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).asDiagonal() *
        es.eigenvectors().transpose();
    const Eigen::MatrixXd z_prev = z;
    nu = project_nonneg_slice(z, x + u, ws);
    u += x - z;
    const double primal_res = (x - z).norm();
    const double dual_res = rho * (z - z_prev).norm();
    if (primal_res <= tol * std::max(1.0, x.norm()) &&
        dual_res <= tol * std::max(1.0, z.norm())) {
      out.converged = true;
      break;
    }
    if ((it + 1) % 64 == 0) {
      if (primal_res > 10.0 * dual_res) {
        rho *= 2.0;
        u *= 0.5;
      } else if (dual_res > 10.0 * primal_res) {
        rho *= 0.5;
        u *= 2.0;
      }
    }
  }

  // dual certificate from the splitting: multiplier of Z >= 0
  const Eigen::MatrixXd m =
      rho * (-(x + u + nu * ws)).cwiseMax(0.0);
  Eigen::MatrixXd n_cand = 0.5 * (m + m.transpose()).eval();
  consider(n_cand);
  consider(0.5 * n_cand);
  consider(2.0 * n_cand);

  // projected-subgradient polish of the dual: every iterate is certified
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es_w(ws);
  if (es_w.eigenvalues().minCoeff() > 1e-10 * std::max(1.0, es_w.eigenvalues().maxCoeff())) {
    Eigen::MatrixXd n = n_cand;
    const double step0 = std::max(1.0, bs.cwiseAbs().maxCoeff()) * 0.25;
    for (int k = 1; k <= opts.certificate_iterations; ++k) {
      Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(bs + n, ws);
      if (ges.info() != Eigen::Success) break;
      Eigen::Index top;
      ges.eigenvalues().maxCoeff(&top);
      Eigen::VectorXd vec = ges.eigenvectors().col(top);
      const double den = vec.dot(ws * vec);
      if (!(den > 0.0)) break;
      vec /= std::sqrt(den);
      n = (n - (step0 / std::sqrt(static_cast<double>(k))) * (vec * vec.transpose()))
              .cwiseMax(0.0);
      consider(n);
    }
  }

  out.upper = best;
  out.eigen_fallback = best_is_fallback;
  return out;
}

}  // namespace detail

// Exact global lower bound for d <= 16: the maximum over the cone is attained
// on a face where it is a critical point of the restricted Rayleigh quotient,
// so scanning the eigenpairs of every principal submatrix pair covers it.
inline std::pair<Eigen::VectorXd, double> solve_enumeration(const FqpInstance& inst) {
  if (inst.dim() > 16)
    fail(ErrorCode::InvalidParameters, "face enumeration limited to dimension 16");
  const auto out = detail::enumerate_faces(inst);
  if (out.unbounded) fail(ErrorCode::DegenerateWithin, out.diagnostic);
  if (!out.best)
    fail(ErrorCode::DegenerateWithin,
         "no direction with positive within-variability");
  return {out.best->gamma, out.best->lambda};
}

// Projected ascent on the ratio under the normalization gamma' W gamma = 1,
// restarted from the axes and random nonnegative directions.
inline std::pair<Eigen::VectorXd, double> solve_multistart(const FqpInstance& inst,
                                                           int starts = 24,
                                                           int iterations = 500,
                                                           std::uint64_t seed = 1u) {
  const auto best = detail::multistart_impl(inst, starts, iterations, seed);
  if (!best)
    fail(ErrorCode::DegenerateWithin,
         "no start with positive within-variability");
  return {best->gamma, best->lambda};
}

// Upper bound from the doubly-non-negative relaxation. The returned value is
// always a certified bound: dual candidates are checked independently and the
// plain generalized-eigenvalue bound is the fallback.
inline double dnn_upper_bound(const FqpInstance& inst, const SolveOptions& opts = {}) {
  const auto out = detail::dnn_upper_bound_impl(inst, opts);
  return out.upper;
}

inline FqpSolution solve(const FqpInstance& inst, const SolveOptions& opts = {}) {
  FqpSolution sol;
  sol.gamma = Eigen::VectorXd::Unit(inst.dim(), 0);

  const double w_scale = inst.within.cwiseAbs().maxCoeff();
  const double b_scale = inst.between.cwiseAbs().maxCoeff();
  if (w_scale == 0.0) {
    sol.status = SolveStatus::Degenerate;
    sol.diagnostic = b_scale == 0.0
                         ? "no variability: both matrices vanish"
                         : "ratio unbounded: within-matrix vanishes";
    return sol;
  }

  std::optional<detail::RatioPoint> best;
  if (inst.dim() <= 16) {
    const auto out = detail::enumerate_faces(inst);
    if (out.unbounded) {
      sol.status = SolveStatus::Degenerate;
      sol.diagnostic = out.diagnostic;
      return sol;
    }
    best = out.best;
  }
  if (auto ms = detail::multistart_impl(inst, opts.multistart_count,
                                        opts.multistart_iterations, opts.seed)) {
    if (detail::better(*ms, best)) best = std::move(ms);
  }
  if (!best) {
    sol.status = SolveStatus::Degenerate;
    sol.diagnostic = "no direction with positive within-variability";
    return sol;
  }

  sol.gamma = best->gamma;
  sol.lower = best->lambda;
  const auto dnn = detail::dnn_upper_bound_impl(inst, opts);
  sol.upper = dnn.upper;
  sol.eigen_fallback = dnn.eigen_fallback;
  sol.gap = std::max(0.0, sol.upper - sol.lower);
  sol.status = sol.gap <= opts.epsilon ? SolveStatus::CertifiedOptimal
                                       : SolveStatus::GapOpen;
  return sol;
}

}  // namespace symbdisc::fqp
