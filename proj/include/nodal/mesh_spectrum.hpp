#pragma once

#include <random>

#include "nodal/eigenmodes.hpp"

namespace nodal {

// ===========================================================================
// Discrete Laplace-Beltrami on closed triangle meshes: symmetric cotangent
// stiffness and lumped (one-third-area) diagonal mass. The generalized
// problem S v = lambda M v reduces to a standard symmetric one by the
// diagonal scaling B = M^{-1/2} S M^{-1/2}.
// ===========================================================================
struct SparseSym {
  int n = 0;
  std::vector<int> row_ptr;
  std::vector<int> col;
  std::vector<double> val;

  void matvec(const double* x, double* y) const {
    for (int i = 0; i < n; ++i) {
      double s = 0.0;
      for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
        s += val[k] * x[col[k]];
      y[i] = s;
    }
  }
};

struct DiscreteOperator {
  SparseSym stiffness;
  std::vector<double> mass;  // diagonal
  int size = 0;
};

inline DiscreteOperator assemble(const TriMesh& mesh) {
  const std::size_t nv = mesh.vertices.size();
  auto edges = mesh.edges();
  for (const auto& e : edges)
    if (e.tri[1] == -1)
      throw mesh_error("mesh is not closed: boundary edge found");
  for (std::size_t f = 0; f < mesh.faces.size(); ++f)
    if (mesh.face_area(f) <= 1e-14)
      throw mesh_error("degenerate triangle in mesh");

  // cotangent weights accumulated per unordered edge
  std::map<std::pair<std::uint32_t, std::uint32_t>, double> w;
  for (const auto& face : mesh.faces) {
    for (int c = 0; c < 3; ++c) {
      std::uint32_t apex = face[c], a = face[(c + 1) % 3],
                    b = face[(c + 2) % 3];
      Vec3 ea = mesh.vertices[a] - mesh.vertices[apex];
      Vec3 eb = mesh.vertices[b] - mesh.vertices[apex];
      double cot = dot(ea, eb) / norm(cross(ea, eb));
      auto key = std::minmax(a, b);
      w[{key.first, key.second}] += 0.5 * cot;
    }
  }
  // assemble CSR rows: off-diagonals -w_ij, diagonal sum of incident w
  std::vector<std::map<int, double>> rows(nv);
  for (const auto& kv : w) {
    int i = static_cast<int>(kv.first.first);
    int j = static_cast<int>(kv.first.second);
    rows[i][j] = -kv.second;
    rows[j][i] = -kv.second;
    rows[i][i] += kv.second;
    rows[j][j] += kv.second;
  }
  DiscreteOperator op;
  op.size = static_cast<int>(nv);
  op.stiffness.n = op.size;
  op.stiffness.row_ptr.push_back(0);
  for (std::size_t i = 0; i < nv; ++i) {
    for (const auto& kv : rows[i]) {
      op.stiffness.col.push_back(kv.first);
      op.stiffness.val.push_back(kv.second);
    }
    op.stiffness.row_ptr.push_back(static_cast<int>(op.stiffness.col.size()));
  }
  op.mass.assign(nv, 0.0);
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    double a3 = mesh.face_area(f) / 3.0;
    for (int v = 0; v < 3; ++v) op.mass[mesh.faces[f][v]] += a3;
  }
  return op;
}

struct EigenPair {
  double lambda = 0.0;
  std::vector<double> vec;  // vertex values, M-normalized
  double residual = 0.0;    // ||S v - lambda M v|| / ||M v||
};

namespace detail {

// Cyclic Jacobi eigendecomposition of a small symmetric matrix (row-major).
// Returns eigenvalues ascending; V columns are eigenvectors.
inline void jacobi_eigen(std::vector<double>& a, int m,
                         std::vector<double>& eval, std::vector<double>& V) {
  V.assign(static_cast<std::size_t>(m) * m, 0.0);
  for (int i = 0; i < m; ++i) V[static_cast<std::size_t>(i) * m + i] = 1.0;
  auto A = [&](int i, int j) -> double& {
    return a[static_cast<std::size_t>(i) * m + j];
  };
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j) off += A(i, j) * A(i, j);
    if (off < 1e-28) break;
    for (int p = 0; p < m - 1; ++p)
      for (int q = p + 1; q < m; ++q) {
        if (std::abs(A(p, q)) < 1e-300) continue;
        double theta = (A(q, q) - A(p, p)) / (2.0 * A(p, q));
        double t = (theta >= 0 ? 1.0 : -1.0) /
                   (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (int k = 0; k < m; ++k) {
          double akp = A(k, p), akq = A(k, q);
          A(k, p) = c * akp - s * akq;
          A(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < m; ++k) {
          double apk = A(p, k), aqk = A(q, k);
          A(p, k) = c * apk - s * aqk;
          A(q, k) = s * apk + c * aqk;
        }
        for (int k = 0; k < m; ++k) {
          double vkp = V[static_cast<std::size_t>(k) * m + p];
          double vkq = V[static_cast<std::size_t>(k) * m + q];
          V[static_cast<std::size_t>(k) * m + p] = c * vkp - s * vkq;
          V[static_cast<std::size_t>(k) * m + q] = s * vkp + c * vkq;
        }
      }
  }
  eval.resize(m);
  std::vector<int> order(m);
  for (int i = 0; i < m; ++i) order[i] = i;
  std::vector<double> diag(m);
  for (int i = 0; i < m; ++i) diag[i] = A(i, i);
  std::sort(order.begin(), order.end(),
            [&diag](int x, int y) { return diag[x] < diag[y]; });
  std::vector<double> Vs(V.size());
  for (int j = 0; j < m; ++j) {
    eval[j] = diag[order[j]];
    for (int i = 0; i < m; ++i)
      Vs[static_cast<std::size_t>(i) * m + j] =
          V[static_cast<std::size_t>(i) * m + order[j]];
  }
  V.swap(Vs);
}

}  // namespace detail

// Lowest eigenpairs of S v = lambda M v by Chebyshev-filtered block
// subspace iteration with full re-orthogonalization and a Rayleigh-Ritz
// projection every sweep. Deterministic for a fixed seed.
inline std::vector<EigenPair> lowest_eigenpairs(const DiscreteOperator& op,
                                                int count, double tol,
                                                std::uint64_t seed = 20240711) {
  const int n = op.size;
  if (count < 1 || count >= n / 4)
    throw domain_error("eigenpair count must satisfy 1 <= count < size/4");
  if (tol < 1e-10) throw domain_error("tolerance must be >= 1e-10");

  // scaled operator B = M^{-1/2} S M^{-1/2}
  std::vector<double> dinv(n);
  for (int i = 0; i < n; ++i) dinv[i] = 1.0 / std::sqrt(op.mass[i]);
  SparseSym B = op.stiffness;
  for (int i = 0; i < n; ++i)
    for (int k = B.row_ptr[i]; k < B.row_ptr[i + 1]; ++k)
      B.val[k] *= dinv[i] * dinv[B.col[k]];

  double upper = 0.0;  // Gershgorin bound on the spectrum of B
  for (int i = 0; i < n; ++i) {
    double diag = 0.0, off = 0.0;
    for (int k = B.row_ptr[i]; k < B.row_ptr[i + 1]; ++k) {
      if (B.col[k] == i)
        diag = B.val[k];
      else
        off += std::abs(B.val[k]);
    }
    upper = std::max(upper, diag + off);
  }
  upper *= 1.001;

  const int m = count + std::max(8, count / 2);
  std::vector<std::vector<double>> X(m, std::vector<double>(n));
  std::mt19937_64 rng(seed);
  for (auto& xcol : X)
    for (double& v : xcol)
      v = ((rng() >> 11) * 0x1.0p-53) - 0.5;

  auto orthonormalize = [&]() {
    for (int j = 0; j < m; ++j) {
      for (int rep = 0; rep < 2; ++rep)
        for (int i = 0; i < j; ++i) {
          double d = 0.0;
          for (int k = 0; k < n; ++k) d += X[i][k] * X[j][k];
          for (int k = 0; k < n; ++k) X[j][k] -= d * X[i][k];
        }
      double nn = 0.0;
      for (int k = 0; k < n; ++k) nn += X[j][k] * X[j][k];
      nn = std::sqrt(nn);
      if (nn < 1e-300) nn = 1.0;
      for (int k = 0; k < n; ++k) X[j][k] /= nn;
    }
  };
  orthonormalize();

  std::vector<double> ritz(m, 0.0);
  std::vector<double> tmp(n), tmp2(n);
  double best_resid = std::numeric_limits<double>::infinity();
  const int max_sweeps = 600;
  const int cheb_degree = 30;
  bool converged = false;

  auto rayleigh_ritz = [&]() {
    std::vector<double> H(static_cast<std::size_t>(m) * m, 0.0);
    std::vector<std::vector<double>> AX(m, std::vector<double>(n));
    for (int j = 0; j < m; ++j) B.matvec(X[j].data(), AX[j].data());
    for (int i = 0; i < m; ++i)
      for (int j = i; j < m; ++j) {
        double d = 0.0;
        for (int k = 0; k < n; ++k) d += X[i][k] * AX[j][k];
        H[static_cast<std::size_t>(i) * m + j] = d;
        H[static_cast<std::size_t>(j) * m + i] = d;
      }
    std::vector<double> eval, V;
    detail::jacobi_eigen(H, m, eval, V);
    std::vector<std::vector<double>> Y(m, std::vector<double>(n, 0.0));
    for (int j = 0; j < m; ++j)
      for (int i = 0; i < m; ++i) {
        double vij = V[static_cast<std::size_t>(i) * m + j];
        if (vij == 0.0) continue;
        for (int k = 0; k < n; ++k) Y[j][k] += vij * X[i][k];
      }
    X.swap(Y);
    ritz = eval;
  };

  for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
    rayleigh_ritz();
    // generalized residuals for the wanted pairs
    double worst = 0.0;
    for (int j = 0; j < count; ++j) {
      B.matvec(X[j].data(), tmp.data());
      double rr = 0.0;
      for (int k = 0; k < n; ++k) {
        double d = tmp[k] - ritz[j] * X[j][k];
        rr += d * d;
      }
      worst = std::max(worst, std::sqrt(rr));
    }
    best_resid = std::min(best_resid, worst);
    if (worst <= 0.5 * tol) {
      converged = true;
      break;
    }
    // Chebyshev filter amplifying components below the block top
    double a = ritz[m - 1] + 1e-8;
    double b = upper;
    if (a >= b) a = 0.5 * b;
    double e = (b - a) / 2.0, cth = (b + a) / 2.0;
    for (int j = 0; j < m; ++j) {
      std::vector<double>& x0 = tmp;
      std::vector<double>& x1 = tmp2;
      x0 = X[j];
      B.matvec(x0.data(), x1.data());
      for (int k = 0; k < n; ++k) x1[k] = (x1[k] - cth * x0[k]) / e;
      for (int d = 2; d <= cheb_degree; ++d) {
        std::vector<double> x2(n);
        B.matvec(x1.data(), x2.data());
        for (int k = 0; k < n; ++k)
          x2[k] = 2.0 * (x2[k] - cth * x1[k]) / e - x0[k];
        x0.swap(x1);
        x1.swap(x2);
      }
      X[j] = x1;
    }
    orthonormalize();
  }
  if (!converged)
    throw convergence_error("eigensolver did not converge", best_resid);

  std::vector<EigenPair> pairs(count);
  for (int j = 0; j < count; ++j) {
    EigenPair& pr = pairs[j];
    pr.lambda = std::max(ritz[j], 0.0);
    pr.vec.resize(n);
    for (int k = 0; k < n; ++k) pr.vec[k] = X[j][k] * dinv[k];
    // sign convention: first component above noise is positive
    double mx = 0.0;
    for (double v : pr.vec) mx = std::max(mx, std::abs(v));
    for (double v : pr.vec) {
      if (std::abs(v) > 1e-12 * mx) {
        if (v < 0)
          for (double& w : pr.vec) w = -w;
        break;
      }
    }
    op.stiffness.matvec(pr.vec.data(), tmp.data());
    double rn = 0.0, mn = 0.0;
    for (int k = 0; k < n; ++k) {
      double mv = op.mass[k] * pr.vec[k];
      double d = tmp[k] - ritz[j] * mv;
      rn += d * d;
      mn += mv * mv;
    }
    pr.residual = std::sqrt(rn) / std::sqrt(mn);
  }
  return pairs;
}

// Wrap an eigenpair as a SampledField over the mesh quadrature.
inline SampledField to_field(const EigenPair& pair,
                             std::shared_ptr<const ManifoldModel> man,
                             std::shared_ptr<const Quadrature> quad) {
  if (pair.residual > 1e-6)
    throw domain_error("to_field requires residual <= 1e-6");
  if (pair.lambda < 1e-6)
    throw degenerate_field_error("constant (lambda = 0) mode excluded");
  SampledField f;
  f.manifold = std::move(man);
  f.quad = std::move(quad);
  f.values = pair.vec;
  f.lambda = pair.lambda;
  f.family = "mesh-eig";
  return normalize_l2(std::move(f));
}

}  // namespace nodal
