//
// Copyright 2026 The nildp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "support/oracles.h"

#include <algorithm>
#include <cmath>

#include "Eigen/Cholesky"
#include "Eigen/Eigenvalues"

namespace nildp::testing {

IpmResult InteriorPointLp(const Eigen::VectorXd& c, const Eigen::MatrixXd& a,
                          const Eigen::VectorXd& b, int max_iterations,
                          double tolerance) {
  const Eigen::Index n = c.size();
  const Eigen::Index m = b.size();
  Eigen::VectorXd x = Eigen::VectorXd::Ones(n);
  Eigen::VectorXd s = Eigen::VectorXd::Ones(n);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(m);
  IpmResult out;
  const double scale = 1.0 + std::max(b.norm(), c.norm());
  for (int it = 0; it < max_iterations; ++it) {
    const Eigen::VectorXd rp = b - a * x;
    const Eigen::VectorXd rd = c - a.transpose() * y - s;
    const double mu = x.dot(s) / static_cast<double>(n);
    if (rp.norm() < tolerance * scale && rd.norm() < tolerance * scale &&
        mu < tolerance) {
      out.converged = true;
      break;
    }
    const Eigen::VectorXd dvec = (x.array() / s.array()).matrix();
    Eigen::MatrixXd normal = a * dvec.asDiagonal() * a.transpose();
    normal.diagonal().array() += 1e-14 * (1.0 + normal.diagonal().maxCoeff());
    Eigen::LDLT<Eigen::MatrixXd> ldlt(normal);
    auto direction = [&](double sigma_mu, const Eigen::VectorXd& corr,
                         Eigen::VectorXd& dx, Eigen::VectorXd& dy,
                         Eigen::VectorXd& ds) {
      // Complementarity target x_i s_i = sigma_mu - corr_i.
      const Eigen::VectorXd rc =
          (sigma_mu - (x.array() * s.array()) - corr.array()).matrix();
      const Eigen::VectorXd rhs =
          rp + a * (dvec.cwiseProduct(rd) - (rc.array() / s.array()).matrix());
      dy = ldlt.solve(rhs);
      ds = rd - a.transpose() * dy;
      dx = ((rc.array() - x.array() * ds.array()) / s.array()).matrix();
    };
    auto max_step = [](const Eigen::VectorXd& v, const Eigen::VectorXd& dv) {
      double t = 1.0;
      for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (dv(i) < 0.0) t = std::min(t, -v(i) / dv(i));
      }
      return t;
    };
    Eigen::VectorXd dx, dy, ds;
    // Mehrotra predictor-corrector.
    direction(0.0, Eigen::VectorXd::Zero(n), dx, dy, ds);
    const double ap = max_step(x, dx), ad = max_step(s, ds);
    const double mu_aff =
        (x + ap * dx).dot(s + ad * ds) / static_cast<double>(n);
    const double sigma = std::pow(mu_aff / mu, 3);
    direction(sigma * mu, dx.cwiseProduct(ds), dx, dy, ds);
    const double tp = std::min(1.0, 0.99 * max_step(x, dx));
    const double td = std::min(1.0, 0.99 * max_step(s, ds));
    x += tp * dx;
    y += td * dy;
    s += td * ds;
  }
  out.x = x;
  out.objective = c.dot(x);
  return out;
}

IpmResult L1RecoveryByInteriorPoint(const Eigen::MatrixXd& g,
                                    const Eigen::VectorXd& u, double bound) {
  const Eigen::Index p = g.rows(), d = g.cols();
  const Eigen::Index n = 2 * d + 2 * p + 1;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(p + 1, n);
  a.block(0, 0, p, d) = g;
  a.block(0, d, p, d) = -g;
  a.block(0, 2 * d, p, p) = -Eigen::MatrixXd::Identity(p, p);
  a.block(0, 2 * d + p, p, p) = Eigen::MatrixXd::Identity(p, p);
  a.block(p, 2 * d, 1, 2 * p).setOnes();
  a(p, n - 1) = 1.0;
  Eigen::VectorXd b(p + 1);
  b << u, bound;
  Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
  c.head(2 * d).setOnes();
  return InteriorPointLp(c, a, b, 300, 1e-11);
}

Eigen::VectorXd BisectionL1Projection(const Eigen::VectorXd& v,
                                      double radius) {
  if (v.lpNorm<1>() <= radius) return v;
  double lo = 0.0, hi = v.cwiseAbs().maxCoeff();
  auto shrink = [&](double t) {
    return (v.cwiseAbs().array() - t).max(0.0).sum();
  };
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (shrink(mid) > radius ? lo : hi) = mid;
  }
  const double t = hi;
  Eigen::VectorXd w(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double mag = std::max(std::abs(v(i)) - t, 0.0);
    w(i) = v(i) >= 0.0 ? mag : -mag;
  }
  return w;
}

Eigen::VectorXd PlainProjectedGradient(const Eigen::MatrixXd& a,
                                       const Eigen::VectorXd& b, double radius,
                                       int iterations) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a,
                                                    Eigen::EigenvaluesOnly);
  const double lmax = std::max(es.eigenvalues().maxCoeff(), 1e-12);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(b.size());
  for (int it = 0; it < iterations; ++it) {
    w = BisectionL1Projection(w - (a * w + b) / lmax, radius);
  }
  return w;
}

double Quadratic(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                 const Eigen::VectorXd& w) {
  return 0.5 * w.dot(a * w) + b.dot(w);
}

double LogLogSlope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace nildp::testing
