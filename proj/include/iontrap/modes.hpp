#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "iontrap/units.hpp"

// Axial normal modes of a linear ion crystal in a harmonic trap.  Lengths are
// expressed in the usual dimensionless unit l with l^3 = q^2/(4 pi eps0 M
// w_ax^2), in which the scaled potential is
//   V(u) = 1/2 sum_i u_i^2 + sum_{i<j} 1/|u_i - u_j|.
// Mode frequencies come out in units of the axial frequency; the lowest mode
// is the center-of-mass mode at exactly 1.

namespace iontrap {

struct IonCrystal {
  int ion_count = 1;
  double axial_frequency = from_kHz(1712.0);  // rad/s
  double eta_single = 0.068;  // single-ion Lamb-Dicke factor, axial COM mode

  void validate() const {
    if (ion_count < 1) throw std::invalid_argument("ion_count must be >= 1");
    if (axial_frequency <= 0.0) throw std::invalid_argument("axial_frequency must be > 0");
    if (eta_single <= 0.0 || eta_single >= 1.0)
      throw std::invalid_argument("eta_single must lie in (0,1) (Lamb-Dicke regime)");
  }
};

struct ModeSet {
  double axial_frequency = 0.0;        // rad/s, copied from the crystal
  std::vector<double> frequencies;     // in units of axial_frequency, ascending
  Eigen::MatrixXd eigenvectors;        // row m = displacement pattern of mode m
  Eigen::MatrixXd eta;                 // eta(ion j, mode m)

  int mode_count() const { return static_cast<int>(frequencies.size()); }
  double mode_angular_frequency(int m) const { return frequencies.at(m) * axial_frequency; }
};

namespace detail {

inline Eigen::VectorXd potential_gradient(const Eigen::VectorXd& u) {
  const int n = static_cast<int>(u.size());
  Eigen::VectorXd g = u;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const double d = u[i] - u[j];
      g[i] -= (d > 0 ? 1.0 : -1.0) / (d * d);
    }
  return g;
}

inline Eigen::MatrixXd potential_hessian(const Eigen::VectorXd& u) {
  const int n = static_cast<int>(u.size());
  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      const double inv3 = 1.0 / std::pow(std::abs(u[i] - u[j]), 3);
      h(i, i) += 2.0 * inv3;
      h(i, j) -= 2.0 * inv3;
    }
  return h;
}

}  // namespace detail

// Damped Newton minimization of the scaled crystal potential, started from
// the asymptotic uniform-spacing ansatz.  Converges in a handful of steps for
// the chain lengths used here.
inline std::vector<double> equilibrium_positions(int ion_count) {
  if (ion_count < 1) throw std::invalid_argument("ion_count must be >= 1");
  if (ion_count == 1) return {0.0};

  const int n = ion_count;
  const double spacing = 2.018 / std::pow(n, 0.559);
  Eigen::VectorXd u(n);
  for (int i = 0; i < n; ++i) u[i] = spacing * (i - 0.5 * (n - 1));

  const int max_iterations = 200;
  double residual = detail::potential_gradient(u).lpNorm<Eigen::Infinity>();
  for (int iter = 0; iter < max_iterations; ++iter) {
    const Eigen::VectorXd g = detail::potential_gradient(u);
    residual = g.lpNorm<Eigen::Infinity>();
    if (residual <= 1e-13) break;
    const Eigen::VectorXd step = detail::potential_hessian(u).ldlt().solve(g);
    double damping = 1.0;
    Eigen::VectorXd trial = u - step;
    // halve the step while the residual grows (also guards against crossing)
    for (int k = 0; k < 60; ++k) {
      bool ordered = true;
      for (int i = 0; i + 1 < n; ++i)
        if (trial[i + 1] <= trial[i]) ordered = false;
      if (ordered &&
          detail::potential_gradient(trial).lpNorm<Eigen::Infinity>() < residual)
        break;
      damping *= 0.5;
      trial = u - damping * step;
    }
    u = trial;
  }
  // project onto the exactly symmetric configuration before the final check
  Eigen::VectorXd sym(n);
  for (int i = 0; i < n; ++i) sym[i] = 0.5 * (u[i] - u[n - 1 - i]);
  residual = detail::potential_gradient(sym).lpNorm<Eigen::Infinity>();
  if (residual > 1e-10)
    throw std::runtime_error(
        "equilibrium_positions: Newton iteration did not converge, residual " +
        std::to_string(residual));
  return std::vector<double>(sym.data(), sym.data() + n);
}

inline ModeSet normal_modes(const IonCrystal& crystal) {
  crystal.validate();
  const int n = crystal.ion_count;
  const auto pos = equilibrium_positions(n);
  Eigen::VectorXd u = Eigen::Map<const Eigen::VectorXd>(pos.data(), n);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(detail::potential_hessian(u));
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("normal_modes: eigensolver failed");

  ModeSet modes;
  modes.axial_frequency = crystal.axial_frequency;
  modes.frequencies.resize(n);
  modes.eigenvectors.resize(n, n);
  for (int m = 0; m < n; ++m) {
    modes.frequencies[m] = std::sqrt(solver.eigenvalues()[m]);
    Eigen::VectorXd v = solver.eigenvectors().col(m);
    // deterministic sign: largest-magnitude component positive
    int imax = 0;
    for (int i = 1; i < n; ++i)
      if (std::abs(v[i]) > std::abs(v[imax])) imax = i;
    if (v[imax] < 0) v = -v;
    modes.eigenvectors.row(m) = v.transpose();
  }
  modes.frequencies[0] = 1.0;  // center-of-mass mode, exact by symmetry

  modes.eta.resize(n, n);
  for (int j = 0; j < n; ++j)
    for (int m = 0; m < n; ++m)
      modes.eta(j, m) = crystal.eta_single * modes.eigenvectors(m, j) /
                        std::sqrt(modes.frequencies[m]);
  return modes;
}

// eta(ion j, mode m) = eta_single * eigenvector(m,j) / sqrt(frequency_m).
// On the center-of-mass mode every ion carries |eta| = eta_single/sqrt(N).
inline Eigen::MatrixXd lamb_dicke_factors(const IonCrystal& crystal, const ModeSet& modes) {
  crystal.validate();
  if (modes.mode_count() != crystal.ion_count)
    throw std::invalid_argument("lamb_dicke_factors: modes computed for a different crystal");
  Eigen::MatrixXd eta(crystal.ion_count, modes.mode_count());
  for (int j = 0; j < crystal.ion_count; ++j)
    for (int m = 0; m < modes.mode_count(); ++m)
      eta(j, m) = crystal.eta_single * modes.eigenvectors(m, j) /
                  std::sqrt(modes.frequencies[m]);
  return eta;
}

}  // namespace iontrap
