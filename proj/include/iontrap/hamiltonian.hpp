#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "iontrap/csv.hpp"
#include "iontrap/hilbert.hpp"
#include "iontrap/modes.hpp"
#include "iontrap/units.hpp"

// Rotating-frame laser-ion interaction operators.
//
// A pulse addressed to the blue sideband of mode b with detuning D (laser
// frequency = qubit + mode_b + D) is represented in the frame co-rotating
// with the beam.  In that frame
//
//   H = sum_{j,m} (rabi0 * eta[j][m] / 2) (e^{i phase} |D><S|_j a_m^dag + h.c.)
//       - D * N_D  +  sum_m (w_m - w_b) n_m  + diagonal shift terms,
//
// where N_D counts excited ions.  Converting a propagated state back to the
// qubit frame (the frame all carrier pulses and Ramsey phases refer to)
// multiplies by exp(-i G t) with the diagonal generator
//
//   G = D * N_D + sum_m (w_b - w_m) n_m.
//
// With that factor the dispersive diagonal phases come out equal to the
// physical light shifts: |S,n> shifts by +(n+1) kappa and |D,n> by -n kappa,
// kappa = (eta rabi0)^2 / (4 D), so a Ramsey fringe runs at (2n+1) kappa
// before compensation and at 2 kappa per phonon after it.

namespace iontrap {

enum class Coupling { carrier, blue_sideband, red_sideband, static_shift };

struct PulseEvent {
  Coupling kind = Coupling::carrier;
  int mode_id = 0;        // addressed mode (sidebands only)
  double rabi0 = 0.0;     // carrier Rabi frequency, rad/s
  double detuning = 0.0;  // from the addressed resonance, rad/s
  double phase = 0.0;     // rad
  double duration = 0.0;  // s

  void validate() const {
    if (duration < 0.0) throw std::invalid_argument("pulse duration must be >= 0");
    if ((kind == Coupling::blue_sideband || kind == Coupling::red_sideband) &&
        rabi0 != 0.0 && detuning == 0.0 && false)
      throw std::invalid_argument("dispersive pulse needs nonzero detuning");
  }
};

// Diagonal light-shift budget: delta_other lumps the motional-state
// independent shifts of the drive beam, delta_comp is the compensation beam.
// Both act only while a sideband drive is on, and both enter as differential
// S-D shifts (positive values speed up the fringe).
struct ShiftBudget {
  double delta_other = 0.0;  // rad/s
  double delta_comp = 0.0;   // rad/s

  double total() const { return delta_other + delta_comp; }
};

inline double sideband_rabi(int n, double eta, double rabi0) {
  if (n < 0) throw std::invalid_argument("occupation must be >= 0");
  return eta * rabi0 * std::sqrt(static_cast<double>(n + 1));
}

// Light shift of |S,n> under a drive detuned by `detuning` from the blue
// sideband; the paired |D,n+1> shifts by the negative of this value.
inline double dispersive_shift(int n, double eta, double rabi0, double detuning) {
  if (detuning == 0.0)
    throw std::invalid_argument("dispersive_shift: zero detuning has no dispersive limit");
  const double omega = sideband_rabi(n, eta, rabi0);
  return omega * omega / (4.0 * detuning);
}

// Net S-D differential phase accumulation rate for motional state n,
// including the configured budget.  Dispersive order, so exactly linear in n:
// (2n+1) kappa + budget, and 2 kappa n after compensation.
inline double ramsey_phase_rate(int n, double eta, double rabi0, double detuning,
                                const ShiftBudget& budget) {
  const double kappa = dispersive_shift(0, eta, rabi0, detuning);
  return (2.0 * n + 1.0) * kappa + budget.total();
}

// Compensation beam setting that cancels the n=0 differential rate.  The
// dispersive-regime guard uses the strongest coupling inside the n={0,1}
// computational manifold.
inline ShiftBudget compensation_solve(double eta, double rabi0, double detuning,
                                      double delta_other) {
  const double strongest = sideband_rabi(1, eta, rabi0);  // sqrt(2) eta rabi0
  if (std::abs(detuning) < 2.0 * strongest)
    throw std::invalid_argument(
        "compensation_solve: not dispersive (sqrt(2) eta rabi0 = " +
        std::to_string(strongest) + " rad/s vs detuning/2 = " +
        std::to_string(std::abs(detuning) / 2.0) + " rad/s)");
  ShiftBudget budget;
  budget.delta_other = delta_other;
  budget.delta_comp = -(dispersive_shift(0, eta, rabi0, detuning) + delta_other);
  return budget;
}

// Hermitian pulse generator plus the diagonal frame generator G (rad/s).
// The qubit-frame propagator for duration t is exp(-i G t) exp(-i H t).
struct PulseOperator {
  Eigen::MatrixXcd hamiltonian;
  Eigen::VectorXd frame;
  std::vector<std::string> warnings;
};

inline PulseOperator build_hamiltonian(const SpaceSpec& space, const ModeSet& modes,
                                       const PulseEvent& pulse, const ShiftBudget& budget,
                                       double qubit_offset = 0.0) {
  space.validate();
  pulse.validate();
  const std::size_t dim = space.dim();
  PulseOperator op;
  op.hamiltonian = Eigen::MatrixXcd::Zero(dim, dim);
  op.frame = Eigen::VectorXd::Zero(dim);

  const bool sideband =
      pulse.kind == Coupling::blue_sideband || pulse.kind == Coupling::red_sideband;
  int addressed_slot = -1;
  double addressed_freq = 0.0;
  if (sideband) {
    addressed_slot = space.mode_position(pulse.mode_id);
    addressed_freq = modes.mode_angular_frequency(pulse.mode_id);
    const int top = space.mode_list[addressed_slot].n_max;
    if (pulse.kind == Coupling::blue_sideband)
      op.warnings.push_back("ladder truncated: |S,n=" + std::to_string(top) +
                            "> has no |D,n=" + std::to_string(top + 1) + "> partner");
  }
  const cxd coupling_phase = std::exp(cxd(0.0, pulse.phase));
  const double shift = budget.total();

  std::size_t internal;
  std::vector<int> occ;
  for (std::size_t i = 0; i < dim; ++i) {
    space.decompose(i, internal, occ);
    int n_excited = 0;
    for (int j = 0; j < space.ion_count; ++j)
      if (space.ion_is_excited(internal, j)) ++n_excited;

    double diag = qubit_offset * n_excited;
    double frame_diag = 0.0;
    if (sideband || pulse.kind == Coupling::static_shift) diag += -shift * n_excited;
    if (sideband) {
      diag += -pulse.detuning * n_excited;
      frame_diag += pulse.detuning * n_excited;
      for (int k = 0; k < space.mode_count(); ++k) {
        const double offset =
            modes.mode_angular_frequency(space.mode_list[k].mode_id) - addressed_freq;
        diag += offset * occ[k];
        frame_diag += -offset * occ[k];
      }
    } else if (pulse.kind == Coupling::carrier) {
      diag += -pulse.detuning * n_excited;
      frame_diag += pulse.detuning * n_excited;
    }
    op.hamiltonian(i, i) = diag;
    op.frame[i] = frame_diag;

    // couplings: fill <upper| H |i> for each ion in S, conjugates follow
    for (int j = 0; j < space.ion_count; ++j) {
      if (space.ion_is_excited(internal, j)) continue;
      const std::size_t flipped = internal | (std::size_t{1} << (space.ion_count - 1 - j));
      if (pulse.kind == Coupling::carrier) {
        std::vector<int> occ2 = occ;
        const std::size_t target =
            flipped * space.motional_dim() + space.occupation_index(occ2);
        op.hamiltonian(target, i) += 0.5 * pulse.rabi0 * coupling_phase;
      } else if (sideband) {
        for (int k = 0; k < space.mode_count(); ++k) {
          const double eta = modes.eta(j, space.mode_list[k].mode_id);
          std::vector<int> occ2 = occ;
          double ladder;
          if (pulse.kind == Coupling::blue_sideband) {
            if (occ[k] + 1 > space.mode_list[k].n_max) continue;
            occ2[k] = occ[k] + 1;
            ladder = std::sqrt(static_cast<double>(occ[k] + 1));
          } else {
            if (occ[k] == 0) continue;
            occ2[k] = occ[k] - 1;
            ladder = std::sqrt(static_cast<double>(occ[k]));
          }
          const std::size_t target =
              flipped * space.motional_dim() + space.occupation_index(occ2);
          op.hamiltonian(target, i) += 0.5 * pulse.rabi0 * eta * ladder * coupling_phase;
        }
      }
    }
  }

  // mirror the couplings; the result is Hermitian by construction
  for (std::size_t r = 0; r < dim; ++r)
    for (std::size_t c = r + 1; c < dim; ++c) {
      const cxd upper = op.hamiltonian(r, c);
      const cxd lower = op.hamiltonian(c, r);
      if (upper == cxd(0.0) && lower != cxd(0.0))
        op.hamiltonian(r, c) = std::conj(lower);
      else if (lower == cxd(0.0) && upper != cxd(0.0))
        op.hamiltonian(c, r) = std::conj(upper);
    }
  return op;
}

// Sparse-triplet debug dump: row label, column label, Re, Im.
inline std::string dump_operator_csv(const SpaceSpec& space, const Eigen::MatrixXcd& h) {
  CsvWriter csv({"row", "col", "re", "im"});
  for (Eigen::Index r = 0; r < h.rows(); ++r)
    for (Eigen::Index c = 0; c < h.cols(); ++c) {
      if (std::abs(h(r, c)) < 1e-15) continue;
      csv.add_row_mixed({space.basis_label(r), space.basis_label(c),
                         fmt_num(h(r, c).real()), fmt_num(h(r, c).imag())});
    }
  return csv.str();
}

}  // namespace iontrap
