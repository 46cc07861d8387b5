#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "iontrap/csv.hpp"
#include "iontrap/rng.hpp"

// Composite state space of N two-level ions (|S>, |D>) and a set of truncated
// harmonic modes.  Basis order is internal-string-major: the internal string
// (ion 0 = leftmost character, S before D) forms the major index, followed by
// the mode occupations in mode_list order with the last mode varying fastest.
// This order is fixed so state dumps stay stable.

namespace iontrap {

using cxd = std::complex<double>;

struct ModeTruncation {
  int mode_id = 0;
  int n_max = 1;  // occupations 0..n_max
};

struct SpaceSpec {
  int ion_count = 1;
  std::vector<ModeTruncation> mode_list;
  std::size_t dimension_cap = 100000;

  void validate() const {
    if (ion_count < 1 || ion_count > 20)
      throw std::invalid_argument("ion_count out of range");
    for (const auto& m : mode_list)
      if (m.n_max < 1) throw std::invalid_argument("mode n_max must be >= 1");
    if (dim() > dimension_cap)
      throw std::invalid_argument("space dimension " + std::to_string(dim()) +
                                  " exceeds cap " + std::to_string(dimension_cap));
  }

  std::size_t internal_dim() const { return std::size_t{1} << ion_count; }

  std::size_t motional_dim() const {
    std::size_t d = 1;
    for (const auto& m : mode_list) d *= static_cast<std::size_t>(m.n_max + 1);
    return d;
  }

  std::size_t dim() const { return internal_dim() * motional_dim(); }

  int mode_count() const { return static_cast<int>(mode_list.size()); }

  int mode_position(int mode_id) const {
    for (int k = 0; k < mode_count(); ++k)
      if (mode_list[k].mode_id == mode_id) return k;
    throw std::invalid_argument("mode id " + std::to_string(mode_id) + " not in space");
  }

  // internal index: ion 0 is the most significant bit, S=0, D=1
  std::size_t internal_index(std::string_view internal) const {
    if (static_cast<int>(internal.size()) != ion_count)
      throw std::invalid_argument("internal string length != ion_count");
    std::size_t idx = 0;
    for (char c : internal) {
      if (c != 'S' && c != 'D') throw std::invalid_argument("internal labels are S or D");
      idx = (idx << 1) | (c == 'D' ? 1u : 0u);
    }
    return idx;
  }

  std::size_t occupation_index(std::span<const int> occ) const {
    if (static_cast<int>(occ.size()) != mode_count())
      throw std::invalid_argument("occupation list length != mode count");
    std::size_t idx = 0;
    for (int k = 0; k < mode_count(); ++k) {
      if (occ[k] < 0 || occ[k] > mode_list[k].n_max)
        throw std::invalid_argument("occupation exceeds truncation");
      idx = idx * static_cast<std::size_t>(mode_list[k].n_max + 1) +
            static_cast<std::size_t>(occ[k]);
    }
    return idx;
  }

  std::size_t index_of(std::string_view internal, std::span<const int> occ) const {
    return internal_index(internal) * motional_dim() + occupation_index(occ);
  }

  void decompose(std::size_t index, std::size_t& internal, std::vector<int>& occ) const {
    const std::size_t md = motional_dim();
    internal = index / md;
    std::size_t rest = index % md;
    occ.assign(mode_count(), 0);
    for (int k = mode_count() - 1; k >= 0; --k) {
      const std::size_t radix = static_cast<std::size_t>(mode_list[k].n_max + 1);
      occ[k] = static_cast<int>(rest % radix);
      rest /= radix;
    }
  }

  std::string internal_label(std::size_t internal) const {
    std::string s(ion_count, 'S');
    for (int j = 0; j < ion_count; ++j)
      if (internal & (std::size_t{1} << (ion_count - 1 - j))) s[j] = 'D';
    return s;
  }

  // e.g. "SD|0,1" for two ions and two modes
  std::string basis_label(std::size_t index) const {
    std::size_t internal;
    std::vector<int> occ;
    decompose(index, internal, occ);
    std::string label = internal_label(internal);
    if (!occ.empty()) {
      label += '|';
      for (int k = 0; k < mode_count(); ++k) {
        if (k) label += ',';
        label += std::to_string(occ[k]);
      }
    }
    return label;
  }

  bool ion_is_excited(std::size_t internal, int ion) const {
    return internal & (std::size_t{1} << (ion_count - 1 - ion));
  }

  friend bool operator==(const SpaceSpec& a, const SpaceSpec& b) {
    if (a.ion_count != b.ion_count || a.mode_list.size() != b.mode_list.size())
      return false;
    for (std::size_t k = 0; k < a.mode_list.size(); ++k)
      if (a.mode_list[k].mode_id != b.mode_list[k].mode_id ||
          a.mode_list[k].n_max != b.mode_list[k].n_max)
        return false;
    return true;
  }
};

struct StateVector {
  SpaceSpec space;
  Eigen::VectorXcd amplitudes;

  double norm() const { return amplitudes.norm(); }
};

inline StateVector prepare(const SpaceSpec& space, std::string_view internal,
                           std::span<const int> phonons) {
  space.validate();
  StateVector state{space, Eigen::VectorXcd::Zero(space.dim())};
  state.amplitudes[space.index_of(internal, phonons)] = 1.0;
  return state;
}

inline StateVector prepare(const SpaceSpec& space, std::string_view internal,
                           std::initializer_list<int> phonons) {
  std::vector<int> occ(phonons);
  return prepare(space, internal, std::span<const int>(occ));
}

// Which parts of the space a marginal keeps.  Probabilities of dropped
// factors are summed over.
struct Marginal {
  std::vector<int> ions;        // ion indices to keep
  std::vector<int> mode_slots;  // positions in mode_list to keep

  static Marginal full(const SpaceSpec& space) {
    Marginal m;
    for (int j = 0; j < space.ion_count; ++j) m.ions.push_back(j);
    for (int k = 0; k < space.mode_count(); ++k) m.mode_slots.push_back(k);
    return m;
  }
  static Marginal internal_only(const SpaceSpec& space) {
    Marginal m;
    for (int j = 0; j < space.ion_count; ++j) m.ions.push_back(j);
    return m;
  }
};

struct ProbabilityTable {
  std::vector<std::string> labels;
  std::vector<double> probabilities;

  double total() const {
    double s = 0;
    for (double p : probabilities) s += p;
    return s;
  }
  double operator[](const std::string& label) const {
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == label) return probabilities[i];
    return 0.0;
  }
};

inline ProbabilityTable populations(const StateVector& state, const Marginal& marginal) {
  const SpaceSpec& space = state.space;
  std::map<std::string, double> acc;
  std::size_t internal;
  std::vector<int> occ;
  for (std::size_t i = 0; i < space.dim(); ++i) {
    const double p = std::norm(state.amplitudes[i]);
    if (p == 0.0) continue;
    space.decompose(i, internal, occ);
    std::string label;
    for (int j : marginal.ions) label += space.ion_is_excited(internal, j) ? 'D' : 'S';
    if (!marginal.mode_slots.empty()) {
      label += '|';
      bool first = true;
      for (int k : marginal.mode_slots) {
        if (!first) label += ',';
        label += std::to_string(occ.at(k));
        first = false;
      }
    }
    acc[label] += p;
  }
  ProbabilityTable table;
  for (auto& [label, p] : acc) {
    table.labels.push_back(label);
    table.probabilities.push_back(p);
  }
  return table;
}

inline ProbabilityTable populations(const StateVector& state) {
  return populations(state, Marginal::full(state.space));
}

inline double fidelity(const StateVector& state, const StateVector& target) {
  if (!(state.space == target.space) ||
      state.amplitudes.size() != target.amplitudes.size())
    throw std::invalid_argument("fidelity: states live in different spaces");
  return std::norm(target.amplitudes.dot(state.amplitudes));
}

struct MeasurementOutcome {
  std::string internal;      // one character per ion
  std::vector<int> phonons;  // empty unless phonons were projected

  std::string label() const {
    std::string s = internal;
    if (!phonons.empty()) {
      s += '|';
      for (std::size_t k = 0; k < phonons.size(); ++k) {
        if (k) s += ',';
        s += std::to_string(phonons[k]);
      }
    }
    return s;
  }
};

// Projective measurement with exact Born-rule weights; deterministic given
// the stream state.
inline MeasurementOutcome measure(const StateVector& state, RngStream& rng,
                                  bool project_phonons = false) {
  const SpaceSpec& space = state.space;
  std::vector<double> weights(space.dim());
  for (std::size_t i = 0; i < space.dim(); ++i)
    weights[i] = std::norm(state.amplitudes[i]);
  std::size_t drawn;
  if (project_phonons) {
    drawn = rng.discrete(weights);
  } else {
    std::vector<double> internal_weights(space.internal_dim(), 0.0);
    const std::size_t md = space.motional_dim();
    for (std::size_t i = 0; i < space.dim(); ++i) internal_weights[i / md] += weights[i];
    drawn = rng.discrete(internal_weights) * md;  // phonons not projected
  }
  std::size_t internal;
  std::vector<int> occ;
  space.decompose(drawn, internal, occ);
  MeasurementOutcome out;
  out.internal = space.internal_label(internal);
  if (project_phonons) out.phonons = occ;
  return out;
}

// CSV dump: basis label, Re, Im; amplitudes below 1e-12 omitted.  The header
// row records the space so dumps are self-describing.
inline std::string dump_state_csv(const StateVector& state) {
  std::string spec = "amplitude_re@ions=" + std::to_string(state.space.ion_count);
  for (const auto& m : state.space.mode_list)
    spec += ";mode" + std::to_string(m.mode_id) + ":nmax=" + std::to_string(m.n_max);
  CsvWriter csv({"basis", spec, "amplitude_im"});
  for (std::size_t i = 0; i < state.space.dim(); ++i) {
    const cxd a = state.amplitudes[i];
    if (std::abs(a) < 1e-12) continue;
    csv.add_row_mixed({state.space.basis_label(i), fmt_num(a.real()), fmt_num(a.imag())});
  }
  return csv.str();
}

}  // namespace iontrap
