#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "kinetic/errors.hpp"

namespace kinetic {

// M-particle Lennard-Jones system in the periodic box [0, a)^3 with a global
// smooth truncation at the box scale and a short/long split radius R used by
// the force decomposition.  Energy counts both ordered pairs:
//   U(x) = U0 sum_i sum_{j != i} W(|x_i - x_j|),
//   W(h) = [(r/h)^12 - (r/h)^6] chi(h/a).
struct LJSystem {
  int particles = 0;      // M
  double box = 0.0;       // a
  double radius = 1.0;    // r
  double u0 = 1.0;        // U0
  double split_r = 0.0;   // R
  Eigen::Matrix3Xd positions;  // column i = particle i, coordinates in [0, a)
};

// C2 cutoff profile: 1 on [0, 1/2], 0 on [1, inf), quintic smoothstep bridge.
double smooth_cutoff(double s);
double smooth_cutoff_deriv(double s);

// Pair terms without the U0 prefactor.
double lj_pair_energy(const LJSystem& sys, double h);   // W(h)
double lj_pair_energy_deriv(const LJSystem& sys, double h);  // W'(h)

// Componentwise wrap of a separation vector into [-a/2, a/2).
Eigen::Vector3d min_image(double box, const Eigen::Vector3d& diff);

double lj_energy(const LJSystem& sys);

// Full gradient of lj_energy, flattened to 3M (slot i = coordinates of
// particle i).
Eigen::VectorXd lj_gradient(const LJSystem& sys,
                            const Eigen::Matrix3Xd& positions);
inline Eigen::VectorXd lj_gradient(const LJSystem& sys) {
  return lj_gradient(sys, sys.positions);
}

// Pair list within a cutoff + skin, rebuilt by the caller's policy.
struct NeighborList {
  double cutoff = 0.0;
  std::vector<std::vector<int>> neighbors;  // j > i only
  void build(double box, const Eigen::Matrix3Xd& positions, double cutoff);
};

// Short-range field F0 (gradient part within chi(h/R)) plus bounded pairwise
// long-range fields G_{i,j}, with the uniform field bound C_R:
//   grad U = F0 + sum_{i != j} lift(G_{i,j}, i),  |G_{i,j}| <= C_R.
struct ForceSplit {
  int particles = 0;
  double box = 0.0, radius = 1.0, u0 = 1.0, split_r = 0.0;
  double c_r = 0.0;         // 1.01 * sup |2 U0 W'| over [R/2, a], by dense scan
  double nr_estimate = 0.0; // mean neighbor count within R at construction

  Eigen::VectorXd f0(const Eigen::Matrix3Xd& positions) const;
  Eigen::VectorXd f0(const Eigen::Matrix3Xd& positions,
                     const NeighborList& list) const;
  Eigen::Vector3d pair_field(const Eigen::Matrix3Xd& positions, int i,
                             int j) const;
};

ForceSplit lj_force_split(const LJSystem& sys);  // requires R < a/2
// Same construction without the R < a/2 guard; for degenerate-limit checks.
ForceSplit lj_force_split_unchecked(const LJSystem& sys);

// Deterministic simple-cubic packing of M particles in [0, a)^3.
Eigen::Matrix3Xd lattice_configuration(int particles, double box);

// Plain-text configuration file: line 1 = M, line 2 = a, then M lines "x y z".
struct XyzData {
  int particles = 0;
  double box = 0.0;
  Eigen::Matrix3Xd positions;
};
XyzData read_xyz(const std::string& path);
void write_xyz(const std::string& path, const LJSystem& sys);

}  // namespace kinetic
