#include "kinetic/lj.hpp"

#include <cmath>
#include <fstream>

namespace kinetic {

namespace {

void check_separation(double h, double r) {
  if (h < 1e-9 * r)
    throw SingularityError("coincident particles in LJ evaluation");
}

}  // namespace

double smooth_cutoff(double s) {
  if (s <= 0.5) return 1.0;
  if (s >= 1.0) return 0.0;
  double t = 2.0 * s - 1.0;
  return 1.0 - t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

double smooth_cutoff_deriv(double s) {
  if (s <= 0.5 || s >= 1.0) return 0.0;
  double t = 2.0 * s - 1.0;
  double u = t * (1.0 - t);
  return -60.0 * u * u;
}

double lj_pair_energy(const LJSystem& sys, double h) {
  check_separation(h, sys.radius);
  double q = sys.radius / h;
  double q6 = q * q * q;
  q6 *= q6;
  return (q6 * q6 - q6) * smooth_cutoff(h / sys.box);
}

double lj_pair_energy_deriv(const LJSystem& sys, double h) {
  check_separation(h, sys.radius);
  double q = sys.radius / h;
  double q6 = q * q * q;
  q6 *= q6;
  double core = q6 * q6 - q6;
  double core_deriv = (-12.0 * q6 * q6 + 6.0 * q6) / h;
  return core_deriv * smooth_cutoff(h / sys.box) +
         core * smooth_cutoff_deriv(h / sys.box) / sys.box;
}

Eigen::Vector3d min_image(double box, const Eigen::Vector3d& diff) {
  Eigen::Vector3d d = diff;
  for (int k = 0; k < 3; ++k) d(k) -= box * std::round(d(k) / box);
  return d;
}

double lj_energy(const LJSystem& sys) {
  double total = 0.0;
  for (int i = 0; i < sys.particles; ++i) {
    for (int j = i + 1; j < sys.particles; ++j) {
      Eigen::Vector3d d =
          min_image(sys.box, sys.positions.col(i) - sys.positions.col(j));
      total += lj_pair_energy(sys, d.norm());
    }
  }
  return 2.0 * sys.u0 * total;  // both ordered pairs
}

Eigen::VectorXd lj_gradient(const LJSystem& sys,
                            const Eigen::Matrix3Xd& positions) {
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(3 * sys.particles);
  for (int i = 0; i < sys.particles; ++i) {
    for (int j = i + 1; j < sys.particles; ++j) {
      Eigen::Vector3d d = min_image(sys.box, positions.col(i) - positions.col(j));
      double h = d.norm();
      Eigen::Vector3d g = 2.0 * sys.u0 * lj_pair_energy_deriv(sys, h) * d / h;
      grad.segment<3>(3 * i) += g;
      grad.segment<3>(3 * j) -= g;
    }
  }
  return grad;
}

void NeighborList::build(double box, const Eigen::Matrix3Xd& positions,
                         double cut) {
  cutoff = cut;
  int m = static_cast<int>(positions.cols());
  neighbors.assign(m, {});
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      Eigen::Vector3d d = min_image(box, positions.col(i) - positions.col(j));
      if (d.norm() <= cut) neighbors[i].push_back(j);
    }
  }
}

Eigen::VectorXd ForceSplit::f0(const Eigen::Matrix3Xd& positions) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(3 * particles);
  LJSystem view{particles, box, radius, u0, split_r, {}};
  for (int i = 0; i < particles; ++i) {
    for (int j = i + 1; j < particles; ++j) {
      Eigen::Vector3d d = min_image(box, positions.col(i) - positions.col(j));
      double h = d.norm();
      double weight = smooth_cutoff(h / split_r);
      if (weight == 0.0) continue;
      Eigen::Vector3d g =
          2.0 * u0 * lj_pair_energy_deriv(view, h) * weight * d / h;
      out.segment<3>(3 * i) += g;
      out.segment<3>(3 * j) -= g;
    }
  }
  return out;
}

Eigen::VectorXd ForceSplit::f0(const Eigen::Matrix3Xd& positions,
                               const NeighborList& list) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(3 * particles);
  LJSystem view{particles, box, radius, u0, split_r, {}};
  for (int i = 0; i < particles; ++i) {
    for (int j : list.neighbors[i]) {
      Eigen::Vector3d d = min_image(box, positions.col(i) - positions.col(j));
      double h = d.norm();
      double weight = smooth_cutoff(h / split_r);
      if (weight == 0.0) continue;
      Eigen::Vector3d g =
          2.0 * u0 * lj_pair_energy_deriv(view, h) * weight * d / h;
      out.segment<3>(3 * i) += g;
      out.segment<3>(3 * j) -= g;
    }
  }
  return out;
}

Eigen::Vector3d ForceSplit::pair_field(const Eigen::Matrix3Xd& positions,
                                       int i, int j) const {
  LJSystem view{particles, box, radius, u0, split_r, {}};
  Eigen::Vector3d d = min_image(box, positions.col(i) - positions.col(j));
  double h = d.norm();
  double weight = 1.0 - smooth_cutoff(h / split_r);
  if (weight == 0.0) return Eigen::Vector3d::Zero();
  return 2.0 * u0 * lj_pair_energy_deriv(view, h) * weight * d / h;
}

ForceSplit lj_force_split_unchecked(const LJSystem& sys) {
  ForceSplit fs;
  fs.particles = sys.particles;
  fs.box = sys.box;
  fs.radius = sys.radius;
  fs.u0 = sys.u0;
  fs.split_r = sys.split_r;

  // C_R by dense scan of |2 U0 W'| over [R/2, a]; grid step <= r/1000, plus a
  // 1% safety factor.  W' vanishes beyond the box cutoff, so [R/2, a] covers
  // the support.
  if (sys.u0 != 0.0 && sys.split_r / 2.0 < sys.box) {
    double lo = sys.split_r / 2.0;
    double hi = sys.box;
    double step = sys.radius / 1000.0;
    std::int64_t n = static_cast<std::int64_t>(std::ceil((hi - lo) / step));
    double peak = 0.0;
    for (std::int64_t k = 0; k <= n; ++k) {
      double h = lo + (hi - lo) * static_cast<double>(k) / n;
      peak = std::max(peak, std::abs(lj_pair_energy_deriv(sys, h)));
    }
    fs.c_r = 1.01 * 2.0 * std::abs(sys.u0) * peak;
  }

  if (sys.particles > 1) {
    std::int64_t count = 0;
    for (int i = 0; i < sys.particles; ++i) {
      for (int j = 0; j < sys.particles; ++j) {
        if (j == i) continue;
        Eigen::Vector3d d =
            min_image(sys.box, sys.positions.col(i) - sys.positions.col(j));
        if (d.norm() <= sys.split_r) ++count;
      }
    }
    fs.nr_estimate = static_cast<double>(count) / sys.particles;
  }
  return fs;
}

ForceSplit lj_force_split(const LJSystem& sys) {
  if (!(sys.split_r < sys.box / 2.0))
    throw ConfigError("lj_force_split: split radius must satisfy R < a/2");
  return lj_force_split_unchecked(sys);
}

Eigen::Matrix3Xd lattice_configuration(int particles, double box) {
  if (particles < 1) throw ConfigError("lattice_configuration: M must be >= 1");
  int n = 1;
  while (n * n * n < particles) ++n;
  double spacing = box / n;
  Eigen::Matrix3Xd pos(3, particles);
  int placed = 0;
  for (int ix = 0; ix < n && placed < particles; ++ix)
    for (int iy = 0; iy < n && placed < particles; ++iy)
      for (int iz = 0; iz < n && placed < particles; ++iz) {
        pos.col(placed++) = Eigen::Vector3d((ix + 0.5) * spacing,
                                            (iy + 0.5) * spacing,
                                            (iz + 0.5) * spacing);
      }
  return pos;
}

XyzData read_xyz(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration file: " + path);
  XyzData data;
  if (!(in >> data.particles) || data.particles < 1)
    throw ConfigError("bad particle count in " + path);
  if (!(in >> data.box) || data.box <= 0.0)
    throw ConfigError("bad box side in " + path);
  data.positions.resize(3, data.particles);
  for (int i = 0; i < data.particles; ++i) {
    double x, y, z;
    if (!(in >> x >> y >> z))
      throw ConfigError("truncated configuration file: " + path);
    data.positions.col(i) = Eigen::Vector3d(x, y, z);
  }
  return data;
}

void write_xyz(const std::string& path, const LJSystem& sys) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write configuration file: " + path);
  out.precision(17);
  out << sys.particles << "\n" << sys.box << "\n";
  for (int i = 0; i < sys.particles; ++i) {
    out << sys.positions(0, i) << " " << sys.positions(1, i) << " "
        << sys.positions(2, i) << "\n";
  }
}

}  // namespace kinetic
