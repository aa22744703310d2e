#include "irssec/channel.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace irssec {

double distance(const Vec3& a, const Vec3& b) {
  return std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y) + (a.z - b.z) * (a.z - b.z));
}

void Scenario::validate() const {
  if (N < 1) throw ScenarioError("system.N", "must be >= 1");
  if (M < 1) throw ScenarioError("system.M", "must be >= 1");
  if (K < 1) throw ScenarioError("system.K", "must be >= 1");
  if (!(P > 0)) throw ScenarioError("power.P", "must be > 0");
  if (!(bandwidth > 0)) throw ScenarioError("fbr.bandwidth", "must be > 0");
  if (!(t_t > 0)) throw ScenarioError("fbr.t_t", "must be > 0");
  if (!(tau_k > 0 && tau_k < 0.5)) throw ScenarioError("fbr.tau_k", "must lie in (0, 0.5)");
  if (!(tau_e > 0 && tau_e < 0.5)) throw ScenarioError("fbr.tau_e", "must lie in (0, 0.5)");
  if (!(delta_k >= 0 && delta_k < 1)) throw ScenarioError("csi.delta_k", "must lie in [0, 1)");
  if (!(delta_e >= 0 && delta_e < 1)) throw ScenarioError("csi.delta_e", "must lie in [0, 1)");
  if (!(rician_K >= 0)) throw ScenarioError("channel.rician_K", "must be >= 0");
  if (!(eps_t > 0)) throw ScenarioError("solver.eps_t", "must be > 0");
  if (!(eps_t1 > 0)) throw ScenarioError("solver.eps_t1", "must be > 0");
  if (!(eps_t2 > 0)) throw ScenarioError("solver.eps_t2", "must be > 0");
  if (!(a_init > 0)) throw ScenarioError("pccp.a_init", "must be > 0");
  if (!(a_init <= a_max)) throw ScenarioError("pccp.a_max", "must be >= pccp.a_init");
  if (!(nu >= 1)) throw ScenarioError("pccp.nu", "must be >= 1");
  if (n_max < 1) throw ScenarioError("pccp.n_max", "must be >= 1");
  if (ao_max < 1) throw ScenarioError("solver.ao_max", "must be >= 1");
  const Area& u = geometry.users;
  const Area& e = geometry.eve;
  if (!(u.x1 > u.x0 && u.y1 > u.y0)) throw ScenarioError("geometry.users", "empty area");
  if (!(e.x1 > e.x0 && e.y1 > e.y0)) throw ScenarioError("geometry.eve", "empty area");
  if (!(geometry.eve_min_distance >= 0)) throw ScenarioError("geometry.eve_min_distance", "must be >= 0");
}

double Scenario::noise_power() const { return dbm_to_watt(noise_density + 10.0 * std::log10(bandwidth)); }

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double pathloss_alice_irs(double d, double G_A, double G_IRS) {
  if (!(d > 0)) throw std::invalid_argument("pathloss_alice_irs: distance must be positive");
  return G_A + G_IRS - 35.9 - 22.0 * std::log10(d);
}

double pathloss_irs_node(double d, double G_IRS) {
  if (!(d > 0)) throw std::invalid_argument("pathloss_irs_node: distance must be positive");
  return G_IRS - 33.05 - 30.0 * std::log10(d);
}

CMat gen_alice_irs_channel(const Scenario& sc, Rng& rng) {
  const double d = distance(sc.geometry.alice, sc.geometry.irs);
  const double scale = std::sqrt(db_to_linear(pathloss_alice_irs(d, sc.G_A, sc.G_IRS)));
  RVec az(sc.N), el(sc.N), elem(sc.M);
  for (int b = 0; b < sc.N; ++b) {
    az(b) = rng.uniform(0, kTwoPi);
    el(b) = rng.uniform(0, kTwoPi);
  }
  for (int a = 0; a < sc.M; ++a) elem(a) = rng.uniform(0, kTwoPi);
  CMat G(sc.M, sc.N);
  for (int a = 0; a < sc.M; ++a)
    for (int b = 0; b < sc.N; ++b) {
      double phase = kPi * (b * std::sin(kPi - az(b)) * std::sin(kPi + el(b)) +
                            a * std::sin(elem(a)) * std::sin(el(b)));
      G(a, b) = std::polar(scale, phase);
    }
  return G;
}

CMat spatial_correlation(int M, double azimuth, double elevation) {
  const double s = std::sin(azimuth) * std::sin(elevation);
  CMat R(M, M);
  for (int l = 0; l < M; ++l)
    for (int lb = 0; lb < M; ++lb) R(l, lb) = std::polar(1.0, kPi * (l - lb) * s);
  return R;
}

CMat correlation_sqrt(const CMat& R) {
  Eigen::SelfAdjointEigenSolver<CMat> es(R);
  RVec ev = es.eigenvalues();
  const double tol = 1e-10 * std::max(1.0, ev.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) < -tol) {
      std::ostringstream os;
      os << "correlation matrix is not PSD: eigenvalue " << ev(i);
      throw std::runtime_error(os.str());
    }
    ev(i) = std::sqrt(std::max(ev(i), 0.0));
  }
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

CRow reflected_channel(double pathloss, const CMat& R, double rician_K, Rng& rng) {
  const Eigen::Index M = R.rows();
  double w_los = 1.0, w_nlos = 0.0;
  if (std::isfinite(rician_K)) {
    w_los = std::sqrt(rician_K / (rician_K + 1.0));
    w_nlos = std::sqrt(1.0 / (rician_K + 1.0));
  }
  CRow tilde(M);
  for (Eigen::Index m = 0; m < M; ++m) {
    cd los = std::polar(1.0, rng.uniform(0, kTwoPi));
    cd nlos = rng.cnormal();
    tilde(m) = w_los * los + w_nlos * nlos;
  }
  return std::sqrt(pathloss) * tilde * correlation_sqrt(R);
}

CRow gen_reflected_channel(const Scenario& sc, const Vec3& node, Rng& rng) {
  const Vec3& irs = sc.geometry.irs;
  const double dx = node.x - irs.x, dy = node.y - irs.y, dz = node.z - irs.z;
  const double azimuth = std::atan2(dy, dx);
  const double elevation = std::atan2(dz, std::hypot(dx, dy));
  const double pl = db_to_linear(pathloss_irs_node(distance(node, irs), sc.G_IRS));
  return reflected_channel(pl, spatial_correlation(sc.M, azimuth, elevation), sc.rician_K, rng);
}

CRow cascaded_channel(const CRow& l, const PhaseVector& theta, const CMat& L_AR) {
  if (l.size() != theta.size() || L_AR.rows() != l.size())
    throw std::invalid_argument("cascaded_channel: dimension mismatch");
  return l.cwiseProduct(unit_modulus(theta).transpose()) * L_AR;
}

double uncertainty_radius(const CRow& l_hat, double delta) {
  if (!(delta >= 0 && delta < 1)) throw std::invalid_argument("uncertainty_radius: delta must lie in [0, 1)");
  return delta * l_hat.norm();
}

CRow sample_error_ball(double omega, int M, Rng& rng) {
  CRow d(M);
  for (int m = 0; m < M; ++m) d(m) = rng.cnormal();
  if (omega <= 0) return CRow::Zero(M);
  // Half of the draws sit on the sphere, the rest are uniform in the ball.
  double r = omega;
  if (rng.uniform() >= 0.5) r *= std::pow(rng.uniform(), 1.0 / (2.0 * M));
  double n = d.norm();
  if (n == 0) {
    d.setZero();
    d(0) = r;
    return d;
  }
  return d * (r / n);
}

std::vector<Vec3> place_nodes(const Scenario& sc, Rng& rng) {
  const Geometry& g = sc.geometry;
  std::vector<Vec3> pos;
  for (int k = 0; k < sc.K; ++k)
    pos.push_back({rng.uniform(g.users.x0, g.users.x1), rng.uniform(g.users.y0, g.users.y1), g.users.height});
  for (int attempt = 0; attempt < 100000; ++attempt) {
    Vec3 e{rng.uniform(g.eve.x0, g.eve.x1), rng.uniform(g.eve.y0, g.eve.y1), g.eve.height};
    if (g.users.contains(e)) continue;
    bool near = false;
    for (int k = 0; k < sc.K; ++k) near = near || distance(e, pos[k]) < g.eve_min_distance;
    if (near) continue;
    pos.push_back(e);
    return pos;
  }
  throw ScenarioError("geometry.eve", "no admissible eavesdropper position");
}

ChannelSet generate_channels(const Scenario& sc, Rng& rng) {
  sc.validate();
  ChannelSet ch;
  ch.positions = place_nodes(sc, rng);
  ch.pathloss_AR = db_to_linear(pathloss_alice_irs(distance(sc.geometry.alice, sc.geometry.irs), sc.G_A, sc.G_IRS));
  ch.L_AR = gen_alice_irs_channel(sc, rng);
  for (int i = 0; i <= sc.K; ++i) {
    const Vec3& p = ch.positions[i];
    const Vec3& irs = sc.geometry.irs;
    const double dx = p.x - irs.x, dy = p.y - irs.y, dz = p.z - irs.z;
    ch.R.push_back(spatial_correlation(sc.M, std::atan2(dy, dx), std::atan2(dz, std::hypot(dx, dy))));
    ch.pathloss_R.push_back(db_to_linear(pathloss_irs_node(distance(p, irs), sc.G_IRS)));
    ch.l_hat.push_back(reflected_channel(ch.pathloss_R.back(), ch.R.back(), sc.rician_K, rng));
    ch.omega.push_back(uncertainty_radius(ch.l_hat.back(), i < sc.K ? sc.delta_k : sc.delta_e));
  }
  return ch;
}

}  // namespace irssec
