#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "irssec/rng.hpp"
#include "irssec/types.hpp"

namespace irssec {

struct Vec3 {
  double x = 0, y = 0, z = 0;
};

double distance(const Vec3& a, const Vec3& b);

// Axis-aligned rectangle on the plane z = height.
struct Area {
  double x0 = 0, x1 = 0, y0 = 0, y1 = 0, height = 0;
  bool contains(const Vec3& p) const { return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1; }
};

struct Geometry {
  Vec3 alice{15, 0, 15};
  Vec3 irs{0, 25, 40};
  Area users{20, 80, 20, 80, 0};
  Area eve{0, 100, 0, 100, 0};
  double eve_min_distance = 5.0;
};

class ScenarioError : public std::invalid_argument {
 public:
  ScenarioError(const std::string& key, const std::string& what)
      : std::invalid_argument(key + ": " + what), key_(key) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

struct Scenario {
  int N = 10;
  int M = 16;
  int K = 5;
  double P = 0.1;                   // watts (20 dBm)
  double noise_density = -174.0;    // dBm/Hz
  double bandwidth = 1e6;           // Hz
  double t_t = 1e-4;                // s
  double tau_k = 1e-5, tau_e = 1e-5;
  double delta_k = 0.02, delta_e = 0.02;
  double rician_K = 3.0;
  Geometry geometry;
  double G_A = 5.0, G_IRS = 5.0;    // dBi
  std::uint64_t seed = 1;
  double eps_t = 1e-3, eps_t1 = 1e-3, eps_t2 = 1e-3;
  double a_init = 10.0, a_max = 30.0, nu = 2.0;
  int n_max = 100;                  // PCCP iterations per call
  int ao_max = 50;                  // AO iterations

  void validate() const;
  double noise_power() const;       // watts
  double blocklength() const { return bandwidth * t_t; }
};

struct ChannelSet {
  CMat L_AR;                   // M x N
  std::vector<CRow> l_hat;     // K users, then Eve; each 1 x M
  std::vector<CMat> R;         // spatial correlation per node
  std::vector<double> omega;   // uncertainty radius per node
  double pathloss_AR = 0;      // linear
  std::vector<double> pathloss_R;
  std::vector<Vec3> positions; // K users, then Eve

  int users() const { return int(l_hat.size()) - 1; }
  int eve() const { return users(); }
};

double db_to_linear(double db);
double dbm_to_watt(double dbm);

double pathloss_alice_irs(double d, double G_A, double G_IRS);
double pathloss_irs_node(double d, double G_IRS);

CMat gen_alice_irs_channel(const Scenario& sc, Rng& rng);

// [R]_{l,lb} = exp(j pi (l - lb) sin(azimuth) sin(elevation))
CMat spatial_correlation(int M, double azimuth, double elevation);
CMat correlation_sqrt(const CMat& R);

CRow reflected_channel(double pathloss, const CMat& R, double rician_K, Rng& rng);
CRow gen_reflected_channel(const Scenario& sc, const Vec3& node, Rng& rng);

CRow cascaded_channel(const CRow& l, const PhaseVector& theta, const CMat& L_AR);

double uncertainty_radius(const CRow& l_hat, double delta);
CRow sample_error_ball(double omega, int M, Rng& rng);

// Users uniformly in their area; Eve rejection-sampled in her area, outside the
// users' area and at least eve_min_distance from every user.
std::vector<Vec3> place_nodes(const Scenario& sc, Rng& rng);

ChannelSet generate_channels(const Scenario& sc, Rng& rng);

}  // namespace irssec
