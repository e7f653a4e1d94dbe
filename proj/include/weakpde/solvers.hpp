#pragma once

#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "weakpde/grid_field.hpp"

namespace weakpde {

// Flat key=value provenance written next to generated fields.
using Metadata = std::map<std::string, std::string>;

/// Kuramoto-Sivashinsky  u_t + u u_x + u_xx + u_xxxx = 0, periodic in x.
struct KSParams {
  double length = 32.0 * std::numbers::pi;
  double duration = 100.0;
  double dx = 0.0982;
  double dt = 0.4;
  /// ETDRK4 steps per output interval.
  int substeps = 8;
  /// "cos_sin": cos(x/16)(1 + sin(x/16)); "sine": amplitude * sin(2 pi mode x / L); "zero".
  std::string initial_condition = "cos_sin";
  double ic_amplitude = 1e-3;
  int ic_mode = 1;
  /// Test hook: drop u u_x and integrate the linear part only.
  bool linear_only = false;
};

/// lambda-omega reaction-diffusion, z = u + i v:
///   z_t = D lap z + (1 - |z|^2) z - i beta |z|^2 z,  doubly periodic.
struct RDParams {
  double D = 0.1;
  double beta = 1.0;
  double length = 20.0;
  double duration = 10.0;
  double dx = 0.0391;
  double dt = 0.05;
  int substeps = 2;
  /// "spiral": tanh(r) exp(i (theta - r)) about the center; "uniform": (ic_u, ic_v).
  std::string initial_condition = "spiral";
  double ic_u = 1.0;
  double ic_v = 0.0;
};

/// u_t = c1 (u.grad)u + c2 lap u + c3 u - grad p + f, div u = 0, with
/// f = A sin(kappa y) x-hat, integrated in vorticity form on a doubly
/// periodic box. The solver grid has spacing dx; recorded output keeps every
/// space_stride-th node and every output_dt = time_stride * (solver step).
struct KolmogorovParams {
  double c1 = -0.826;
  double c2 = 0.0487;
  double c3 = -0.157;
  double amplitude = 1.0649;
  double kappa = std::numbers::pi;
  double lx = 14.0;
  double ly = 18.0;
  double duration = 100.0;
  /// Integration time discarded before recording starts.
  double spinup = 200.0;
  double dx = 0.025;
  double output_dt = 0.2302;
  int time_stride = 12;
  int space_stride = 4;
  /// "laminar": perturbed laminar profile; "vortex": Gaussian vortex; "zero".
  std::string initial_condition = "laminar";
  double perturbation = 0.05;
  std::uint64_t seed = 7;
  /// Store pressure and forcing on the recorded grid.
  bool record_latent = false;
};

/// Latent fields of the Kolmogorov model on the recorded grid. Diagnostics
/// only: discovery takes the velocity field and nothing else.
struct LatentRecord {
  GridField pressure;  // one component
  GridField forcing;   // (f_x, f_y)
};

struct KolmogorovResult {
  GridField velocity;
  std::optional<LatentRecord> latent;
  /// Kinetic energy 0.5 <|u|^2> (domain mean) at each recorded time.
  std::vector<double> energy;
  /// max |div u| over recorded snapshots, evaluated spectrally.
  double max_divergence = 0.0;
  bool time_dependent = true;
};

GridField solve_ks(const KSParams& params);
GridField solve_lambda_omega(const RDParams& params);
KolmogorovResult solve_kolmogorov(const KolmogorovParams& params);

/// Number of Fourier modes for a periodic length sampled at roughly dx:
/// exact when length/dx is an integer, else the nearest 2,3,5,7-smooth even count.
std::size_t mode_count(double length, double dx);

Metadata metadata_of(const KSParams& params);
Metadata metadata_of(const RDParams& params);
Metadata metadata_of(const KolmogorovParams& params);
void write_metadata(const Metadata& metadata, const std::filesystem::path& path);
Metadata read_metadata(const std::filesystem::path& path);

KSParams ks_params_from(const Metadata& metadata);
RDParams rd_params_from(const Metadata& metadata);
KolmogorovParams kolmogorov_params_from(const Metadata& metadata);

// Coefficients of each built-in library under the generating parameters,
// zero for library terms absent from the model.
Eigen::VectorXd ks_reference();
Eigen::VectorXd kolmogorov_reference(const KolmogorovParams& params);
Eigen::VectorXd lambda_omega_reference(const RDParams& params, int component);

}  // namespace weakpde
