#pragma once

// Probe-state families and their analytic predictions.

#include "ipower/qmat.hpp"

#include <string_view>
#include <vector>

namespace ipower::probes {

enum class Family {
  Q,             // discordant family, parameter p in [0, 1]
  C,             // classically correlated family, parameter p in [0, 1]
  Werner,        // f |Phi+><Phi+| + (1 - f) 1/4, parameter f in [0, 1]
  BellDiagonal,  // (1 + sum_i c_i sigma_i (x) sigma_i) / 4, parameters (c1, c2, c3)
  Separable,     // (|00><00| + |+1><+1|) / 2, no parameters
  PsiBell,       // singlet |Psi-><Psi-|, no parameters
};

// CLI labels: "Q", "C", "werner", "belldiag", "sep", "psibell".
Family parse_family(std::string_view label);
std::string_view label(Family family);

struct ProbeFamily {
  Family family = Family::Q;
  std::vector<double> parameters;
};

ProbeFamily q_probe(double p);
ProbeFamily c_probe(double p);
ProbeFamily werner(double f);
ProbeFamily bell_diagonal(double c1, double c2, double c3);
ProbeFamily separable();
ProbeFamily psi_bell();

// Throws ParameterOutOfRange for bad parameter counts or ranges and
// NotPositiveSemidefinite for Bell-diagonal triples outside the tetrahedron.
qmat::DensityMatrix make_probe(const ProbeFamily& probe);

// Analytic QFI of the Q and C families under black-box setting k = 1, 2, 3.
double predicted_qfi(Family family, double p, int setting);

// k = 1: sigma_z, k = 2: (sigma_x + sigma_y)/sqrt 2, k = 3: sigma_x.
qmat::LocalHamiltonian black_box_setting(int setting);
qmat::BlochVector setting_direction(int setting);

// p = cos(theta) over a flip-angle sweep in degrees, endpoints included.
std::vector<double> flip_angle_grid(double start_deg = 0.0, double stop_deg = 90.0,
                                    double step_deg = 2.5);

}  // namespace ipower::probes
