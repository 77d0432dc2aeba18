#pragma once

// Optical elements of the router and their mode unitaries.
//
// Conventions:
//  * A retarder at fast-axis angle theta is R(theta) diag(1, e^{i delta}) R(-theta)
//    with R the rotation matrix and no extra global phase. The half-wave plate
//    (delta = pi) is [[cos 2t, sin 2t], [sin 2t, -cos 2t]]; the quarter-wave
//    plate (delta = pi/2) satisfies QWP^4 = I exactly.
//  * Polarizing beam splitter: H transmits and keeps its path, V is reflected
//    into the other path and picks up a factor i.
//  * Beam displacer: lossless relabeling (in,H)->(out_h,H), (in,V)->(out_v,V).
//    The map is an involution, so the same element recombines two paths.
//  * Mirrors act as identity on the polarization modes.

#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "qrouter/fock.hpp"

namespace qrouter {

enum class PlateKind { half, quarter };

class WavePlateSetting {
 public:
  /// Throws std::invalid_argument unless 0 <= angle < pi.
  WavePlateSetting(PlateKind kind, double angle_rad);

  static WavePlateSetting half_wave_deg(double degrees);
  static WavePlateSetting quarter_wave_deg(double degrees);

  PlateKind kind() const { return kind_; }
  double angle() const { return angle_; }

 private:
  PlateKind kind_;
  double angle_;
};

/// 22.5 degrees: maps |H> to |D> and |V> to |A>.
inline constexpr double kHadamardAngle = std::numbers::pi / 8.0;

Eigen::Matrix2cd jones_matrix(const WavePlateSetting& setting);

ModeUnitary waveplate_unitary(const std::string& path, const WavePlateSetting& setting);
ModeUnitary hadamard_plate_unitary(const std::string& path);
ModeUnitary pbs_unitary(const std::string& path_a, const std::string& path_b);
/// Throws std::invalid_argument when out_h == out_v.
ModeUnitary beam_displacer_unitary(const std::string& input, const std::string& out_h,
                                   const std::string& out_v);
ModeUnitary phase_shifter_unitary(const std::string& path, Polarization polarization, double phi);
ModeUnitary mirror_unitary(const std::string& path);
/// Exchanges two paths (both polarizations), e.g. a fiber switch crossing outputs.
ModeUnitary path_swap_unitary(const std::string& path_a, const std::string& path_b);

struct WavePlate {
  std::string path;
  WavePlateSetting setting{PlateKind::half, 0.0};
};
struct HadamardPlate {
  std::string path;
};
struct PolarizingBeamSplitter {
  std::string path_a;
  std::string path_b;
};
struct BeamDisplacer {
  std::string input;
  std::string out_h;
  std::string out_v;
};
struct PhaseShifter {
  std::string path;
  Polarization polarization = Polarization::V;
  double phi = 0.0;
};
struct Mirror {
  std::string path;
};
struct PathSwap {
  std::string path_a;
  std::string path_b;
};

using ElementKind =
    std::variant<WavePlate, HadamardPlate, PolarizingBeamSplitter, BeamDisplacer, PhaseShifter, Mirror, PathSwap>;

struct ElementSpec {
  std::string label;
  ElementKind kind;
};

/// "waveplate", "hadamard_plate", "pbs", "beam_displacer", "phase_shifter", "mirror", "path_swap".
std::string_view kind_name(const ElementSpec& e);
std::vector<std::string> bound_paths(const ElementSpec& e);
ModeUnitary compile(const ElementSpec& e);

}  // namespace qrouter
