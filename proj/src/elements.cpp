#include "qrouter/elements.hpp"

#include <cmath>
#include <stdexcept>

namespace qrouter {

namespace {

using namespace std::complex_literals;

std::vector<ModeLabel> path_modes(const std::string& path) {
  return {{path, Polarization::H}, {path, Polarization::V}};
}

// Retarder with phase delay `delta` on the slow axis.
Eigen::Matrix2cd retarder(double theta, double delta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  Eigen::Matrix2cd rot;
  rot << c, -s, s, c;
  Eigen::Matrix2cd d = Eigen::Matrix2cd::Zero();
  d(0, 0) = 1.0;
  d(1, 1) = std::exp(1i * delta);
  return rot * d * rot.transpose();
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

WavePlateSetting::WavePlateSetting(PlateKind kind, double angle_rad) : kind_(kind), angle_(angle_rad) {
  if (!(angle_rad >= 0.0 && angle_rad < std::numbers::pi)) {
    throw std::invalid_argument("wave plate angle must lie in [0, pi)");
  }
}

WavePlateSetting WavePlateSetting::half_wave_deg(double degrees) {
  return {PlateKind::half, degrees * std::numbers::pi / 180.0};
}

WavePlateSetting WavePlateSetting::quarter_wave_deg(double degrees) {
  return {PlateKind::quarter, degrees * std::numbers::pi / 180.0};
}

Eigen::Matrix2cd jones_matrix(const WavePlateSetting& setting) {
  if (setting.kind() == PlateKind::half) {
    // Written out so that the plate is exactly real and involutive.
    const double c = std::cos(2.0 * setting.angle());
    const double s = std::sin(2.0 * setting.angle());
    Eigen::Matrix2cd m;
    m << c, s, s, -c;
    return m;
  }
  return retarder(setting.angle(), std::numbers::pi / 2.0);
}

ModeUnitary waveplate_unitary(const std::string& path, const WavePlateSetting& setting) {
  return ModeUnitary(path_modes(path), jones_matrix(setting));
}

ModeUnitary hadamard_plate_unitary(const std::string& path) {
  return waveplate_unitary(path, WavePlateSetting(PlateKind::half, kHadamardAngle));
}

ModeUnitary pbs_unitary(const std::string& path_a, const std::string& path_b) {
  if (path_a == path_b) throw std::invalid_argument("polarizing beam splitter needs two distinct paths");
  // Order: a/H, a/V, b/H, b/V.
  std::vector<ModeLabel> modes = path_modes(path_a);
  for (auto& m : path_modes(path_b)) modes.push_back(m);
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(4, 4);
  u(0, 0) = 1.0;
  u(2, 2) = 1.0;
  u(3, 1) = 1i;
  u(1, 3) = 1i;
  return ModeUnitary(std::move(modes), std::move(u));
}

ModeUnitary beam_displacer_unitary(const std::string& input, const std::string& out_h,
                                   const std::string& out_v) {
  if (out_h == out_v) {
    throw std::invalid_argument("beam displacer outputs collide on path '" + out_h + "'");
  }
  std::vector<ModeLabel> modes{{input, Polarization::H}, {input, Polarization::V}};
  std::vector<std::pair<std::size_t, std::size_t>> swaps;
  if (out_h != input) {
    modes.push_back({out_h, Polarization::H});
    swaps.emplace_back(0, modes.size() - 1);
  }
  if (out_v != input) {
    modes.push_back({out_v, Polarization::V});
    swaps.emplace_back(1, modes.size() - 1);
  }
  const auto n = static_cast<Eigen::Index>(modes.size());
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(n, n);
  for (auto [a, b] : swaps) {
    const auto i = static_cast<Eigen::Index>(a);
    const auto j = static_cast<Eigen::Index>(b);
    u(i, i) = 0.0;
    u(j, j) = 0.0;
    u(i, j) = 1.0;
    u(j, i) = 1.0;
  }
  return ModeUnitary(std::move(modes), std::move(u));
}

ModeUnitary phase_shifter_unitary(const std::string& path, Polarization polarization, double phi) {
  Eigen::MatrixXcd u(1, 1);
  u(0, 0) = std::polar(1.0, phi);
  return ModeUnitary({{path, polarization}}, std::move(u));
}

ModeUnitary mirror_unitary(const std::string& path) { return ModeUnitary::identity(path_modes(path)); }

ModeUnitary path_swap_unitary(const std::string& path_a, const std::string& path_b) {
  if (path_a == path_b) throw std::invalid_argument("path swap needs two distinct paths");
  std::vector<ModeLabel> modes = path_modes(path_a);
  for (auto& m : path_modes(path_b)) modes.push_back(m);
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(4, 4);
  u(2, 0) = 1.0;
  u(3, 1) = 1.0;
  u(0, 2) = 1.0;
  u(1, 3) = 1.0;
  return ModeUnitary(std::move(modes), std::move(u));
}

std::string_view kind_name(const ElementSpec& e) {
  return std::visit(overloaded{
                        [](const WavePlate&) { return std::string_view("waveplate"); },
                        [](const HadamardPlate&) { return std::string_view("hadamard_plate"); },
                        [](const PolarizingBeamSplitter&) { return std::string_view("pbs"); },
                        [](const BeamDisplacer&) { return std::string_view("beam_displacer"); },
                        [](const PhaseShifter&) { return std::string_view("phase_shifter"); },
                        [](const Mirror&) { return std::string_view("mirror"); },
                        [](const PathSwap&) { return std::string_view("path_swap"); },
                    },
                    e.kind);
}

std::vector<std::string> bound_paths(const ElementSpec& e) {
  return std::visit(overloaded{
                        [](const WavePlate& w) { return std::vector<std::string>{w.path}; },
                        [](const HadamardPlate& h) { return std::vector<std::string>{h.path}; },
                        [](const PolarizingBeamSplitter& p) { return std::vector<std::string>{p.path_a, p.path_b}; },
                        [](const BeamDisplacer& b) { return std::vector<std::string>{b.input, b.out_h, b.out_v}; },
                        [](const PhaseShifter& p) { return std::vector<std::string>{p.path}; },
                        [](const Mirror& m) { return std::vector<std::string>{m.path}; },
                        [](const PathSwap& s) { return std::vector<std::string>{s.path_a, s.path_b}; },
                    },
                    e.kind);
}

ModeUnitary compile(const ElementSpec& e) {
  return std::visit(overloaded{
                        [](const WavePlate& w) { return waveplate_unitary(w.path, w.setting); },
                        [](const HadamardPlate& h) { return hadamard_plate_unitary(h.path); },
                        [](const PolarizingBeamSplitter& p) { return pbs_unitary(p.path_a, p.path_b); },
                        [](const BeamDisplacer& b) { return beam_displacer_unitary(b.input, b.out_h, b.out_v); },
                        [](const PhaseShifter& p) { return phase_shifter_unitary(p.path, p.polarization, p.phi); },
                        [](const Mirror& m) { return mirror_unitary(m.path); },
                        [](const PathSwap& s) { return path_swap_unitary(s.path_a, s.path_b); },
                    },
                    e.kind);
}

}  // namespace qrouter
