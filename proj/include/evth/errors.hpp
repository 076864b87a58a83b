#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace evth {

/// Metric lost positive-definiteness at a grid point (a leading principal
/// minor became non-positive) — the chart assumption has broken down.
class NonPositiveDefiniteError : public std::runtime_error {
 public:
  NonPositiveDefiniteError(std::size_t point, double minor_value)
      : std::runtime_error("metric not positive-definite at grid point " +
                           std::to_string(point) +
                           " (minor = " + std::to_string(minor_value) + ")"),
        point_(point) {}
  std::size_t point() const { return point_; }

 private:
  std::size_t point_;
};

class NonPositiveLapseError : public std::runtime_error {
 public:
  explicit NonPositiveLapseError(std::size_t point)
      : std::runtime_error("lapse not positive at grid point " +
                           std::to_string(point)),
        point_(point) {}
  std::size_t point() const { return point_; }

 private:
  std::size_t point_;
};

/// An RK4 stage produced an invalid intermediate state.
class StepFailedError : public std::runtime_error {
 public:
  StepFailedError(int stage, const std::string& why)
      : std::runtime_error("integration step failed at stage " +
                           std::to_string(stage) + ": " + why),
        stage_(stage) {}
  int stage() const { return stage_; }

 private:
  int stage_;
};

class DtUnderflowError : public std::runtime_error {
 public:
  DtUnderflowError(double dt, double floor)
      : std::runtime_error("cfl timestep " + std::to_string(dt) +
                           " fell below floor " + std::to_string(floor)) {}
};

class DomainCrushedError : public std::runtime_error {
 public:
  DomainCrushedError() : std::runtime_error("localized domain radius reached zero") {}
};

class ScaleTooLargeError : public std::runtime_error {
 public:
  explicit ScaleTooLargeError(double scale)
      : std::runtime_error("ball scale " + std::to_string(scale) +
                           " exceeds period/4 (would wrap around the torus)") {}
};

class AmplitudeTooLargeError : public std::runtime_error {
 public:
  explicit AmplitudeTooLargeError(double amplitude)
      : std::runtime_error("perturbation amplitude " + std::to_string(amplitude) +
                           " exceeds 1e-3") {}
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& why) : std::runtime_error(why) {}
};

}  // namespace evth
