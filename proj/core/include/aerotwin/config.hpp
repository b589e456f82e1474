#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "json.hpp"

#include "aerotwin/drone_dynamics.hpp"
#include "aerotwin/error.hpp"
#include "aerotwin/kinematics.hpp"
#include "aerotwin/operator.hpp"

namespace aerotwin {

struct ServoSettings {
  double max_rate = 3.0;   ///< rad/s, every arm joint
  double grip_rate = 1.0;  ///< closure fraction per second

  friend bool operator==(const ServoSettings&, const ServoSettings&) = default;
};

struct ContactSettings {
  double threshold = 0.05;
  double grasp_fraction_min = 0.3;
  double stiffness = 1.0;
  double capture_radius = 0.03;  ///< m, grip-to-object distance counted as "within jaws"
  double force_noise = 0.0;      ///< std-dev of per-bar force noise, 0 disables

  friend bool operator==(const ContactSettings&, const ContactSettings&) = default;
};

struct TelemetrySettings {
  int port = 7450;
  double rate = 100.0;  ///< Hz, one frame per simulation tick
  int buffer_capacity = 32;
  double command_latency = 0.0;  ///< s, artificial delay before a command is applied

  double dt() const { return 1.0 / rate; }

  friend bool operator==(const TelemetrySettings&, const TelemetrySettings&) = default;
};

/// Rigid object the gripper can pick up. Position is given in the drone frame
/// at the hover setpoint and stays fixed in the world until grasped.
struct SceneObject {
  double x = 0.55;
  double z = -0.30;
  double size = 0.4;  ///< normalized extent along the jaw axis
  double mass = 0.105;

  friend bool operator==(const SceneObject&, const SceneObject&) = default;
};

struct Scene {
  PlanarPose initial_pose{0.45, -0.10, 0.0};
  double initial_grip = 0.0;
  std::optional<SceneObject> object = SceneObject{};
  double floor_z = -1.5;  ///< drone-frame height a released object falls to

  friend bool operator==(const Scene&, const Scene&) = default;
};

struct Config {
  double total_length = 0.74;
  LinkGeometry geometry;
  MassModel masses;
  JointLimits limits;
  ServoSettings servos;
  ContactSettings contact;
  ControllerGains controller;
  AttitudeSetpoint hover;
  CouplingParams coupling;
  OperatorSettings operator_settings;
  TelemetrySettings telemetry;
  Scene scene;
  std::uint64_t seed = 1;

  /// Throws Error(InvalidConfig) with the offending key in the message.
  void validate() const;

  friend bool operator==(const Config&, const Config&) = default;
};

/// Strict decoding: every key is optional (defaults apply) but unknown keys
/// are rejected.
Config config_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const Config& config);

Scene scene_from_json(const nlohmann::json& doc);
nlohmann::json scene_to_json(const Scene& scene);

/// Reads a JSON config file; // and /* */ comments are allowed.
Config load_config(const std::filesystem::path& path);

/// Parses JSON text with comments allowed, mapping parse errors to `code`.
nlohmann::json parse_document(const std::string& text, const std::string& origin,
                              ErrorCode code);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace aerotwin
