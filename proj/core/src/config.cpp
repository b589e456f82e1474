#include "aerotwin/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace aerotwin {

using nlohmann::json;

namespace {

/// Reads an object section, remembering which keys were consumed so that
/// leftovers can be reported as unknown.
class Section {
 public:
  Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) fail(path_.empty() ? "document" : path_, "expected an object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    auto it = node_.find(key);
    if (it == node_.end()) return;
    try {
      out = it->template get<T>();
    } catch (const json::exception&) {
      fail(join(key), "has the wrong type");
    }
  }

  void get_range(const char* key, JointRange& out) {
    seen_.insert(key);
    auto it = node_.find(key);
    if (it == node_.end()) return;
    if (!it->is_array() || it->size() != 2 || !(*it)[0].is_number() || !(*it)[1].is_number()) {
      fail(join(key), "expected [min, max] in radians");
    }
    out = {(*it)[0].get<double>(), (*it)[1].get<double>()};
  }

  void get_vec3(const char* key, Vec3& out) {
    seen_.insert(key);
    auto it = node_.find(key);
    if (it == node_.end()) return;
    if (!it->is_array() || it->size() != 3) fail(join(key), "expected [x, y, z]");
    for (std::size_t i = 0; i < 3; ++i) {
      if (!(*it)[i].is_number()) fail(join(key), "expected numbers");
      out[i] = (*it)[i].get<double>();
    }
  }

  std::optional<Section> child(const char* key) {
    seen_.insert(key);
    auto it = node_.find(key);
    if (it == node_.end() || it->is_null()) return std::nullopt;
    return Section(*it, join(key));
  }

  bool has(const char* key) const { return node_.contains(key); }

  void finish() const {
    for (const auto& [key, value] : node_.items()) {
      if (!seen_.contains(key)) fail(join(key), "is not a recognized key");
    }
  }

  [[noreturn]] static void fail(const std::string& where, const std::string& what) {
    throw Error(ErrorCode::InvalidConfig, where + " " + what);
  }

 private:
  std::string join(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json& node_;
  std::string path_;
  std::set<std::string, std::less<>> seen_;
};

void read_pose(Section& s, PlanarPose& pose) {
  s.get("x", pose.x);
  s.get("z", pose.z);
  s.get("phi", pose.phi);
  s.finish();
}

void read_scene(Section& s, Scene& scene) {
  if (auto pose = s.child("initial_pose")) read_pose(*pose, scene.initial_pose);
  s.get("initial_grip", scene.initial_grip);
  s.get("floor_z", scene.floor_z);
  if (s.has("object")) {
    if (auto obj = s.child("object")) {
      SceneObject o;
      obj->get("x", o.x);
      obj->get("z", o.z);
      obj->get("size", o.size);
      obj->get("mass", o.mass);
      obj->finish();
      scene.object = o;
    } else {
      scene.object.reset();
    }
  }
  s.finish();
}

json range_json(const JointRange& r) { return json::array({r.min, r.max}); }

void require(bool ok, const std::string& message) {
  if (!ok) throw Error(ErrorCode::InvalidConfig, message);
}

bool finite_all(std::initializer_list<double> values) {
  for (double v : values) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

}  // namespace

void Config::validate() const {
  require(std::isfinite(total_length) && total_length > 0.0, "total_length must be > 0");
  geometry.validate(total_length);
  masses.validate(geometry);
  limits.validate();
  require(finite_all({servos.max_rate, servos.grip_rate}) && servos.max_rate > 0.0 &&
              servos.grip_rate > 0.0,
          "servos: rates must be > 0");
  require(contact.threshold > 0.0 && contact.threshold < 1.0,
          "contact.threshold must lie in (0, 1)");
  require(contact.grasp_fraction_min >= 0.0 && contact.grasp_fraction_min < 1.0,
          "contact.grasp_fraction_min must lie in [0, 1)");
  require(contact.stiffness >= 0.0 && contact.stiffness <= 1e6, "contact.stiffness must be >= 0");
  require(std::isfinite(contact.capture_radius) && contact.capture_radius > 0.0,
          "contact.capture_radius must be > 0");
  require(std::isfinite(contact.force_noise) && contact.force_noise >= 0.0,
          "contact.force_noise must be >= 0");
  controller.validate();
  require(finite_all({hover.position[0], hover.position[1], hover.position[2], hover.yaw}),
          "hover: setpoint must be finite");
  coupling.validate();
  operator_settings.validate();
  require(telemetry.port >= 0 && telemetry.port <= 65535, "telemetry.port must lie in [0, 65535]");
  require(std::isfinite(telemetry.rate) && telemetry.rate >= 50.0 && telemetry.rate <= 1000.0,
          "telemetry.rate must lie in [50, 1000] Hz (drone step needs dt <= 0.02 s)");
  require(telemetry.buffer_capacity >= 1, "telemetry.buffer_capacity must be >= 1");
  require(std::isfinite(telemetry.command_latency) && telemetry.command_latency >= 0.0,
          "telemetry.command_latency must be >= 0");
  require(scene.initial_grip >= 0.0 && scene.initial_grip <= 1.0,
          "scene.initial_grip must lie in [0, 1]");
  require(workspace_contains(geometry, limits, scene.initial_pose),
          "scene.initial_pose is outside the arm workspace");
  if (scene.object) {
    require(finite_all({scene.object->x, scene.object->z}), "scene.object position must be finite");
    require(scene.object->size > 0.0 && scene.object->size <= 1.0,
            "scene.object.size must lie in (0, 1]");
    require(scene.object->mass >= 0.0, "scene.object.mass must be >= 0");
  }
  require(std::isfinite(scene.floor_z), "scene.floor_z must be finite");
}

Scene scene_from_json(const json& doc) {
  Scene scene;
  Section s(doc, "scene");
  read_scene(s, scene);
  return scene;
}

json scene_to_json(const Scene& scene) {
  json j = {
      {"initial_pose",
       {{"x", scene.initial_pose.x}, {"z", scene.initial_pose.z}, {"phi", scene.initial_pose.phi}}},
      {"initial_grip", scene.initial_grip},
      {"floor_z", scene.floor_z},
  };
  if (scene.object) {
    j["object"] = {{"x", scene.object->x},
                   {"z", scene.object->z},
                   {"size", scene.object->size},
                   {"mass", scene.object->mass}};
  } else {
    j["object"] = nullptr;
  }
  return j;
}

Config config_from_json(const json& doc) {
  Config c;
  Section root(doc, "");
  root.get("total_length", c.total_length);
  if (auto s = root.child("geometry")) {
    s->get("l1", c.geometry.l1);
    s->get("l2", c.geometry.l2);
    s->get("l3", c.geometry.l3);
    s->get("l_dis", c.geometry.l_dis);
    s->finish();
  }
  if (auto s = root.child("masses")) {
    s->get("arm_mass", c.masses.arm_mass);
    s->get("arm_com_lever", c.masses.arm_com_lever);
    s->get("payload_mass", c.masses.payload_mass);
    s->get("gravity", c.masses.gravity);
    s->finish();
  }
  if (auto s = root.child("joint_limits")) {
    s->get_range("theta", c.limits.theta);
    s->get_range("beta", c.limits.beta);
    s->get_range("alpha", c.limits.alpha);
    s->get_range("wrist_roll", c.limits.wrist_roll);
    s->finish();
  }
  if (auto s = root.child("servos")) {
    s->get("max_rate", c.servos.max_rate);
    s->get("grip_rate", c.servos.grip_rate);
    s->finish();
  }
  if (auto s = root.child("contact")) {
    s->get("threshold", c.contact.threshold);
    s->get("grasp_fraction_min", c.contact.grasp_fraction_min);
    s->get("stiffness", c.contact.stiffness);
    s->get("capture_radius", c.contact.capture_radius);
    s->get("force_noise", c.contact.force_noise);
    s->finish();
  }
  if (auto s = root.child("controller")) {
    s->get("natural_frequency", c.controller.natural_frequency);
    s->get("damping_ratio", c.controller.damping_ratio);
    s->get("position_time_constant", c.controller.position_time_constant);
    s->get("substeps", c.controller.substeps);
    s->get_vec3("hover_position", c.hover.position);
    s->get("yaw_setpoint", c.hover.yaw);
    s->finish();
  }
  if (auto s = root.child("coupling")) {
    s->get("com_gain", c.coupling.com_gain);
    s->get("torque_gain", c.coupling.torque_gain);
    s->get("payload_step_gain", c.coupling.payload_step_gain);
    s->get("trim_time_constant", c.coupling.trim_time_constant);
    s->get("tilt_drift_gain", c.coupling.tilt_drift_gain);
    s->finish();
  }
  if (auto s = root.child("operator")) {
    s->get("stale_window", c.operator_settings.stale_window);
    s->get("align_window", c.operator_settings.align_window);
    s->get("max_jog_step", c.operator_settings.max_jog_step);
    s->get("jog_step", c.operator_settings.jog_step);
    s->get("default_phi", c.operator_settings.default_phi);
    std::string mapping(to_string(c.operator_settings.grip_mapping));
    s->get("grip_mapping", mapping);
    c.operator_settings.grip_mapping = grip_mapping_from_string(mapping);
    s->finish();
  }
  if (auto s = root.child("telemetry")) {
    s->get("port", c.telemetry.port);
    s->get("rate", c.telemetry.rate);
    s->get("buffer_capacity", c.telemetry.buffer_capacity);
    s->get("command_latency", c.telemetry.command_latency);
    s->finish();
  }
  if (auto s = root.child("scene")) read_scene(*s, c.scene);
  root.get("seed", c.seed);
  root.finish();
  c.validate();
  return c;
}

json config_to_json(const Config& c) {
  return {
      {"total_length", c.total_length},
      {"geometry",
       {{"l1", c.geometry.l1}, {"l2", c.geometry.l2}, {"l3", c.geometry.l3},
        {"l_dis", c.geometry.l_dis}}},
      {"masses",
       {{"arm_mass", c.masses.arm_mass},
        {"arm_com_lever", c.masses.arm_com_lever},
        {"payload_mass", c.masses.payload_mass},
        {"gravity", c.masses.gravity}}},
      {"joint_limits",
       {{"theta", range_json(c.limits.theta)},
        {"beta", range_json(c.limits.beta)},
        {"alpha", range_json(c.limits.alpha)},
        {"wrist_roll", range_json(c.limits.wrist_roll)}}},
      {"servos", {{"max_rate", c.servos.max_rate}, {"grip_rate", c.servos.grip_rate}}},
      {"contact",
       {{"threshold", c.contact.threshold},
        {"grasp_fraction_min", c.contact.grasp_fraction_min},
        {"stiffness", c.contact.stiffness},
        {"capture_radius", c.contact.capture_radius},
        {"force_noise", c.contact.force_noise}}},
      {"controller",
       {{"natural_frequency", c.controller.natural_frequency},
        {"damping_ratio", c.controller.damping_ratio},
        {"position_time_constant", c.controller.position_time_constant},
        {"substeps", c.controller.substeps},
        {"hover_position", c.hover.position},
        {"yaw_setpoint", c.hover.yaw}}},
      {"coupling",
       {{"com_gain", c.coupling.com_gain},
        {"torque_gain", c.coupling.torque_gain},
        {"payload_step_gain", c.coupling.payload_step_gain},
        {"trim_time_constant", c.coupling.trim_time_constant},
        {"tilt_drift_gain", c.coupling.tilt_drift_gain}}},
      {"operator",
       {{"stale_window", c.operator_settings.stale_window},
        {"align_window", c.operator_settings.align_window},
        {"max_jog_step", c.operator_settings.max_jog_step},
        {"jog_step", c.operator_settings.jog_step},
        {"default_phi", c.operator_settings.default_phi},
        {"grip_mapping", std::string(to_string(c.operator_settings.grip_mapping))}}},
      {"telemetry",
       {{"port", c.telemetry.port},
        {"rate", c.telemetry.rate},
        {"buffer_capacity", c.telemetry.buffer_capacity},
        {"command_latency", c.telemetry.command_latency}}},
      {"scene", scene_to_json(c.scene)},
      {"seed", c.seed},
  };
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

json parse_document(const std::string& text, const std::string& origin, ErrorCode code) {
  try {
    return json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw Error(code, origin + ": " + e.what());
  }
}

Config load_config(const std::filesystem::path& path) {
  const json doc = parse_document(read_text_file(path), path.string(), ErrorCode::InvalidConfig);
  return config_from_json(doc);
}

}  // namespace aerotwin
