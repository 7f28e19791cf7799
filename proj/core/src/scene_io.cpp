#include "wabe/io/scene_io.hpp"

#include "json_util.hpp"

#include <fstream>
#include <sstream>

namespace wabe {

using json_detail::Json;
using json_detail::Reader;
using json_detail::vec_json;

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw Error("read failure on '" + path.string() + "'");
  return buf.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  out.flush();
  if (!out) throw Error("write failure on '" + path.string() + "'");
}

namespace {

RigidPose read_pose(const Reader& r) {
  r.expect_object({"rotation", "translation"});
  RigidPose p;
  p.rotation = r.at("rotation").vec<4>();
  p.translation = r.at("translation").vec<3>();
  return p;
}

Json write_pose(const RigidPose& p) {
  Json j = Json::object();
  j["rotation"] = vec_json(p.rotation, "pose rotation");
  j["translation"] = vec_json(p.translation, "pose translation");
  return j;
}

void read_rig(const Reader& r, Scene& scene) {
  r.expect_object({"base_vertices", "triangles", "blendshapes", "rigid_pose", "poses"});
  AvatarRig& rig = scene.rig;
  const Reader verts = r.at("base_vertices");
  for (std::size_t i = 0; i < verts.array_size(); ++i) rig.base_vertices.push_back(verts.at(i).vec<3>());

  const Reader tris = r.at("triangles");
  for (std::size_t i = 0; i < tris.array_size(); ++i) {
    const Reader t = tris.at(i);
    if (t.array_size() != 3) t.fail("expected 3 vertex indices");
    rig.triangles.push_back({t.at(std::size_t{0}).int32(), t.at(1).int32(), t.at(2).int32()});
  }

  if (r.has("blendshapes")) {
    const Reader shapes = r.at("blendshapes");
    for (std::size_t b = 0; b < shapes.array_size(); ++b) {
      const Reader deltas = shapes.at(b);
      std::vector<Vec3> shape;
      for (std::size_t i = 0; i < deltas.array_size(); ++i) shape.push_back(deltas.at(i).vec<3>());
      rig.blendshapes.push_back(std::move(shape));
    }
  }
  if (r.has("rigid_pose")) rig.rigid_pose = read_pose(r.at("rigid_pose"));
}

Gaussian3D read_gaussian(const Reader& r) {
  r.expect_object({"position", "rotation", "log_scale", "opacity_logit", "color", "parent_triangle"});
  Gaussian3D g;
  g.position_local = r.at("position").vec<3>();
  g.rotation_local = r.at("rotation").vec<4>();
  g.log_scale = r.at("log_scale").vec<3>();
  g.opacity_logit = r.at("opacity_logit").number();
  g.color = r.at("color").vec<3>();
  g.parent_triangle = r.at("parent_triangle").int32();
  return g;
}

Camera read_camera(const Reader& r) {
  r.expect_object({"fx", "fy", "cx", "cy", "rotation", "translation", "width", "height"});
  Camera c;
  c.fx = r.at("fx").number();
  c.fy = r.at("fy").number();
  c.cx = r.at("cx").number();
  c.cy = r.at("cy").number();
  const Reader rot = r.at("rotation");
  if (rot.array_size() != 3) rot.fail("expected 3 rows");
  for (int i = 0; i < 3; ++i) c.rotation.row(i) = rot.at(static_cast<std::size_t>(i)).vec<3>().transpose();
  c.translation = r.at("translation").vec<3>();
  c.width = r.at("width").int32();
  c.height = r.at("height").int32();
  return c;
}

TimelineEntry read_entry(const Reader& r) {
  r.expect_object({"time", "expression_weights", "pose"});
  TimelineEntry e;
  e.time = r.at("time").number();
  const Reader w = r.at("expression_weights");
  for (std::size_t i = 0; i < w.array_size(); ++i) e.expression_weights.push_back(w.at(i).number());
  const Reader pose = r.at("pose");
  if (pose.node().is_string()) {
    e.pose = pose.string();
  } else {
    e.pose = read_pose(pose);
  }
  return e;
}

}  // namespace

Scene parse_scene(std::string_view text, const std::string& origin) {
  const Json doc = json_detail::parse_document(text, origin);
  const Reader root(doc, "", origin);
  root.expect_object({"version", "rig", "gaussians", "cameras", "timeline"});
  const std::string version = root.at("version").string();
  if (version != kSceneVersion) {
    root.at("version").fail("unsupported version '" + version + "', expected '" +
                            std::string(kSceneVersion) + "'");
  }

  Scene scene;
  const Reader rig = root.at("rig");
  read_rig(rig, scene);
  if (rig.has("poses")) {
    const Reader poses = rig.at("poses");
    if (!poses.node().is_object()) poses.fail("expected an object of named poses");
    for (const auto& item : poses.node().items()) {
      scene.poses[item.key()] = read_pose(Reader(item.value(), poses.path() + "." + item.key(), origin));
    }
  }

  const Reader gs = root.at("gaussians");
  for (std::size_t i = 0; i < gs.array_size(); ++i) scene.gaussians.push_back(read_gaussian(gs.at(i)));
  const Reader cams = root.at("cameras");
  for (std::size_t i = 0; i < cams.array_size(); ++i) scene.cameras.push_back(read_camera(cams.at(i)));
  if (root.has("timeline")) {
    const Reader tl = root.at("timeline");
    for (std::size_t i = 0; i < tl.array_size(); ++i) scene.timeline.push_back(read_entry(tl.at(i)));
  }

  try {
    scene.validate();
  } catch (const Error& e) {
    throw Error(origin + ": " + e.what());
  }
  return scene;
}

std::string serialize_scene(const Scene& scene) {
  Json doc = Json::object();
  doc["version"] = std::string(kSceneVersion);

  Json rig = Json::object();
  Json verts = Json::array();
  for (const auto& v : scene.rig.base_vertices) verts.push_back(vec_json(v, "vertex"));
  rig["base_vertices"] = std::move(verts);
  Json tris = Json::array();
  for (const auto& t : scene.rig.triangles) tris.push_back({t[0], t[1], t[2]});
  rig["triangles"] = std::move(tris);
  Json shapes = Json::array();
  for (const auto& shape : scene.rig.blendshapes) {
    Json s = Json::array();
    for (const auto& d : shape) s.push_back(vec_json(d, "blendshape delta"));
    shapes.push_back(std::move(s));
  }
  rig["blendshapes"] = std::move(shapes);
  rig["rigid_pose"] = write_pose(scene.rig.rigid_pose);
  Json poses = Json::object();
  for (const auto& [name, pose] : scene.poses) poses[name] = write_pose(pose);
  rig["poses"] = std::move(poses);
  doc["rig"] = std::move(rig);

  Json gs = Json::array();
  for (const auto& g : scene.gaussians) {
    Json j = Json::object();
    j["position"] = vec_json(g.position_local, "position");
    j["rotation"] = vec_json(g.rotation_local, "rotation");
    j["log_scale"] = vec_json(g.log_scale, "log_scale");
    j["opacity_logit"] = json_detail::finite_out(g.opacity_logit, "opacity_logit");
    j["color"] = vec_json(g.color, "color");
    j["parent_triangle"] = g.parent_triangle;
    gs.push_back(std::move(j));
  }
  doc["gaussians"] = std::move(gs);

  Json cams = Json::array();
  for (const auto& c : scene.cameras) {
    Json j = Json::object();
    j["fx"] = json_detail::finite_out(c.fx, "fx");
    j["fy"] = json_detail::finite_out(c.fy, "fy");
    j["cx"] = json_detail::finite_out(c.cx, "cx");
    j["cy"] = json_detail::finite_out(c.cy, "cy");
    Json rot = Json::array();
    for (int i = 0; i < 3; ++i) rot.push_back(vec_json(c.rotation.row(i).transpose(), "camera rotation"));
    j["rotation"] = std::move(rot);
    j["translation"] = vec_json(c.translation, "camera translation");
    j["width"] = c.width;
    j["height"] = c.height;
    cams.push_back(std::move(j));
  }
  doc["cameras"] = std::move(cams);

  Json tl = Json::array();
  for (const auto& e : scene.timeline) {
    Json j = Json::object();
    j["time"] = json_detail::finite_out(e.time, "time");
    Json w = Json::array();
    for (double x : e.expression_weights) w.push_back(json_detail::finite_out(x, "expression weight"));
    j["expression_weights"] = std::move(w);
    if (const auto* name = std::get_if<std::string>(&e.pose)) {
      j["pose"] = *name;
    } else {
      j["pose"] = write_pose(std::get<RigidPose>(e.pose));
    }
    tl.push_back(std::move(j));
  }
  doc["timeline"] = std::move(tl);
  return doc.dump(2) + "\n";
}

Scene load_scene(const std::filesystem::path& path) {
  return parse_scene(read_text_file(path), path.string());
}

void save_scene(const Scene& scene, const std::filesystem::path& path) {
  write_text_file(path, serialize_scene(scene));
}

}  // namespace wabe
