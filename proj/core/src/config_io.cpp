#include "wabe/io/config_io.hpp"

#include "json_util.hpp"
#include "wabe/io/scene_io.hpp"

namespace wabe {

using json_detail::Json;
using json_detail::Reader;

TrainConfigFile parse_train_config(std::string_view text, const std::string& origin) {
  const Json doc = json_detail::parse_document(text, origin);
  const Reader r(doc, "", origin);
  r.expect_object({"scene", "beta_wabe", "weights", "learning_rate", "iterations", "adam_beta1",
                   "adam_beta2", "adam_eps", "discriminator_lr_scale", "seed",
                   "adversarial_enabled", "wabe_enabled", "wabe_weight_gradient", "editor",
                   "checkpoint_interval"});
  TrainConfigFile file;
  TrainConfig& c = file.config;
  if (r.has("scene")) file.scene = r.at("scene").string();
  if (r.has("beta_wabe")) c.beta_wabe = r.at("beta_wabe").number();
  if (r.has("weights")) {
    const Reader w = r.at("weights");
    w.expect_object({"lambda1", "lambda2", "lambda3", "lambda4"});
    if (w.has("lambda1")) c.weights.lambda1 = w.at("lambda1").number();
    if (w.has("lambda2")) c.weights.lambda2 = w.at("lambda2").number();
    if (w.has("lambda3")) c.weights.lambda3 = w.at("lambda3").number();
    if (w.has("lambda4")) c.weights.lambda4 = w.at("lambda4").number();
  }
  if (r.has("learning_rate")) c.learning_rate = r.at("learning_rate").number();
  if (r.has("iterations")) c.iterations = r.at("iterations").int32();
  if (r.has("adam_beta1")) c.adam_beta1 = r.at("adam_beta1").number();
  if (r.has("adam_beta2")) c.adam_beta2 = r.at("adam_beta2").number();
  if (r.has("adam_eps")) c.adam_eps = r.at("adam_eps").number();
  if (r.has("discriminator_lr_scale")) {
    c.discriminator_lr_scale = r.at("discriminator_lr_scale").number();
  }
  if (r.has("seed")) c.seed = r.at("seed").uint64();
  if (r.has("adversarial_enabled")) c.adversarial_enabled = r.at("adversarial_enabled").boolean();
  if (r.has("wabe_enabled")) c.wabe_enabled = r.at("wabe_enabled").boolean();
  if (r.has("wabe_weight_gradient")) {
    const Reader p = r.at("wabe_weight_gradient");
    const std::string s = p.string();
    if (s == "detached") {
      c.wabe_weight_gradient = WeightGradient::Detached;
    } else if (s == "full") {
      c.wabe_weight_gradient = WeightGradient::Full;
    } else {
      p.fail("expected 'detached' or 'full'");
    }
  }
  if (r.has("editor")) {
    const Reader e = r.at("editor");
    e.expect_object({"prompt_id", "jitter_sigma", "seed"});
    if (e.has("prompt_id")) c.editor.prompt_id = e.at("prompt_id").int32();
    if (e.has("jitter_sigma")) c.editor.jitter_sigma = e.at("jitter_sigma").number();
    if (e.has("seed")) c.editor.seed = e.at("seed").uint64();
  }
  if (r.has("checkpoint_interval")) c.checkpoint_interval = r.at("checkpoint_interval").int32();
  try {
    c.validate();
  } catch (const Error& e) {
    throw Error(origin + ": " + e.what());
  }
  return file;
}

std::string serialize_train_config(const TrainConfigFile& file) {
  const TrainConfig& c = file.config;
  Json doc = Json::object();
  if (!file.scene.empty()) doc["scene"] = file.scene;
  doc["beta_wabe"] = c.beta_wabe;
  doc["weights"] = {{"lambda1", c.weights.lambda1},
                    {"lambda2", c.weights.lambda2},
                    {"lambda3", c.weights.lambda3},
                    {"lambda4", c.weights.lambda4}};
  doc["learning_rate"] = c.learning_rate;
  doc["iterations"] = c.iterations;
  doc["adam_beta1"] = c.adam_beta1;
  doc["adam_beta2"] = c.adam_beta2;
  doc["adam_eps"] = c.adam_eps;
  doc["discriminator_lr_scale"] = c.discriminator_lr_scale;
  doc["seed"] = c.seed;
  doc["adversarial_enabled"] = c.adversarial_enabled;
  doc["wabe_enabled"] = c.wabe_enabled;
  doc["wabe_weight_gradient"] =
      c.wabe_weight_gradient == WeightGradient::Full ? "full" : "detached";
  doc["editor"] = {{"prompt_id", c.editor.prompt_id},
                   {"jitter_sigma", c.editor.jitter_sigma},
                   {"seed", c.editor.seed}};
  doc["checkpoint_interval"] = c.checkpoint_interval;
  return doc.dump(2) + "\n";
}

TrainConfigFile load_train_config(const std::filesystem::path& path) {
  TrainConfigFile file = parse_train_config(read_text_file(path), path.string());
  if (!file.scene.empty()) {
    const std::filesystem::path scene(file.scene);
    if (scene.is_relative()) file.scene = (path.parent_path() / scene).lexically_normal().string();
  }
  return file;
}

void save_train_config(const TrainConfigFile& file, const std::filesystem::path& path) {
  write_text_file(path, serialize_train_config(file));
}

}  // namespace wabe
