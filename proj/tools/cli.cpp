#include "cli.hpp"

#include "wabe/autodiff/gradcheck.hpp"
#include "wabe/core/error.hpp"
#include "wabe/core/parallel.hpp"
#include "wabe/fixtures/fixtures.hpp"
#include "wabe/io/checkpoint.hpp"
#include "wabe/io/config_io.hpp"
#include "wabe/io/image_io.hpp"
#include "wabe/io/scene_io.hpp"
#include "wabe/rasterizer/rasterizer.hpp"
#include "wabe/trainer/evaluate.hpp"
#include "wabe/trainer/trainer.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace wabe {

namespace fs = std::filesystem;

namespace {

constexpr const char* kPresetHelp =
    "Editor presets (prompt_id): 0 identity, 1 hue rotate 60 + contrast 1.2, 2 bronze, "
    "3 brightness ramp by image row, 4 recolor red";

struct Globals {
  std::uint64_t seed = 0;
  std::string config;
  std::string out = ".";
  int threads = 0;
};

// CLI11 does not reject malformed environment values, so parse it here.
int threads_from_env() {
  const char* raw = std::getenv("WABE_SPLAT_THREADS");
  if (raw == nullptr || *raw == '\0') return 0;
  int value = 0;
  const char* end = raw + std::strlen(raw);
  const auto [ptr, ec] = std::from_chars(raw, end, value);
  if (ec != std::errc() || ptr != end || value < 0) {
    throw CLI::ValidationError("WABE_SPLAT_THREADS",
                               std::string("expected a non-negative integer, got '") + raw + "'");
  }
  return value;
}

std::string frame_name(std::size_t view, std::size_t frame) {
  return "view" + std::to_string(view) + "_t" + std::to_string(frame) + ".ppm";
}

fs::path prepare_out(const Globals& g) {
  const fs::path dir(g.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory '" + dir.string() + "': " + ec.message());
  return dir;
}

BlendMode parse_mode(const std::string& mode, double beta) {
  if (mode == "standard") return BlendMode::standard();
  return BlendMode::wabe(beta);
}

TargetGrid load_targets(const fs::path& dir, const Scene& scene) {
  TargetGrid grid(scene.cameras.size());
  for (std::size_t v = 0; v < scene.cameras.size(); ++v) {
    for (std::size_t f = 0; f < scene.frame_count(); ++f) {
      ImageBuffer img = read_image(dir / frame_name(v, f));
      if (img.width() != scene.cameras[v].width || img.height() != scene.cameras[v].height) {
        throw Error((dir / frame_name(v, f)).string() + ": size does not match camera " +
                    std::to_string(v));
      }
      grid[v].push_back(std::move(img));
    }
  }
  return grid;
}

void render_all(const Scene& scene, const BlendMode& mode, const fs::path& dir,
                std::optional<std::size_t> only_camera, std::optional<std::size_t> only_frame) {
  for (std::size_t v = 0; v < scene.cameras.size(); ++v) {
    if (only_camera && *only_camera != v) continue;
    for (std::size_t f = 0; f < scene.frame_count(); ++f) {
      if (only_frame && *only_frame != f) continue;
      write_image(render_frame(scene, v, f, mode), dir / frame_name(v, f));
    }
  }
}

TrainConfigFile config_or_default(const Globals& g) {
  if (g.config.empty()) return {};
  return load_train_config(g.config);
}

int run_fit(const Globals& g, const std::string& scene_path, const std::string& targets_dir,
            std::optional<int> iterations) {
  TrainConfigFile cf = config_or_default(g);
  const std::string path = !scene_path.empty() ? scene_path : cf.scene;
  if (path.empty()) throw Error("fit needs --scene or a config with a scene");
  if (iterations) cf.config.iterations = *iterations;
  Scene scene = load_scene(path);
  const TargetGrid grid = load_targets(targets_dir, scene);
  std::vector<FitTarget> targets;
  for (std::size_t v = 0; v < grid.size(); ++v) {
    for (std::size_t f = 0; f < grid[v].size(); ++f) targets.push_back({v, f, grid[v][f]});
  }
  FitResult result = fit_loop(scene, targets, cf.config);
  scene.gaussians = std::move(result.gaussians);
  const fs::path out = prepare_out(g);
  save_scene(scene, out / "avatar.json");
  const EvalReport report = evaluate(scene, grid);
  write_text_file(out / "eval.txt", report.to_text());
  std::cout << report.to_text();
  return kExitOk;
}

int run_edit(const Globals& g, const std::string& scene_override, bool seed_given,
             std::optional<int> iterations) {
  if (g.config.empty()) throw Error("edit needs --config");
  TrainConfigFile cf = load_train_config(g.config);
  if (seed_given) cf.config.seed = g.seed;
  if (iterations) cf.config.iterations = *iterations;
  const std::string path = !scene_override.empty() ? scene_override : cf.scene;
  if (path.empty()) throw Error("edit needs a scene in the config or --scene");
  const Scene scene = load_scene(path);
  const fs::path out = prepare_out(g);

  TrainHooks hooks;
  hooks.on_checkpoint = [&](const TrainState& state) {
    write_checkpoint(out / "checkpoints", state.iteration, state.scene, state.discriminator);
  };
  TrainResult result = train_loop(scene, cf.config, hooks);

  std::size_t violations = 0;
  for (const auto& m : result.history) violations += m.routing_ok ? 0 : 1;

  Scene final_scene = scene;
  final_scene.gaussians = std::move(result.gaussians);
  save_scene(final_scene, out / "avatar.json");
  save_discriminator(result.discriminator, out / "discriminator.bin");
  write_text_file(out / "metrics.txt", format_metrics(result.history));
  if (violations > 0) {
    throw Error("loss routing invariant violated on " + std::to_string(violations) + " steps");
  }
  if (!result.history.empty()) {
    const auto& last = result.history.back();
    std::cout << "iterations=" << result.history.size() << " recon=" << last.recon
              << " total=" << last.total << "\n";
  }
  return kExitOk;
}

int run_gradcheck(const Globals& g, const std::string& scene_path, const std::string& mode_name,
                  double beta, const std::string& policy, double tolerance, std::size_t camera,
                  std::size_t frame) {
  const Scene scene = load_scene(scene_path);
  if (camera >= scene.cameras.size()) throw Error("camera index out of range");
  if (frame >= scene.frame_count()) throw Error("frame index out of range");
  const Camera& cam = scene.cameras[camera];
  std::mt19937_64 rng(g.seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ImageBuffer target(cam.width, cam.height);
  for (double& v : target.data()) v = u(rng);

  BackwardConfig config;
  config.wabe_weight_gradient = policy == "full" ? WeightGradient::Full : WeightGradient::Detached;
  const GradcheckReport report = gradcheck(scene.gaussians, scene.frames_at(frame), cam,
                                           parse_mode(mode_name, beta), config,
                                           SquaredErrorLoss(std::move(target)));
  std::cout << report.to_text();
  if (!g.out.empty() && g.out != ".") write_text_file(prepare_out(g) / "gradcheck.txt", report.to_text());
  if (!(report.max_relative_error() < tolerance)) {
    std::cerr << "gradcheck: max relative error " << report.max_relative_error()
              << " exceeds tolerance " << tolerance << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}

void run_make_fixtures(const Globals& g) {
  const fs::path out = prepare_out(g);
  save_scene(two_layer_scene(), out / "two_layer.json");
  save_scene(random_scene(g.seed + 5, 5), out / "random5.json");
  const FlapFixture flap = flap_fixture();
  save_scene(flap.scene, out / "flap.json");
  save_train_config(flap_edit_config(), out / "flap_edit.json");

  const FitFixture fit = fit_fixture();
  save_scene(fit.ground_truth, out / "fit_ground_truth.json");
  save_scene(fit.initial, out / "fit_init.json");
  fs::create_directories(out / "fit_targets");
  for (const auto& t : fit.targets) {
    write_image(t.image, out / "fit_targets" / frame_name(t.camera, t.frame));
  }
  TrainConfigFile fit_cfg;
  fit_cfg.scene = "fit_init.json";
  fit_cfg.config.adversarial_enabled = false;
  fit_cfg.config.wabe_enabled = false;
  save_train_config(fit_cfg, out / "fit.json");
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"wabe-splat: Gaussian avatar editing with weighted alpha blending"};
  app.require_subcommand(1);
  app.footer(kPresetHelp);

  Globals g;
  app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
  app.add_option("--config", g.config, "Training configuration (JSON)");
  app.add_option("--out", g.out, "Output directory")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads (0 = all cores; default $WABE_SPLAT_THREADS)")
      ->check(CLI::NonNegativeNumber);

  std::string scene_path;
  std::string targets_dir;
  std::string driver_path;
  std::string mode = "standard";
  double beta = 6.0;
  std::string policy = "detached";
  double tolerance = 1e-4;
  std::optional<int> iterations;
  std::optional<std::size_t> only_camera;
  std::optional<std::size_t> only_frame;
  std::size_t gc_camera = 0;
  std::size_t gc_frame = 0;
  const std::vector<std::string> modes{"standard", "wabe"};

  auto* fit = app.add_subcommand("fit", "Optimize Gaussians against target images (no editor)");
  fit->add_option("--scene", scene_path, "Starting scene; defaults to the config's scene");
  fit->add_option("--targets", targets_dir, "Directory of view<i>_t<t>.ppm targets")->required();
  fit->add_option("--iterations", iterations, "Override the iteration count")
      ->check(CLI::NonNegativeNumber);

  auto* edit = app.add_subcommand("edit", "Run the render-edit-aggregate training loop");
  edit->add_option("--scene", scene_path, "Override the config's scene");
  edit->add_option("--iterations", iterations, "Override the iteration count")
      ->check(CLI::NonNegativeNumber);
  edit->footer(kPresetHelp);

  auto* render = app.add_subcommand("render", "Render every camera and timeline frame");
  render->add_option("--scene", scene_path, "Scene file")->required();
  render->add_option("--mode", mode, "Blending mode")->check(CLI::IsMember(modes))->capture_default_str();
  render->add_option("--beta", beta, "WABE sharpness")->check(CLI::NonNegativeNumber)->capture_default_str();
  render->add_option("--camera", only_camera, "Render only this camera");
  render->add_option("--frame", only_frame, "Render only this timeline frame");

  auto* animate = app.add_subcommand("animate", "Render a scene driven by another scene's timeline");
  animate->add_option("--scene", scene_path, "Avatar scene")->required();
  animate->add_option("--driver", driver_path, "Scene whose timeline drives the avatar")->required();
  animate->add_option("--mode", mode, "Blending mode")->check(CLI::IsMember(modes))->capture_default_str();
  animate->add_option("--beta", beta, "WABE sharpness")->check(CLI::NonNegativeNumber)->capture_default_str();

  auto* eval = app.add_subcommand("eval", "Compare Standard renders against target images");
  eval->add_option("--scene", scene_path, "Scene file")->required();
  eval->add_option("--targets", targets_dir, "Directory of view<i>_t<t>.ppm targets")->required();

  auto* gc = app.add_subcommand("gradcheck", "Check analytic gradients against finite differences");
  gc->add_option("--scene", scene_path, "Scene file")->required();
  gc->add_option("--mode", mode, "Blending mode")->check(CLI::IsMember(modes))->capture_default_str();
  gc->add_option("--beta", beta, "WABE sharpness")->check(CLI::NonNegativeNumber)->capture_default_str();
  gc->add_option("--policy", policy, "WABE weight gradient")
      ->check(CLI::IsMember({"detached", "full"}))
      ->capture_default_str();
  gc->add_option("--tolerance", tolerance, "Maximum relative error")->capture_default_str();
  gc->add_option("--camera", gc_camera, "Camera index")->capture_default_str();
  gc->add_option("--frame", gc_frame, "Timeline frame")->capture_default_str();

  auto* fixtures = app.add_subcommand("make-fixtures", "Write the built-in synthetic scenes");

  try {
    app.parse(argc, argv);
    if (app.count("--threads") == 0) g.threads = threads_from_env();
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    set_max_threads(g.threads);
    const bool seed_given = app.count("--seed") > 0;
    if (*fit) return run_fit(g, scene_path, targets_dir, iterations);
    if (*edit) return run_edit(g, scene_path, seed_given, iterations);
    if (*render) {
      const Scene scene = load_scene(scene_path);
      render_all(scene, parse_mode(mode, beta), prepare_out(g), only_camera, only_frame);
      return kExitOk;
    }
    if (*animate) {
      Scene scene = load_scene(scene_path);
      const Scene driver = load_scene(driver_path);
      scene.timeline = driver.timeline;
      for (const auto& [name, pose] : driver.poses) scene.poses[name] = pose;
      scene.validate();
      render_all(scene, parse_mode(mode, beta), prepare_out(g), std::nullopt, std::nullopt);
      return kExitOk;
    }
    if (*eval) {
      const Scene scene = load_scene(scene_path);
      const EvalReport report = evaluate(scene, load_targets(targets_dir, scene));
      std::cout << report.to_text();
      if (g.out != ".") write_text_file(prepare_out(g) / "eval.txt", report.to_text());
      return kExitOk;
    }
    if (*gc) return run_gradcheck(g, scene_path, mode, beta, policy, tolerance, gc_camera, gc_frame);
    if (*fixtures) {
      run_make_fixtures(g);
      return kExitOk;
    }
  } catch (const std::exception& e) {
    std::cerr << "wabe-splat: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}

int cli_main(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("wabe-splat");
  for (const auto& a : args) argv.push_back(a.c_str());
  return cli_main(static_cast<int>(argv.size()), argv.data());
}

}  // namespace wabe
