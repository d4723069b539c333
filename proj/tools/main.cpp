// collage: command-line front end.
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "collage/agent/trainer.hpp"
#include "collage/errors.hpp"
#include "collage/imaging/metrics.hpp"
#include "collage/io/checkpoint.hpp"
#include "collage/io/config.hpp"
#include "collage/io/dataset.hpp"
#include "collage/io/image_io.hpp"
#include "collage/io/session.hpp"
#include "collage/io/synthetic.hpp"
#include "collage/planner/collage.hpp"
#include "collage/planner/plan.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace collage;

namespace {

// Options shared by every command: a key=value file and repeated --set overrides.
struct ConfigOptions {
  std::string file;
  std::vector<std::string> overrides;

  void attach(CLI::App* cmd, bool with_file = true) {
    if (with_file) cmd->add_option("--config", file, "key = value configuration file");
    cmd->add_option("--set", overrides, "override one key, e.g. --set gamma=0.9");
  }

  io::RunConfig load() const {
    io::RunConfig cfg = file.empty() ? io::RunConfig{} : io::RunConfig::from_file(file);
    apply_overrides(cfg);
    return cfg;
  }

  void apply_overrides(io::RunConfig& cfg) const {
    for (const auto& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ConfigurationError("--set expects key=value, got " + kv);
      cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
  }
};

// Applies a flag's value to the config only when the flag was given.
template <typename T>
void apply(io::RunConfig& cfg, const CLI::Option* opt, const std::string& key, const T& value) {
  if (opt->count() == 0) return;
  if constexpr (std::is_same_v<T, std::string>) cfg.set(key, value);
  else cfg.set(key, std::to_string(value));
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int run_pretrain(const ConfigOptions& co, const CLI::Option* size_opt, int size,
                 const CLI::Option* steps_opt, int steps, const std::string& out) {
  auto cfg = co.load();
  apply(cfg, size_opt, "resolution", size);
  apply(cfg, steps_opt, "shaper_steps", steps);
  cfg.validate();

  const auto t0 = std::chrono::steady_clock::now();
  auto sc = cfg.shaper_config();
  sc.log_every = std::max(1, sc.steps / 20);
  auto result = render::pretrain_shaper(sc, [&](int step, double loss) {
    std::fprintf(stderr, "step %d  bce %.5f  %.0fs\n", step, loss, seconds_since(t0));
  });

  io::Checkpoint ckpt;
  ckpt.config = cfg;
  ckpt.shaper = result.net;
  ckpt.metadata = {{"shaper_heldout_mae", result.report.heldout_mae},
                   {"shaper_denied_max", result.report.denied_max},
                   {"shaper_accepted_mae", result.report.accepted_mae},
                   {"shaper_seconds", seconds_since(t0)}};
  io::save_checkpoint(out, ckpt);
  json report = {{"steps", result.report.steps},
                 {"heldout_mae", result.report.heldout_mae},
                 {"accepted_mae", result.report.accepted_mae},
                 {"denied_max", result.report.denied_max},
                 {"baseline_mae", result.report.baseline_mae},
                 {"seconds", seconds_since(t0)}};
  std::cout << report.dump() << '\n';
  return 0;
}

struct TrainArgs {
  std::string targets, materials, reward, ckpt, metrics, shaper;
  int scraps = 5, episodes = 10000, size = 32, workers = 16, eval_interval = 1000;
  std::uint64_t seed = 1;
  CLI::Option *scraps_opt, *episodes_opt, *size_opt, *reward_opt, *workers_opt, *seed_opt,
      *eval_opt;
};

int run_train(const ConfigOptions& co, const TrainArgs& a) {
  auto cfg = co.load();
  apply(cfg, a.scraps_opt, "scraps", a.scraps);
  apply(cfg, a.episodes_opt, "episodes", a.episodes);
  apply(cfg, a.size_opt, "resolution", a.size);
  apply(cfg, a.reward_opt, "reward", a.reward);
  apply(cfg, a.workers_opt, "workers", a.workers);
  apply(cfg, a.seed_opt, "seed", a.seed);
  apply(cfg, a.eval_opt, "eval_interval", a.eval_interval);
  cfg.validate();

  const fs::path ckpt_dir = a.ckpt;
  const fs::path shaper_path = a.shaper.empty() ? ckpt_dir / "shaper.ckpt" : fs::path(a.shaper);
  if (!fs::exists(shaper_path)) {
    throw ConfigurationError("no pretrained shaper at " + shaper_path.string() +
                             " (run pretrain-shaper or pass --shaper)");
  }
  auto shaper_ckpt = io::load_checkpoint(shaper_path);
  if (!shaper_ckpt.shaper) throw ConfigurationError(shaper_path.string() + " holds no shaper");

  const auto corpus = io::load_corpus(cfg, a.targets, a.materials);
  std::fprintf(stderr, "targets: %zu train / %zu eval, materials: %zu\n",
               corpus.train_targets.size(), corpus.eval_targets.size(), corpus.materials.size());

  std::ofstream metrics;
  if (!a.metrics.empty()) {
    if (fs::path(a.metrics).has_parent_path()) fs::create_directories(fs::path(a.metrics).parent_path());
    metrics.open(a.metrics, std::ios::trunc);
    if (!metrics) throw ConfigurationError("cannot write metrics file " + a.metrics);
  }
  const auto t0 = std::chrono::steady_clock::now();
  auto result = agent::train(cfg.train_config(), corpus, shaper_ckpt.shaper,
                             [&](const agent::MetricsRow& r) {
    if (metrics.is_open()) metrics << io::metrics_line(r) << '\n' << std::flush;
    std::fprintf(stderr, "episode %ld  eval_mse %.5f  alpha %.4g  %.0fs\n", r.episode,
                 r.eval_mse, r.alpha, seconds_since(t0));
  });

  io::save_checkpoint(ckpt_dir / "agent.ckpt",
                      io::agent_checkpoint(cfg, shaper_ckpt.shaper, result, seconds_since(t0)));
  std::cout << json{{"final_eval_mse", result.final_eval_mse},
                    {"baseline_mse", result.baseline_mse},
                    {"checkpoint", (ckpt_dir / "agent.ckpt").string()}}
                   .dump()
            << '\n';
  return 0;
}

struct CollageArgs {
  std::string target, materials, ckpt, scales, fixed_l, out, frames, record;
  double rho = 0.5, tau = 1.0;
  int kmax = 8, candidates = 8;
  std::uint64_t seed = 1;
  CLI::Option *scales_opt, *rho_opt, *kmax_opt, *tau_opt, *fixed_opt, *cand_opt, *seed_opt;
};

int run_collage(const ConfigOptions& co, const CollageArgs& a) {
  auto ckpt = io::load_checkpoint(a.ckpt);
  auto agent = io::collage_agent(ckpt);
  auto cfg = ckpt.config;
  co.apply_overrides(cfg);
  apply(cfg, a.scales_opt, "scales", a.scales);
  apply(cfg, a.rho_opt, "rho", a.rho);
  apply(cfg, a.kmax_opt, "kmax", a.kmax);
  apply(cfg, a.tau_opt, "tau", a.tau);
  apply(cfg, a.fixed_opt, "fixed_l", a.fixed_l);
  apply(cfg, a.cand_opt, "candidates", a.candidates);
  apply(cfg, a.seed_opt, "seed", a.seed);
  cfg.validate();

  const auto target = io::read_image(a.target);
  const auto materials = io::share(io::load_dataset({a.materials, io::Split::kAll, 0, 0.0, cfg.split_seed}));
  const auto plan = planner::build_plan(target, cfg.scales, cfg.rho, cfg.kmax, cfg.tau);

  agent.gamma = cfg.gamma;

  planner::FrameSink frames;
  if (!a.frames.empty()) {
    fs::create_directories(a.frames);
    frames = [&](long seq, const imaging::ImagePlane& canvas) {
      char name[32];
      std::snprintf(name, sizeof name, "%06ld.png", seq);
      io::write_png(fs::path(a.frames) / name, canvas);
    };
  }
  const auto t0 = std::chrono::steady_clock::now();
  const auto result = planner::run_collage(target, plan, agent, materials, cfg.collage_config(), frames);
  io::write_png(a.out, result.canvas);

  if (!a.record.empty()) {
    std::ofstream rec(a.record, std::ios::trunc);
    if (!rec) throw ConfigurationError("cannot write record file " + a.record);
    for (const auto& p : result.record) {
      json row = {{"seq", p.seq},           {"scale", p.scale},
                  {"window_row", p.window_row}, {"window_col", p.window_col},
                  {"material_id", p.material_id}, {"action", p.action.values}};
      rec << row.dump() << '\n';
    }
  }
  std::cout << json{{"pastes", result.record.size()},
                    {"mse", imaging::mse(result.canvas, target)},
                    {"seconds", seconds_since(t0)}}
                   .dump()
            << '\n';
  return 0;
}

int run_eval(const std::string& pred_path, const std::string& ref_path, const std::string& json_path) {
  const auto pred = io::read_image(pred_path);
  auto ref = io::read_image(ref_path);
  if (!pred.same_shape(ref)) {
    throw DimensionError("prediction is " + std::to_string(pred.width()) + "x" +
                         std::to_string(pred.height()) + " but reference is " +
                         std::to_string(ref.width()) + "x" + std::to_string(ref.height()));
  }
  const double m = imaging::mse(pred, ref);
  json out = {{"mse", m}, {"psnr", imaging::psnr_from_mse(m)}, {"ssim", imaging::ssim(pred, ref)}};
  if (!json_path.empty()) {
    std::ofstream f(json_path, std::ios::trunc);
    if (!f) throw ConfigurationError("cannot write " + json_path);
    f << out.dump() << '\n';
  }
  std::cout << out.dump() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Collage transfer: shaper pretraining, MB-SAC training and multi-scale collage"};
  app.require_subcommand(1);

  // pretrain-shaper
  auto* pre = app.add_subcommand("pretrain-shaper", "train the differentiable mask renderer");
  ConfigOptions pre_cfg;
  pre_cfg.attach(pre);
  int pre_size = 32, pre_steps = 20000;
  std::string pre_out;
  auto* pre_size_opt = pre->add_option("--size", pre_size, "mask resolution");
  auto* pre_steps_opt = pre->add_option("--steps", pre_steps, "optimizer steps");
  pre->add_option("--out", pre_out, "checkpoint file")->required();

  // train
  auto* tr = app.add_subcommand("train", "train the collage agent");
  ConfigOptions tr_cfg;
  tr_cfg.attach(tr);
  TrainArgs ta;
  tr->add_option("--targets", ta.targets, "target image directory")->required();
  tr->add_option("--materials", ta.materials, "material image directory")->required();
  ta.scraps_opt = tr->add_option("--scraps", ta.scraps, "pastes per episode (T_M)");
  ta.episodes_opt = tr->add_option("--episodes", ta.episodes, "training episodes");
  ta.size_opt = tr->add_option("--size", ta.size, "network resolution");
  ta.reward_opt = tr->add_option("--reward", ta.reward, "wgan_gp | mse")
                      ->check(CLI::IsMember({"wgan_gp", "mse"}));
  ta.workers_opt = tr->add_option("--workers", ta.workers, "parallel environments");
  ta.seed_opt = tr->add_option("--seed", ta.seed, "training seed");
  ta.eval_opt = tr->add_option("--eval-interval", ta.eval_interval, "episodes between evaluations");
  tr->add_option("--ckpt", ta.ckpt, "checkpoint directory (agent.ckpt is written here)")->required();
  tr->add_option("--shaper", ta.shaper, "shaper checkpoint (default CKPT/shaper.ckpt)");
  tr->add_option("--metrics", ta.metrics, "NDJSON metrics log");

  // collage
  auto* co = app.add_subcommand("collage", "render a multi-scale collage of a target image");
  ConfigOptions co_cfg;
  co_cfg.attach(co, false);
  CollageArgs ca;
  co->add_option("--target", ca.target, "target image")->required();
  co->add_option("--materials", ca.materials, "material image directory")->required();
  co->add_option("--ckpt", ca.ckpt, "trained agent checkpoint")->required();
  ca.scales_opt = co->add_option("--scales", ca.scales, "comma-separated window sizes, coarse first");
  ca.rho_opt = co->add_option("--rho", ca.rho, "stride ratio");
  ca.kmax_opt = co->add_option("--kmax", ca.kmax, "maximum cycles per window");
  ca.tau_opt = co->add_option("--tau", ca.tau, "budget exponent");
  ca.fixed_opt = co->add_option("--fixed-l", ca.fixed_l, "remaining-time override or 'none'");
  ca.cand_opt = co->add_option("--candidates", ca.candidates, "materials scored per paste");
  ca.seed_opt = co->add_option("--seed", ca.seed, "material sampling seed");
  co->add_option("--out", ca.out, "output PNG")->required();
  co->add_option("--frames", ca.frames, "directory for per-paste PNG frames");
  co->add_option("--record", ca.record, "NDJSON paste record");

  // eval
  auto* ev = app.add_subcommand("eval", "image distance between a prediction and a reference");
  std::string ev_pred, ev_ref, ev_json;
  ev->add_option("--pred", ev_pred, "predicted image")->required();
  ev->add_option("--ref", ev_ref, "reference image")->required();
  ev->add_option("--json", ev_json, "output JSON file");

  // synth-corpus
  auto* sy = app.add_subcommand("synth-corpus", "write a synthetic digit or texture corpus");
  std::string sy_kind = "digits", sy_out;
  int sy_count = 600, sy_size = 32;
  std::uint64_t sy_seed = 1;
  sy->add_option("--kind", sy_kind, "digits | textures")->check(CLI::IsMember({"digits", "textures"}));
  sy->add_option("--count", sy_count, "number of images");
  sy->add_option("--size", sy_size, "image side length");
  sy->add_option("--seed", sy_seed, "generator seed");
  sy->add_option("--out", sy_out, "output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*pre) return run_pretrain(pre_cfg, pre_size_opt, pre_size, pre_steps_opt, pre_steps, pre_out);
    if (*tr) return run_train(tr_cfg, ta);
    if (*co) return run_collage(co_cfg, ca);
    if (*ev) return run_eval(ev_pred, ev_ref, ev_json);
    if (*sy) {
      if (sy_count < 1 || sy_size < 3) throw ConfigurationError("count must be >= 1 and size >= 3");
      const auto images = sy_kind == "digits" ? io::synth_digits(sy_count, sy_size, sy_seed)
                                              : io::synth_textures(sy_count, sy_size, sy_seed);
      io::write_corpus(sy_out, images);
      std::cout << json{{"written", images.size()}, {"dir", sy_out}}.dump() << '\n';
      return 0;
    }
  } catch (const ConfigurationError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const IncompatibleVersion& e) {
    std::cerr << "incompatible checkpoint: " << e.what() << '\n';
    return 3;
  } catch (const IntegrityError& e) {
    std::cerr << "corrupt checkpoint: " << e.what() << '\n';
    return 3;
  } catch (const TrainingDiverged& e) {
    std::cerr << "training diverged: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
