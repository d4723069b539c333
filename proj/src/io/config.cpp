#include "collage/io/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "collage/errors.hpp"
#include "collage/nn/layers.hpp"
#include "collage/reward/critic.hpp"

namespace collage::io {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T out{};
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last || text.empty()) {
    throw ConfigurationError("invalid value '" + text + "' for " + key);
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigurationError("invalid boolean '" + text + "' for " + key);
}

std::vector<int> parse_int_list(const std::string& key, const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number<int>(key, trim(item)));
  if (out.empty()) throw ConfigurationError("empty list for " + key);
  return out;
}

template <typename T>
std::string format(T v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

struct Field {
  std::string name;
  std::function<void(RunConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <typename T>
Field number(const char* name, T RunConfig::*member) {
  return {name,
          [member](RunConfig& c, const std::string& k, const std::string& v) {
            c.*member = parse_number<T>(k, v);
          },
          [member](const RunConfig& c) { return format(c.*member); }};
}

Field text(const char* name, std::string RunConfig::*member) {
  return {name, [member](RunConfig& c, const std::string&, const std::string& v) { c.*member = v; },
          [member](const RunConfig& c) { return c.*member; }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      number("resolution", &RunConfig::resolution),
      number("scraps", &RunConfig::scraps),
      number("max_steps", &RunConfig::max_steps),
      text("backbone", &RunConfig::backbone),
      text("activation", &RunConfig::activation),
      number("base_width", &RunConfig::base_width),
      number("episodes", &RunConfig::episodes),
      number("workers", &RunConfig::workers),
      number("eval_interval", &RunConfig::eval_interval),
      number("eval_targets", &RunConfig::eval_targets),
      number("eval_fraction", &RunConfig::eval_fraction),
      number("split_seed", &RunConfig::split_seed),
      number("seed", &RunConfig::seed),
      number("eval_seed", &RunConfig::eval_seed),
      number("gamma", &RunConfig::gamma),
      number("alpha", &RunConfig::alpha),
      {"auto_alpha",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.auto_alpha = parse_bool(k, v);
       },
       [](const RunConfig& c) { return std::string(c.auto_alpha ? "true" : "false"); }},
      number("target_entropy", &RunConfig::target_entropy),
      number("polyak", &RunConfig::polyak),
      number("batch_size", &RunConfig::batch_size),
      number("updates_per_episode", &RunConfig::updates_per_episode),
      number("policy_lr", &RunConfig::policy_lr),
      number("value_lr", &RunConfig::value_lr),
      number("alpha_lr", &RunConfig::alpha_lr),
      number("replay_capacity", &RunConfig::replay_capacity),
      text("reward", &RunConfig::reward),
      number("step_penalty", &RunConfig::step_penalty),
      number("gp_lambda", &RunConfig::gp_lambda),
      number("critic_lr", &RunConfig::critic_lr),
      number("shaper_steps", &RunConfig::shaper_steps),
      number("shaper_batch", &RunConfig::shaper_batch),
      number("shaper_lr", &RunConfig::shaper_lr),
      text("shaper_activation", &RunConfig::shaper_activation),
      number("shaper_seed", &RunConfig::shaper_seed),
      {"scales",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.scales = parse_int_list(k, v);
       },
       [](const RunConfig& c) {
         std::string out;
         for (std::size_t i = 0; i < c.scales.size(); ++i) {
           if (i) out += ',';
           out += format(c.scales[i]);
         }
         return out;
       }},
      number("rho", &RunConfig::rho),
      number("kmax", &RunConfig::kmax),
      number("tau", &RunConfig::tau),
      {"fixed_l",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         if (v == "none") c.fixed_l.reset();
         else c.fixed_l = parse_number<double>(k, v);
       },
       [](const RunConfig& c) { return c.fixed_l ? format(*c.fixed_l) : std::string("none"); }},
      number("candidates", &RunConfig::candidates),
  };
  return table;
}

const Field& field(const std::string& key) {
  for (const auto& f : fields()) {
    if (f.name == key) return f;
  }
  throw ConfigurationError("unknown configuration key '" + key + "'");
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigurationError(message);
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
  field(key).set(*this, key, trim(value));
}

std::string RunConfig::get(const std::string& key) const { return field(key).get(*this); }

const std::vector<std::string>& RunConfig::keys() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& f : fields()) out.push_back(f.name);
    return out;
  }();
  return names;
}

void RunConfig::validate() const {
  require(resolution >= 16 && resolution % 16 == 0, "resolution must be a positive multiple of 16");
  require(scraps >= 1, "scraps (T_M) must be at least 1");
  require(max_steps == 0 || max_steps >= scraps, "max_steps (T_max) must be 0 or >= scraps");
  nn::parse_backbone(backbone);
  nn::parse_activation(activation);
  nn::parse_activation(shaper_activation);
  require(base_width >= 1, "base_width must be positive");
  require(episodes >= 1, "episodes must be positive");
  require(workers >= 1, "workers must be positive");
  require(eval_interval >= 1, "eval_interval must be positive");
  require(eval_targets >= 1, "eval_targets must be positive");
  require(eval_fraction > 0.0 && eval_fraction < 1.0, "eval_fraction must lie in (0,1)");
  require(replay_capacity >= 1, "replay_capacity must be positive");
  require(shaper_steps >= 0, "shaper_steps must be non-negative");
  require(shaper_batch >= 1, "shaper_batch must be positive");
  require(shaper_lr > 0.0, "shaper_lr must be positive");
  require(!scales.empty(), "scales must not be empty");
  for (std::size_t i = 0; i < scales.size(); ++i) {
    require(scales[i] >= 3, "every scale must be at least 3 pixels");
    require(i == 0 || scales[i] < scales[i - 1], "scales must be strictly decreasing");
  }
  require(rho > 0.0 && rho <= 1.0, "rho must lie in (0,1]");
  require(kmax >= 1, "kmax must be at least 1");
  require(tau > 0.0, "tau must be positive");
  require(!fixed_l || (*fixed_l >= 0.0 && *fixed_l <= 1.0), "fixed_l must lie in [0,1] or be none");
  require(candidates >= 1, "candidates must be positive");
  train_config().validate();
}

std::string RunConfig::to_text() const {
  std::string out;
  for (const auto& f : fields()) out += f.name + " = " + f.get(*this) + "\n";
  return out;
}

RunConfig RunConfig::from_text(const std::string& text) {
  RunConfig c;
  std::stringstream ss(text);
  std::string line;
  int line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigurationError("line " + std::to_string(line_no) + ": expected key = value");
    }
    c.set(trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  c.validate();
  return c;
}

RunConfig RunConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return from_text(ss.str());
}

agent::ModelConfig RunConfig::model_config() const {
  agent::ModelConfig m;
  m.resolution = resolution;
  m.backbone = nn::parse_backbone(backbone);
  m.activation = nn::parse_activation(activation);
  m.base_width = base_width;
  return m;
}

agent::TrainConfig RunConfig::train_config() const {
  agent::TrainConfig t;
  t.total_pastes = scraps;
  t.max_steps = max_steps;
  t.episodes = episodes;
  t.workers = workers;
  t.eval_interval = eval_interval;
  t.eval_targets = eval_targets;
  t.seed = seed;
  t.eval_seed = eval_seed;
  t.model = model_config();
  t.agent.gamma = gamma;
  t.agent.initial_alpha = alpha;
  t.agent.auto_alpha = auto_alpha;
  t.agent.target_entropy = target_entropy;
  t.agent.polyak = polyak;
  t.agent.batch_size = batch_size;
  t.agent.updates_per_episode = updates_per_episode;
  t.agent.policy_lr = policy_lr;
  t.agent.value_lr = value_lr;
  t.agent.alpha_lr = alpha_lr;
  t.agent.replay_capacity = static_cast<std::size_t>(std::max(replay_capacity, 1));
  t.reward.mode = reward::parse_reward_mode(reward);
  t.reward.step_penalty = step_penalty;
  t.reward.gp_lambda = gp_lambda;
  t.reward.critic_lr = critic_lr;
  return t;
}

render::ShaperConfig RunConfig::shaper_config() const {
  render::ShaperConfig s;
  s.resolution = resolution;
  s.steps = shaper_steps;
  s.batch_size = shaper_batch;
  s.learning_rate = shaper_lr;
  s.seed = shaper_seed;
  s.activation = nn::parse_activation(shaper_activation);
  return s;
}

planner::CollageConfig RunConfig::collage_config() const {
  planner::CollageConfig c;
  c.fixed_l = fixed_l;
  c.candidates = candidates;
  c.seed = seed;
  return c;
}

}  // namespace collage::io
