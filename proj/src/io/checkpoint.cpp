#include "collage/io/checkpoint.hpp"

#include <fstream>
#include <sstream>
#include <unistd.h>
#include <vector>

#include "json.hpp"

#include "collage/errors.hpp"

namespace collage::io {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr std::string_view kMagic = "COLLAGE-CHECKPOINT\n";

std::string to_hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string save_module(const torch::nn::Module& module) {
  torch::serialize::OutputArchive archive;
  module.save(archive);
  std::ostringstream out;
  archive.save_to(out);
  return out.str();
}

void load_module(torch::nn::Module& module, const std::string& bytes, const std::string& name) {
  try {
    std::istringstream in(bytes);
    torch::serialize::InputArchive archive;
    archive.load_from(in);
    module.load(archive);
  } catch (const c10::Error& e) {
    throw IntegrityError("cannot restore section '" + name + "': " + e.what_without_backtrace());
  }
}

std::string save_tensor(const torch::Tensor& t) {
  torch::serialize::OutputArchive archive;
  archive.write("value", t);
  std::ostringstream out;
  archive.save_to(out);
  return out.str();
}

torch::Tensor load_tensor(const std::string& bytes, const std::string& name) {
  try {
    std::istringstream in(bytes);
    torch::serialize::InputArchive archive;
    archive.load_from(in);
    torch::Tensor t;
    archive.read("value", t);
    return t;
  } catch (const c10::Error& e) {
    throw IntegrityError("cannot restore section '" + name + "': " + e.what_without_backtrace());
  }
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void save_checkpoint(const fs::path& path, const Checkpoint& ckpt) {
  std::vector<std::pair<std::string, std::string>> sections;
  if (ckpt.shaper) sections.emplace_back("shaper", save_module(*ckpt.shaper));
  if (ckpt.agent) {
    sections.emplace_back("policy", save_module(*ckpt.agent->policy));
    sections.emplace_back("value", save_module(*ckpt.agent->value));
    sections.emplace_back("value_target", save_module(*ckpt.agent->value_target));
    sections.emplace_back("log_alpha", save_tensor(ckpt.agent->log_alpha.detach()));
  }
  if (ckpt.critic) sections.emplace_back("critic", save_module(*ckpt.critic));

  json header;
  header["format_version"] = kCheckpointVersion;
  header["config"] = ckpt.config.to_text();
  header["metadata"] = ckpt.metadata;
  header["sections"] = json::array();
  for (const auto& [name, bytes] : sections) {
    header["sections"].push_back(
        {{"name", name}, {"size", bytes.size()}, {"fnv1a", to_hex(fnv1a64(bytes))}});
  }
  const std::string head = header.dump();

  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << kMagic << head.size() << '\n' << head;
    for (const auto& [name, bytes] : sections) out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) {
      fs::remove(tmp);
      throw std::runtime_error("failed writing " + tmp.string());
    }
  }
  fs::rename(tmp, path);
}

Checkpoint load_checkpoint(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigurationError("cannot open checkpoint " + path.string());
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  if (data.compare(0, kMagic.size(), kMagic) != 0) {
    throw IntegrityError(path.string() + " is not a checkpoint archive");
  }
  std::size_t pos = kMagic.size();
  const auto nl = data.find('\n', pos);
  if (nl == std::string::npos) throw IntegrityError("truncated checkpoint header");
  std::size_t head_size = 0;
  try {
    head_size = std::stoull(data.substr(pos, nl - pos));
  } catch (const std::exception&) {
    throw IntegrityError("malformed checkpoint header length");
  }
  pos = nl + 1;
  if (data.size() < pos + head_size) throw IntegrityError("truncated checkpoint header");
  json header;
  try {
    header = json::parse(data.substr(pos, head_size));
  } catch (const json::exception& e) {
    throw IntegrityError(std::string("malformed checkpoint header: ") + e.what());
  }
  pos += head_size;

  const int version = header.value("format_version", -1);
  if (version != kCheckpointVersion) {
    throw IncompatibleVersion("checkpoint format version " + std::to_string(version) +
                              " is not supported (expected " +
                              std::to_string(kCheckpointVersion) + ")");
  }

  Checkpoint ckpt;
  std::map<std::string, std::string> blobs;
  try {
    ckpt.config = RunConfig::from_text(header.at("config").get<std::string>());
    ckpt.metadata = header.value("metadata", std::map<std::string, double>{});
    for (const auto& s : header.at("sections")) {
      const auto name = s.at("name").get<std::string>();
      const auto size = s.at("size").get<std::size_t>();
      if (data.size() < pos + size) throw IntegrityError("section '" + name + "' is truncated");
      auto bytes = data.substr(pos, size);
      if (to_hex(fnv1a64(bytes)) != s.at("fnv1a").get<std::string>()) {
        throw IntegrityError("section '" + name + "' fails its checksum");
      }
      blobs[name] = std::move(bytes);
      pos += size;
    }
  } catch (const json::exception& e) {
    throw IntegrityError(std::string("malformed checkpoint header: ") + e.what());
  }
  if (pos != data.size()) throw IntegrityError("trailing bytes after the last section");

  const auto& cfg = ckpt.config;
  if (blobs.count("shaper")) {
    ckpt.shaper = render::ShaperNet(cfg.resolution, nn::parse_activation(cfg.shaper_activation));
    load_module(*ckpt.shaper, blobs["shaper"], "shaper");
    ckpt.shaper->eval();
  }
  if (blobs.count("policy")) {
    for (const char* name : {"value", "value_target", "log_alpha"}) {
      if (!blobs.count(name)) throw IntegrityError(std::string("missing section '") + name + "'");
    }
    agent::AgentModels m = agent::AgentModels::create(cfg.model_config(), 1.0, cfg.seed);
    load_module(*m.policy, blobs["policy"], "policy");
    load_module(*m.value, blobs["value"], "value");
    load_module(*m.value_target, blobs["value_target"], "value_target");
    {
      torch::NoGradGuard guard;
      m.log_alpha.copy_(load_tensor(blobs["log_alpha"], "log_alpha"));
    }
    m.policy->eval();
    m.value->eval();
    m.value_target->eval();
    ckpt.agent = std::move(m);
  }
  if (blobs.count("critic")) {
    ckpt.critic = reward::CriticNet();
    load_module(*ckpt.critic, blobs["critic"], "critic");
    ckpt.critic->eval();
  }
  return ckpt;
}

}  // namespace collage::io
