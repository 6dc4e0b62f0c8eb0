#include "sattack/predictors/checkpoint.hpp"

#include <fstream>

#include <json.hpp>

#include "sattack/core/error.hpp"

namespace sattack {

namespace {
constexpr const char* kFormat = "sattack-pool-lite-checkpoint";
constexpr int kVersion = 1;
}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& checkpoint) {
  const auto& p = checkpoint.params;
  p.validate();
  nlohmann::ordered_json j;
  j["format"] = kFormat;
  j["version"] = kVersion;
  j["architecture"] = p.architecture();
  j["architecture_hash"] = p.architecture_hash();
  j["hidden"] = p.hidden;
  j["seed"] = p.seed;
  auto& tensors = j["tensors"] = nlohmann::ordered_json::array();
  for (std::size_t s = 0; s < PoolLiteParams::slot_count; ++s) {
    nlohmann::ordered_json t;
    t["name"] = PoolLiteParams::names[s];
    t["shape"] = {p.tensors[s].rows(), p.tensors[s].cols()};
    t["data"] = p.tensors[s].storage();
    tensors.push_back(std::move(t));
  }
  j["loss_curve"] = checkpoint.loss_curve;

  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::io, "cannot write checkpoint '" + path + "'");
  out << j.dump() << "\n";
  if (!out) throw Error(ErrorCode::io, "failed writing checkpoint '" + path + "'");
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot read checkpoint '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse, path + ": " + e.what());
  }

  Checkpoint out;
  try {
    if (j.at("format").get<std::string>() != kFormat) throw Error(ErrorCode::parse, path + ": not a checkpoint");
    if (j.at("version").get<int>() != kVersion) throw Error(ErrorCode::mismatch, path + ": unsupported version");
    auto& p = out.params;
    p.hidden = j.at("hidden").get<std::size_t>();
    p.seed = j.at("seed").get<std::uint64_t>();
    if (j.at("architecture_hash").get<std::string>() != p.architecture_hash()) {
      throw Error(ErrorCode::mismatch, path + ": architecture hash does not match pool-lite H=" +
                                           std::to_string(p.hidden));
    }
    const auto& tensors = j.at("tensors");
    if (tensors.size() != PoolLiteParams::slot_count) throw Error(ErrorCode::parse, path + ": wrong tensor count");
    for (std::size_t s = 0; s < PoolLiteParams::slot_count; ++s) {
      const auto& t = tensors[s];
      if (t.at("name").get<std::string>() != PoolLiteParams::names[s]) {
        throw Error(ErrorCode::parse, path + ": unexpected tensor '" + t.at("name").get<std::string>() + "'");
      }
      const auto shape = t.at("shape").get<std::vector<std::size_t>>();
      if (shape.size() != 2) throw Error(ErrorCode::parse, path + ": tensor shape must have two dimensions");
      p.tensors[s] = ad::Tensor(shape[0], shape[1], t.at("data").get<std::vector<double>>());
    }
    if (j.contains("loss_curve")) out.loss_curve = j["loss_curve"].get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse, path + ": " + e.what());
  }
  out.params.validate();
  return out;
}

}  // namespace sattack
