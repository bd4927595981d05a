// Model checkpoint archive: dimensions, flags, S, every trainable tensor,
// and fingerprints of the input files the model was trained against.
// Round-trips are bit-exact.
#pragma once

#include <string>
#include <vector>

#include "sdsn/binio.hpp"
#include "sdsn/model.hpp"

namespace sdsn {

struct Checkpoint {
  ModelParams params;
  // Fingerprints of the embedding table and (when present) the two sparse
  // space archives used at train time, for compatibility checks at load.
  std::vector<std::pair<std::string, FileFingerprint>> inputs;
};

namespace detail {
constexpr char kModelMagic[8] = {'S', 'D', 'S', 'N', 'M', 'D', 'L', '\0'};
constexpr std::uint32_t kModelVersion = 1;
}  // namespace detail

inline void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  BinWriter w(path);
  write_header(w, detail::kModelMagic, detail::kModelVersion);
  // tensor_views needs mutable access; serialization does not mutate.
  ModelParams& p = const_cast<ModelParams&>(ckpt.params);
  w.u32(static_cast<std::uint32_t>(p.embed_dim));
  w.u32(static_cast<std::uint32_t>(p.map_dim));
  w.u32(static_cast<std::uint32_t>(p.hidden_dim));
  w.u8(p.pair_features ? 1 : 0);
  w.f64(p.max_score);
  for (const auto& view : tensor_views(p)) {
    w.str(view.name);
    w.vec_f64(view.data, view.size);
  }
  w.u32(static_cast<std::uint32_t>(ckpt.inputs.size()));
  for (const auto& [role, fp] : ckpt.inputs) {
    w.str(role);
    w.str(fp.path);
    w.u64(fp.bytes);
    w.u64(fp.hash);
  }
}

inline Checkpoint load_checkpoint(const std::string& path) {
  BinReader r(path);
  r.expect_header(detail::kModelMagic, detail::kModelVersion);
  const int embed_dim = static_cast<int>(r.u32());
  const int map_dim = static_cast<int>(r.u32());
  const int hidden_dim = static_cast<int>(r.u32());
  const bool pair_features = r.u8() != 0;
  const double max_score = r.f64();

  Checkpoint ckpt;
  ckpt.params = init_params(embed_dim, map_dim, hidden_dim, pair_features,
                            max_score, 0);
  for (auto& view : tensor_views(ckpt.params)) {
    std::string name = r.str();
    if (name != view.name)
      throw Error("corrupt checkpoint (tensor `" + name + "`, expected `" +
                  view.name + "`): " + path);
    std::vector<double> data = r.vec_f64();
    if (data.size() != view.size)
      throw Error("corrupt checkpoint (tensor `" + name + "` has " +
                  std::to_string(data.size()) + " entries, expected " +
                  std::to_string(view.size) + "): " + path);
    std::copy(data.begin(), data.end(), view.data);
  }
  std::uint32_t ninputs = r.u32();
  for (std::uint32_t i = 0; i < ninputs; ++i) {
    std::string role = r.str();
    FileFingerprint fp;
    fp.path = r.str();
    fp.bytes = r.u64();
    fp.hash = r.u64();
    ckpt.inputs.emplace_back(std::move(role), std::move(fp));
  }
  return ckpt;
}

}  // namespace sdsn
