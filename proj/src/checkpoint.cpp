#include "epiflow/checkpoint.hpp"

#include <array>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "json_util.hpp"

namespace epiflow {

namespace {

constexpr char kMagic[8] = {'E', 'P', 'I', 'F', 'L', 'O', 'W', '1'};
constexpr std::uint32_t kFormatVersion = 1;

std::uint64_t fnv1a(const void* data, std::size_t n,
                    std::uint64_t h = 0xcbf29ce484222325ULL) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

const std::array<std::uint32_t, 256>& crc_table() {
  static const auto table = [] {
    std::array<std::uint32_t, 256> t{};
    for (std::uint32_t i = 0; i < 256; ++i) {
      std::uint32_t c = i;
      for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
      t[i] = c;
    }
    return t;
  }();
  return table;
}

std::uint32_t crc32(const std::string& bytes) {
  std::uint32_t c = 0xFFFFFFFFu;
  for (unsigned char ch : bytes) c = crc_table()[(c ^ ch) & 0xFF] ^ (c >> 8);
  return c ^ 0xFFFFFFFFu;
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint32_t get_u32(const std::string& in, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(in[at + i]);
  return v;
}

std::uint64_t get_u64(const std::string& in, std::size_t at) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(in[at + i]);
  return v;
}

void put_f32_blob(std::string& out, const std::vector<float>& data) {
  for (float f : data) {
    std::uint32_t bits;
    std::memcpy(&bits, &f, 4);
    put_u32(out, bits);
  }
}

std::vector<float> get_f32_blob(const std::string& in, std::size_t at,
                                std::size_t count) {
  std::vector<float> data(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint32_t bits = get_u32(in, at + 4 * i);
    std::memcpy(&data[i], &bits, 4);
  }
  return data;
}

nlohmann::json blob_dir(const std::vector<Checkpoint::Blob>& blobs) {
  nlohmann::json dir = nlohmann::json::array();
  for (const auto& b : blobs) {
    dir.push_back({{"name", b.name},
                   {"shape", b.shape},
                   {"count", b.data.size()}});
  }
  return dir;
}

}  // namespace

std::uint64_t config_fingerprint(const NetworkConfig& net,
                                 const ParameterSpace& space,
                                 const SimulatorSpec& sim) {
  nlohmann::json j{{"net", jsonutil::net_to_json(net)},
                   {"space", jsonutil::space_to_json(space)},
                   {"sim", jsonutil::sim_to_json(sim)}};
  const std::string s = j.dump();
  return fnv1a(s.data(), s.size());
}

std::uint64_t weight_fingerprint(const Estimator<float>& est) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& p : est.weights().params) {
    h = fnv1a(p.name.data(), p.name.size(), h);
    h = fnv1a(p.value.data.data(), p.value.data.size() * sizeof(float), h);
  }
  return h;
}

Checkpoint make_checkpoint(const Estimator<float>& est,
                           const ParameterSpace& space, const SimulatorSpec& sim,
                           long long iterations,
                           const std::vector<float>& loss_history,
                           long long optimizer_step) {
  Checkpoint c;
  c.net = est.config();
  c.space = space;
  c.sim = sim;
  c.config_hash = config_fingerprint(c.net, c.space, c.sim);
  c.iterations = iterations;
  c.optimizer_step = optimizer_step;
  c.loss_history = loss_history;
  for (const auto& p : est.weights().params) {
    Checkpoint::Blob w{p.name, p.value.shape, p.value.data};
    c.weights.push_back(std::move(w));
    Checkpoint::Blob m{p.name, p.m.shape, {}};
    m.data.assign(p.m.data.begin(), p.m.data.end());
    c.m_moments.push_back(std::move(m));
    Checkpoint::Blob v{p.name, p.v.shape, {}};
    v.data.assign(p.v.data.begin(), p.v.data.end());
    c.v_moments.push_back(std::move(v));
  }
  return c;
}

Estimator<float> build_estimator(const Checkpoint& ckpt) {
  Estimator<float> est(ckpt.net);
  auto& params = est.weights().params;
  if (params.size() != ckpt.weights.size()) {
    throw CheckpointError("checkpoint holds " + std::to_string(ckpt.weights.size()) +
                          " weight blobs, model needs " + std::to_string(params.size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& w = ckpt.weights[i];
    if (w.name != params[i].name || w.shape != params[i].value.shape) {
      throw CheckpointError("weight blob mismatch at '" + w.name + "'");
    }
    params[i].value.data = w.data;
    if (i < ckpt.m_moments.size()) {
      params[i].m.data.assign(ckpt.m_moments[i].data.begin(),
                              ckpt.m_moments[i].data.end());
    }
    if (i < ckpt.v_moments.size()) {
      params[i].v.data.assign(ckpt.v_moments[i].data.begin(),
                              ckpt.v_moments[i].data.end());
    }
  }
  return est;
}

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  nlohmann::json header{
      {"config_hash", ckpt.config_hash},
      {"net", jsonutil::net_to_json(ckpt.net)},
      {"space", jsonutil::space_to_json(ckpt.space)},
      {"sim", jsonutil::sim_to_json(ckpt.sim)},
      {"optimizer_step", ckpt.optimizer_step},
      {"iterations", ckpt.iterations},
      {"history_len", ckpt.loss_history.size()},
      {"weights", blob_dir(ckpt.weights)},
      {"m_moments", blob_dir(ckpt.m_moments)},
      {"v_moments", blob_dir(ckpt.v_moments)},
  };
  const std::string header_str = header.dump();

  std::string out;
  out.append(kMagic, sizeof(kMagic));
  put_u32(out, kFormatVersion);
  put_u64(out, header_str.size());
  out += header_str;
  for (const auto* section : {&ckpt.weights, &ckpt.m_moments, &ckpt.v_moments}) {
    for (const auto& b : *section) put_f32_blob(out, b.data);
  }
  put_f32_blob(out, ckpt.loss_history);
  put_u32(out, crc32(out));

  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw CheckpointError("cannot open for writing: " + tmp);
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f) throw CheckpointError("short write: " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw CheckpointError("cannot open: " + path);
  std::string bytes((std::istreambuf_iterator<char>(f)),
                    std::istreambuf_iterator<char>());

  if (bytes.size() < sizeof(kMagic) + 4 + 8 + 4 ||
      std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw CheckpointError("bad magic: not a checkpoint file: " + path);
  }
  const std::string body = bytes.substr(0, bytes.size() - 4);
  const std::uint32_t stored_crc = get_u32(bytes, bytes.size() - 4);
  if (crc32(body) != stored_crc) {
    throw CheckpointError("CRC mismatch (corrupt or truncated): " + path);
  }
  std::size_t at = sizeof(kMagic);
  const std::uint32_t version = get_u32(bytes, at);
  at += 4;
  if (version != kFormatVersion) {
    throw CheckpointError("unsupported format version " + std::to_string(version));
  }
  const std::uint64_t header_len = get_u64(bytes, at);
  at += 8;
  if (at + header_len > body.size()) throw CheckpointError("truncated header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.substr(at, header_len));
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(std::string("bad header JSON: ") + e.what());
  }
  at += header_len;

  Checkpoint c;
  try {
    c.config_hash = header.at("config_hash").get<std::uint64_t>();
    c.net = jsonutil::net_from_json(header.at("net"));
    c.space = jsonutil::space_from_json(header.at("space"));
    c.sim = jsonutil::sim_from_json(header.at("sim"));
    c.optimizer_step = header.at("optimizer_step").get<long long>();
    c.iterations = header.at("iterations").get<long long>();
    const auto history_len = header.at("history_len").get<std::size_t>();

    auto read_section = [&](const char* key, std::vector<Checkpoint::Blob>& out) {
      for (const auto& jb : header.at(key)) {
        Checkpoint::Blob b;
        b.name = jb.at("name").get<std::string>();
        b.shape = jb.at("shape").get<std::vector<int>>();
        const auto count = jb.at("count").get<std::size_t>();
        if (at + 4 * count > body.size()) throw CheckpointError("truncated blob: " + b.name);
        b.data = get_f32_blob(bytes, at, count);
        at += 4 * count;
        out.push_back(std::move(b));
      }
    };
    read_section("weights", c.weights);
    read_section("m_moments", c.m_moments);
    read_section("v_moments", c.v_moments);
    if (at + 4 * history_len > body.size()) throw CheckpointError("truncated history");
    c.loss_history = get_f32_blob(bytes, at, history_len);
    at += 4 * history_len;
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(std::string("malformed header field: ") + e.what());
  }
  if (at != body.size()) throw CheckpointError("trailing bytes in checkpoint");
  return c;
}

Checkpoint load_checkpoint(const std::string& path, std::uint64_t expected_hash) {
  Checkpoint c = load_checkpoint(path);
  if (c.config_hash != expected_hash) {
    char buf[128];
    std::snprintf(buf, sizeof(buf),
                  "checkpoint config hash %016llx does not match expected %016llx",
                  static_cast<unsigned long long>(c.config_hash),
                  static_cast<unsigned long long>(expected_hash));
    throw CheckpointError(buf);
  }
  return c;
}

}  // namespace epiflow
