#include "samarl/nets/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace samarl::nets {

namespace fs = std::filesystem;

namespace {

constexpr const char* kMagic = "samarl-checkpoint";

std::uint32_t to_little(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    return ((v & 0xffu) << 24) | ((v & 0xff00u) << 8) | ((v >> 8) & 0xff00u) | (v >> 24);
  }
  return v;
}

nd::Shape parse_shape(const std::string& text, const std::string& where) {
  nd::Shape shape;
  if (text == "scalar") return shape;
  std::stringstream in(text);
  std::string part;
  while (std::getline(in, part, 'x')) {
    try {
      std::size_t used = 0;
      shape.push_back(std::stoull(part, &used));
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw LoadError("checkpoint manifest: bad shape '" + text + "' at " + where);
    }
  }
  return shape;
}

std::string format_shape(const nd::Shape& shape) {
  if (shape.empty()) return "scalar";
  std::string out;
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) out += 'x';
    out += std::to_string(shape[i]);
  }
  return out;
}

}  // namespace

const Tensor<float>* Checkpoint::find(const std::string& name) const {
  for (const auto& t : tensors)
    if (t.name == name) return &t.tensor;
  return nullptr;
}

void save_checkpoint(const fs::path& dir, const CheckpointManifest& meta,
                     const std::vector<NamedTensor<float>>& tensors) {
  fs::create_directories(dir);
  std::ofstream blob(dir / "tensors.bin", std::ios::binary | std::ios::trunc);
  if (!blob) throw std::runtime_error("cannot write " + (dir / "tensors.bin").string());
  std::ostringstream manifest;
  manifest << kMagic << ' ' << meta.version << '\n'
           << "algo " << meta.algo << '\n'
           << "scenario " << meta.scenario << '\n'
           << "agents " << meta.agents << '\n'
           << "episode " << meta.episode << '\n'
           << "tensors " << tensors.size() << '\n';
  std::uint64_t offset = 0;
  std::vector<std::uint32_t> words;
  for (const auto& t : tensors) {
    if (t.name.empty() || t.name.find_first_of(" \t\n") != std::string::npos) {
      throw std::invalid_argument("checkpoint tensor name must be non-empty without whitespace: '" + t.name + "'");
    }
    manifest << "tensor " << t.name << " float32 " << format_shape(t.tensor.shape()) << ' ' << offset << '\n';
    const auto data = t.tensor.data();
    words.resize(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) words[i] = to_little(std::bit_cast<std::uint32_t>(data[i]));
    blob.write(reinterpret_cast<const char*>(words.data()), static_cast<std::streamsize>(words.size() * 4));
    offset += words.size() * 4;
  }
  if (!blob.flush()) throw std::runtime_error("failed writing " + (dir / "tensors.bin").string());
  std::ofstream out(dir / "manifest.txt", std::ios::trunc);
  out << manifest.str();
  if (!out.flush()) throw std::runtime_error("failed writing " + (dir / "manifest.txt").string());
}

Checkpoint load_checkpoint(const fs::path& dir) {
  std::ifstream in(dir / "manifest.txt");
  if (!in) throw LoadError("no checkpoint manifest at " + (dir / "manifest.txt").string());
  Checkpoint ck;
  auto& m = ck.manifest;
  std::string line;
  std::size_t line_no = 0;
  std::size_t declared = 0;
  bool saw_magic = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string key;
    fields >> key;
    const std::string where = "line " + std::to_string(line_no);
    if (key == kMagic) {
      fields >> m.version;
      saw_magic = true;
      if (m.version != kCheckpointVersion) {
        throw LoadError("checkpoint format version " + std::to_string(m.version) + " unsupported (expected " +
                        std::to_string(kCheckpointVersion) + ")");
      }
    } else if (key == "algo") {
      std::getline(fields >> std::ws, m.algo);
    } else if (key == "scenario") {
      std::getline(fields >> std::ws, m.scenario);
    } else if (key == "agents") {
      fields >> m.agents;
    } else if (key == "episode") {
      fields >> m.episode;
    } else if (key == "tensors") {
      fields >> declared;
    } else if (key == "tensor") {
      CheckpointEntry e;
      std::string dtype, shape;
      fields >> e.name >> dtype >> shape >> e.offset;
      if (!fields || dtype != "float32") throw LoadError("checkpoint manifest: malformed tensor entry at " + where);
      e.shape = parse_shape(shape, where);
      m.entries.push_back(std::move(e));
    } else {
      throw LoadError("checkpoint manifest: unknown key '" + key + "' at " + where);
    }
    if (fields.fail() && key != "algo" && key != "scenario") throw LoadError("checkpoint manifest: malformed " + key + " at " + where);
  }
  if (!saw_magic) throw LoadError("not a checkpoint manifest: " + (dir / "manifest.txt").string());
  if (declared != m.entries.size()) {
    throw LoadError("checkpoint manifest declares " + std::to_string(declared) + " tensors but lists " +
                    std::to_string(m.entries.size()));
  }

  std::ifstream blob(dir / "tensors.bin", std::ios::binary);
  if (!blob) throw LoadError("missing " + (dir / "tensors.bin").string());
  const auto blob_size = static_cast<std::uint64_t>(fs::file_size(dir / "tensors.bin"));
  for (const auto& e : m.entries) {
    const std::size_t count = nd::numel(e.shape);
    if (e.offset + count * 4 > blob_size) throw LoadError("checkpoint tensor " + e.name + " runs past end of blob");
    std::vector<std::uint32_t> words(count);
    blob.seekg(static_cast<std::streamoff>(e.offset));
    blob.read(reinterpret_cast<char*>(words.data()), static_cast<std::streamsize>(count * 4));
    if (!blob) throw LoadError("short read for checkpoint tensor " + e.name);
    std::vector<float> values(count);
    for (std::size_t i = 0; i < count; ++i) values[i] = std::bit_cast<float>(to_little(words[i]));
    ck.tensors.push_back({e.name, Tensor<float>(e.shape, std::move(values))});
  }
  return ck;
}

void restore_module(Module<float>& module, const std::string& prefix, const Checkpoint& checkpoint) {
  std::unordered_map<std::string, const Tensor<float>*> index;
  for (const auto& t : checkpoint.tensors) index.emplace(t.name, &t.tensor);
  for (auto& p : module.named_parameters(prefix)) {
    const auto it = index.find(p.name);
    if (it == index.end()) throw LoadError("checkpoint lacks parameter " + p.name);
    if (it->second->shape() != p.tensor.shape()) {
      throw LoadError("checkpoint parameter " + p.name + " has shape " + nd::shape_string(it->second->shape()) +
                      ", network expects " + nd::shape_string(p.tensor.shape()));
    }
    const auto src = it->second->data();
    std::copy(src.begin(), src.end(), p.tensor.mutable_data().begin());
  }
}

}  // namespace samarl::nets
