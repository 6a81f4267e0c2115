// Copyright 2026 The wmlab authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "wmlab/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace wmlab {

namespace {

constexpr const char* kMagic = "wmlab-checkpoint v1";

void put_f32_le(std::string& out, float v) {
  uint32_t u;
  std::memcpy(&u, &v, 4);
  out.push_back(char(u & 0xff));
  out.push_back(char((u >> 8) & 0xff));
  out.push_back(char((u >> 16) & 0xff));
  out.push_back(char((u >> 24) & 0xff));
}

void put_f64_le(std::string& out, double v) {
  uint64_t u;
  std::memcpy(&u, &v, 8);
  for (int i = 0; i < 8; ++i) out.push_back(char((u >> (8 * i)) & 0xff));
}

float get_f32_le(const char* p) {
  uint32_t u = 0;
  for (int i = 0; i < 4; ++i) u |= uint32_t(uint8_t(p[i])) << (8 * i);
  float v;
  std::memcpy(&v, &u, 4);
  return v;
}

double get_f64_le(const char* p) {
  uint64_t u = 0;
  for (int i = 0; i < 8; ++i) u |= uint64_t(uint8_t(p[i])) << (8 * i);
  double v;
  std::memcpy(&v, &u, 8);
  return v;
}

}  // namespace

void save_checkpoint(const std::string& path,
                     const std::vector<NamedTensor>& tensors,
                     CheckpointDtype dtype) {
  const size_t width = dtype == CheckpointDtype::f32 ? 4 : 8;
  std::ostringstream manifest;
  manifest << kMagic << '\n';
  manifest << "dtype " << (dtype == CheckpointDtype::f32 ? "f32" : "f64")
           << '\n';
  manifest << "tensors " << tensors.size() << '\n';
  size_t offset = 0;
  for (const auto& nt : tensors) {
    if (nt.name.find(' ') != std::string::npos || nt.name.empty())
      throw std::invalid_argument("checkpoint tensor name must be non-empty "
                                  "and contain no spaces: '" + nt.name + "'");
    manifest << nt.name << ' ' << nt.tensor.rows() << ' ' << nt.tensor.cols()
             << ' ' << offset << '\n';
    offset += nt.tensor.size() * width;
  }
  manifest << "data\n";

  std::string blob;
  blob.reserve(offset);
  for (const auto& nt : tensors)
    for (double v : nt.tensor.values())
      dtype == CheckpointDtype::f32 ? put_f32_le(blob, float(v))
                                    : put_f64_le(blob, v);

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  const std::string head = manifest.str();
  f.write(head.data(), std::streamsize(head.size()));
  f.write(blob.data(), std::streamsize(blob.size()));
  if (!f) throw std::runtime_error("short write: " + path);
}

std::vector<NamedTensor> load_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open checkpoint: " + path);
  std::string content((std::istreambuf_iterator<char>(f)),
                      std::istreambuf_iterator<char>());

  std::istringstream in(content);
  std::string line;
  if (!std::getline(in, line) || line != kMagic)
    throw std::runtime_error("not a wmlab checkpoint: " + path);
  std::string word;
  in >> word;
  if (word != "dtype") throw std::runtime_error("bad checkpoint manifest");
  in >> word;
  const bool f32 = word == "f32";
  if (!f32 && word != "f64") throw std::runtime_error("bad checkpoint dtype");
  in >> word;
  if (word != "tensors") throw std::runtime_error("bad checkpoint manifest");
  size_t count = 0;
  in >> count;

  struct Entry {
    std::string name;
    size_t rows, cols, offset;
  };
  std::vector<Entry> entries(count);
  for (auto& e : entries) in >> e.name >> e.rows >> e.cols >> e.offset;
  in >> word;
  if (word != "data" || !in)
    throw std::runtime_error("bad checkpoint manifest: " + path);
  // binary blob starts right after the "data\n" line
  const size_t data_start = size_t(in.tellg()) + 1;
  const size_t width = f32 ? 4 : 8;

  std::vector<NamedTensor> out;
  out.reserve(count);
  for (const auto& e : entries) {
    const size_t begin = data_start + e.offset;
    const size_t need = e.rows * e.cols * width;
    if (begin + need > content.size())
      throw std::runtime_error("checkpoint data truncated: " + path);
    std::vector<double> v(e.rows * e.cols);
    for (size_t i = 0; i < v.size(); ++i) {
      const char* p = content.data() + begin + i * width;
      v[i] = f32 ? double(get_f32_le(p)) : get_f64_le(p);
    }
    out.push_back({e.name, Tensor::constant(std::move(v), e.rows, e.cols)});
  }
  return out;
}

bool is_checkpoint_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) return false;
  std::string head(std::strlen(kMagic), '\0');
  f.read(head.data(), std::streamsize(head.size()));
  return f && head == kMagic;
}

}  // namespace wmlab
