// Copyright 2026 The wmlab authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "wmlab/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace wmlab {

namespace {

uint32_t read_u32(const uint8_t* p) {
  return uint32_t(p[0]) | uint32_t(p[1]) << 8 | uint32_t(p[2]) << 16 |
         uint32_t(p[3]) << 24;
}

uint16_t read_u16(const uint8_t* p) {
  return uint16_t(p[0]) | uint16_t(uint16_t(p[1]) << 8);
}

void put_u32(std::vector<uint8_t>& v, uint32_t x) {
  v.push_back(uint8_t(x));
  v.push_back(uint8_t(x >> 8));
  v.push_back(uint8_t(x >> 16));
  v.push_back(uint8_t(x >> 24));
}

void put_u16(std::vector<uint8_t>& v, uint16_t x) {
  v.push_back(uint8_t(x));
  v.push_back(uint8_t(x >> 8));
}

}  // namespace

AudioClip load_wav(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open WAV file: " + path);
  std::vector<uint8_t> buf((std::istreambuf_iterator<char>(f)),
                           std::istreambuf_iterator<char>());
  if (buf.size() < 44 || std::memcmp(buf.data(), "RIFF", 4) != 0 ||
      std::memcmp(buf.data() + 8, "WAVE", 4) != 0)
    throw std::runtime_error("malformed WAV header: " + path);

  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t rate = 0;
  const uint8_t* data = nullptr;
  size_t data_len = 0;
  bool have_fmt = false;

  size_t pos = 12;
  while (pos + 8 <= buf.size()) {
    const uint8_t* p = buf.data() + pos;
    uint32_t chunk_len = read_u32(p + 4);
    const size_t body = pos + 8;
    if (std::memcmp(p, "fmt ", 4) == 0) {
      if (body + 16 > buf.size())
        throw std::runtime_error("truncated fmt chunk: " + path);
      format = read_u16(buf.data() + body);
      channels = read_u16(buf.data() + body + 2);
      rate = read_u32(buf.data() + body + 4);
      bits = read_u16(buf.data() + body + 14);
      have_fmt = true;
    } else if (std::memcmp(p, "data", 4) == 0) {
      if (body + chunk_len > buf.size())
        chunk_len = uint32_t(buf.size() - body);  // tolerate short tail
      data = buf.data() + body;
      data_len = chunk_len;
    }
    pos = body + chunk_len + (chunk_len & 1);  // chunks are word-aligned
  }

  if (!have_fmt || data == nullptr)
    throw std::runtime_error("WAV file missing fmt or data chunk: " + path);
  if (channels == 0 || rate == 0)
    throw std::runtime_error("WAV file has invalid fmt fields: " + path);

  // WAVE_FORMAT_EXTENSIBLE carries the real format in a sub-chunk we do not
  // parse; 16-bit PCM and 32-bit float cover this corpus.
  const bool pcm16 = (format == 1 && bits == 16);
  const bool float32 = (format == 3 && bits == 32);
  if (!pcm16 && !float32)
    throw std::runtime_error(
        "unsupported WAV encoding (want 16-bit PCM or 32-bit float): " + path);

  const size_t bytes_per = bits / 8;
  const size_t frames = data_len / (bytes_per * channels);
  if (frames == 0) throw std::runtime_error("WAV file has no samples: " + path);

  AudioClip clip;
  clip.sample_rate = int(rate);
  clip.samples.resize(frames);
  for (size_t i = 0; i < frames; ++i) {
    double acc = 0.0;
    for (size_t c = 0; c < channels; ++c) {
      const uint8_t* s = data + (i * channels + c) * bytes_per;
      if (pcm16) {
        int16_t v = int16_t(read_u16(s));
        acc += double(v) / 32768.0;
      } else {
        uint32_t u = read_u32(s);
        float v;
        std::memcpy(&v, &u, 4);
        acc += double(v);
      }
    }
    clip.samples[i] = acc / double(channels);
  }
  return clip;
}

void save_wav(const AudioClip& clip, const std::string& path) {
  validate(clip);
  const uint32_t n = uint32_t(clip.samples.size());
  std::vector<uint8_t> out;
  out.reserve(44 + 2 * n);
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  put_u32(out, 36 + 2 * n);
  out.insert(out.end(), {'W', 'A', 'V', 'E'});
  out.insert(out.end(), {'f', 'm', 't', ' '});
  put_u32(out, 16);
  put_u16(out, 1);  // PCM
  put_u16(out, 1);  // mono
  put_u32(out, uint32_t(clip.sample_rate));
  put_u32(out, uint32_t(clip.sample_rate) * 2);
  put_u16(out, 2);
  put_u16(out, 16);
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  put_u32(out, 2 * n);
  for (double s : clip.samples) {
    double v = std::clamp(s, -1.0, 1.0) * 32768.0;
    long q = std::lround(v);
    q = std::clamp(q, -32768L, 32767L);
    put_u16(out, uint16_t(int16_t(q)));
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f.write(reinterpret_cast<const char*>(out.data()),
          std::streamsize(out.size()));
  if (!f) throw std::runtime_error("short write: " + path);
}

}  // namespace wmlab
