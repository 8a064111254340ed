// core/src/wav_io.cc

// Copyright 2026 The teca authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "teca/wav_io.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "teca/errors.h"

namespace teca {

namespace {

constexpr uint16_t kFormatPcm = 0x0001;
constexpr uint16_t kFormatIeeeFloat = 0x0003;
constexpr uint16_t kFormatExtensible = 0xFFFE;

uint16_t read_u16(const uint8_t* p) {
  return static_cast<uint16_t>(p[0] | (p[1] << 8));
}
uint32_t read_u32(const uint8_t* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) |
         (static_cast<uint32_t>(p[3]) << 24);
}

void put_u16(std::string* out, uint16_t v) {
  out->push_back(static_cast<char>(v & 0xFF));
  out->push_back(static_cast<char>((v >> 8) & 0xFF));
}
void put_u32(std::string* out, uint32_t v) {
  for (int i = 0; i < 4; ++i)
    out->push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

}  // namespace

Waveform read_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  TECA_CHECK(in.good(), "cannot open WAV file: " << path);

  uint8_t hdr[12];
  in.read(reinterpret_cast<char*>(hdr), 12);
  TECA_CHECK(in.gcount() == 12 && std::memcmp(hdr, "RIFF", 4) == 0 &&
                 std::memcmp(hdr + 8, "WAVE", 4) == 0,
             "not a RIFF/WAVE file: " << path);

  uint16_t format_tag = 0, channels = 0, bits = 0;
  uint32_t rate = 0;
  bool have_fmt = false;
  std::vector<uint8_t> payload;
  bool have_data = false;

  while (!have_data) {
    uint8_t chunk_hdr[8];
    in.read(reinterpret_cast<char*>(chunk_hdr), 8);
    if (in.gcount() != 8) break;
    const uint32_t chunk_size = read_u32(chunk_hdr + 4);
    if (std::memcmp(chunk_hdr, "fmt ", 4) == 0) {
      std::vector<uint8_t> fmt(chunk_size);
      in.read(reinterpret_cast<char*>(fmt.data()), chunk_size);
      TECA_CHECK(chunk_size >= 16, "malformed fmt chunk in " << path);
      format_tag = read_u16(fmt.data());
      channels = read_u16(fmt.data() + 2);
      rate = read_u32(fmt.data() + 4);
      bits = read_u16(fmt.data() + 14);
      if (format_tag == kFormatExtensible && chunk_size >= 40) {
        format_tag = read_u16(fmt.data() + 24);  // first bytes of SubFormat
      }
      have_fmt = true;
    } else if (std::memcmp(chunk_hdr, "data", 4) == 0) {
      payload.resize(chunk_size);
      in.read(reinterpret_cast<char*>(payload.data()), chunk_size);
      TECA_CHECK(static_cast<uint32_t>(in.gcount()) == chunk_size,
                 "truncated data chunk in " << path);
      have_data = true;
    } else {
      in.seekg(chunk_size + (chunk_size & 1), std::ios::cur);
    }
  }

  TECA_CHECK(have_fmt && have_data, "missing fmt/data chunk in " << path);
  TECA_CHECK(channels == 1,
             "only mono WAV is supported, got " << channels << " channels: "
                                                << path);

  Waveform w;
  w.sample_rate = static_cast<int>(rate);
  if (format_tag == kFormatPcm && bits == 16) {
    const size_t n = payload.size() / 2;
    w.samples.resize(n);
    for (size_t i = 0; i < n; ++i) {
      int16_t s;
      std::memcpy(&s, payload.data() + 2 * i, 2);
      w.samples[i] = s / 32768.0;
    }
  } else if (format_tag == kFormatIeeeFloat && bits == 32) {
    const size_t n = payload.size() / 4;
    w.samples.resize(n);
    for (size_t i = 0; i < n; ++i) {
      float s;
      std::memcpy(&s, payload.data() + 4 * i, 4);
      w.samples[i] = s;
    }
  } else {
    throw DataError("unsupported WAV sample format (want PCM16 or float32): " +
                    path);
  }
  return w;
}

Waveform read_wav_checked(const std::string& path, int required_rate) {
  Waveform w = read_wav(path);
  TECA_CHECK(w.sample_rate == required_rate,
             "sample rate mismatch in " << path << ": got " << w.sample_rate
                                        << " Hz, need " << required_rate
                                        << " Hz (no resampling)");
  return w;
}

void write_wav(const std::string& path, const Waveform& w, WavFormat format) {
  const bool f32 = format == WavFormat::kFloat32;
  const uint16_t bytes_per_sample = f32 ? 4 : 2;
  const uint32_t data_size =
      static_cast<uint32_t>(w.samples.size()) * bytes_per_sample;

  std::string out;
  out.reserve(44 + data_size);
  out.append("RIFF");
  put_u32(&out, 36 + data_size);
  out.append("WAVE");
  out.append("fmt ");
  put_u32(&out, 16);
  put_u16(&out, f32 ? kFormatIeeeFloat : kFormatPcm);
  put_u16(&out, 1);  // mono
  put_u32(&out, static_cast<uint32_t>(w.sample_rate));
  put_u32(&out, static_cast<uint32_t>(w.sample_rate) * bytes_per_sample);
  put_u16(&out, bytes_per_sample);
  put_u16(&out, static_cast<uint16_t>(8 * bytes_per_sample));
  out.append("data");
  put_u32(&out, data_size);

  if (f32) {
    for (double v : w.samples) {
      const float s = static_cast<float>(v);
      char buf[4];
      std::memcpy(buf, &s, 4);
      out.append(buf, 4);
    }
  } else {
    for (double v : w.samples) {
      const int32_t q = static_cast<int32_t>(std::lrint(v * 32768.0));
      const int16_t s = static_cast<int16_t>(std::clamp(q, -32768, 32767));
      char buf[2];
      std::memcpy(buf, &s, 2);
      out.append(buf, 2);
    }
  }

  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  TECA_CHECK(os.good(), "cannot open WAV file for writing: " << path);
  os.write(out.data(), static_cast<std::streamsize>(out.size()));
  TECA_CHECK(os.good(), "short write to WAV file: " << path);
}

}  // namespace teca
