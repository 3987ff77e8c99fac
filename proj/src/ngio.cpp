#include "ngi/ngio.hpp"

#include <array>
#include <bit>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ngi/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "NGI1 writer assumes a little-endian host");

namespace ngi {

namespace fs = std::filesystem;

std::uint64_t NgiArray::count() const {
  std::uint64_t n = 1;
  for (auto d : dims) n *= d;
  return n;
}

namespace {

void write_ngi_raw(const std::string& path, std::uint8_t dtype,
                   const std::vector<std::uint64_t>& dims, const void* payload,
                   std::size_t payload_bytes) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw MissingInputError("cannot open for write: " + tmp);
    out.write("NGI1", 4);
    std::uint32_t ndim = static_cast<std::uint32_t>(dims.size());
    out.write(reinterpret_cast<const char*>(&ndim), 4);
    for (auto d : dims) out.write(reinterpret_cast<const char*>(&d), 8);
    out.write(reinterpret_cast<const char*>(&dtype), 1);
    out.write(reinterpret_cast<const char*>(payload), payload_bytes);
    if (!out) throw MissingInputError("short write: " + tmp);
  }
  fs::rename(tmp, path);
}

}  // namespace

void write_ngi(const std::string& path, const std::vector<std::uint64_t>& dims,
               const double* values) {
  std::uint64_t n = 1;
  for (auto d : dims) n *= d;
  write_ngi_raw(path, 1, dims, values, n * sizeof(double));
}

void write_ngi(const std::string& path, const std::vector<std::uint64_t>& dims,
               const cd* values) {
  std::uint64_t n = 1;
  for (auto d : dims) n *= d;
  write_ngi_raw(path, 2, dims, values, n * sizeof(cd));
}

NgiArray read_ngi(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingInputError("cannot open: " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "NGI1", 4) != 0)
    throw MissingInputError("bad magic in " + path);
  std::uint32_t ndim = 0;
  in.read(reinterpret_cast<char*>(&ndim), 4);
  if (!in || ndim == 0 || ndim > 8) throw MissingInputError("bad ndim in " + path);
  NgiArray arr;
  arr.dims.resize(ndim);
  for (auto& d : arr.dims) in.read(reinterpret_cast<char*>(&d), 8);
  in.read(reinterpret_cast<char*>(&arr.dtype), 1);
  if (!in || (arr.dtype != 1 && arr.dtype != 2))
    throw MissingInputError("bad dtype in " + path);
  std::uint64_t n = arr.count();
  if (arr.dtype == 1) {
    arr.f64.resize(n);
    in.read(reinterpret_cast<char*>(arr.f64.data()), n * sizeof(double));
  } else {
    arr.c128.resize(n);
    in.read(reinterpret_cast<char*>(arr.c128.data()), n * sizeof(cd));
  }
  if (!in) throw MissingInputError("truncated payload in " + path);
  return arr;
}

void write_pgm16(const std::string& path, const Array2<double>& img) {
  double lo = img.data.empty() ? 0.0 : img.data[0];
  double hi = lo;
  for (double v : img.data) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  double span = hi - lo;
  std::string bytes;
  bytes.reserve(img.size() * 2 + 32);
  // image rows = i0, columns = i1
  std::ostringstream head;
  head << "P5\n" << img.n1 << " " << img.n0 << "\n65535\n";
  bytes += head.str();
  for (std::size_t i = 0; i < img.n0; ++i) {
    for (std::size_t j = 0; j < img.n1; ++j) {
      double t = span > 0.0 ? (img.at(i, j) - lo) / span : 0.0;
      auto v = static_cast<std::uint16_t>(std::lround(t * 65535.0));
      bytes.push_back(static_cast<char>(v >> 8));
      bytes.push_back(static_cast<char>(v & 0xff));
    }
  }
  write_text_atomic(path, bytes);
  nlohmann::json side{{"min", lo}, {"max", hi}, {"width", img.n1}, {"height", img.n0}};
  write_json(path + ".json", side);
}

void write_csv_trace(const std::string& path,
                     const std::vector<std::pair<int, double>>& trace) {
  std::ostringstream out;
  out << "iteration,residual\n";
  char buf[64];
  for (auto& [it, res] : trace) {
    std::snprintf(buf, sizeof buf, "%d,%.17g\n", it, res);
    out << buf;
  }
  write_text_atomic(path, out.str());
}

void write_text_atomic(const std::string& path, const std::string& content) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw MissingInputError("cannot open for write: " + tmp);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw MissingInputError("short write: " + tmp);
  }
  fs::rename(tmp, path);
}

void write_json(const std::string& path, const nlohmann::json& j) {
  write_text_atomic(path, j.dump(2) + "\n");
}

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MissingInputError("cannot open: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError("invalid JSON in " + path + ": " + e.what());
  }
  return j;
}

// ---------------------------------------------------------------------------
// SHA-256 (FIPS 180-4), compact implementation for manifests and digests.

namespace {

struct Sha256 {
  std::uint32_t h[8] = {0x6a09e667, 0xbb67ae85, 0x3c6ef372, 0xa54ff53a,
                        0x510e527f, 0x9b05688c, 0x1f83d9ab, 0x5be0cd19};
  std::uint64_t total = 0;
  std::uint8_t buf[64];
  std::size_t fill = 0;

  static std::uint32_t rotr(std::uint32_t x, int n) { return (x >> n) | (x << (32 - n)); }

  void block(const std::uint8_t* p) {
    static const std::uint32_t K[64] = {
        0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1,
        0x923f82a4, 0xab1c5ed5, 0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3,
        0x72be5d74, 0x80deb1fe, 0x9bdc06a7, 0xc19bf174, 0xe49b69c1, 0xefbe4786,
        0x0fc19dc6, 0x240ca1cc, 0x2de92c6f, 0x4a7484aa, 0x5cb0a9dc, 0x76f988da,
        0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7, 0xc6e00bf3, 0xd5a79147,
        0x06ca6351, 0x14292967, 0x27b70a85, 0x2e1b2138, 0x4d2c6dfc, 0x53380d13,
        0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85, 0xa2bfe8a1, 0xa81a664b,
        0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070,
        0x19a4c116, 0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a,
        0x5b9cca4f, 0x682e6ff3, 0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208,
        0x90befffa, 0xa4506ceb, 0xbef9a3f7, 0xc67178f2};
    std::uint32_t w[64];
    for (int i = 0; i < 16; ++i)
      w[i] = (std::uint32_t(p[4 * i]) << 24) | (std::uint32_t(p[4 * i + 1]) << 16) |
             (std::uint32_t(p[4 * i + 2]) << 8) | std::uint32_t(p[4 * i + 3]);
    for (int i = 16; i < 64; ++i) {
      std::uint32_t s0 = rotr(w[i - 15], 7) ^ rotr(w[i - 15], 18) ^ (w[i - 15] >> 3);
      std::uint32_t s1 = rotr(w[i - 2], 17) ^ rotr(w[i - 2], 19) ^ (w[i - 2] >> 10);
      w[i] = w[i - 16] + s0 + w[i - 7] + s1;
    }
    std::uint32_t a = h[0], b = h[1], c = h[2], d = h[3];
    std::uint32_t e = h[4], f = h[5], g = h[6], hh = h[7];
    for (int i = 0; i < 64; ++i) {
      std::uint32_t S1 = rotr(e, 6) ^ rotr(e, 11) ^ rotr(e, 25);
      std::uint32_t ch = (e & f) ^ (~e & g);
      std::uint32_t t1 = hh + S1 + ch + K[i] + w[i];
      std::uint32_t S0 = rotr(a, 2) ^ rotr(a, 13) ^ rotr(a, 22);
      std::uint32_t maj = (a & b) ^ (a & c) ^ (b & c);
      std::uint32_t t2 = S0 + maj;
      hh = g; g = f; f = e; e = d + t1;
      d = c; c = b; b = a; a = t1 + t2;
    }
    h[0] += a; h[1] += b; h[2] += c; h[3] += d;
    h[4] += e; h[5] += f; h[6] += g; h[7] += hh;
  }

  void update(const void* data, std::size_t len) {
    auto* p = static_cast<const std::uint8_t*>(data);
    total += len;
    while (len > 0) {
      std::size_t take = std::min<std::size_t>(64 - fill, len);
      std::memcpy(buf + fill, p, take);
      fill += take;
      p += take;
      len -= take;
      if (fill == 64) {
        block(buf);
        fill = 0;
      }
    }
  }

  std::string hex_digest() {
    std::uint64_t bits = total * 8;
    std::uint8_t pad = 0x80;
    update(&pad, 1);
    std::uint8_t zero = 0;
    while (fill != 56) update(&zero, 1);
    std::uint8_t lenb[8];
    for (int i = 0; i < 8; ++i) lenb[i] = static_cast<std::uint8_t>(bits >> (56 - 8 * i));
    update(lenb, 8);
    char out[65];
    for (int i = 0; i < 8; ++i) std::snprintf(out + 8 * i, 9, "%08x", h[i]);
    return std::string(out, 64);
  }
};

}  // namespace

std::string sha256_hex(const void* data, std::size_t len) {
  Sha256 s;
  s.update(data, len);
  return s.hex_digest();
}

std::string sha256_hex(const std::string& s) { return sha256_hex(s.data(), s.size()); }

std::string file_sha256(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingInputError("cannot open: " + path);
  Sha256 s;
  char chunk[65536];
  while (in) {
    in.read(chunk, sizeof chunk);
    s.update(chunk, static_cast<std::size_t>(in.gcount()));
  }
  return s.hex_digest();
}

// ---------------------------------------------------------------------------

std::string utc_now_iso8601() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char out[32];
  std::strftime(out, sizeof out, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return out;
}

void Manifest::add_output(const std::string& path) {
  outputs.emplace_back(path, file_sha256(path));
}

void Manifest::add_input(const std::string& path) {
  inputs.emplace_back(path, file_sha256(path));
}

nlohmann::json Manifest::to_json() const {
  nlohmann::json in = nlohmann::json::array();
  for (auto& [p, d] : inputs) in.push_back({{"path", p}, {"sha256", d}});
  nlohmann::json out = nlohmann::json::array();
  for (auto& [p, d] : outputs) out.push_back({{"path", p}, {"sha256", d}});
  return nlohmann::json{{"tool", "ngi"},
                        {"version", "0.1.0"},
                        {"command", command},
                        {"config_sha256", config_digest},
                        {"resolved_config", resolved_config},
                        {"seed", seed},
                        {"threads", threads},
                        {"started_utc", started_utc},
                        {"finished_utc", finished_utc},
                        {"inputs", in},
                        {"outputs", out}};
}

void Manifest::write(const std::string& path) const { write_json(path, to_json()); }

}  // namespace ngi
