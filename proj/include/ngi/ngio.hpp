#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ngi/types.hpp"

#include "json.hpp"

namespace ngi {

/// NGI1 binary array: magic "NGI1", u32 LE ndim, ndim x u64 LE dims,
/// u8 dtype (1 = float64 LE, 2 = complex128 LE re,im), row-major payload.
/// read(write(x)) is bitwise identical.
struct NgiArray {
  std::uint8_t dtype = 1;
  std::vector<std::uint64_t> dims;
  std::vector<double> f64;  // dtype 1
  std::vector<cd> c128;     // dtype 2

  std::uint64_t count() const;
};

void write_ngi(const std::string& path, const std::vector<std::uint64_t>& dims,
               const double* values);
void write_ngi(const std::string& path, const std::vector<std::uint64_t>& dims,
               const cd* values);
NgiArray read_ngi(const std::string& path);

/// 16-bit binary PGM preview with a JSON sidecar recording the [min,max]
/// linear mapping. Bit-exact for identical inputs.
void write_pgm16(const std::string& path, const Array2<double>& img);

void write_csv_trace(const std::string& path,
                     const std::vector<std::pair<int, double>>& trace);

/// Atomic text write (temp file + rename).
void write_text_atomic(const std::string& path, const std::string& content);
void write_json(const std::string& path, const nlohmann::json& j);
nlohmann::json read_json(const std::string& path);

std::string sha256_hex(const void* data, std::size_t len);
std::string sha256_hex(const std::string& s);
std::string file_sha256(const std::string& path);

struct Manifest {
  std::string command;
  std::string config_digest;
  nlohmann::json resolved_config;
  std::uint64_t seed = 0;
  int threads = 0;
  std::string started_utc;
  std::string finished_utc;
  std::vector<std::pair<std::string, std::string>> inputs;   // path, sha256
  std::vector<std::pair<std::string, std::string>> outputs;  // path, sha256

  void add_output(const std::string& path);
  void add_input(const std::string& path);
  nlohmann::json to_json() const;
  void write(const std::string& path) const;
};

std::string utc_now_iso8601();

}  // namespace ngi
