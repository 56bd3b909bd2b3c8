// Binary snapshot format.
//
// Little-endian regardless of host:
//   magic "FRSM" | u32 version | u32 N | f64 L | f64 t | 10 x f64 params (Params::names order)
//   | u1, u2, omega, M1, M2 as N*N f64 physical values each, row-major [i1][i2]
//     (i1 along x1 is the slow index).
#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "frsm/state.hpp"

namespace frsm {

class SnapshotError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Snapshot {
  static constexpr std::array<char, 4> kMagic = {'F', 'R', 'S', 'M'};
  static constexpr std::uint32_t kVersion = 1;
  static constexpr std::size_t kHeaderBytes = 4 + 4 + 4 + 8 + 8 + 10 * 8;

  std::uint32_t n = 0;
  double length = 0.0;
  double time = 0.0;
  Params params;
  std::array<std::vector<double>, 5> fields;

  static Snapshot from_state(const State& state, const Params& params);
  State to_state() const;
  GridD grid() const { return GridD(static_cast<int>(n), length); }

  std::vector<std::uint8_t> encode() const;
  static Snapshot decode(std::span<const std::uint8_t> bytes);

  friend bool operator==(const Snapshot&, const Snapshot&) = default;
};

void save_snapshot(const State& state, const Params& params, const std::string& path);
void save_snapshot(const Snapshot& snapshot, const std::string& path);
Snapshot load_snapshot(const std::string& path);

}  // namespace frsm
