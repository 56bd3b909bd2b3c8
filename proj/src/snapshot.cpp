#include "frsm/snapshot.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

namespace frsm {

namespace {

class Writer {
 public:
  explicit Writer(std::vector<std::uint8_t>& out) : out_(out) {}
  void u32(std::uint32_t v) {
    for (int b = 0; b < 4; ++b) out_.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
  }
  void f64(double d) {
    const auto v = std::bit_cast<std::uint64_t>(d);
    for (int b = 0; b < 8; ++b) out_.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
  }

 private:
  std::vector<std::uint8_t>& out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}
  std::uint32_t u32() {
    std::uint32_t v = 0;
    for (int b = 0; b < 4; ++b) v |= static_cast<std::uint32_t>(in_[pos_++]) << (8 * b);
    return v;
  }
  double f64() {
    std::uint64_t v = 0;
    for (int b = 0; b < 8; ++b) v |= static_cast<std::uint64_t>(in_[pos_++]) << (8 * b);
    return std::bit_cast<double>(v);
  }

 private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

std::vector<double> row_major(const RealGrid<double>& a) {
  const Eigen::Index n = a.rows();
  std::vector<double> out(static_cast<std::size_t>(n * n));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) out[static_cast<std::size_t>(i * n + j)] = a(i, j);
  }
  return out;
}

Field from_row_major(const GridD& grid, const std::vector<double>& v) {
  const int n = grid.n();
  RealGrid<double> a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a(i, j) = v[static_cast<std::size_t>(i * n + j)];
  }
  return Field::from_physical(grid, a);
}

}  // namespace

Snapshot Snapshot::from_state(const State& state, const Params& params) {
  Snapshot s;
  s.n = static_cast<std::uint32_t>(state.grid().n());
  s.length = state.grid().length();
  s.time = state.t;
  s.params = params;
  const Field* f[] = {&state.u[0], &state.u[1], &state.omega, &state.M[0], &state.M[1]};
  for (int k = 0; k < 5; ++k) s.fields[k] = row_major(f[k]->to_physical());
  return s;
}

State Snapshot::to_state() const {
  const GridD g = grid();
  State s = zero_state(g);
  s.u = VecField(from_row_major(g, fields[0]), from_row_major(g, fields[1]));
  s.omega = from_row_major(g, fields[2]);
  s.M = VecField(from_row_major(g, fields[3]), from_row_major(g, fields[4]));
  s.t = time;
  return s;
}

std::vector<std::uint8_t> Snapshot::encode() const {
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderBytes + 5 * 8 * static_cast<std::size_t>(n) * n);
  out.insert(out.end(), kMagic.begin(), kMagic.end());
  Writer w(out);
  w.u32(kVersion);
  w.u32(n);
  w.f64(length);
  w.f64(time);
  for (double p : params.to_array()) w.f64(p);
  for (const auto& f : fields) {
    for (double v : f) w.f64(v);
  }
  return out;
}

Snapshot Snapshot::decode(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderBytes) {
    throw SnapshotError("snapshot header truncated: expected at least " + std::to_string(kHeaderBytes) +
                        " bytes, got " + std::to_string(bytes.size()));
  }
  if (std::memcmp(bytes.data(), kMagic.data(), kMagic.size()) != 0) {
    throw SnapshotError("snapshot header: bad magic bytes (expected \"FRSM\")");
  }
  Reader r(bytes.subspan(4));
  Snapshot s;
  const std::uint32_t version = r.u32();
  if (version != kVersion) {
    throw SnapshotError("snapshot header: version " + std::to_string(version) + " not supported (expected " +
                        std::to_string(kVersion) + ")");
  }
  s.n = r.u32();
  if (s.n < 8 || (s.n & (s.n - 1)) != 0) {
    throw SnapshotError("snapshot header: N = " + std::to_string(s.n) + " is not a power of two >= 8");
  }
  const std::size_t expected = kHeaderBytes + 5 * 8 * static_cast<std::size_t>(s.n) * s.n;
  if (bytes.size() != expected) {
    throw SnapshotError("snapshot length mismatch: expected " + std::to_string(expected) + " bytes, got " +
                        std::to_string(bytes.size()));
  }
  s.length = r.f64();
  s.time = r.f64();
  std::array<double, 10> p{};
  for (double& v : p) v = r.f64();
  s.params = Params::from_array(p);
  for (auto& f : s.fields) {
    f.resize(static_cast<std::size_t>(s.n) * s.n);
    for (double& v : f) v = r.f64();
  }
  return s;
}

void save_snapshot(const Snapshot& snapshot, const std::string& path) {
  const auto bytes = snapshot.encode();
  std::ofstream os(path, std::ios::binary);
  if (!os) throw SnapshotError("cannot open " + path + " for writing");
  os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!os) throw SnapshotError("write failed for " + path);
}

void save_snapshot(const State& state, const Params& params, const std::string& path) {
  save_snapshot(Snapshot::from_state(state, params), path);
}

Snapshot load_snapshot(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw SnapshotError("cannot open snapshot " + path);
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  return Snapshot::decode(bytes);
}

}  // namespace frsm
