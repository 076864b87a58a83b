#include "evth/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

namespace evth {

namespace {

constexpr char kMagic[] = "EVTH1\n";

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_plane(std::ofstream& out, const double* v, std::size_t count) {
  if constexpr (std::endian::native == std::endian::little) {
    out.write(reinterpret_cast<const char*>(v), count * sizeof(double));
  } else {
    std::vector<double> tmp(v, v + count);
    for (double& x : tmp) {
      auto b = std::bit_cast<std::uint64_t>(x);
      b = __builtin_bswap64(b);
      x = std::bit_cast<double>(b);
    }
    out.write(reinterpret_cast<const char*>(tmp.data()), count * sizeof(double));
  }
}

void read_plane(std::ifstream& in, double* v, std::size_t count) {
  in.read(reinterpret_cast<char*>(v), count * sizeof(double));
  if constexpr (std::endian::native != std::endian::little) {
    for (std::size_t i = 0; i < count; ++i) {
      auto b = std::bit_cast<std::uint64_t>(v[i]);
      b = __builtin_bswap64(b);
      v[i] = std::bit_cast<double>(b);
    }
  }
}

}  // namespace

void write_checkpoint(const SliceState& s, const RunAccumulators& acc,
                      const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot open checkpoint for writing: " + path);
  out.write(kMagic, sizeof(kMagic) - 1);

  std::ostringstream header;
  header << "npts:" << s.grid().npts() << " period:" << fmt17(s.grid().period())
         << " tau:" << fmt17(s.tau) << " step:" << acc.step
         << " proper_time:" << fmt17(acc.proper_time)
         << " speed_integral:" << fmt17(acc.speed_integral)
         << " domain_radius:" << fmt17(acc.domain_radius)
         << " breakdown_integral:" << fmt17(acc.breakdown_integral)
         << " pi_l1:" << fmt17(acc.pi_l1)
         << " gronwall:" << fmt17(acc.gronwall_exponent) << " fields:g6,k6,n1,f1\n";
  const std::string h = header.str();
  out.write(h.data(), static_cast<std::streamsize>(h.size()));

  const std::size_t np = s.grid().size();
  for (int c = 0; c < 6; ++c) write_plane(out, s.g.plane(c), np);
  for (int c = 0; c < 6; ++c) write_plane(out, s.k.plane(c), np);
  write_plane(out, s.n.data(), np);
  write_plane(out, s.f.data(), np);
  if (!out) throw ConfigError("short write while saving checkpoint: " + path);
}

CheckpointData read_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open checkpoint: " + path);

  char magic[sizeof(kMagic) - 1];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(magic)) != 0)
    throw ConfigError("bad checkpoint magic in " + path);

  std::string header;
  if (!std::getline(in, header)) throw ConfigError("missing checkpoint header in " + path);

  std::map<std::string, std::string> kv;
  std::istringstream hs(header);
  std::string tok;
  while (hs >> tok) {
    const auto colon = tok.find(':');
    if (colon == std::string::npos)
      throw ConfigError("malformed checkpoint header token '" + tok + "'");
    kv[tok.substr(0, colon)] = tok.substr(colon + 1);
  }
  auto need = [&](const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) throw ConfigError("checkpoint header missing key " + key);
    return it->second;
  };
  auto to_double = [&](const std::string& v) {
    try {
      return std::stod(v);
    } catch (const std::exception&) {
      throw ConfigError("bad number '" + v + "' in checkpoint header");
    }
  };

  const int npts = static_cast<int>(to_double(need("npts")));
  const double period = to_double(need("period"));
  if (need("fields") != "g6,k6,n1,f1")
    throw ConfigError("unsupported checkpoint field order: " + need("fields"));

  GridSpec grid;
  try {
    grid = GridSpec(npts, period);
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("invalid checkpoint grid: ") + e.what());
  }

  CheckpointData data;
  data.state.g = SymTensorField(grid);
  data.state.k = SymTensorField(grid);
  data.state.n = ScalarField(grid);
  data.state.f = ScalarField(grid);
  data.state.tau = to_double(need("tau"));
  data.accumulators.step = static_cast<long>(to_double(need("step")));
  data.accumulators.proper_time = to_double(need("proper_time"));
  data.accumulators.speed_integral = to_double(need("speed_integral"));
  data.accumulators.domain_radius = to_double(need("domain_radius"));
  data.accumulators.breakdown_integral = to_double(need("breakdown_integral"));
  data.accumulators.pi_l1 = to_double(need("pi_l1"));
  data.accumulators.gronwall_exponent = to_double(need("gronwall"));

  const std::size_t np = grid.size();
  for (int c = 0; c < 6; ++c) read_plane(in, data.state.g.plane(c), np);
  for (int c = 0; c < 6; ++c) read_plane(in, data.state.k.plane(c), np);
  read_plane(in, data.state.n.data(), np);
  read_plane(in, data.state.f.data(), np);
  if (!in) throw ConfigError("truncated checkpoint payload in " + path);
  char extra;
  if (in.read(&extra, 1)) throw ConfigError("trailing bytes in checkpoint " + path);
  return data;
}

}  // namespace evth
