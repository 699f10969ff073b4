#include "ergolab/sieve_cache.hpp"

#include <array>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "ergolab/error.hpp"

namespace ergolab {

namespace {

constexpr std::array<char, 8> kMagic = {'E', 'R', 'G', 'O', 'S', 'P', 'F', '1'};

void put_le(std::uint32_t v, unsigned char* out) {
  for (int i = 0; i < 4; ++i) out[i] = static_cast<unsigned char>(v >> (8 * i));
}

std::uint32_t get_le(const unsigned char* in) {
  return std::uint32_t(in[0]) | std::uint32_t(in[1]) << 8 | std::uint32_t(in[2]) << 16 | std::uint32_t(in[3]) << 24;
}

std::string file_name(std::uint32_t limit) { return "spf_" + std::to_string(limit) + ".bin"; }

}  // namespace

void save_sieve(const FactorSieve& sieve, const std::filesystem::path& file) {
  const auto tmp = std::filesystem::path(file.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw InvalidArgument("cannot write " + tmp.string());
    out.write(kMagic.data(), kMagic.size());
    const auto t = sieve.table();
    std::vector<unsigned char> buf;
    constexpr std::size_t kChunk = 1 << 20;
    for (std::size_t lo = 0; lo < t.size(); lo += kChunk) {
      const std::size_t hi = std::min(t.size(), lo + kChunk);
      buf.resize(4 * (hi - lo));
      for (std::size_t i = lo; i < hi; ++i) put_le(t[i], &buf[4 * (i - lo)]);
      out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    }
    if (!out) throw InvalidArgument("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, file);
}

FactorSieve load_sieve(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open " + file.string());
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw ParseError("bad sieve cache header in " + file.string(), 0);
  const auto size = std::filesystem::file_size(file);
  if ((size - 8) % 4 != 0 || size < 16) throw ParseError("truncated sieve cache " + file.string(), size);
  std::vector<std::uint32_t> spf((size - 8) / 4);
  std::vector<unsigned char> buf;
  constexpr std::size_t kChunk = 1 << 20;
  for (std::size_t lo = 0; lo < spf.size(); lo += kChunk) {
    const std::size_t hi = std::min(spf.size(), lo + kChunk);
    buf.resize(4 * (hi - lo));
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!in) throw ParseError("short read in " + file.string(), 8 + 4 * lo);
    for (std::size_t i = lo; i < hi; ++i) spf[i] = get_le(&buf[4 * (i - lo)]);
  }
  return FactorSieve::from_table(std::move(spf));
}

std::filesystem::path default_cache_dir() {
  if (const char* d = std::getenv("ERGOLAB_CACHE"); d && *d) return d;
  if (const char* d = std::getenv("XDG_CACHE_HOME"); d && *d) return std::filesystem::path(d) / "ergolab";
  if (const char* d = std::getenv("HOME"); d && *d) return std::filesystem::path(d) / ".cache" / "ergolab";
  return ".ergolab-cache";
}

std::uint32_t round_sieve_limit(std::uint64_t need) {
  constexpr std::uint64_t kMax = std::numeric_limits<std::uint32_t>::max() - 1;
  if (need > kMax)
    throw ResourceExhausted("sieve limit " + std::to_string(need) + " exceeds the 32-bit table",
                            "limit " + std::to_string(need));
  for (std::uint64_t p = 1; p <= 1000000000ull; p *= 10)
    for (std::uint64_t m : {1, 2, 5})
      if (m * p >= need && m * p <= kMax) return static_cast<std::uint32_t>(m * p);
  return static_cast<std::uint32_t>(need);
}

std::shared_ptr<const FactorSieve> obtain_sieve(std::uint64_t need, const std::filesystem::path& dir) {
  const std::uint32_t limit = round_sieve_limit(std::max<std::uint64_t>(need, 100));
  if (!dir.empty() && std::filesystem::is_directory(dir)) {
    std::uint64_t best = 0;
    std::filesystem::path best_file;
    for (const auto& ent : std::filesystem::directory_iterator(dir)) {
      const auto name = ent.path().filename().string();
      if (name.size() < 9 || name.rfind("spf_", 0) != 0 || name.substr(name.size() - 4) != ".bin") continue;
      std::uint64_t l = 0;
      try {
        l = std::stoull(name.substr(4, name.size() - 8));
      } catch (const std::exception&) {
        continue;
      }
      if (l >= need && l <= 4 * std::max<std::uint64_t>(need, 100) && (best == 0 || l < best)) {
        best = l;
        best_file = ent.path();
      }
    }
    if (best != 0) {
      try {
        return std::make_shared<const FactorSieve>(load_sieve(best_file));
      } catch (const std::exception&) {
        // Corrupt cache entry: rebuild below.
      }
    }
  }
  auto sieve = std::make_shared<const FactorSieve>(limit);
  if (!dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (!ec) {
      try {
        save_sieve(*sieve, dir / file_name(limit));
      } catch (const std::exception&) {
        // The cache is an optimization only.
      }
    }
  }
  return sieve;
}

}  // namespace ergolab
