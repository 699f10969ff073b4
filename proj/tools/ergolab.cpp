// ergolab: run named experiments, list the registry, prebuild sieve caches.
//
// Exit codes: 0 success, 1 tolerance violated (--accept), 2 usage, 3 resources.

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ergolab/error.hpp"
#include "ergolab/experiments.hpp"
#include "ergolab/sieve_cache.hpp"
#include "ergolab/spec_text.hpp"

namespace {

constexpr int kOk = 0, kTolerance = 1, kUsage = 2, kResources = 3;

std::filesystem::path cache_dir(const std::string& dir, bool no_cache) {
  if (no_cache) return {};
  return dir.empty() ? ergolab::default_cache_dir() : std::filesystem::path(dir);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ergolab: orbit averages along Omega(n) and related experiments"};
  app.require_subcommand(1);

  std::string experiment, config_file, out_file, cache;
  std::vector<std::string> assignments;
  bool accept = false, no_cache = false;
  unsigned threads = 1;
  std::string limit_text;

  auto* run = app.add_subcommand("run", "run an experiment");
  run->add_option("experiment", experiment, "experiment name (see 'ergolab list')")->required();
  run->add_option("params", assignments, "key=value parameters");
  run->add_option("--config", config_file, "file with key=value lines; command-line values win");
  run->add_option("--out", out_file, "write CSV here instead of stdout");
  run->add_flag("--accept", accept, "exit 1 when an acceptance tolerance is violated");
  run->add_option("--threads", threads, "evaluate grid points concurrently")->check(CLI::Range(1u, 256u));

  auto* list = app.add_subcommand("list", "list experiments, keys and defaults");

  auto* sieve = app.add_subcommand("sieve", "build and cache a smallest-prime-factor table");
  sieve->add_option("--limit", limit_text, "sieve limit, e.g. 1e8")->required();

  for (auto* sub : {run, sieve}) {
    sub->add_option("--cache", cache, "cache directory");
    sub->add_flag("--no-cache", no_cache, "do not read or write the sieve cache");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (list->parsed()) {
      std::cout << ergolab::list_experiments();
      return kOk;
    }
    if (sieve->parsed()) {
      const auto dir = cache_dir(cache, no_cache);
      const std::uint64_t limit = ergolab::parse_count(limit_text);
      if (limit > 0xfffffffeull)
        throw ergolab::ResourceExhausted("sieve limit " + limit_text + " exceeds the 32-bit table", "limit <= 4294967294");
      const auto t0 = std::chrono::steady_clock::now();
      ergolab::FactorSieve s(static_cast<std::uint32_t>(limit));
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      std::cerr << "built sieve to " << s.limit() << " in " << secs << " s\n";
      if (!dir.empty()) {
        std::filesystem::create_directories(dir);
        const auto file = dir / ("spf_" + std::to_string(s.limit()) + ".bin");
        ergolab::save_sieve(s, file);
        std::cerr << "saved " << file.string() << "\n";
      }
      return kOk;
    }

    ergolab::ExperimentConfig cfg{experiment, {}};
    if (!config_file.empty()) {
      std::ifstream in(config_file);
      if (!in) {
        std::cerr << "cannot read " << config_file << "\n";
        return kUsage;
      }
      std::stringstream ss;
      ss << in.rdbuf();
      cfg.params = ergolab::parse_config_text(ss.str());
    }
    for (const auto& a : assignments) {
      auto [k, v] = ergolab::parse_assignment(a);
      cfg.params.insert_or_assign(k, v);
    }

    const auto report = ergolab::run_experiment(cfg, {threads, cache_dir(cache, no_cache)});
    if (out_file.empty()) {
      ergolab::write_csv(std::cout, report);
    } else {
      std::ofstream out(out_file, std::ios::binary);
      if (!out) {
        std::cerr << "cannot write " << out_file << "\n";
        return kUsage;
      }
      ergolab::write_csv(out, report);
    }
    for (const auto& n : report.notes) std::cerr << "note: " << n << "\n";
    if (accept && !report.accepted) {
      std::cerr << "acceptance failed\n";
      return kTolerance;
    }
    return kOk;
  } catch (const ergolab::ResourceExhausted& e) {
    std::cerr << "resources: " << e.what() << "\nwould suffice: " << e.suggestion() << "\n";
    return kResources;
  } catch (const ergolab::OutOfRange& e) {
    std::cerr << "resources: " << e.what() << "\n";
    return kResources;
  } catch (const std::bad_alloc&) {
    std::cerr << "resources: out of memory\n";
    return kResources;
  } catch (const ergolab::ParseError& e) {
    std::cerr << "usage: " << e.what() << "\n";
    return kUsage;
  } catch (const ergolab::InvalidArgument& e) {
    std::cerr << "usage: " << e.what() << "\n";
    return kUsage;
  } catch (const ergolab::UnsupportedOperation& e) {
    std::cerr << "usage: " << e.what() << "\n";
    return kUsage;
  }
}
