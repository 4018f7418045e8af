#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include "cpa/errors.hpp"
#include "cpa/instance.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitInfeasible = 2;
constexpr int kExitResource = 3;
constexpr int kExitSchema = 4;

void write_atomic(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
  }
  fs::rename(tmp, path);
}

cpa::Json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw cpa::SchemaError("cannot open " + path.string());
  try {
    return cpa::Json::parse(in);
  } catch (const cpa::Json::parse_error& e) {
    throw cpa::SchemaError(path.string() + ": " + e.what());
  }
}

cpa::InstanceFile load_instance(const fs::path& path, const std::string& params_path) {
  cpa::InstanceFile inst = cpa::parse_instance(read_json(path));
  if (!params_path.empty()) cpa::apply_params(inst, read_json(params_path));
  return inst;
}

std::size_t worker_count() {
  if (const char* env = std::getenv("CPA_WORKERS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

int guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const cpa::InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const cpa::ResourceLimitError& e) {
    std::cerr << "resource cap: " << e.what() << '\n';
    return kExitResource;
  } catch (const cpa::SchemaError& e) {
    std::cerr << "schema error: " << e.what() << '\n';
    return kExitSchema;
  } catch (const cpa::Json::exception& e) {
    std::cerr << "schema error: " << e.what() << '\n';
    return kExitSchema;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

struct RunFlags {
  std::string instance;
  std::string params;
  std::string out;
  bool oracle = false;
  std::size_t samples = 0;
  std::optional<std::uint64_t> seed;
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--instance", f.instance, "Instance JSON file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--params", f.params, "JSON object overriding the embedded parameters");
  cmd->add_option("--out", f.out, "Directory for the solution JSON and CSV row");
  cmd->add_flag("--oracle", f.oracle, "Also run the brute-force oracle");
  cmd->add_option("--samples", f.samples, "Monte Carlo samples");
  cmd->add_option("--seed", f.seed, "Override the instance seed");
}

int run_single(const std::string& kind, const RunFlags& f, bool solver) {
  cpa::InstanceFile inst = load_instance(f.instance, f.params);
  if (!kind.empty() && inst.kind != kind) {
    throw cpa::SchemaError("instance kind '" + inst.kind + "' does not match subcommand '" + kind + "'");
  }
  cpa::RunOptions opt;
  opt.with_oracle = f.oracle || !solver;
  opt.solver = solver;
  opt.samples = f.samples;
  opt.seed = f.seed;
  const std::string id = fs::path(f.instance).stem().string();
  cpa::RunOutput r = cpa::run_instance(inst, id, opt);
  const std::string csv = cpa::report_csv_header() + "\n" + cpa::report_csv_row(r.row) + "\n";
  std::cout << csv;
  if (!f.out.empty()) {
    write_atomic(fs::path(f.out) / (id + ".solution.json"), r.solution.dump(2) + "\n");
    write_atomic(fs::path(f.out) / (id + ".csv"), csv);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Poisson-approximation solvers for stochastic combinatorial optimization"};
  app.require_subcommand(1);

  RunFlags flags;
  const std::vector<std::string> kinds{"eum", "sbp", "sk", "gensk", "bosp", "sku"};
  for (const std::string& k : kinds) {
    add_run_flags(app.add_subcommand(k, "Solve a " + k + " instance"), flags);
  }
  add_run_flags(app.add_subcommand("oracle", "Run only the brute-force oracle"), flags);

  std::string gen_kind, gen_family = "grid-bernoulli", gen_out;
  std::size_t gen_n = 6;
  std::uint64_t gen_seed = 1;
  auto* gen = app.add_subcommand("generate", "Write a random instance");
  gen->add_option("--kind", gen_kind, "Problem kind")->required()->check(CLI::IsMember(kinds));
  gen->add_option("--n", gen_n, "Number of items");
  gen->add_option("--family", gen_family, "grid-bernoulli, grid-uniform or two-point")
      ->check(CLI::IsMember({"grid-bernoulli", "grid-uniform", "two-point"}));
  gen->add_option("--seed", gen_seed, "Generator seed");
  gen->add_option("--out", gen_out, "Output file (stdout when omitted)");

  std::string batch_dir, batch_out, batch_params;
  bool batch_oracle = false;
  std::size_t batch_samples = 0;
  auto* batch = app.add_subcommand("batch", "Run every instance in a directory");
  batch->add_option("--instances", batch_dir, "Directory of instance JSON files")
      ->required()
      ->check(CLI::ExistingDirectory);
  batch->add_option("--out", batch_out, "Output directory")->required();
  batch->add_option("--params", batch_params, "Parameter overrides for every instance");
  batch->add_flag("--oracle", batch_oracle, "Also run the oracles");
  batch->add_option("--samples", batch_samples, "Monte Carlo samples");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  return guarded([&]() -> int {
    for (const std::string& k : kinds) {
      if (app.got_subcommand(k)) return run_single(k, flags, true);
    }
    if (app.got_subcommand("oracle")) return run_single("", flags, false);
    if (app.got_subcommand("generate")) {
      cpa::InstanceFile inst = cpa::generate_instance(gen_kind, gen_n, gen_family, gen_seed);
      const std::string text = cpa::serialize_instance(inst).dump(2) + "\n";
      if (gen_out.empty()) {
        std::cout << text;
      } else {
        write_atomic(gen_out, text);
      }
      return 0;
    }
    // Batch: each worker claims the next file; rows are reported in file order.
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(batch_dir)) {
      if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<std::string> rows(files.size());
    std::vector<int> codes(files.size(), 0);
    std::atomic<std::size_t> next{0};
    std::mutex err_mu;
    auto worker = [&]() {
      for (std::size_t i = next++; i < files.size(); i = next++) {
        codes[i] = guarded([&]() -> int {
          cpa::InstanceFile inst = load_instance(files[i], batch_params);
          cpa::RunOptions opt;
          opt.with_oracle = batch_oracle;
          opt.samples = batch_samples;
          const std::string id = files[i].stem().string();
          cpa::RunOutput r = cpa::run_instance(inst, id, opt);
          write_atomic(fs::path(batch_out) / (id + ".solution.json"), r.solution.dump(2) + "\n");
          rows[i] = cpa::report_csv_row(r.row);
          return 0;
        });
        if (codes[i] != 0) {
          std::lock_guard<std::mutex> lock(err_mu);
          std::cerr << files[i].string() << ": failed with exit code " << codes[i] << '\n';
        }
      }
    };
    std::vector<std::thread> pool;
    const std::size_t workers = std::min(worker_count(), std::max<std::size_t>(1, files.size()));
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    std::string csv = cpa::report_csv_header() + "\n";
    for (const std::string& r : rows) {
      if (!r.empty()) csv += r + "\n";
    }
    write_atomic(fs::path(batch_out) / "report.csv", csv);
    std::cout << csv;
    int worst = 0;
    for (int c : codes) worst = std::max(worst, c);
    return worst;
  });
}
