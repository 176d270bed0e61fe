// Command-line front end: runs scenarios from the preset catalog or from
// JSON config files, lists the catalog, and dumps operator matrices as CSV.
#include <splitstab/experiments.hpp>

#include <CLI11.hpp>

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <mutex>
#include <thread>

namespace {

using namespace splitstab;

std::string default_out_root() {
  const char* env = std::getenv("SPLITSTAB_OUT");
  if (env != nullptr && *env != '\0') return env;
  return "splitstab-out";
}

int cmd_list() {
  std::printf("%-28s %-20s %s\n", "name", "analysis", "grid");
  for (const Scenario& sc : catalog()) {
    char grid[64];
    std::snprintf(grid, sizeof grid, "%s p=%d n=%d", sc.grid.family.c_str(),
                  sc.grid.accuracy, sc.grid.n_nodes);
    std::printf("%-28s %-20s %s\n", sc.name.c_str(),
                analysis_name(sc.analysis).c_str(), grid);
  }
  return 0;
}

int cmd_dump_operator(const std::string& family, int p, int n, double h,
                      const std::string& what) {
  Operator op;
  if (family == "csbp") op = build_csbp(p, n);
  else if (family == "circulant") op = build_circulant(p, n, h > 0.0 ? h : 1.0 / n);
  else throw std::invalid_argument("unknown operator family '" + family + "'");

  char buf[40];
  auto cell = [&buf](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  if (what == "d") {
    for (int c = 0; c < op.n_nodes; ++c)
      std::printf("%sc%d", c ? "," : "", c);
    std::printf("\n");
    for (int r = 0; r < op.n_nodes; ++r) {
      for (int c = 0; c < op.n_nodes; ++c)
        std::printf("%s%s", c ? "," : "", cell(op.d_mat(r, c)).c_str());
      std::printf("\n");
    }
  } else if (what == "h" || what == "x") {
    const Vec& v = what == "h" ? op.h_diag : op.nodes;
    std::printf("%s\n", what.c_str());
    for (int i = 0; i < v.size(); ++i) std::printf("%s\n", cell(v(i)).c_str());
  } else {
    throw std::invalid_argument("unknown --what '" + what + "'; use d, h, or x");
  }
  return 0;
}

int cmd_run(const std::vector<std::string>& names,
            const std::vector<std::string>& configs, const std::string& out_root,
            bool seed_given, std::uint64_t seed, int jobs) {
  // Resolve every scenario before creating any output, so a bad config
  // cannot leave partial results behind.
  std::vector<Scenario> scenarios;
  for (const std::string& name : names) scenarios.push_back(find_scenario(name));
  for (const std::string& path : configs) scenarios.push_back(load_scenario_file(path));
  if (scenarios.empty())
    throw std::invalid_argument("nothing to run; pass --scenario or --config");
  if (seed_given)
    for (Scenario& sc : scenarios) sc.pert.seed = seed;
  for (const Scenario& sc : scenarios) sc.validate();

  std::vector<RunResult> results(scenarios.size());
  std::atomic<std::size_t> next{0};
  std::mutex print_mutex;
  auto worker = [&]() {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= scenarios.size()) return;
      RunResult r = run_scenario(scenarios[k], out_root);
      {
        std::lock_guard<std::mutex> lock(print_mutex);
        if (r.ok)
          std::printf("ok    %-28s -> %s\n", scenarios[k].name.c_str(),
                      r.dir.c_str());
        else
          std::printf("FAIL  %-28s -> %s (%s)\n", scenarios[k].name.c_str(),
                      r.dir.c_str(), r.message.c_str());
      }
      results[k] = std::move(r);
    }
  };
  const int n_threads =
      std::max(1, std::min<int>(jobs, static_cast<int>(scenarios.size())));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  int failures = 0;
  for (const RunResult& r : results)
    if (!r.ok) ++failures;
  if (failures > 0) {
    std::printf("%d of %zu scenario(s) failed\n", failures, scenarios.size());
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SBP flux-differencing stability experiments"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run scenarios and write artifacts");
  std::vector<std::string> names, configs;
  std::string out_root = default_out_root();
  std::uint64_t seed = 0;
  int jobs = 1;
  run->add_option("--scenario", names, "preset name (repeatable); see 'list'");
  run->add_option("--config", configs, "JSON scenario file (repeatable)");
  run->add_option("--out", out_root, "output root directory");
  auto* seed_opt =
      run->add_option("--seed", seed, "override the perturbation seed");
  run->add_option("--jobs", jobs, "run up to K scenarios concurrently");

  auto* list = app.add_subcommand("list", "list the preset catalog");

  auto* dump =
      app.add_subcommand("dump-operator", "print an operator as CSV on stdout");
  std::string family = "csbp", what = "d";
  int p = 1, n = 40;
  double h = 0.0;
  dump->add_option("--family", family, "csbp or circulant")->required();
  dump->add_option("--p", p, "degree (csbp) or interior order (circulant)")
      ->required();
  dump->add_option("--n", n, "number of nodes")->required();
  dump->add_option("--spacing", h, "node spacing (circulant; default 1/n)");
  dump->add_option("--what", what, "d (difference matrix), h (norm), x (nodes)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (list->parsed()) return cmd_list();
    if (dump->parsed()) return cmd_dump_operator(family, p, n, h, what);
    return cmd_run(names, configs, out_root, seed_opt->count() > 0, seed, jobs);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
