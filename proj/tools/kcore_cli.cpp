// Command-line harness: synthetic graph generation, decomposition runs,
// oracle verification, and the benchmark matrix.
//
// Exit codes: 0 success, 1 verification mismatch, 2 format error,
// 3 parameter/config error.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "kcore/bz.hpp"
#include "kcore/engine.hpp"
#include "kcore/graph.hpp"
#include "kcore/stats_json.hpp"

namespace {

using namespace kcore;

BucketStrategy parse_bucketing(const std::string& text) {
  BucketStrategy s;
  if (text == "single") {
    s.kind = BucketKind::single;
  } else if (text == "hbs") {
    s.kind = BucketKind::hbs;
  } else if (text == "auto") {
    s.kind = BucketKind::autoswitch;
  } else if (text.rfind("fixed:", 0) == 0) {
    s.kind = BucketKind::fixed;
    try {
      s.b = std::stoi(text.substr(6));
    } catch (const std::exception&) {
      throw param_error("bad bucket count in '" + text + "'");
    }
    if (s.b < 1) throw param_error("fixed bucketing needs b >= 1");
  } else {
    throw param_error("unknown bucketing '" + text + "' (single|fixed:<b>|hbs|auto)");
  }
  return s;
}

CsrGraph load_graph_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw format_error("cannot open " + path);
  return load_binary(in);
}

void save_graph_file(const CsrGraph& g, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw format_error("cannot open " + path + " for writing");
  save_binary(g, out);
}

// Token grammar for bench --configs: parts joined by '+' (or ':'), e.g.
// "online+vgc128+sampling+fixed:16". Unmentioned fields keep defaults.
PeelConfig parse_config_token(const std::string& token, const PeelConfig& base) {
  PeelConfig cfg = base;
  bool vgc_explicit = false;
  std::vector<std::string> parts;
  std::string cur;
  for (size_t i = 0; i <= token.size(); ++i) {
    char ch = i < token.size() ? token[i] : '+';
    if (ch == '+' || ch == ':') {
      if (ch == ':' && cur == "fixed") {
        cur.push_back(':');
        continue;
      }
      if (!cur.empty()) parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  for (const std::string& p : parts) {
    if (p == "online") cfg.peel = PeelMode::online;
    else if (p == "offline") cfg.peel = PeelMode::offline;
    else if (p == "sampling" || p == "samplingon") cfg.sampling = true;
    else if (p == "samplingoff") cfg.sampling = false;
    else if (p.rfind("vgc", 0) == 0) {
      cfg.vgc = std::stoi(p.substr(3));
      vgc_explicit = true;
    } else if (p.rfind("c", 0) == 0 && p.size() > 1 && std::isdigit(p[1])) {
      cfg.sampling_params.c = std::stoi(p.substr(1));
    } else if (p == "single" || p == "hbs" || p == "auto" || p.rfind("fixed:", 0) == 0) {
      cfg.bucketing = parse_bucketing(p);
    } else {
      throw param_error("unknown config token part '" + p + "'");
    }
  }
  if (!vgc_explicit && cfg.peel == PeelMode::offline) cfg.vgc = 0;
  return cfg;
}

std::vector<std::string> default_matrix() {
  std::vector<std::string> out;
  for (std::string bucketing : {"single", "fixed:16", "hbs", "auto"}) {
    out.push_back("offline+vgc0+" + bucketing);
    for (std::string vgc : {"vgc0", "vgc128"}) {
      out.push_back("online+" + vgc + "+" + bucketing);
      out.push_back("online+" + vgc + "+sampling+" + bucketing);
    }
  }
  return out;
}

int run_bench(const std::string& graph_path, const std::vector<std::string>& config_tokens,
              int repeat, int threads, uint64_t seed, const std::string& report_path) {
  CsrGraph g = load_graph_file(graph_path);
  CorenessArray truth = bz_coreness(g);
  PeelConfig base;
  base.threads = threads;
  base.seed = seed;
  std::vector<std::string> tokens = config_tokens.empty() ? default_matrix() : config_tokens;
  nlohmann::json report = nlohmann::json::array();
  for (const std::string& token : tokens) {
    PeelConfig cfg = parse_config_token(token, base);
    validate_config(cfg);
    auto [warm_k, warm_stats] = decompose(g, cfg);
    if (warm_k != truth) {
      auto res = verify_coreness(g, warm_k);
      std::cerr << "bench: config '" << token << "' disagrees with the oracle at vertex "
                << res.first_mismatch << " (expected " << res.expected << ", got " << res.got
                << ")\n";
      return 1;
    }
    nlohmann::json entry;
    entry["config_token"] = token;
    entry["verified"] = true;
    entry["runs"] = nlohmann::json::array();
    double total_ms = 0.0;
    for (int i = 0; i < repeat; ++i) {
      auto [k, stats] = decompose(g, cfg);
      if (k != truth) {
        std::cerr << "bench: config '" << token << "' produced a mismatch on repeat " << i
                  << "\n";
        return 1;
      }
      total_ms += stats.wall_ms;
      entry["runs"].push_back(stats_to_json(stats, cfg));
    }
    entry["mean_wall_ms"] = repeat > 0 ? total_ms / repeat : 0.0;
    report.push_back(entry);
    std::cout << token << ": mean " << (repeat > 0 ? total_ms / repeat : 0.0) << " ms over "
              << repeat << " runs (verified)\n";
  }
  if (!report_path.empty()) {
    std::ofstream out(report_path);
    if (!out) throw format_error("cannot open " + report_path + " for writing");
    out << report.dump(2) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"parallel k-core decomposition harness"};
  app.require_subcommand(1);
  app.set_help_flag("--help", "print help and exit");
  app.set_help_all_flag("--help-all", "print help for all subcommands");

  // gen
  auto* gen = app.add_subcommand("gen", "generate a synthetic graph (binary CSR)");
  gen->require_subcommand(1);
  std::string gen_out;
  uint64_t grid_w = 0, grid_h = 0;
  auto* gen_grid_cmd = gen->add_subcommand("grid", "2D lattice");
  gen_grid_cmd->add_option("--w", grid_w)->required();
  gen_grid_cmd->add_option("--h", grid_h)->required();
  uint64_t cube_x = 0, cube_y = 0, cube_z = 0;
  auto* gen_cube_cmd = gen->add_subcommand("cube", "3D lattice");
  gen_cube_cmd->add_option("--x", cube_x)->required();
  gen_cube_cmd->add_option("--y", cube_y)->required();
  gen_cube_cmd->add_option("--z", cube_z)->required();
  uint64_t hcns_kmax = 0, gen_seed = 1;
  auto* gen_hcns_cmd = gen->add_subcommand("hcns", "high-coreness profile graph");
  gen_hcns_cmd->add_option("--kmax", hcns_kmax)->required();
  gen_hcns_cmd->add_option("--seed", gen_seed);
  uint64_t ba_n = 0, ba_a = 0;
  auto* gen_ba_cmd = gen->add_subcommand("ba", "preferential-attachment graph");
  gen_ba_cmd->add_option("--n", ba_n)->required();
  gen_ba_cmd->add_option("--a", ba_a)->required();
  gen_ba_cmd->add_option("--seed", gen_seed);
  for (auto* sub : {gen_grid_cmd, gen_cube_cmd, gen_hcns_cmd, gen_ba_cmd})
    sub->add_option("-o,--out", gen_out, "output path")->required();

  // run
  auto* run = app.add_subcommand("run", "decompose a graph");
  std::string run_in, run_out, run_stats, run_bucketing = "auto", run_peel = "online",
                               run_sampling = "off";
  int run_c = 1, run_vgc = -1, run_threads = 0;
  int64_t run_kprime = -1;
  uint64_t run_seed = 1;
  run->add_option("input", run_in, "binary CSR graph")->required();
  run->add_option("--peel", run_peel, "offline|online");
  run->add_option("--sampling", run_sampling, "off|on");
  run->add_option("--c", run_c, "sampling confidence constant");
  run->add_option("--vgc", run_vgc, "local queue capacity (0 disables)");
  run->add_option("--bucketing", run_bucketing, "single|fixed:<b>|hbs|auto");
  run->add_option("--threads", run_threads, "worker count (0 = hardware)");
  run->add_option("--seed", run_seed);
  run->add_option("--kprime", run_kprime, "emit the maximum k'-core subgraph instead");
  run->add_option("-o,--out", run_out, "coreness output (KCC1), or vertex ids for --kprime");
  run->add_option("--stats", run_stats, "stats JSON output path");

  // verify
  auto* verify = app.add_subcommand("verify", "check a coreness file against the oracle");
  std::string verify_graph, verify_coreness_path;
  verify->add_option("graph", verify_graph)->required();
  verify->add_option("coreness", verify_coreness_path)->required();

  // bench
  auto* bench = app.add_subcommand("bench", "run the config matrix with timing");
  std::string bench_graph, bench_report;
  std::vector<std::string> bench_configs;
  int bench_repeat = 5, bench_threads = 0;
  uint64_t bench_seed = 1;
  bench->add_option("graph", bench_graph)->required();
  bench->add_option("--configs", bench_configs,
                    "config tokens, e.g. online+vgc128+sampling+hbs (default: full matrix)");
  bench->add_option("--repeat", bench_repeat, "timed repeats per config (after one warm-up)");
  bench->add_option("--threads", bench_threads);
  bench->add_option("--seed", bench_seed);
  bench->add_option("--report", bench_report, "JSON report path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 3;
  }

  try {
    if (gen->parsed()) {
      CsrGraph g;
      if (gen_grid_cmd->parsed()) g = gen_grid(grid_w, grid_h);
      else if (gen_cube_cmd->parsed()) g = gen_cube(cube_x, cube_y, cube_z);
      else if (gen_hcns_cmd->parsed()) g = gen_hcns(hcns_kmax, gen_seed);
      else g = gen_ba(ba_n, ba_a, gen_seed);
      save_graph_file(g, gen_out);
      std::cout << "n " << g.n << "\nm2 " << g.m2 << "\n";
      return 0;
    }

    if (run->parsed()) {
      PeelConfig cfg;
      if (run_peel == "offline") cfg.peel = PeelMode::offline;
      else if (run_peel == "online") cfg.peel = PeelMode::online;
      else throw param_error("unknown --peel value '" + run_peel + "'");
      if (run_sampling == "on") cfg.sampling = true;
      else if (run_sampling != "off")
        throw param_error("unknown --sampling value '" + run_sampling + "'");
      cfg.sampling_params.c = run_c;
      cfg.vgc = run_vgc >= 0 ? run_vgc : (cfg.peel == PeelMode::online ? 128 : 0);
      cfg.bucketing = parse_bucketing(run_bucketing);
      cfg.threads = run_threads;
      cfg.seed = run_seed;
      validate_config(cfg);
      CsrGraph g = load_graph_file(run_in);

      if (run_kprime >= 0) {
        auto members = kcore_subgraph(g, static_cast<degree_t>(run_kprime), cfg);
        std::ostream* out = &std::cout;
        std::ofstream file;
        if (!run_out.empty()) {
          file.open(run_out);
          if (!file) throw format_error("cannot open " + run_out + " for writing");
          out = &file;
        }
        for (vertex_t v : members) *out << v << "\n";
        std::cerr << "kcore_subgraph size " << members.size() << "\n";
        return 0;
      }

      auto [coreness, stats] = decompose(g, cfg);
      if (!run_out.empty()) {
        std::ofstream out(run_out, std::ios::binary);
        if (!out) throw format_error("cannot open " + run_out + " for writing");
        save_coreness(coreness, out);
      }
      if (!run_stats.empty()) {
        std::ofstream out(run_stats);
        if (!out) throw format_error("cannot open " + run_stats + " for writing");
        out << stats_to_json(stats, cfg).dump(2) << "\n";
      }
      std::cout << "kmax " << stats.kmax << "\n";
      return 0;
    }

    if (verify->parsed()) {
      CsrGraph g = load_graph_file(verify_graph);
      std::ifstream in(verify_coreness_path, std::ios::binary);
      if (!in) throw format_error("cannot open " + verify_coreness_path);
      CorenessArray k = load_coreness(in);
      if (k.values.size() != g.n) throw format_error("coreness length does not match graph");
      VerifyResult res = verify_coreness(g, k);
      if (res.pass) {
        std::cout << "ok\n";
        return 0;
      }
      std::cout << "mismatch at vertex " << res.first_mismatch << ": expected " << res.expected
                << ", got " << res.got << "\n";
      return 1;
    }

    if (bench->parsed())
      return run_bench(bench_graph, bench_configs, bench_repeat, bench_threads, bench_seed,
                       bench_report);
  } catch (const format_error& e) {
    std::cerr << "format error: " << e.what() << "\n";
    return 2;
  } catch (const param_error& e) {
    std::cerr << "parameter error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
