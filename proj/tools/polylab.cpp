// polylab: geometry queries, cap coverings and CLT experiments.

#include "polylab/covering.hpp"
#include "polylab/manifest.hpp"
#include "polylab/parallel.hpp"
#include "polylab/stats.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace polylab;

namespace {

Vec parse_point(const std::string& text) {
  std::vector<double> xs;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      xs.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorKind::ParseError, "bad coordinate '" + item + "' in '" + text + "'");
    }
  }
  if (xs.empty()) throw Error(ErrorKind::ParseError, "empty point");
  Vec v(static_cast<Eigen::Index>(xs.size()));
  for (std::size_t i = 0; i < xs.size(); ++i) v[static_cast<Eigen::Index>(i)] = xs[i];
  return v;
}

Vec point_for(const Polytope& p, const std::string& text) {
  Vec v = parse_point(text);
  if (v.size() != p.dim())
    throw Error(ErrorKind::ParseError, "point '" + text + "' has the wrong dimension");
  return v;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::ParseError, "cannot read " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_file(const std::string& path, const std::string& text) {
  const std::filesystem::path target(path);
  if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Runtime, "cannot write " + path);
  out << text;
}

std::string under(const std::string& dir, const std::string& path) {
  if (dir.empty() || std::filesystem::path(path).is_absolute()) return path;
  return (std::filesystem::path(dir) / path).string();
}

struct GeometryArgs {
  std::string polytope;
  std::string v_at, macbeath_at, cap_dir;
  double lambda = 1.0, depth = 0.0;
  bool flags = false, f_vector = false, volume = false;
};

int cmd_geometry(const GeometryArgs& a) {
  const Polytope p = parse_polytope_spec(a.polytope);
  nlohmann::json out = nlohmann::json::object();
  if (a.volume) out["volume"] = p.volume();
  if (a.flags) out["F"] = flag_count(p);
  if (a.f_vector) out["f"] = p.lattice().f_vector();
  if (!a.v_at.empty()) out["v"] = v_at(p, point_for(p, a.v_at));
  if (!a.macbeath_at.empty()) {
    const MacbeathRegion m = macbeath(p, point_for(p, a.macbeath_at), a.lambda);
    out["macbeath_volume"] = m.volume;
    out["lambda"] = a.lambda;
  }
  if (!a.cap_dir.empty()) {
    Vec u = point_for(p, a.cap_dir);
    if (!(u.norm() > 0)) throw Error(ErrorKind::ParseError, "cap direction must be nonzero");
    u /= u.norm();
    const Cap c = make_cap(p, u, a.depth);
    out["cap_volume"] = c.volume;
    out["cap_level"] = c.level;
  }
  if (out.empty()) out["volume"] = p.volume();
  std::cout << out.dump() << "\n";
  return 0;
}

struct CoverArgs {
  std::string polytope;
  double s = 0.0;
  std::uint64_t seed = 1;
  int patience = 200;
  long budget = 10000;
  int jobs = 0;
  bool force = false;
  std::string out = "cover_report.json";
};

int cmd_cover(const CoverArgs& a) {
  const Polytope p = parse_polytope_spec(a.polytope);
  const double s0 = s0_for(p.dim()) * p.volume();
  if (a.s > s0 && !a.force) {
    std::fprintf(stderr,
                 "polylab: s = %g exceeds s0 = (2d)^(-2d) V(P) = %g; the cap covering needs "
                 "s <= s0 (use --force to run anyway)\n",
                 a.s, s0);
    return 4;
  }
  SaturateOptions so;
  so.patience = a.patience;
  const SaturatedSystem sys = saturate(p, a.s, a.seed, so);
  VerifyOptions vo;
  vo.budget = a.budget;
  vo.jobs = resolve_jobs(a.jobs);
  const CoveringReport report = verify_covering(p, cap_covering(p, sys), a.seed, vo);
  write_file(a.out, covering_report_json(report) + "\n");
  std::cout << a.out << "\n";
  return 0;
}

struct CltArgs {
  std::string config;
  std::string out_dir;
  int jobs = -1;
  bool dry_run = false;
};

int cmd_clt(const CltArgs& a) {
  ExperimentConfig config = parse_config(read_file(a.config));
  if (const char* env = std::getenv("POLYLAB_SEED")) {
    try {
      config.seed = std::stoull(env);
    } catch (const std::exception&) {
      throw Error(ErrorKind::ParseError, std::string("POLYLAB_SEED is not an integer: ") + env);
    }
  }
  if (a.jobs >= 0) config.jobs = a.jobs;
  const std::string records = under(a.out_dir, config.outputs.records);
  const std::string summary = under(a.out_dir, config.outputs.summary);
  const std::string plot = under(a.out_dir, config.outputs.plot);
  const std::string manifest_path = under(a.out_dir, config.outputs.manifest);
  const RunManifest manifest = make_manifest(config, {records, summary, plot}, a.dry_run);
  write_file(manifest_path, manifest.to_json() + "\n");
  if (a.dry_run) {
    std::cout << manifest_path << "\n";
    return 0;
  }
  auto emit = [&](const ExperimentResult& r) {
    write_file(records, records_csv(r));
    write_file(plot, plot_tsv(r));
    auto j = nlohmann::json::parse(summary_json(r, config));
    j["manifest"] = {{"config_hash", manifest.config_hash},
                     {"tool_version", manifest.tool_version},
                     {"seed", config.seed}};
    write_file(summary, j.dump(2) + "\n");
  };
  try {
    run_experiment(config, [&](const ExperimentResult& r) {
      emit(r);
      std::fprintf(stderr, "polylab: eta = %g done\n", r.summaries.back().eta);
    });
  } catch (const Error& e) {
    std::fprintf(stderr, "polylab: run stopped: %s (partial outputs kept)\n", e.what());
    return 5;
  }
  std::cout << records << "\n" << summary << "\n" << plot << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"polylab: floating bodies, cap coverings and Poisson polytopes"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  GeometryArgs g;
  auto* geo = app.add_subcommand("geometry", "Evaluate v, Macbeath regions, caps and flags");
  geo->add_option("--polytope", g.polytope, "cube:2, simplex:3, JSON or file")->required();
  geo->add_option("--v-at", g.v_at, "Point x1,...,xd for v(z)");
  geo->add_option("--macbeath", g.macbeath_at, "Center of M(z, lambda)");
  geo->add_option("--lambda", g.lambda, "Macbeath scale");
  geo->add_option("--cap", g.cap_dir, "Cap direction u");
  geo->add_option("--depth", g.depth, "Cap depth t");
  geo->add_flag("--flags", g.flags, "Flag count F(P)");
  geo->add_flag("--f-vector", g.f_vector, "Face numbers");
  geo->add_flag("--volume", g.volume, "Volume");

  CoverArgs c;
  auto* cover = app.add_subcommand("cover", "Saturated system, cap covering and its checks");
  cover->add_option("--polytope", c.polytope)->required();
  cover->add_option("--s", c.s, "Level s")->required()->check(CLI::PositiveNumber);
  cover->add_option("--seed", c.seed);
  cover->add_option("--patience", c.patience)->check(CLI::PositiveNumber);
  cover->add_option("--budget", c.budget)->check(CLI::PositiveNumber);
  cover->add_option("--jobs", c.jobs);
  cover->add_option("--out", c.out, "Report path");
  cover->add_flag("--force", c.force, "Allow s above s0");

  CltArgs k;
  auto* clt = app.add_subcommand("clt", "Monte Carlo experiment over an eta grid");
  clt->add_option("config", k.config, "Config JSON")->required();
  clt->add_option("--out-dir", k.out_dir, "Directory for outputs");
  clt->add_option("--jobs", k.jobs, "Worker count (0: all cores)");
  clt->add_flag("--dry-run", k.dry_run, "Write the manifest only");

  std::string manifest_file;
  auto* check = app.add_subcommand("manifest-check", "Recompute a manifest's config hash");
  check->add_option("manifest", manifest_file)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  try {
    if (*geo) return cmd_geometry(g);
    if (*cover) return cmd_cover(c);
    if (*clt) return cmd_clt(k);
    if (*check) {
      const RunManifest m = load_manifest(read_file(manifest_file));
      std::cout << "ok " << m.config_hash << "\n";
      return 0;
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "polylab: %s\n", e.what());
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "polylab: %s\n", e.what());
    return 5;
  }
  return 0;
}
