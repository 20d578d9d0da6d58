#include "cgrem/cli.hpp"

#include <CLI11.hpp>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <numeric>
#include <sstream>

#include "cgrem/audit.hpp"
#include "cgrem/disorder.hpp"
#include "cgrem/error.hpp"
#include "cgrem/grem.hpp"
#include "cgrem/interpolation.hpp"
#include "cgrem/parallel.hpp"
#include "cgrem/thermo.hpp"

namespace cgrem {

namespace {

using nlohmann::json;

[[noreturn]] void spec_error(std::string_view spec, std::size_t pos,
                             const std::string& what) {
  throw ValidationError("model spec '" + std::string(spec) + "' at position " +
                        std::to_string(pos) + ": " + what);
}

int parse_int_at(std::string_view spec, std::size_t begin, std::size_t end) {
  int value = 0;
  const char* first = spec.data() + begin;
  const char* last = spec.data() + end;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || begin == end) {
    spec_error(spec, begin, "expected an integer");
  }
  return value;
}

double parse_double(std::string_view text, const std::string& context) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw ValidationError(context + ": '" + std::string(text) + "' is not a number");
  }
  return value;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    out.push_back(text.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string format_number(double x) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, end);
}

std::string render_cell(const json& cell) {
  if (cell.is_string()) return cell.get<std::string>();
  if (cell.is_number_float()) return format_number(cell.get<double>());
  return cell.dump();
}

struct Artifact {
  std::vector<std::string> columns;
  std::vector<std::vector<json>> rows;
  std::vector<std::string> raw_lines;  // sample-dump payload
};

std::string mask_string(Word mask) {
  std::ostringstream s;
  s << "0x" << std::hex << mask;
  return s.str();
}

int resolve_n(const ExperimentConfig& c, const CovarianceModel& m) {
  if (c.n) return *c.n;
  if (m.kind() == ModelKind::kGrem) return m.tree().size();
  if (m.kind() == ModelKind::kCustom && !m.custom_matrices().sizes().empty()) {
    return m.custom_matrices().sizes().back();
  }
  throw ValidationError("--n is required for model " + m.name());
}

CoordinatePartition resolve_partition(const ExperimentConfig& c, int n) {
  if (c.mask) return CoordinatePartition(n, *c.mask);
  if (c.n1) return CoordinatePartition::prefix(n, *c.n1);
  return CoordinatePartition::prefix(n, n / 2);
}

PartitionMode resolve_mode(const std::string& mode) {
  if (mode == "canonical") return PartitionMode::kCanonical;
  if (mode == "all") return PartitionMode::kAll;
  throw ValidationError("partition mode must be 'canonical' or 'all'");
}

SamplingPath resolve_path(const std::string& path) {
  if (path == "auto") return SamplingPath::kAuto;
  if (path == "structural") return SamplingPath::kStructural;
  if (path == "cholesky") return SamplingPath::kCholesky;
  throw ValidationError("sampling path must be auto, structural or cholesky");
}

SamplingOptions sampling_options(const ExperimentConfig& c) {
  SamplingOptions o;
  o.samples = c.samples;
  o.seeds = SeedPolicy(c.seed);
  o.threads = c.threads;
  o.path = resolve_path(c.sampling_path);
  return o;
}

json resolved_config(const ExperimentConfig& c, std::optional<int> n) {
  json j;
  j["command"] = c.command;
  if (c.command == "grem-verify") {
    j["tree"] = c.tree;
    j["lift"] = c.lift;
  } else {
    j["model"] = c.model;
  }
  if (n) j["n"] = *n;
  if (c.n1) j["n1"] = *c.n1;
  if (c.mask) j["mask"] = mask_string(*c.mask);
  j["partition_mode"] = c.partition_mode;
  j["beta"] = c.betas;
  j["t_grid"] = parse_grid(c.t_grid);
  j["samples"] = c.samples;
  j["seed"] = c.seed;
  j["tolerance"] = c.tolerance ? json(*c.tolerance) : json(nullptr);
  j["sampling_path"] = c.sampling_path;
  j["format"] = c.format;
  return j;
}

void emit(const ExperimentConfig& c, const json& config, const Artifact& a,
          std::optional<double> seconds, std::ostream& out) {
  if (c.format == "json") {
    json doc;
    doc["tool"] = kToolName;
    doc["version"] = kToolVersion;
    doc["config"] = config;
    if (seconds) doc["wall_clock_seconds"] = *seconds;
    json records = json::array();
    if (!a.raw_lines.empty()) {
      for (const auto& line : a.raw_lines) {
        json draw = json::array();
        std::istringstream in(line);
        double x = 0.0;
        while (in >> x) draw.push_back(x);
        records.push_back(draw);
      }
      doc["draws"] = records;
    } else {
      for (const auto& row : a.rows) {
        json rec;
        for (std::size_t i = 0; i < a.columns.size(); ++i) rec[a.columns[i]] = row[i];
        records.push_back(rec);
      }
      doc["records"] = records;
    }
    out << doc.dump(2) << '\n';
    return;
  }
  out << "# tool: " << kToolName << ' ' << kToolVersion << '\n';
  out << "# config: " << config.dump() << '\n';
  if (seconds) out << "# wall_clock_seconds: " << format_number(*seconds) << '\n';
  if (!a.raw_lines.empty()) {
    for (const auto& line : a.raw_lines) out << line << '\n';
    return;
  }
  for (std::size_t i = 0; i < a.columns.size(); ++i) out << (i ? "," : "") << a.columns[i];
  out << '\n';
  for (const auto& row : a.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << render_cell(row[i]);
    out << '\n';
  }
}

int run_check(const ExperimentConfig& c, const CovarianceModel& m, int n, Artifact& a) {
  std::vector<CoordinatePartition> partitions;
  if (c.mask || c.n1) {
    partitions.push_back(resolve_partition(c, n));
  } else {
    partitions = audit_partitions(m, n, resolve_mode(c.partition_mode));
  }
  const AuditResult result = check_condition(m, n, partitions, c.tolerance, c.threads);
  a.columns = {"n", "partition_mask", "n1", "max_gap", "witness_sigma", "witness_tau", "verdict"};
  for (const auto& r : result.reports) {
    a.rows.push_back({r.n, mask_string(r.partition.mask()), r.partition.first_size(),
                      r.max_gap, r.witness_sigma.to_string(), r.witness_tau.to_string(),
                      to_string(r.verdict)});
  }
  return result.verdict == Verdict::kViolated ? kExitViolation : kExitPass;
}

int run_psd(const CovarianceModel& m, int n, Artifact& a) {
  const Eigen::MatrixXd c = build_covariance_matrix(m, n);
  const PsdReport r = validate_psd(c);
  a.columns = {"model", "n", "dimension", "min_eigenvalue_estimate", "rank", "psd"};
  a.rows.push_back({m.name(), n, static_cast<int>(c.rows()), r.min_eigenvalue_estimate,
                    r.rank, r.psd});
  return r.psd ? kExitPass : kExitViolation;
}

int run_alpha(const ExperimentConfig& c, const CovarianceModel& m, int n, Artifact& a) {
  a.columns = {"model", "n", "beta", "samples", "value", "std_error", "bound", "margin", "verdict"};
  int status = kExitPass;
  for (double beta : c.betas) {
    const QuenchedEstimate e = quenched_alpha(m, n, beta, sampling_options(c));
    const double bound = jensen_bound(beta);
    const bool ok = e.value <= bound + 3.0 * e.std_error;
    if (!ok) status = kExitViolation;
    a.rows.push_back({m.name(), n, beta, e.samples, e.value, e.std_error, bound,
                      bound - e.value, ok ? "SATISFIED" : "VIOLATED"});
  }
  return status;
}

int run_superadd(const ExperimentConfig& c, const CovarianceModel& m, int n, Artifact& a) {
  const CoordinatePartition p = resolve_partition(c, n);
  a.columns = {"model", "n", "beta", "samples", "value", "std_error", "bound", "margin",
               "verdict", "partition_mask", "n1", "margin_std_error", "alpha_n1",
               "alpha_n1_std_error", "alpha_n2", "alpha_n2_std_error"};
  int status = kExitPass;
  for (double beta : c.betas) {
    const SuperadditivityReport r = superadditivity_report(m, p, beta, sampling_options(c));
    if (!r.satisfied) status = kExitViolation;
    a.rows.push_back({m.name(), n, beta, r.whole.samples, r.whole.value, r.whole.std_error,
                      jensen_bound(beta), r.margin, r.satisfied ? "SATISFIED" : "VIOLATED",
                      mask_string(p.mask()), p.first_size(), r.margin_error, r.first.value,
                      r.first.std_error, r.second.value, r.second.std_error});
  }
  return status;
}

int run_interp(const ExperimentConfig& c, const CovarianceModel& m, int n, Artifact& a) {
  const CoordinatePartition p = resolve_partition(c, n);
  const std::vector<double> grid = parse_grid(c.t_grid);
  a.columns = {"model", "n", "n1", "partition_mask", "beta", "t", "samples", "value",
               "std_error", "verdict"};
  int status = kExitPass;
  for (double beta : c.betas) {
    const MonotonicityScan scan = monotonicity_scan(m, p, beta, grid, sampling_options(c));
    if (!scan.all_nonnegative) status = kExitViolation;
    for (const auto& pt : scan.points) {
      a.rows.push_back({m.name(), n, p.first_size(), mask_string(p.mask()), beta, pt.t,
                        pt.derivative.samples, pt.derivative.value, pt.derivative.std_error,
                        pt.nonnegative ? "NONNEGATIVE" : "NEGATIVE"});
    }
  }
  return status;
}

int run_grem_verify(const ExperimentConfig& c, Artifact& a) {
  if (c.tree.empty()) throw ValidationError("grem-verify needs --tree");
  const GremTree tree = read_tree_file(c.tree);
  const CovarianceModel model = CovarianceModel::grem(tree);
  a.columns = {"check", "subject", "value", "verdict"};
  int status = kExitPass;
  auto record = [&](const std::string& check, const std::string& subject, double value,
                    bool ok) {
    if (!ok) status = kExitViolation;
    a.rows.push_back({check, subject, value, ok ? "PASS" : "FAIL"});
  };
  record("validate_tree", tree.to_string(), 0.0, true);
  auto psd_row = [&](const GremTree& t) {
    const PsdReport r = validate_psd(build_covariance_matrix(CovarianceModel::grem(t), t.size()));
    record("psd", t.to_string(), r.min_eigenvalue_estimate, r.psd);
  };
  psd_row(tree);

  std::vector<CoordinatePartition> partitions;
  if (!c.lift.empty()) {
    partitions.push_back(*TreeLift(GremTree(c.lift, tree.variances(),
                                            std::accumulate(c.lift.begin(), c.lift.end(), 0)),
                                   tree.exponents())
                              .partition());
  } else {
    partitions = layer_respecting_partitions(tree);
  }
  for (const auto& p : partitions) {
    const GremTree first = tree.induced(p.block_mask(Block::kFirst));
    const GremTree second = tree.induced(p.block_mask(Block::kSecond));
    psd_row(first);
    psd_row(second);
    const TreeLift lift1(first, tree.exponents(), LiftPlacement::kLeading);
    const TreeLift lift2(second, tree.exponents(), LiftPlacement::kTrailing);
    const LiftInequalityReport c1 = check_lift_inequality(lift1);
    const LiftInequalityReport c2 = check_lift_inequality(lift2);
    record("lift_c1", first.to_string() + "->" + tree.to_string(), c1.min_margin, c1.holds());
    record("lift_c2", second.to_string() + "->" + tree.to_string(), c2.min_margin, c2.holds());
    const ConditionReport r = check_partition(model, p, c.tolerance);
    record("condition", mask_string(p.mask()), r.max_gap, r.verdict != Verdict::kViolated);
  }
  return status;
}

int run_sample_dump(const ExperimentConfig& c, const CovarianceModel& m, int n, Artifact& a) {
  const DisorderSampler sampler(m, n, resolve_path(c.sampling_path));
  const SeedPolicy seeds(c.seed);
  const std::string label = "dump/" + m.name() + "/" + std::to_string(n);
  std::vector<std::string> lines(c.samples);
  parallel_for(c.samples, c.threads, [&](std::size_t i) {
    RngStream rng = seeds.stream(label, i);
    std::ostringstream line;
    const DisorderDraw d = sampler.draw(rng);
    for (std::size_t k = 0; k < d.energies().size(); ++k) {
      line << (k ? " " : "") << format_number(d.energies()[k]);
    }
    lines[i] = line.str();
  });
  a.raw_lines = std::move(lines);
  return kExitPass;
}

}  // namespace

CovarianceModel parse_model(std::string_view spec) {
  const std::size_t colon = spec.find(':');
  const std::string_view head = spec.substr(0, colon);
  const std::size_t arg_pos = colon == std::string_view::npos ? spec.size() : colon + 1;
  const std::string_view arg = colon == std::string_view::npos ? std::string_view{} : spec.substr(arg_pos);
  auto no_argument = [&] {
    if (colon != std::string_view::npos) spec_error(spec, colon, "model takes no argument");
  };
  auto need_argument = [&] {
    if (arg.empty()) spec_error(spec, arg_pos, "missing argument after ':'");
  };
  if (head == "sk") {
    no_argument();
    return CovarianceModel::sk();
  }
  if (head == "sk-standard") {
    no_argument();
    return CovarianceModel::sk_standard();
  }
  if (head == "rem") {
    no_argument();
    return CovarianceModel::rem();
  }
  if (head == "pspin") {
    need_argument();
    const int p = parse_int_at(spec, arg_pos, spec.size());
    if (p < 1) spec_error(spec, arg_pos, "order must be >= 1");
    return CovarianceModel::pspin(p);
  }
  if (head == "mixed") {
    need_argument();
    std::map<int, double> weights;
    std::size_t pos = arg_pos;
    for (std::string_view item : split(arg, ',')) {
      const std::size_t eq = item.find('=');
      if (eq == std::string_view::npos) spec_error(spec, pos, "expected <p>=<weight>");
      const int p = parse_int_at(spec, pos, pos + eq);
      double w = 0.0;
      try {
        w = parse_double(item.substr(eq + 1), "weight");
      } catch (const ValidationError&) {
        spec_error(spec, pos + eq + 1, "expected a weight");
      }
      if (!weights.emplace(p, w).second) spec_error(spec, pos, "order repeated");
      pos += item.size() + 1;
    }
    return CovarianceModel::mixed(MixedCoefficients(std::move(weights)));
  }
  if (head == "grem") {
    need_argument();
    return CovarianceModel::grem(read_tree_file(std::string(arg)));
  }
  if (head == "custom") {
    need_argument();
    CustomCovariance matrices;
    for (std::string_view file : split(arg, ',')) {
      matrices.add(read_matrix_file(std::string(file)));
    }
    return CovarianceModel::custom(std::move(matrices));
  }
  spec_error(spec, 0, "unknown model '" + std::string(head) + "'");
}

std::vector<double> parse_grid(std::string_view spec) {
  const auto parts = split(spec, ':');
  if (parts.size() == 3) {
    const double start = parse_double(parts[0], "grid start");
    const double stop = parse_double(parts[1], "grid stop");
    int count = 0;
    auto [ptr, ec] = std::from_chars(parts[2].data(), parts[2].data() + parts[2].size(), count);
    if (ec != std::errc() || ptr != parts[2].data() + parts[2].size() || count < 1) {
      throw ValidationError("grid count must be a positive integer");
    }
    if (count == 1) return {start};
    std::vector<double> out(count);
    for (int i = 0; i < count; ++i) {
      out[i] = i + 1 == count ? stop : start + (stop - start) * i / (count - 1);
    }
    return out;
  }
  if (parts.size() != 1) throw ValidationError("grid must be 'a:b:count' or a comma list");
  std::vector<double> out;
  for (std::string_view item : split(spec, ',')) out.push_back(parse_double(item, "grid"));
  return out;
}

int run(const ExperimentConfig& c, std::ostream& out, std::ostream& err) {
  try {
    if (c.format != "csv" && c.format != "json") throw ValidationError("format must be csv or json");
    if (c.threads < 1) throw ValidationError("--threads must be >= 1");
    const auto start = std::chrono::steady_clock::now();
    Artifact artifact;
    int status = kExitPass;
    std::optional<int> n;
    if (c.command == "grem-verify") {
      status = run_grem_verify(c, artifact);
    } else {
      const CovarianceModel m = parse_model(c.model);
      n = resolve_n(c, m);
      if (c.command == "check") {
        status = run_check(c, m, *n, artifact);
      } else if (c.command == "psd") {
        status = run_psd(m, *n, artifact);
      } else if (c.command == "alpha") {
        status = run_alpha(c, m, *n, artifact);
      } else if (c.command == "superadd") {
        status = run_superadd(c, m, *n, artifact);
      } else if (c.command == "interp") {
        status = run_interp(c, m, *n, artifact);
      } else if (c.command == "sample-dump") {
        status = run_sample_dump(c, m, *n, artifact);
      } else {
        throw ValidationError("unknown command '" + c.command + "'");
      }
    }
    std::optional<double> seconds;
    if (c.timing) {
      seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
    const json config = resolved_config(c, n);
    if (c.output.empty()) {
      emit(c, config, artifact, seconds, out);
    } else {
      std::ofstream file(c.output);
      if (!file) throw ValidationError("cannot write output file '" + c.output + "'");
      emit(c, config, artifact, seconds, file);
    }
    if (status == kExitViolation) err << "violation found (exit status 1)\n";
    return status;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
}

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  ExperimentConfig config;
  if (const char* env = std::getenv(kSeedEnvironmentVariable)) {
    try {
      config.seed = std::stoull(env, nullptr, 0);
    } catch (const std::exception&) {
      err << "error: " << kSeedEnvironmentVariable << " is not an integer\n";
      return kExitError;
    }
  }
  std::string betas = "1";
  std::string mask;
  std::string lift;

  CLI::App app{"Correlated Gaussian random energy models: audits, sampling and free energies"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from a TOML/INI file");
  app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);

  auto add_common = [&](CLI::App* sub, bool needs_model) {
    if (needs_model) {
      sub->add_option("--model", config.model, "sk | sk-standard | rem | pspin:<p> | mixed:<p>=<w>,... | grem:<file> | custom:<file>[,<file>...]");
      sub->add_option("--n", config.n, "System size N");
    }
    sub->add_option("--format", config.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("-o,--output", config.output, "Output file (default stdout)");
    sub->add_option("--threads", config.threads, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--tolerance", config.tolerance, "Gap tolerance override");
    sub->add_flag("--timing", config.timing, "Embed wall-clock seconds in the output");
  };
  auto add_partition = [&](CLI::App* sub) {
    sub->add_option("--n1", config.n1, "Size of the canonical first block {1..n1}");
    sub->add_option("--mask", mask, "First-block coordinate mask (decimal or 0x hex)");
  };
  auto add_sampling = [&](CLI::App* sub) {
    sub->add_option("--beta", betas, "Inverse temperature(s): list or a:b:count");
    sub->add_option("--samples", config.samples, "Disorder draws");
    sub->add_option("--seed", config.seed, "Master seed");
    sub->add_option("--path", config.sampling_path, "auto | structural | cholesky");
  };

  auto* check = app.add_subcommand("check", "Exhaustive covariance condition audit");
  add_common(check, true);
  add_partition(check);
  check->add_option("--mode", config.partition_mode, "canonical | all");

  auto* psd = app.add_subcommand("psd", "Positive semidefiniteness of the covariance matrix");
  add_common(psd, true);

  auto* alpha = app.add_subcommand("alpha", "Quenched free energy density with Jensen bound");
  add_common(alpha, true);
  add_sampling(alpha);

  auto* superadd = app.add_subcommand("superadd", "Superadditivity margin of the free energy");
  add_common(superadd, true);
  add_partition(superadd);
  add_sampling(superadd);

  auto* interp = app.add_subcommand("interp", "Interpolation derivative scan over t");
  add_common(interp, true);
  add_partition(interp);
  add_sampling(interp);
  interp->add_option("--tgrid", config.t_grid, "t grid: a:b:count or list");

  auto* grem = app.add_subcommand("grem-verify", "GREM tree checks: validity, PSD, lifting, condition");
  add_common(grem, false);
  grem->add_option("--tree", config.tree, "Tree file")->required();
  grem->add_option("--lift", lift, "First-block exponents k(N1), comma separated");

  auto* dump = app.add_subcommand("sample-dump", "Write disorder draws, one per line");
  add_common(dump, true);
  add_sampling(dump);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitPass : kExitError;
  }

  config.command = app.get_subcommands().front()->get_name();
  try {
    config.betas = parse_grid(betas);
    if (!mask.empty()) config.mask = static_cast<std::uint32_t>(std::stoul(mask, nullptr, 0));
    if (!lift.empty()) {
      for (std::string_view k : split(lift, ',')) {
        config.lift.push_back(static_cast<int>(parse_double(k, "lift exponent")));
      }
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
  return run(config, out, err);
}

}  // namespace cgrem
