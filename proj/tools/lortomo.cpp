// Copyright 2026 The lortomo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end: build, boost and complete protocols, make states,
// run simulation campaigns and analyze their losses.
//
// Exit codes: 0 ok, 1 other error, 2 schema violation, 3 protocol not
// informationally complete, 4 empty input.

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lortomo/lortomo.hpp"

namespace {

using lortomo::io::Json;
namespace io = lortomo::io;
namespace fs = std::filesystem;

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw lortomo::Error("sha256 digest failed");
  }
  std::string out;
  static const char* hex = "0123456789abcdef";
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 0xF];
  }
  return out;
}

std::vector<io::InputDigest> digests(const std::vector<std::string>& paths) {
  std::vector<io::InputDigest> out;
  for (const auto& p : paths) {
    if (!p.empty()) out.push_back({p, sha256_hex(io::read_text(p))});
  }
  return out;
}

std::string manifest_path_for(const std::string& out) { return out + ".manifest.json"; }

// Writes `doc` to `out` (stdout when empty). File outputs get a sidecar
// manifest and a "manifest" key naming it, so the data file itself stays a
// pure function of the inputs.
void emit_json(Json doc, const std::string& out, const std::string& command, std::uint64_t seed,
               const Json& config, const std::vector<std::string>& inputs) {
  if (out.empty()) {
    std::cout << doc.dump(2) << "\n";
    return;
  }
  const std::string mpath = manifest_path_for(out);
  doc["manifest"] = fs::path(mpath).filename().string();
  io::write_json(out, doc);
  io::write_json(mpath, io::make_manifest(command, seed, config, digests(inputs)));
}

Json efficiency_json(const lortomo::EfficiencyReport& r) {
  return {{"mean_loss", r.mean_loss},   {"mean_loss_se", r.mean_loss_se}, {"relative_se", r.relative_se},
          {"bound", r.bound},           {"efficiency", r.efficiency},     {"efficiency_se", r.efficiency_se},
          {"n", r.n},                   {"s", r.s},                       {"r", r.r},
          {"experiments", r.experiments}};
}

Json histogram_summary(const lortomo::Histogram& h, std::size_t count) {
  Json q = Json::object();
  for (const auto& [prob, value] : h.quantiles) q["p" + std::to_string(std::lround(prob * 100))] = value;
  return {{"samples", count}, {"mean", h.mean}, {"variance", h.variance}, {"percentiles", q}};
}

// ---------------------------------------------------------------------------
// protocol

struct ProtocolMake {
  std::string family;
  std::size_t dim = 2;
  bool complete = false;
  std::string out;
};

void run_protocol_make(const ProtocolMake& o) {
  lortomo::Protocol p = [&] {
    if (o.family == "tetrahedron") return lortomo::tetrahedron_protocol();
    if (o.family == "cube") return lortomo::cube_protocol();
    return lortomo::mub_protocol(o.dim);
  }();
  if ((o.family == "tetrahedron" || o.family == "cube") && o.dim != 2) {
    throw lortomo::DomainError("protocol make: " + o.family + " is a qubit protocol (--dim 2)");
  }
  if (o.complete) p = lortomo::complete_to_povm(p);
  const Json config = {{"family", o.family}, {"dim", o.dim}, {"complete", o.complete}};
  emit_json(io::protocol_to_json(p), o.out, "protocol make", 0, config, {});
}

struct ProtocolBoost {
  std::string protocol;
  std::string target_state;
  std::string transform;
  std::optional<double> floor;
  std::string out;
};

void run_protocol_boost(const ProtocolBoost& o) {
  const lortomo::Protocol p = io::read_protocol(o.protocol);
  std::optional<lortomo::LorentzTransform> l;
  if (!o.transform.empty()) {
    l = io::read_transform(o.transform);
  } else {
    const lortomo::DensityMatrix target = io::read_state(o.target_state);
    l = o.floor ? lortomo::center_of_mass_boost_floored(target, *o.floor)
                : lortomo::center_of_mass_boost(target);
  }
  const lortomo::Protocol boosted = lortomo::boost_protocol(p, *l);
  Json config = {{"protocol", o.protocol}, {"target_state", o.target_state}, {"transform", o.transform}};
  config["floor"] = o.floor ? Json(*o.floor) : Json(nullptr);
  emit_json(io::protocol_to_json(boosted), o.out, "protocol boost", 0, config,
            {o.protocol, o.target_state, o.transform});
}

struct ProtocolComplete {
  std::string protocol;
  std::string out;
};

void run_protocol_complete(const ProtocolComplete& o) {
  const lortomo::Protocol p = lortomo::complete_to_povm(io::read_protocol(o.protocol));
  emit_json(io::protocol_to_json(p), o.out, "protocol complete", 0, {{"protocol", o.protocol}}, {o.protocol});
}

struct ProtocolInfo {
  std::string protocol;
  std::string state;
  std::size_t rank = 0;
};

void run_protocol_info(const ProtocolInfo& o) {
  const lortomo::Protocol p = io::read_protocol(o.protocol);
  Json doc;
  doc["dim"] = p.dim();
  doc["rows"] = p.size();
  doc["weight_sum"] = p.total_weight();
  const auto comp = lortomo::completeness_check(p, o.rank == 0 ? p.dim() : o.rank);
  doc["complete"] = comp.complete;
  doc["span_dimension"] = comp.span_dimension;
  doc["required_dimension"] = comp.required;
  doc["is_povm"] = p.has_completion();
  if (!o.state.empty()) {
    const lortomo::DensityMatrix rho = io::read_state(o.state);
    const lortomo::Protocol povm = p.has_completion() ? p : lortomo::complete_to_povm(p);
    doc["outcome_probabilities"] = lortomo::outcome_probabilities(povm, rho);
    Json fids = Json::array();
    for (const auto& f : lortomo::post_measurement_fidelity(povm, rho)) fids.push_back(f ? Json(*f) : Json(nullptr));
    doc["post_measurement_fidelity"] = fids;
  }
  std::cout << doc.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// state

struct StateMake {
  std::vector<double> stokes;
  std::vector<double> principal;  // theta, phi
  double weight = 0.99;
  std::vector<double> weights;
  std::optional<std::uint64_t> unitary_seed;
  std::string out;
};

void run_state_make(const StateMake& o) {
  const int given = int(!o.stokes.empty()) + int(!o.principal.empty()) + int(!o.weights.empty());
  if (given != 1) throw lortomo::DomainError("state make: give exactly one of --stokes, --principal, --weights");
  std::optional<lortomo::DensityMatrix> rho;
  if (!o.stokes.empty()) {
    rho = lortomo::density_from_stokes({o.stokes[0], o.stokes[1], o.stokes[2], o.stokes[3]});
    if (!rho->is_physical()) throw lortomo::DomainError("state make: Stokes vector lies outside the light cone");
  } else if (!o.principal.empty()) {
    if (!(o.weight >= 0.0 && o.weight <= 1.0)) throw lortomo::DomainError("state make: --weight must lie in [0, 1]");
    const double th = o.principal[0];
    const double ph = o.principal[1];
    lortomo::ComplexVector c0(2);
    c0 << std::polar(std::cos(th / 2), -ph / 2), std::polar(std::sin(th / 2), ph / 2);
    lortomo::ComplexVector c1(2);
    c1 << -std::conj(c0[1]), std::conj(c0[0]);
    rho = lortomo::DensityMatrix(o.weight * c0 * c0.adjoint() + (1.0 - o.weight) * c1 * c1.adjoint());
  } else {
    for (double w : o.weights) {
      if (!(w >= 0.0)) throw lortomo::DomainError("state make: weights must be >= 0");
    }
    if (o.unitary_seed) {
      std::mt19937_64 rng(*o.unitary_seed);
      rho = lortomo::random_state_with_spectrum(o.weights, rng);
    } else {
      lortomo::RealVector w = Eigen::Map<const lortomo::RealVector>(o.weights.data(),
                                                                    static_cast<Eigen::Index>(o.weights.size()));
      rho = lortomo::DensityMatrix(w.cast<lortomo::Complex>().asDiagonal().toDenseMatrix());
    }
  }
  Json config = {{"stokes", o.stokes}, {"principal", o.principal}, {"weight", o.weight}, {"weights", o.weights}};
  config["unitary_seed"] = o.unitary_seed ? Json(*o.unitary_seed) : Json(nullptr);
  emit_json(io::state_to_json(*rho), o.out, "state make", o.unitary_seed.value_or(0), config, {});
}

// ---------------------------------------------------------------------------
// simulate

struct Simulate {
  std::string protocol;
  std::string state;
  double n = 100000;
  std::size_t experiments = 200;
  std::uint64_t seed = 1;
  std::string mode = "poisson";
  std::optional<double> adaptive_split;
  std::size_t rank = 0;
  std::size_t workers = 0;
  std::string convention = "registered";
  std::string out_prefix;
};

void run_simulate(const Simulate& o) {
  lortomo::CampaignConfig cfg(io::read_protocol(o.protocol), io::read_state(o.state));
  cfg.n = o.n;
  cfg.experiments = o.experiments;
  cfg.seed = o.seed;
  cfg.mode = lortomo::sampling_mode_from_string(o.mode);
  cfg.adaptive_split = o.adaptive_split;
  cfg.rank = o.rank;
  cfg.workers = o.workers == 0 ? lortomo::default_workers() : o.workers;
  cfg.convention = o.convention == "total" ? lortomo::SampleSizeConvention::total
                                           : lortomo::SampleSizeConvention::registered;
  const lortomo::CampaignResult res = cfg.adaptive_split ? lortomo::run_adaptive(cfg) : lortomo::run_campaign(cfg);

  Json config = {{"protocol", o.protocol}, {"state", o.state},           {"n", o.n},
                 {"experiments", o.experiments}, {"seed", o.seed},       {"mode", o.mode},
                 {"rank", o.rank},         {"convention", o.convention}};
  config["adaptive_split"] = o.adaptive_split ? Json(*o.adaptive_split) : Json(nullptr);

  std::vector<io::LossRow> rows;
  for (std::size_t i = 0; i < res.samples.size(); ++i) {
    rows.push_back({res.samples[i].index, res.samples[i].loss, res.counts_total[i]});
  }
  const lortomo::Histogram h = lortomo::loss_histogram(res.samples, 1);
  Json summary;
  summary["experiments"] = res.samples.size();
  summary["n"] = o.n;
  summary["effective_n"] = res.effective_n;
  summary["dim"] = cfg.protocol.dim();
  summary["rank"] = res.rank;
  summary["mode"] = o.mode;
  summary["convention"] = o.convention;
  summary["adaptive_split"] = config["adaptive_split"];
  const Json stats = histogram_summary(h, res.samples.size());
  for (const auto& [k, v] : stats.items()) summary[k] = v;
  if (h.mean > 0.0) {
    summary["efficiency"] = efficiency_json(lortomo::efficiency(res.samples, res.effective_n, cfg.protocol.dim(), res.rank));
  } else {
    summary["efficiency"] = nullptr;
  }
  summary["non_converged"] = res.non_converged;
  summary["floored"] = res.floored;
  summary["notes"] = res.notes;

  const std::string prefix = o.out_prefix.empty() ? "campaign" : o.out_prefix;
  const std::string mpath = prefix + ".manifest.json";
  const std::string mname = fs::path(mpath).filename().string();
  summary["manifest"] = mname;
  io::write_text(prefix + ".losses.csv", io::losses_to_csv(rows, mname));
  io::write_json(prefix + ".summary.json", summary);
  io::write_json(mpath, io::make_manifest("simulate", o.seed, config, digests({o.protocol, o.state})));
  std::cout << summary.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// analyze

std::vector<lortomo::LossSample> load_losses(const std::string& path) {
  return io::to_samples(io::losses_from_csv(io::read_text(path), path));
}

struct AnalyzeEfficiency {
  std::string losses;
  double n = 100000;
  std::size_t s = 2;
  std::size_t r = 2;
  std::string out;
};

void run_analyze_efficiency(const AnalyzeEfficiency& o) {
  const auto rep = lortomo::efficiency(load_losses(o.losses), o.n, o.s, o.r);
  const Json config = {{"losses", o.losses}, {"n", o.n}, {"s", o.s}, {"r", o.r}};
  emit_json(efficiency_json(rep), o.out, "analyze efficiency", 0, config, {o.losses});
}

struct AnalyzeHistogram {
  std::string losses;
  std::size_t bins = 30;
  std::string protocol;  // with --state: attach a validated theory curve
  std::string state;
  double n = 100000;
  std::size_t r = 0;
  std::size_t experiments = 200;
  std::uint64_t seed = 1;
  std::size_t draws = 20000;
  std::size_t workers = 0;
  std::string out;
};

void run_analyze_histogram(const AnalyzeHistogram& o) {
  const auto samples = load_losses(o.losses);
  const lortomo::Histogram h = lortomo::loss_histogram(samples, o.bins);
  Json summary = histogram_summary(h, samples.size());

  std::optional<std::vector<double>> theory;
  if (!o.protocol.empty() || !o.state.empty()) {
    if (o.protocol.empty() || o.state.empty()) {
      throw lortomo::DomainError("analyze histogram: the theory curve needs both --protocol and --state");
    }
    const lortomo::Protocol p = io::read_protocol(o.protocol);
    const lortomo::DensityMatrix rho = io::read_state(o.state);
    const std::size_t r = o.r == 0 ? rho.numerical_rank() : o.r;
    lortomo::CurveValidation v;
    v.experiments = o.experiments;
    v.seed = o.seed;
    v.draws = o.draws;
    v.workers = o.workers == 0 ? lortomo::default_workers() : o.workers;
    const lortomo::CurveOutcome curve = lortomo::theoretical_loss_curve(p, rho, o.n, r, v);
    Json t = {{"status", curve.status},
              {"ks_statistic", curve.ks.statistic},
              {"ks_p_value", curve.ks.p_value},
              {"validation_mean", curve.campaign_mean}};
    if (curve.curve) {
      t["coefficients"] = curve.curve->coefficients;
      t["mean"] = curve.curve->mean();
      theory = curve.curve->bin_density(h.edges, o.draws, lortomo::mix_seed(o.seed, 0xB1A5ULL));
    }
    summary["theory"] = t;
  }

  std::string csv = theory ? "bin_low,bin_high,count,theory_density\n" : "bin_low,bin_high,count\n";
  for (std::size_t b = 0; b < h.counts.size(); ++b) {
    csv += io::format_double(h.edges[b]) + "," + io::format_double(h.edges[b + 1]) + "," +
           std::to_string(h.counts[b]);
    if (theory) csv += "," + io::format_double((*theory)[b]);
    csv += "\n";
  }
  const Json config = {{"losses", o.losses}, {"bins", o.bins},  {"protocol", o.protocol}, {"state", o.state},
                       {"n", o.n},           {"r", o.r},        {"experiments", o.experiments},
                       {"seed", o.seed},     {"draws", o.draws}};
  if (o.out.empty()) {
    std::cout << csv;
    std::cerr << summary.dump(2) << "\n";
    return;
  }
  const std::string mpath = manifest_path_for(o.out);
  io::write_text(o.out, "# manifest: " + fs::path(mpath).filename().string() + "\n" + csv);
  io::write_json(mpath, io::make_manifest("analyze histogram", o.seed, config,
                                          digests({o.losses, o.protocol, o.state})));
  std::cout << summary.dump(2) << "\n";
}

struct AnalyzeMap {
  std::string protocol;
  double radius = 0.98;
  std::size_t grid = 200;
  double n = 100000;
  std::size_t experiments = 200;
  std::uint64_t seed = 1;
  std::size_t workers = 0;
  std::string out;
};

void run_analyze_map(const AnalyzeMap& o) {
  const lortomo::Protocol p = io::read_protocol(o.protocol);
  lortomo::MapConfig cfg;
  cfg.radius = o.radius;
  cfg.grid = o.grid;
  cfg.n = o.n;
  cfg.experiments = o.experiments;
  cfg.seed = o.seed;
  cfg.workers = o.workers == 0 ? lortomo::default_workers() : o.workers;
  const lortomo::EfficiencyMap map = lortomo::efficiency_map(p, cfg);

  std::string csv = "x,y,z,eff,eff_se,mean_loss,tag\n";
  for (const auto& pt : map.points) {
    csv += io::format_double(pt.direction[0]) + "," + io::format_double(pt.direction[1]) + "," +
           io::format_double(pt.direction[2]) + "," + io::format_double(pt.efficiency) + "," +
           io::format_double(pt.efficiency * pt.relative_se) + "," + io::format_double(pt.mean_loss) + "," +
           pt.tag + "\n";
  }
  auto point_json = [&](std::size_t k) {
    const auto& pt = map.points[k];
    return Json{{"index", k},
                {"direction", pt.direction},
                {"efficiency", pt.efficiency},
                {"efficiency_se", pt.efficiency * pt.relative_se},
                {"tag", pt.tag}};
  };
  Json summary = {{"points", map.points.size()}, {"max", point_json(map.argmax)}, {"min", point_json(map.argmin)},
                  {"min_over_max", map.min() / map.max()}};
  summary["target"] = map.target_index ? point_json(*map.target_index) : Json(nullptr);
  summary["antipode"] = map.antipode_index ? point_json(*map.antipode_index) : Json(nullptr);

  const Json config = {{"protocol", o.protocol}, {"radius", o.radius}, {"grid", o.grid},
                       {"n", o.n}, {"experiments", o.experiments}, {"seed", o.seed}};
  if (o.out.empty()) {
    std::cout << csv;
    std::cerr << summary.dump(2) << "\n";
    return;
  }
  const std::string mpath = manifest_path_for(o.out);
  io::write_text(o.out, "# manifest: " + fs::path(mpath).filename().string() + "\n" + csv);
  io::write_json(mpath, io::make_manifest("analyze map", o.seed, config, digests({o.protocol})));
  std::cout << summary.dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lortomo: Lorentz-transformed tomography protocols and their efficiency"};
  app.require_subcommand(1);
  app.set_version_flag("--version", io::kToolVersion);

  // protocol
  auto* protocol = app.add_subcommand("protocol", "Build, boost, complete or inspect measurement protocols");
  protocol->require_subcommand(1);

  ProtocolMake pm;
  auto* make = protocol->add_subcommand("make", "Standard protocol: tetrahedron, cube or mub");
  make->add_option("family", pm.family, "Protocol family")
      ->required()
      ->check(CLI::IsMember({"tetrahedron", "cube", "mub"}));
  make->add_option("--dim", pm.dim, "Hilbert-space dimension (mub: 2 or 4)");
  make->add_flag("--complete", pm.complete, "Append the completion operator");
  make->add_option("--out", pm.out, "Output file (default: stdout)");
  make->callback([&] { run_protocol_make(pm); });

  ProtocolBoost pb;
  auto* boost = protocol->add_subcommand("boost", "Apply a spinor transform to every protocol row");
  boost->add_option("--protocol", pb.protocol, "Protocol JSON")->required()->check(CLI::ExistingFile);
  auto* target = boost->add_option("--target-state,--state", pb.target_state,
                                   "Boost to the rest frame of this state")
                     ->check(CLI::ExistingFile);
  auto* transform = boost->add_option("--transform", pb.transform, "Explicit transform JSON")->check(CLI::ExistingFile);
  target->excludes(transform);
  boost->add_option("--floor", pb.floor, "Raise target eigenvalues to this floor first");
  boost->add_option("--out", pb.out, "Output file (default: stdout)");
  boost->callback([&] {
    if (pb.target_state.empty() && pb.transform.empty()) {
      throw CLI::RequiredError("--target-state or --transform");
    }
    run_protocol_boost(pb);
  });

  ProtocolComplete pc;
  auto* complete = protocol->add_subcommand("complete", "Complete a protocol to a decomposition of unity");
  complete->add_option("--protocol", pc.protocol, "Protocol JSON")->required()->check(CLI::ExistingFile);
  complete->add_option("--out", pc.out, "Output file (default: stdout)");
  complete->callback([&] { run_protocol_complete(pc); });

  ProtocolInfo pi;
  auto* info = protocol->add_subcommand("info", "Weight sum, completeness and (with --state) outcome statistics");
  info->add_option("--protocol", pi.protocol, "Protocol JSON")->required()->check(CLI::ExistingFile);
  info->add_option("--state", pi.state, "State JSON")->check(CLI::ExistingFile);
  info->add_option("--rank", pi.rank, "Rank for the completeness check (default: full)");
  info->callback([&] { run_protocol_info(pi); });

  // state
  auto* state = app.add_subcommand("state", "Create state files");
  state->require_subcommand(1);
  StateMake sm;
  auto* smake = state->add_subcommand("make", "Density matrix from Stokes parameters, principal angles or a spectrum");
  smake->add_option("--stokes", sm.stokes, "P0 P1 P2 P3")->expected(4);
  smake->add_option("--principal", sm.principal, "theta phi of the dominant eigenvector (qubit)")->expected(2);
  smake->add_option("--weight", sm.weight, "Dominant eigenvalue for --principal");
  smake->add_option("--weights", sm.weights, "Eigenvalues")->expected(1, 64);
  smake->add_option("--unitary-seed", sm.unitary_seed, "Haar-random eigenbasis for --weights");
  smake->add_option("--out", sm.out, "Output file (default: stdout)");
  smake->callback([&] { run_state_make(sm); });

  // simulate
  Simulate sim;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo tomography campaign");
  simulate->add_option("--protocol", sim.protocol, "Protocol JSON (the standard protocol when adaptive)")
      ->required()
      ->check(CLI::ExistingFile);
  simulate->add_option("--state", sim.state, "True state JSON")->required()->check(CLI::ExistingFile);
  simulate->add_option("--n", sim.n, "Sample size per experiment");
  simulate->add_option("--experiments", sim.experiments, "Number of experiments");
  simulate->add_option("--seed", sim.seed, "Master seed");
  simulate->add_option("--mode", sim.mode, "Sampling mode")->check(CLI::IsMember({"poisson", "multinomial", "expected"}));
  simulate->add_option("--adaptive-split", sim.adaptive_split, "Two-stage adaptive run with this stage-1 fraction");
  simulate->add_option("--rank", sim.rank, "Reconstruction rank (default: rank of the true state)");
  simulate->add_option("--workers", sim.workers, "Worker threads (default: LORTOMO_WORKERS or all cores)");
  simulate->add_option("--convention", sim.convention, "Sample size used for the efficiency bound")
      ->check(CLI::IsMember({"registered", "total"}));
  simulate->add_option("--out-prefix", sim.out_prefix, "Writes <prefix>.losses.csv, .summary.json, .manifest.json");
  simulate->callback([&] { run_simulate(sim); });

  // analyze
  auto* analyze = app.add_subcommand("analyze", "Efficiency, histograms and Bloch-sphere maps");
  analyze->require_subcommand(1);

  AnalyzeEfficiency ae;
  auto* eff = analyze->add_subcommand("efficiency", "Efficiency of a loss sample against the POVM bound");
  eff->add_option("--losses", ae.losses, "Losses CSV")->required()->check(CLI::ExistingFile);
  eff->add_option("--n", ae.n, "Sample size");
  eff->add_option("--s", ae.s, "Dimension");
  eff->add_option("--r", ae.r, "Rank");
  eff->add_option("--out", ae.out, "Output file (default: stdout)");
  eff->callback([&] { run_analyze_efficiency(ae); });

  AnalyzeHistogram ah;
  auto* hist = analyze->add_subcommand("histogram", "Loss histogram CSV, optionally with a validated theory curve");
  hist->add_option("--losses", ah.losses, "Losses CSV")->required()->check(CLI::ExistingFile);
  hist->add_option("--bins", ah.bins, "Number of bins");
  hist->add_option("--protocol", ah.protocol, "Protocol JSON for the theory curve")->check(CLI::ExistingFile);
  hist->add_option("--state", ah.state, "True state JSON for the theory curve")->check(CLI::ExistingFile);
  hist->add_option("--n", ah.n, "Sample size for the theory curve");
  hist->add_option("--r", ah.r, "Rank for the theory curve (default: rank of the state)");
  hist->add_option("--experiments", ah.experiments, "Validation campaign size");
  hist->add_option("--seed", ah.seed, "Validation seed");
  hist->add_option("--draws", ah.draws, "Draws from the theory curve");
  hist->add_option("--workers", ah.workers, "Worker threads");
  hist->add_option("--out", ah.out, "Output CSV (default: stdout, summary on stderr)");
  hist->callback([&] { run_analyze_histogram(ah); });

  AnalyzeMap am;
  auto* map = analyze->add_subcommand("map", "Efficiency over Bloch-sphere directions (qubit protocols)");
  map->add_option("--protocol", am.protocol, "Protocol JSON")->required()->check(CLI::ExistingFile);
  map->add_option("--radius", am.radius, "Bloch radius of the mapped states");
  map->add_option("--grid", am.grid, "Number of Fibonacci-sphere directions");
  map->add_option("--n", am.n, "Sample size per experiment");
  map->add_option("--experiments", am.experiments, "Experiments per direction");
  map->add_option("--seed", am.seed, "Master seed");
  map->add_option("--workers", am.workers, "Worker threads");
  map->add_option("--out", am.out, "Output CSV (default: stdout, summary on stderr)");
  map->callback([&] { run_analyze_map(am); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const lortomo::SchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return 2;
  } catch (const lortomo::CompletenessError& e) {
    std::cerr << "completeness error: " << e.what() << "\n";
    return 3;
  } catch (const lortomo::EmptyInputError& e) {
    std::cerr << "empty input: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
