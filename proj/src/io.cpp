#include "soficize/io.hpp"

#include <fstream>
#include <sstream>

namespace soficize::io {

namespace fs = std::filesystem;

json matrix_to_json(const Matrix& m) {
  json j;
  j["dim_rows"] = m.rows();
  j["dim_cols"] = m.cols();
  json entries = json::array();
  for (Index r = 0; r < m.rows(); ++r)
    for (Index c = 0; c < m.cols(); ++c)
      entries.push_back({m(r, c).real(), m(r, c).imag()});
  j["entries"] = std::move(entries);
  return j;
}

Matrix matrix_from_json(const json& j, const fs::path& base_dir) {
  Index rows = j.at("dim_rows").get<Index>();
  Index cols = j.at("dim_cols").get<Index>();
  if (rows < 0 || cols < 0) throw StructuralError("matrix json: negative shape");
  Matrix m(rows, cols);
  if (j.contains("binary_file")) {
    fs::path bin = base_dir / j.at("binary_file").get<std::string>();
    std::ifstream in(bin, std::ios::binary);
    if (!in) throw StructuralError("matrix sidecar missing: " + bin.string());
    std::vector<double> buf(static_cast<std::size_t>(rows * cols * 2));
    in.read(reinterpret_cast<char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(double)));
    if (in.gcount() !=
        static_cast<std::streamsize>(buf.size() * sizeof(double)))
      throw StructuralError("matrix sidecar truncated: " + bin.string());
    std::size_t t = 0;
    for (Index r = 0; r < rows; ++r)
      for (Index c = 0; c < cols; ++c, t += 2)
        m(r, c) = Complex(buf[t], buf[t + 1]);
    return m;
  }
  const json& entries = j.at("entries");
  if (static_cast<Index>(entries.size()) != rows * cols)
    throw StructuralError("matrix json: entry count mismatch");
  std::size_t t = 0;
  for (Index r = 0; r < rows; ++r)
    for (Index c = 0; c < cols; ++c, ++t)
      m(r, c) = Complex(entries[t][0].get<double>(), entries[t][1].get<double>());
  return m;
}

void save_matrix(const Matrix& m, const fs::path& path, bool binary_sidecar) {
  if (!binary_sidecar) {
    write_text(path, matrix_to_json(m).dump(2) + "\n");
    return;
  }
  fs::path bin = path;
  bin.replace_extension(".bin");
  json j;
  j["dim_rows"] = m.rows();
  j["dim_cols"] = m.cols();
  j["binary_file"] = bin.filename().string();
  j["encoding"] = "little-endian float64 interleaved re/im";
  write_text(path, j.dump(2) + "\n");
  std::ofstream out(bin, std::ios::binary);
  for (Index r = 0; r < m.rows(); ++r)
    for (Index c = 0; c < m.cols(); ++c) {
      double re = m(r, c).real(), im = m(r, c).imag();
      out.write(reinterpret_cast<const char*>(&re), sizeof(double));
      out.write(reinterpret_cast<const char*>(&im), sizeof(double));
    }
}

Matrix load_matrix(const fs::path& path) {
  return matrix_from_json(read_json(path), path.parent_path());
}

json element_set_to_json(const groups::ElementSet& set) {
  json j = json::array();
  for (const auto& g : set) j.push_back(g.coords);
  return j;
}

groups::ElementSet element_set_from_json(const json& j) {
  std::vector<groups::GroupElement> elems;
  for (const auto& tuple : j)
    elems.emplace_back(tuple.get<std::vector<std::int64_t>>());
  return groups::make_set(std::move(elems));
}

json measure_to_json(const torus::AtomicTorusMeasure& mu) {
  json atoms = json::array();
  for (const auto& a : mu.atoms()) atoms.push_back({a.position, a.mass});
  json j;
  j["atoms"] = std::move(atoms);
  return j;
}

torus::AtomicTorusMeasure measure_from_json(const json& j) {
  std::vector<torus::AtomicTorusMeasure::Atom> atoms;
  for (const auto& a : j.at("atoms"))
    atoms.push_back({a[0].get<double>(), a[1].get<double>()});
  return torus::AtomicTorusMeasure(std::move(atoms));
}

json concentration_report_to_json(const sphere::ConcentrationReport& r) {
  json j;
  j["dimension"] = r.dimension;
  j["samples"] = r.samples;
  j["deviation"] = r.deviation;
  j["mode"] = r.mode == sphere::ConcentrationMode::quadratic_form
                  ? "quadratic_form"
                  : "vector_norm";
  j["empirical_success"] = r.empirical_success;
  j["paper_bound"] = r.paper_bound;
  return j;
}

void save_approx(const sofic::HyperlinearApprox& alpha, const fs::path& dir,
                 bool binary_sidecar) {
  fs::create_directories(dir);
  json manifest;
  manifest["rank"] = alpha.support().empty() ? 0 : alpha.support().front().rank();
  manifest["dim"] = alpha.dim();
  manifest["support_elements"] = element_set_to_json(alpha.support());
  json files = json::array();
  int i = 0;
  for (const auto& g : alpha.support()) {
    std::string name = "matrix_" + std::to_string(i++) + ".json";
    save_matrix(alpha.unit(g), dir / name, binary_sidecar);
    files.push_back(name);
  }
  manifest["matrix_files"] = std::move(files);
  write_text(dir / "manifest.json", manifest.dump(2) + "\n");
}

sofic::HyperlinearApprox load_approx(const fs::path& manifest) {
  json j = read_json(manifest);
  fs::path dir = manifest.parent_path();
  groups::ElementSet support = element_set_from_json(j.at("support_elements"));
  const auto& files = j.at("matrix_files");
  if (files.size() != support.size())
    throw StructuralError("manifest: matrix_files not aligned with support");
  Index d = j.at("dim").get<Index>();
  std::map<groups::GroupElement, Matrix> units;
  for (std::size_t i = 0; i < support.size(); ++i)
    units.emplace(support[i], load_matrix(dir / files[i].get<std::string>()));
  return sofic::HyperlinearApprox::from_map(d, std::move(units));
}

void save_induced(const sofic::SoficInducedApprox& beta, const fs::path& dir,
                  bool binary_sidecar) {
  fs::create_directories(dir);
  save_matrix(beta.basis, dir / "basis.json", binary_sidecar);
  json j;
  j["point_count"] = beta.sofic.point_count;
  j["identity_block_rank"] = beta.identity_block_rank;
  j["support_elements"] = element_set_to_json(beta.sofic.support);
  json perms = json::array();
  for (const auto& g : beta.sofic.support) perms.push_back(beta.sofic.perm(g));
  j["permutations"] = std::move(perms);
  j["basis_file"] = "basis.json";
  write_text(dir / "beta.json", j.dump(2) + "\n");
}

sofic::SoficInducedApprox load_induced(const fs::path& meta) {
  json j = read_json(meta);
  fs::path dir = meta.parent_path();
  sofic::SoficInducedApprox beta;
  beta.basis = load_matrix(dir / j.at("basis_file").get<std::string>());
  beta.identity_block_rank = j.at("identity_block_rank").get<Index>();
  beta.sofic.point_count = j.at("point_count").get<Index>();
  beta.sofic.support = element_set_from_json(j.at("support_elements"));
  const auto& perms = j.at("permutations");
  if (perms.size() != beta.sofic.support.size())
    throw StructuralError("beta.json: permutations not aligned with support");
  for (std::size_t i = 0; i < beta.sofic.support.size(); ++i)
    beta.sofic.perms.emplace(beta.sofic.support[i],
                             perms[i].get<std::vector<Index>>());
  return beta;
}

json defect_report_to_json(const sofic::DefectReport& rep) {
  json j;
  j["max_composition"] = rep.max_composition;
  j["max_trace"] = rep.max_trace;
  j["threshold"] = rep.threshold;
  j["pass"] = rep.pass;
  json comp = json::array();
  for (const auto& p : rep.composition)
    comp.push_back({groups::to_string(p.g), groups::to_string(p.h), p.value});
  j["composition"] = std::move(comp);
  json tr = json::array();
  for (const auto& p : rep.trace)
    tr.push_back({groups::to_string(p.g), groups::to_string(p.h), p.value});
  j["trace"] = std::move(tr);
  return j;
}

json certificate_to_json(const std::vector<sofic::CertificateEntry>& entries) {
  json j = json::array();
  for (const auto& e : entries) {
    json row;
    row["name"] = e.name;
    row["achieved"] = e.achieved;
    row["allowed"] = e.allowed;
    row["pass"] = e.pass;
    j.push_back(std::move(row));
  }
  return j;
}

namespace {

json step_to_json(const sofic::StepMetrics& s) {
  json j;
  j["step"] = s.step;
  j["tr_p"] = s.tr_p;
  j["tr_q"] = s.tr_q;
  j["kappa_achieved"] = s.kappa_measured;
  j["composition_achieved"] = s.composition_measured;
  j["nu_achieved"] = s.nu_measured;
  j["ds_achieved"] = s.ds_measured;
  j["ds_bound"] = s.ds_budget;
  j["perm_distance_sq"] = s.trii_lhs;
  j["perm_distance_budget"] = s.trii_rhs;
  j["ortho_displacement"] = s.ortho_displacement;
  j["search_draws"] = s.search_draws;
  return j;
}

}  // namespace

json sofify_report_to_json(const sofic::SofifyReport& rep) {
  json j;
  j["seed"] = rep.seed;
  j["certificate"] = rep.certified ? "pass" : "fail";
  j["distance_sq_normalized"] = rep.distance2;
  j["distance_sq"] = rep.distance2_raw;
  j["identity_block_rank"] = rep.identity_block_rank;
  j["block_ranks"] = rep.block_ranks;
  j["schedule_violations"] = rep.schedule_violations;
  json thresholds;
  thresholds["kappa"] = rep.enforced.kappa;
  thresholds["cross"] = rep.enforced.cross;
  thresholds["composition"] = rep.enforced.composition;
  thresholds["overlap"] = rep.enforced.overlap;
  thresholds["ds"] = rep.enforced.ds;
  j["enforced_thresholds"] = std::move(thresholds);
  j["input_defects"] = defect_report_to_json(rep.input_defects);
  json blocks = json::array();
  for (const auto& b : rep.per_block) {
    json bj;
    bj["steps"] = b.steps;
    bj["block_rank"] = b.block_rank;
    bj["beta_distance_sq"] = b.beta_distance2;
    bj["beta_target_sq"] = b.beta_target2;
    bj["gamma_distance_sq"] = b.gamma_distance2;
    bj["gamma_target_sq"] = b.gamma_target2;
    bj["gamma_defect"] = b.gamma_defect;
    bj["gamma_defect_target"] = b.gamma_defect_target;
    json steps = json::array();
    for (const auto& s : b.step_log) steps.push_back(step_to_json(s));
    bj["per_step"] = std::move(steps);
    blocks.push_back(std::move(bj));
  }
  j["per_block"] = std::move(blocks);
  j["bounds"] = certificate_to_json(rep.certificate);
  if (!rep.failure.empty()) j["failure"] = rep.failure;
  return j;
}

std::string per_step_csv(const sofic::SofifyReport& rep) {
  std::ostringstream os;
  os << "step,tr_p,nu_achieved,kappa_achieved,ds_bound,search_draws\n";
  int global_step = 0;
  for (const auto& b : rep.per_block)
    for (const auto& s : b.step_log) {
      os << global_step++ << "," << s.tr_p << "," << s.nu_measured << ","
         << s.kappa_measured << "," << s.ds_budget << "," << s.search_draws
         << "\n";
    }
  return os.str();
}

json schedule_to_json(const sofic::ParamSchedule& s) {
  json j;
  j["epsilon"] = s.epsilon;
  j["kappa"] = s.kappa;
  j["m"] = s.m;
  j["N"] = s.N;
  j["delta0"] = s.delta0;
  j["budget"] = s.budget;
  j["min_dim"] = s.min_dim;
  j["slack"] = s.slack;
  j["strict"] = s.strict;
  j["ds_scope"] = s.ds_scope == sofic::DsScope::off
                      ? "off"
                      : (s.ds_scope == sofic::DsScope::full ? "full"
                                                            : "generating");
  j["comp_full_limit"] = s.comp_full_limit;
  json blocks = json::array();
  for (const auto& b : s.blocks) {
    json bj;
    bj["folner_radius"] = b.folner_radius;
    bj["nu"] = b.nu;
    bj["delta"] = b.delta;
    blocks.push_back(std::move(bj));
  }
  j["blocks"] = std::move(blocks);
  return j;
}

sofic::ParamSchedule schedule_from_json(const json& j) {
  sofic::ParamSchedule s;
  if (j.contains("epsilon")) s.epsilon = j["epsilon"].get<double>();
  if (j.contains("kappa")) s.kappa = j["kappa"].get<double>();
  if (j.contains("N")) s.N = j["N"].get<int>();
  if (j.contains("delta0")) s.delta0 = j["delta0"].get<double>();
  if (j.contains("budget")) s.budget = j["budget"].get<Index>();
  if (j.contains("min_dim")) s.min_dim = j["min_dim"].get<Index>();
  if (j.contains("slack")) s.slack = j["slack"].get<double>();
  if (j.contains("strict")) s.strict = j["strict"].get<bool>();
  if (j.contains("comp_full_limit"))
    s.comp_full_limit = j["comp_full_limit"].get<Index>();
  if (j.contains("ds_scope")) {
    std::string scope = j["ds_scope"].get<std::string>();
    if (scope == "off")
      s.ds_scope = sofic::DsScope::off;
    else if (scope == "full")
      s.ds_scope = sofic::DsScope::full;
    else if (scope == "generating")
      s.ds_scope = sofic::DsScope::generating;
    else
      throw ConfigError("schedule: unknown ds_scope " + scope);
  }
  if (j.contains("blocks")) {
    s.blocks.clear();
    for (const auto& bj : j["blocks"]) {
      sofic::BlockParams b;
      b.folner_radius = bj.at("folner_radius").get<int>();
      if (bj.contains("nu")) b.nu = bj["nu"].get<double>();
      if (bj.contains("delta")) b.delta = bj["delta"].get<double>();
      s.blocks.push_back(b);
    }
  }
  s.m = j.contains("m") ? j["m"].get<int>() : static_cast<int>(s.blocks.size());
  return s;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw StructuralError("cannot open for writing: " + path.string());
  out << text;
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw StructuralError("cannot open: " + path.string());
  json j;
  in >> j;
  return j;
}

}  // namespace soficize::io
