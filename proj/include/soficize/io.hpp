#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "soficize/abelian.hpp"
#include "soficize/sofic.hpp"
#include "soficize/sphere.hpp"
#include "soficize/torus_measure.hpp"

namespace soficize::io {

using json = nlohmann::ordered_json;

// Matrix exchange: {dim_rows, dim_cols, entries: [[re, im], ...]} row major,
// or {dim_rows, dim_cols, binary_file, encoding} with a little-endian
// float64 interleaved re/im sidecar next to the JSON file.
json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const json& j,
                        const std::filesystem::path& base_dir = {});
void save_matrix(const Matrix& m, const std::filesystem::path& path,
                 bool binary_sidecar = false);
Matrix load_matrix(const std::filesystem::path& path);

json element_set_to_json(const groups::ElementSet& set);
groups::ElementSet element_set_from_json(const json& j);

json measure_to_json(const torus::AtomicTorusMeasure& mu);
torus::AtomicTorusMeasure measure_from_json(const json& j);

json concentration_report_to_json(const sphere::ConcentrationReport& r);

// Input manifest: {rank, dim, support_elements, matrix_files} with the
// matrix files aligned to support_elements.
void save_approx(const sofic::HyperlinearApprox& alpha,
                 const std::filesystem::path& dir, bool binary_sidecar = true);
sofic::HyperlinearApprox load_approx(const std::filesystem::path& manifest);

// Output family: {point_count, identity_block_rank, support_elements,
// permutations, basis_file}.
void save_induced(const sofic::SoficInducedApprox& beta,
                  const std::filesystem::path& dir, bool binary_sidecar = true);
sofic::SoficInducedApprox load_induced(const std::filesystem::path& meta);

json defect_report_to_json(const sofic::DefectReport& rep);
json certificate_to_json(const std::vector<sofic::CertificateEntry>& entries);
json sofify_report_to_json(const sofic::SofifyReport& rep);

// Fixed per-step CSV: step,tr_p,nu_achieved,kappa_achieved,ds_bound,search_draws
std::string per_step_csv(const sofic::SofifyReport& rep);

json schedule_to_json(const sofic::ParamSchedule& s);
sofic::ParamSchedule schedule_from_json(const json& j);

void write_text(const std::filesystem::path& path, const std::string& text);
json read_json(const std::filesystem::path& path);

}  // namespace soficize::io
