#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "soficize/group.hpp"
#include "soficize/linalg.hpp"
#include "soficize/sphere.hpp"
#include "soficize/types.hpp"

namespace soficize::sofic {

using groups::ElementSet;
using groups::GroupElement;
using groups::GroupSpec;
using linalg::Frame;
using linalg::ProjectionRep;

// ---------------------------------------------------------------------------
// Approximation types
// ---------------------------------------------------------------------------

// Finite family of unitaries indexed by group elements. Matrices are either
// stored explicitly or produced on demand by a provider and cached; the
// cache also holds eigendecompositions, which the spectral condition
// checkers reuse heavily.
class HyperlinearApprox {
 public:
  using Provider = std::function<Matrix(const GroupElement&)>;

  HyperlinearApprox(Index d, ElementSet support, Provider provider);
  static HyperlinearApprox from_map(Index d,
                                    std::map<GroupElement, Matrix> units);

  Index dim() const { return d_; }
  const ElementSet& support() const { return support_; }
  bool has(const GroupElement& g) const { return groups::contains(support_, g); }

  const Matrix& unit(const GroupElement& g) const;
  const linalg::UnitaryEigen& eigen(const GroupElement& g) const;

  void release_cache() const;  // drop cached matrices (provider recomputes)

 private:
  struct Cache {
    std::mutex mu;
    std::map<GroupElement, Matrix> units;
    std::map<GroupElement, linalg::UnitaryEigen> eigs;
  };

  Index d_ = 0;
  ElementSet support_;
  Provider provider_;
  std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();
};

struct PairDefect {
  GroupElement g, h;
  double value = 0;
};

// Normalized defect tables. For unitary families: composition defect
// ||a(gh) - a(g)a(h)||_HS^2 / d over pairs in F, trace defect
// |tr(a(h^-1 g))| / d over distinct pairs. For permutation families the
// same fields hold mismatch and coincidence fractions of the point set.
struct DefectReport {
  std::vector<PairDefect> composition;
  std::vector<PairDefect> trace;
  double max_composition = 0;
  double max_trace = 0;
  double threshold = 0;
  bool pass = false;
};

DefectReport validate_hyperlinear(const HyperlinearApprox& alpha,
                                  const ElementSet& F, double eps);

// Partial action by permutations of {0..point_count-1}.
struct SoficApprox {
  Index point_count = 0;
  ElementSet support;
  std::map<GroupElement, std::vector<Index>> perms;

  const std::vector<Index>& perm(const GroupElement& g) const;
  void validate_bijections() const;  // throws StructuralError
};

DefectReport validate_sofic(const SoficApprox& sigma, const ElementSet& F,
                            double eps);

// Permutation matrix of a point map: P e_v = e_{perm[v]}.
Matrix permutation_matrix(const std::vector<Index>& perm);

// Hyperlinear family whose matrices are simultaneous permutation matrices
// in the stored orthonormal basis; trailing identity_block_rank slots are
// fixed by every permutation.
struct SoficInducedApprox {
  Frame basis;  // ambient_dim x point_count, orthonormal columns
  SoficApprox sofic;
  Index identity_block_rank = 0;

  Index ambient_dim() const { return basis.rows(); }
  Matrix beta(const GroupElement& g) const;  // basis P_g basis^*
};

// Permutation matrices on the standard basis of C^{|V|}.
SoficInducedApprox sofic_induce(const SoficApprox& sigma);
HyperlinearApprox to_hyperlinear(const SoficInducedApprox& b);

// max_{g in E} ||(I-p) a(g) p||_HS / sqrt(tr p)
double almost_invariance_defect(const HyperlinearApprox& alpha,
                                const ProjectionRep& p, const ElementSet& E);

// ---------------------------------------------------------------------------
// Parameter schedule
// ---------------------------------------------------------------------------

enum class DsScope { off, generating, full };  // which g index the ds family

struct BlockParams {
  int folner_radius = 1;
  double nu = 0.5;
  double delta = 0.1;
};

struct ParamSchedule {
  double epsilon = 0.5;
  double kappa = 0.02;  // epsilon/25 unless overridden
  int m = 1;            // number of blocks
  int N = 8;            // circle resolution
  double delta0 = 0;    // initial disuniformity level; <= 0 means measured
  std::vector<BlockParams> blocks;  // execution order (largest box first)
  Index budget = 200;               // candidate draws per step
  Index min_dim = 8;                // dimension floor D
  double slack = 1.0;               // threshold relaxation factor, logged
  bool strict = false;              // refuse any schedule violation
  DsScope ds_scope = DsScope::generating;
  Index comp_full_limit = 25;  // full FxF composition checks up to this |F|

  double paper_delta0(int folner_size, double delta) const;
};

// Schedule with the constraint set satisfied literally; the resulting
// dimensions are astronomically far above desk scale, so this is mostly a
// reference point and validator input.
ParamSchedule make_paper_schedule(const GroupSpec& spec, const ElementSet& E,
                                  double eps);

// Pragmatic schedule sized for a given input dimension.
ParamSchedule make_desk_schedule(const GroupSpec& spec, int e_radius,
                                 double eps, Index d);

struct ScheduleCheck {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

ScheduleCheck validate_schedule(const ParamSchedule& s, const GroupSpec& spec,
                                const ElementSet& E, Index d);

// ---------------------------------------------------------------------------
// Candidate search
// ---------------------------------------------------------------------------

struct ConditionThresholds {
  double kappa = 0;        // max_{g in F} ||p a(g) xi||
  double cross = 0;        // max_{g in E, h in F} ||(I-p) a(g) p a(h) xi||
  double composition = 0;  // max pairs ||a(g) a(h) xi - a(gh) xi||
  double overlap = 0;      // max_{g != h} |<(I-p) a(g) xi, a(h) xi>|
  double ds = 0;           // max ds_n(S_{a(g)}((I-p) a(h) xi))
};

struct ConditionReport {
  double kappa_measured = 0;
  double cross_measured = 0;
  double composition_measured = 0;
  double overlap_measured = 0;
  double ds_measured = 0;
  ConditionThresholds thresholds;
  bool admissible = false;
  double score = 0;  // max over families of measured / threshold
};

struct SearchParams {
  ElementSet E, F;
  ConditionThresholds thresholds;
  Index budget = 200;
  bool best_of = true;  // keep scanning for the best score after a miss
  DsScope ds_scope = DsScope::generating;
  Index comp_full_limit = 25;
  int N = 8;
};

struct SearchResult {
  bool found = false;
  Vector xi;
  ConditionReport report;
  Index draws_used = 0;
};

// Draws up to budget sphere points and evaluates the five condition
// families on each; returns the first admissible candidate, or in best-of
// mode the minimizer of the relative-violation score with a report of
// which conditions hold at which margins. Budget exhaustion is an explicit
// result, never a silent fallback.
SearchResult candidate_vector_search(const HyperlinearApprox& alpha,
                                     const ProjectionRep& p,
                                     const SearchParams& params,
                                     sphere::SeededSampler& sampler);

// ---------------------------------------------------------------------------
// Inner recursion
// ---------------------------------------------------------------------------

struct StepMetrics {
  int step = 0;
  Index tr_p = 0, tr_q = 0;
  double kappa_measured = 0;        // max ||p xi_g||
  double composition_measured = 0;  // max ||a(g) xi_h - xi_{gh}||
  double nu_measured = 0;           // max ||(I-q) a(g) q||_HS / sqrt(tr q)
  double ds_measured = 0;           // max ds_n(S_{a(g)}(I-q))
  double ds_budget = 0;             // delta0 exp(16 n |F|^2 / d)
  double trii_lhs = 0, trii_rhs = 0;
  double ortho_displacement = 0;    // max ||phi - theta|| in the new block
  Index search_draws = 0;
  ConditionReport search_report;
};

struct RecursionState {
  ProjectionRep p;  // block frame built so far (columns in slot order)
  std::vector<std::map<GroupElement, Index>> slot_labels;  // per step
  std::map<GroupElement, std::vector<Index>> tau;  // partial perms per g
  int steps = 0;
  double delta0 = 0;  // measured or scheduled initial disuniformity
  std::vector<StepMetrics> log;

  static RecursionState initial(Index d);
};

struct StepSettings {
  ElementSet E, E2, F;
  double kappa = 0.1;
  double nu = 0.5;
  double delta = 0.1;
  int N = 8;
  Index budget = 200;
  double slack = 1.0;
  DsScope ds_scope = DsScope::generating;
  Index comp_full_limit = 25;
  linalg::PreconditionPolicy ortho_policy = linalg::PreconditionPolicy::monitored;
  bool check_trace_cap = true;

  ConditionThresholds thresholds() const;
};

struct StepOutcome {
  bool accepted = false;
  RecursionState state;  // advanced on success, input state otherwise
  StepMetrics metrics;
  std::string reason;  // named failed hypothesis / clause on rejection
};

// One recursion step: verify entry hypotheses, search for a candidate,
// set xi_g = a(g) xi, orthonormalize the complement parts into a new
// |F|-column block, extend the partial permutations (unmatched slots fill
// lowest free index first), and verify clauses (a)-(d) plus the
// permutation-distance inequality at the scheduled constants.
StepOutcome inner_step(const HyperlinearApprox& alpha,
                       const RecursionState& state, const StepSettings& settings,
                       sphere::SeededSampler& sampler);

// ---------------------------------------------------------------------------
// Block builder and pipeline
// ---------------------------------------------------------------------------

struct BlockMetrics {
  int steps = 0;
  Index block_rank = 0;
  double beta_distance2 = 0;     // max_g ||(a(g) - beta(g)) p||_HS^2
  double beta_target2 = 0;       // (5 kappa + nu)^2 tr(p)
  double gamma_distance2 = 0;    // max_g ||(a(g) - gamma(g))(I-p)||_HS^2
  double gamma_target2 = 0;      // 4 nu^2 (d - tr p)
  double gamma_defect = 0;       // hyperlinear defect of gamma on E
  double gamma_defect_target = 0;  // 7 nu
  std::vector<StepMetrics> step_log;
};

struct BlockSettings {
  StepSettings step;
  double trace_cap_fraction = 0;  // kappa^2/2 unless overridden
  ElementSet gamma_support;       // elements to repair on the complement
  Index min_dim = 8;
};

struct BlockResult {
  bool ok = false;
  ProjectionRep p;
  SoficInducedApprox beta;      // on pH: basis = block columns, slots = rank
  Frame complement;             // d x (d - rank) orthonormal
  std::map<GroupElement, Matrix> gamma;  // repaired units, compressed
  BlockMetrics metrics;
  std::string reason;
};

// Runs inner steps until tr(p) exceeds the trace cap, then assembles the
// block permutation family and repairs the complement into gamma.
BlockResult build_block(const HyperlinearApprox& alpha,
                        const BlockSettings& settings,
                        sphere::SeededSampler& sampler);

struct CertificateEntry {
  std::string name;
  double achieved = 0;
  double allowed = 0;
  bool pass = false;
};

struct SofifyReport {
  DefectReport input_defects;
  std::vector<BlockMetrics> per_block;
  std::vector<Index> block_ranks;
  Index identity_block_rank = 0;
  std::vector<CertificateEntry> certificate;
  bool certified = false;
  std::vector<std::string> schedule_violations;  // relaxed-mode log
  ConditionThresholds enforced;                  // thresholds actually used
  double distance2 = 0;       // max_g ||a(g) - beta(g)||_HS^2 / d
  double distance2_raw = 0;   // max_g ||a(g) - beta(g)||_HS^2
  std::uint64_t seed = 0;
  std::string failure;
};

struct SofifyResult {
  bool certified = false;
  bool failed = false;  // pipeline failure (block/search), prefix returned
  SoficInducedApprox beta;
  SofifyReport report;
};

// Peels m blocks, leaves the identity tail, assembles beta and verifies
// the certificate: beta exactly permutation-induced, the underlying
// permutation family valid at (E, eps), and
// max_g ||a(g) - beta(g)||_HS^2 <= eps^2 d.
SofifyResult sofify(const HyperlinearApprox& alpha, const ElementSet& E,
                    double eps, const ParamSchedule& schedule,
                    std::uint64_t seed);

// Independent verifier pass over emitted artifacts: recomputes every
// certificate entry from (alpha, beta) alone.
std::vector<CertificateEntry> verify_certificate(const HyperlinearApprox& alpha,
                                                 const SoficInducedApprox& beta,
                                                 const ElementSet& E, double eps);

}  // namespace soficize::sofic
