#ifndef RUELLE_VERIFY_SUITES_HPP
#define RUELLE_VERIFY_SUITES_HPP

#include <random>

#include "ruelle/report_json.hpp"

namespace ruelle {

struct SuiteResult {
    std::string name;
    int total = 0;
    int failed = 0;
    double max_error = 0.0;
    std::vector<ordered_json> failures;  // replayable instance descriptions
    bool passed() const { return failed == 0 && total > 0; }
    ordered_json to_json() const;
};

// Generator for test instances: degree 2 or 3, simple critical points, no
// critical relations to the checked depth, well-separated singular data.
RationalMap random_admissible_map(std::mt19937_64& rng, int degree_min = 2,
                                  int degree_max = 3, bool allow_rational = true);

// point in the disk of the given radius keeping min_dist from every entry
// of `avoid`
cplx random_point_avoiding(std::mt19937_64& rng, const std::vector<cplx>& avoid,
                           double min_dist, double radius);

// forward postcritical points R^t(d_i), t = 0..depth
std::vector<cplx> postcritical_points(const RationalMap& R, int depth);

// Point with distance > min_dist from every pole of the decomposition at
// which the partial-fraction evaluation is well conditioned: the mass
// sum s_n(z) exceeds |1/(R^n)'(z)| by at most cond_cap, so the stated
// tolerance measures the data rather than double-precision cancellation.
cplx sample_reconstruction_point(std::mt19937_64& rng, const RationalMap& R,
                                 const ResolventDecomposition& dec,
                                 double min_dist = 0.1, double cond_cap = 1e4);

// closed-form n-step kernel pullback vs the preimage-sum oracle
SuiteResult run_oracle_suite(std::uint64_t seed, int instances = 100,
                             double tol = 1e-8);
// pullback of (phi o R) (R')^2 returns deg(R) * phi
SuiteResult run_duality_suite(std::uint64_t seed, int samples = 50,
                              double tol = 1e-9);
// residues against the numeric residue limit + pointwise reconstruction
SuiteResult run_residue_suite(std::uint64_t seed, int instances = 12,
                              double residue_tol = 1e-6, double recon_tol = 1e-8);
// formal series relations on the quadratic fixture and random maps
SuiteResult run_identities_suite(std::uint64_t seed, double tol = 1e-6);
// quadratic measure recursion against the general path; total-weight law
SuiteResult run_measures_suite(std::uint64_t seed, int instances = 20,
                               double atom_tol = 1e-8, double weight_tol = 1e-9);
// weak-* probe positive and negative controls
SuiteResult run_probe_controls_suite();

}  // namespace ruelle

#endif
