#ifndef RUELLE_ERRORS_HPP
#define RUELLE_ERRORS_HPP

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace ruelle {

using cplx = std::complex<double>;

// Exponent arithmetic left the representable range; never wraps silently.
struct scaled_overflow_error : std::overflow_error {
    using std::overflow_error::overflow_error;
};

// Root refinement missed the residual target; carries the best iterates.
struct root_convergence_error : std::runtime_error {
    std::vector<cplx> best_roots;
    std::vector<double> residuals;
    root_convergence_error(const std::string& msg, std::vector<cplx> roots,
                           std::vector<double> res)
        : std::runtime_error(msg),
          best_roots(std::move(roots)),
          residuals(std::move(res)) {}
};

// Evaluation requested at (or too close to) a pole of the map.
struct pole_error : std::runtime_error {
    cplx where;
    explicit pole_error(cplx z, const std::string& msg = "evaluation at a pole")
        : std::runtime_error(msg), where(z) {}
};

// A forward orbit or preimage tree ran into a critical point: the map
// violates the no-critical-relation hypothesis at the requested depth.
struct critical_relation_error : std::runtime_error {
    cplx critical_point;
    cplx offending_point;
    int depth;
    critical_relation_error(const std::string& msg, cplx c, cplx p, int d)
        : std::runtime_error(msg), critical_point(c), offending_point(p), depth(d) {}
};

// The map does not satisfy a standing hypothesis (simple critical points,
// infinity fixed, coprime numerator/denominator, ...).
struct hypothesis_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// An evaluation point collided with a kernel pole.
struct atom_collision_error : std::runtime_error {
    cplx point;
    cplx atom;
    int term_index;  // -1 when not tied to a series term
    atom_collision_error(const std::string& msg, cplx z, cplx a, int n = -1)
        : std::runtime_error(msg), point(z), atom(a), term_index(n) {}
};

// A quadratic parameter whose critical orbit makes the construction singular.
struct degenerate_parameter_error : std::runtime_error {
    int index;
    degenerate_parameter_error(const std::string& msg, int j)
        : std::runtime_error(msg), index(j) {}
};

// Iteration left the guarded exponent range (doubly exponential escape);
// callers truncate their trails instead of propagating this.
struct range_exhausted_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Orbit of the base point revisits itself before reaching the required
// number of distinct points.
struct short_orbit_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Generic precondition violation (caps, argument domains).
struct precondition_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

}  // namespace ruelle

#endif
