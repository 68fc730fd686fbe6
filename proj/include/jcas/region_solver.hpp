#ifndef JCAS_REGION_SOLVER_HPP
#define JCAS_REGION_SOLVER_HPP

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "jcas/channel.hpp"
#include "jcas/types.hpp"

namespace jcas {

struct RegionPoint {
    double e = 0.0;  // detection-error exponent, nats
    double r = 0.0;  // rate, nats/symbol
};

// Pareto boundary of a rate/exponent region: E strictly increasing, R
// strictly decreasing after envelope reduction (ties within 1e-9 on either
// axis are merged toward the better point).
struct RegionCurve {
    std::vector<RegionPoint> points;
    std::string kind;  // mono_open | mono_closed_inner | corollary3 | bi_succ | bi_joint
    int grid_resolution = 0;
    std::map<std::string, std::string> metadata;

    // Rate at exponent e by linear interpolation between boundary points;
    // r = points.front().r for e below the first vertex, 0 beyond the last.
    double rate_at(double e) const;
};

struct CapacityResult {
    double value = 0.0;
    Distribution argmax_input;
    std::vector<double> per_state_values;
};

// All compositions k/resolution on the (dim-1)-simplex; C(resolution+dim-1, dim-1) points.
std::vector<Distribution> simplex_grid(int dim, int resolution);

// Blahut-Arimoto capacity of W_{Y|X,s} with duality-gap stopping rule.
CapacityResult per_state_capacity(const ChannelFamily& family, int s, double tol = 1e-9);

// max_P min_s I(P, W_s): concave objective, solved by grid seeding plus
// pairwise coordinate golden-section refinement on the simplex.
CapacityResult compound_capacity(const ChannelFamily& family, int resolution = 0,
                                 double refine_tol = 1e-9);

// min_s max_P I(P, W_s) = min over per-state Blahut-Arimoto capacities.
CapacityResult worst_case_capacity(const ChannelFamily& family, double tol = 1e-9);

// Default simplex-grid resolution per input alphabet size (200 for |X|=2,
// 60 for |X|=3, 24 at the hard cap |X|=4); throws UnsupportedError above the cap.
int default_grid_resolution(int x_size);

// Mono-static open-loop frontier: Pareto envelope of
// (phi(P), min_s I(P, W_s)) over the simplex grid.
RegionCurve mono_open_region(const ChannelFamily& family, int resolution = 0, double tol = 1e-9,
                             int threads = 1);

// Mono-static closed-loop inner bound: for each target E on a uniform sweep
// of [0, max_P phi], R(E) = min_s max { I(P, W_s) : phi(P) >= E }; the tuple
// union decomposes across states so each inner max is solved independently.
RegionCurve mono_closed_inner_region(const ChannelFamily& family, int resolution = 0,
                                     double tol = 1e-9, int e_samples = 200, int threads = 1);

// Corollary 3 closed-form frontier for the binary example.
RegionCurve corollary3_region(double p, double q, int num_alpha = 101);

// Envelope reduction shared by every region builder: sort by E, merge E-ties
// within tol_tie keeping the larger R, then drop points whose R is within
// tol_tie of a point with larger E.
std::vector<RegionPoint> pareto_envelope(std::vector<RegionPoint> pts, double tol_tie = 1e-9);

// CSV emission: '#'-prefixed preamble (kind, resolution, channel hash, other
// metadata), then header E_nats,R_nats. Values are always nats.
void write_region_csv(const RegionCurve& curve, std::ostream& os);
std::string region_csv_string(const RegionCurve& curve);

}  // namespace jcas

#endif
