#pragma once

// The harmonic function on the lamplighter over G x Z built from the potential of F:
//
//   h(omega, g, m) = eps(omega) * a(o.(g, m)),   eps = +1 if the lamp at o is off, -1 if on,
//
// with a normalized so that a(o) = -1/2. The switch generator toggles the lamp at o only when
// o.(g, m) = o, and there 2 a(o) + (Delta a)(o) = -1 + 1 = 0, so h is harmonic for the
// switch-or-move random walk.

#include <cstdint>
#include <vector>

#include "wreathwalk/group.hpp"
#include "wreathwalk/network.hpp"
#include "wreathwalk/rng.hpp"

namespace wreathwalk {

class HarmonicEvaluator {
 public:
  /// Takes a ball-metric field solved for this profile; an origin-zero field is shifted to a(o) = -1/2.
  HarmonicEvaluator(BranchingProfile profile, PotentialField<double> field);

  /// Solves the ball field of the given radius and wraps it.
  static HarmonicEvaluator solve(const BranchingProfile& profile, std::int64_t radius, double tol = 1e-12);

  const BranchingProfile& profile() const { return profile_; }
  const PotentialField<double>& field() const { return field_; }
  std::int64_t safe_radius() const { return field_.radius - 2; }

  /// o.(g, m), with its distance level + |z| from o checked against safe_radius - slack.
  ProductVertex orbit_point(const WreathElement& x, std::int64_t slack = 0) const;

 private:
  BranchingProfile profile_;
  PotentialField<double> field_;
};

double harmonic_value(const HarmonicEvaluator& ev, const WreathElement& x);

/// Sum over switch-or-move generators s of h(x) - h(x s).
double wreath_laplacian(const HarmonicEvaluator& ev, const WreathElement& x);

/// Word w with o.w = (t, z): the edge colours along the tree path from the root, then the shift.
Word word_to(const BranchingProfile& profile, const ProductVertex& p);

/// Random element whose orbit point stays within max_distance of o: a random walk of
/// max_distance move/shift steps, plus up to 8 lamps in that ball and a fair coin for the lamp at o.
WreathElement random_element(const BranchingProfile& profile, Stream& rng, std::int64_t max_distance);

/// Stable hash of an element's word and lamp set.
std::uint64_t element_digest(const WreathElement& x);

struct HarmonicRow {
  std::uint64_t digest = 0;
  std::int64_t level = 0;
  std::int64_t z = 0;
  double h = 0;
  double residual = 0;
};

/// Harmonicity residuals at `count` random admissible elements.
std::vector<HarmonicRow> harmonicity_sample(const HarmonicEvaluator& ev, std::int64_t count, std::uint64_t seed);

struct EnvelopeRow {
  std::int64_t rho = 0;
  std::int64_t samples = 0;
  double max_abs_h = 0;
  double min_abs_h = 0;
  double resistance = 0;  // Res(rho) of the ball in F
  double ratio = 0;       // max_abs_h / resistance
  double oscillation = 0; // max_abs_h / min_abs_h
  bool sign_flip_exact = true;
  bool far_lamps_exact = true;
};

/// For each rho, samples elements whose orbit point lies on the rho-sphere of T x Z.
std::vector<EnvelopeRow> growth_envelope_check(const HarmonicEvaluator& ev, const std::vector<std::int64_t>& radii,
                                               std::int64_t samples_per_radius, std::uint64_t seed);

struct DoublingRow {
  std::int64_t radius = 0;
  double max_change = 0;  // max |a_{2r} - a_r| over the probe ball, both normalized a(o) = -1/2
};

/// Pointwise convergence of a_r as the field radius doubles, probed on {level + |z| <= probe}.
std::vector<DoublingRow> doubling_convergence(const BranchingProfile& profile, const std::vector<std::int64_t>& radii,
                                              std::int64_t probe, double tol = 1e-12);

}  // namespace wreathwalk
