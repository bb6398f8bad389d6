#include "wreathwalk/harmonic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "wreathwalk/error.hpp"
#include "wreathwalk/hash.hpp"

namespace wreathwalk {

HarmonicEvaluator::HarmonicEvaluator(BranchingProfile profile, PotentialField<double> field)
    : profile_(std::move(profile)), field_(std::move(field)) {
  if (field_.metric != Metric::Ball) throw ValidationError("harmonic evaluator needs a ball-metric field");
  if (field_.profile_digest != profile_.digest())
    throw ValidationError("potential field was solved for a different branching profile");
  if (field_.radius < 3) throw RangeError("harmonic evaluator needs field radius >= 3");
  if (field_.normalization == Normalization::OriginZero) {
    for (double& v : field_.values) v -= 0.5;
    field_.boundary_value -= 0.5;
    field_.normalization = Normalization::OriginMinusHalf;
  }
}

HarmonicEvaluator HarmonicEvaluator::solve(const BranchingProfile& profile, std::int64_t radius, double tol) {
  const FlattenedNetwork<double> net(profile, radius, radius);
  return {profile, solve_potential(net, radius, Metric::Ball, Normalization::OriginMinusHalf, tol)};
}

ProductVertex HarmonicEvaluator::orbit_point(const WreathElement& x, std::int64_t slack) const {
  const std::int64_t allowed = safe_radius() - slack;
  const ProductVertex p = act_product(profile_, x.word, kOrigin);
  const std::int64_t d = p.t.level + std::abs(p.z);
  if (d > allowed)
    throw RangeError("orbit point at distance " + std::to_string(d) + " needs field radius >= " +
                     std::to_string(d + 2 + slack) + " (have " + std::to_string(field_.radius) + ")");
  return p;
}

double harmonic_value(const HarmonicEvaluator& ev, const WreathElement& x) {
  const ProductVertex p = ev.orbit_point(x);
  const double a = ev.field().value(p.t.level, p.z);
  return x.lamp_at_origin() ? -a : a;
}

double wreath_laplacian(const HarmonicEvaluator& ev, const WreathElement& x) {
  ev.orbit_point(x, 1);
  const double here = harmonic_value(ev, x);
  double sum = 0.0;
  for (const auto& s : switch_or_move_generators(ev.profile()))
    sum += here - harmonic_value(ev, wreath_apply_generator(ev.profile(), x, s));
  return sum;
}

Word word_to(const BranchingProfile& profile, const ProductVertex& p) {
  Word w;
  TreeVertex v = p.t;
  while (v.level > 0) {
    w.letters.push_back(parent_color(profile, v));
    v = parent(profile, v);
  }
  std::reverse(w.letters.begin(), w.letters.end());
  w.zshift = p.z;
  return w;
}

namespace {

ProductVertex random_point(const BranchingProfile& profile, Stream& rng, std::int64_t radius) {
  const auto n = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(radius) + 1));
  const auto span = radius - n;
  const auto z = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(2 * span + 1))) - span;
  return {vertex_at(profile, n, static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(profile.ell(n))))), z};
}

}  // namespace

WreathElement random_element(const BranchingProfile& profile, Stream& rng, std::int64_t max_distance) {
  WreathElement x;
  const auto gens = switch_or_move_generators(profile);
  // skip the switch: lamps are drawn separately below
  for (std::int64_t step = 0; step < max_distance; ++step)
    wreath_apply_generator_inplace(profile, x, gens[1 + rng.below(gens.size() - 1)]);
  const auto extra = rng.below(9);
  for (std::uint64_t i = 0; i < extra; ++i) x.lamps.insert(random_point(profile, rng, max_distance));
  x.lamps.erase(kOrigin);
  if (rng.below(2) == 1) x.lamps.insert(kOrigin);
  return x;
}

std::uint64_t element_digest(const WreathElement& x) {
  std::uint64_t h = fnv1a(x.word.str());
  for (const auto& p : x.lamps) {
    const std::int64_t fields[3] = {p.t.level, static_cast<std::int64_t>(p.t.path), p.z};
    h = fnv1a_bytes(fields, sizeof fields, h);
  }
  return h;
}

std::vector<HarmonicRow> harmonicity_sample(const HarmonicEvaluator& ev, std::int64_t count, std::uint64_t seed) {
  if (count < 1) throw ValidationError("harmonicity_sample needs count >= 1");
  const std::int64_t reach = std::max<std::int64_t>(1, ev.safe_radius() / 2);
  std::vector<HarmonicRow> rows(static_cast<std::size_t>(count));
  parallel_for(rows.size(), [&](std::size_t i) {
    Stream rng(seed, i);
    // identity first: the only point where the switch changes h
    const WreathElement x = i == 0 ? WreathElement{} : random_element(ev.profile(), rng, 1 + rng.below(reach));
    const ProductVertex p = ev.orbit_point(x, 1);
    rows[i] = {element_digest(x), p.t.level, p.z, harmonic_value(ev, x), wreath_laplacian(ev, x)};
  });
  return rows;
}

std::vector<EnvelopeRow> growth_envelope_check(const HarmonicEvaluator& ev, const std::vector<std::int64_t>& radii,
                                               std::int64_t samples_per_radius, std::uint64_t seed) {
  if (samples_per_radius < 1) throw ValidationError("growth_envelope_check needs at least one sample per radius");
  std::vector<EnvelopeRow> out;
  for (std::size_t ri = 0; ri < radii.size(); ++ri) {
    const std::int64_t rho = radii[ri];
    if (rho < 1 || rho > ev.safe_radius())
      throw RangeError("envelope radius " + std::to_string(rho) + " needs field radius >= " + std::to_string(rho + 2));
    const FlattenedNetwork<double> net(ev.profile(), rho, rho);
    EnvelopeRow row;
    row.rho = rho;
    row.samples = samples_per_radius;
    row.resistance = effective_resistance(net, rho, std::max(ev.field().tol, 1e-14));
    row.min_abs_h = std::numeric_limits<double>::infinity();

    struct Sample {
      double abs_h;
      bool flip, far;
    };
    std::vector<Sample> samples(static_cast<std::size_t>(samples_per_radius));
    parallel_for(samples.size(), [&](std::size_t i) {
      Stream rng(seed ^ static_cast<std::uint64_t>(rho), i);
      const auto n = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(rho) + 1));
      const std::int64_t z = (rng.below(2) == 0 ? 1 : -1) * (rho - n);
      const TreeVertex t =
          vertex_at(ev.profile(), n, static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(ev.profile().ell(n)))));
      WreathElement x;
      x.word = word_to(ev.profile(), {t, z});
      const auto extra = rng.below(4);
      for (std::uint64_t k = 0; k < extra; ++k) x.lamps.insert(random_point(ev.profile(), rng, rho));
      x.lamps.erase(kOrigin);
      if (rng.below(2) == 1) x.lamps.insert(kOrigin);

      const double h = harmonic_value(ev, x);
      WreathElement flipped = x;
      if (!flipped.lamps.erase(kOrigin)) flipped.lamps.insert(kOrigin);
      WreathElement far = x;
      ProductVertex q = random_point(ev.profile(), rng, rho);
      if (q == kOrigin) q.z = 1;
      if (!far.lamps.erase(q)) far.lamps.insert(q);
      samples[i] = {std::abs(h), harmonic_value(ev, flipped) == -h, harmonic_value(ev, far) == h};
    });
    for (const auto& s : samples) {
      row.max_abs_h = std::max(row.max_abs_h, s.abs_h);
      row.min_abs_h = std::min(row.min_abs_h, s.abs_h);
      row.sign_flip_exact = row.sign_flip_exact && s.flip;
      row.far_lamps_exact = row.far_lamps_exact && s.far;
    }
    row.ratio = row.max_abs_h / row.resistance;
    row.oscillation = row.max_abs_h / row.min_abs_h;
    out.push_back(row);
  }
  return out;
}

std::vector<DoublingRow> doubling_convergence(const BranchingProfile& profile, const std::vector<std::int64_t>& radii,
                                              std::int64_t probe, double tol) {
  std::vector<DoublingRow> out;
  for (std::int64_t r : radii) {
    if (probe < 0 || probe > r) throw RangeError("doubling probe radius must lie in [0, r]");
    const FlattenedNetwork<double> net(profile, 2 * r, 2 * r);
    const auto small = solve_potential(net, r, Metric::Ball, Normalization::OriginMinusHalf, tol);
    const auto large = solve_potential(net, 2 * r, Metric::Ball, Normalization::OriginMinusHalf, tol);
    double change = 0.0;
    for (std::int64_t n = 0; n <= probe; ++n)
      for (std::int64_t z = 0; n + z <= probe; ++z)
        change = std::max(change, std::abs(large.value(n, z) - small.value(n, z)));
    out.push_back({r, change});
  }
  return out;
}

}  // namespace wreathwalk
