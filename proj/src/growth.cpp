#include "wreathwalk/growth.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "wreathwalk/error.hpp"

namespace wreathwalk {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double interpolate_log(const GrowthTable& t, const std::vector<double>& values, double x) {
  if (t.x.empty() || x < t.x.front() || x > t.x.back()) return kNaN;
  auto it = std::upper_bound(t.x.begin(), t.x.end(), x);
  if (it == t.x.end()) return values.back();
  const auto hi = static_cast<std::size_t>(it - t.x.begin());
  const std::size_t lo = hi - 1;
  const double u = (std::log(x) - std::log(t.x[lo])) / (std::log(t.x[hi]) - std::log(t.x[lo]));
  return values[lo] + u * (values[hi] - values[lo]);
}

double log_squared_cap(std::int64_t n) {
  const double l = std::log(8.0 * static_cast<double>(n));
  return l * l;
}

// Same minimum as eval_w2 with the default k_max, but stops as soon as no later k can win.
// For y = n 2^-k >= 1 the term equals 2^k / (y f'(y)) and y f'(y) <= f'(1) because x f'(x)
// is non-increasing; below 1 the term is exactly 2^k / f'(1). Hence term_k >= 2^k / f'(1).
double w2_pruned(const GrowthSpec& spec, std::int64_t n, double fprime_one) {
  double best = log_squared_cap(n);
  const double dn = static_cast<double>(n);
  for (int k = 0;; ++k) {
    const double floor_k = std::ldexp(1.0, k) / fprime_one;
    if (floor_k >= best) break;
    const double fp = spec.fprime(std::ldexp(dn, -k));
    if (!std::isfinite(fp) || fp <= 0.0) {
      throw EvaluationError("f' is " + std::to_string(fp) + " at n=" + std::to_string(n) +
                            ", k=" + std::to_string(k));
    }
    best = std::min(best, std::ldexp(1.0, 2 * k) / (dn * fp));
  }
  return best;
}

// Whether w2(n) >= threshold (up to the rounding slack used for the power-of-two floor),
// stopping at the first term that falls below it.
bool w2_at_least(const GrowthSpec& spec, std::int64_t n, double fprime_one, double threshold) {
  const double t = threshold * (1.0 - 1e-12);
  if (log_squared_cap(n) < t) return false;
  const double dn = static_cast<double>(n);
  for (int k = 0; std::ldexp(1.0, k) / fprime_one < t; ++k) {
    const double fp = spec.fprime(std::ldexp(dn, -k));
    if (!std::isfinite(fp) || fp <= 0.0) return true;  // let w2_pruned report it
    if (std::ldexp(1.0, 2 * k) / (dn * fp) < t) return false;
  }
  return true;
}

// sum_{n=a}^{b} 1/n
double harmonic_range(std::int64_t a, std::int64_t b) {
  if (b < a) return 0.0;
  constexpr std::int64_t kDirect = 8192;
  double total = 0.0;
  if (a < kDirect) {
    const std::int64_t stop = std::min(b, kDirect - 1);
    for (std::int64_t n = stop; n >= a; --n) total += 1.0 / static_cast<double>(n);
    a = stop + 1;
    if (a > b) return total;
  }
  auto H = [](double n) {
    const double inv = 1.0 / n, inv2 = inv * inv;
    return std::log(n) + 0.57721566490153286061 + 0.5 * inv -
           inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 / 252.0));
  };
  return total + (H(static_cast<double>(b)) - H(static_cast<double>(a - 1)));
}

}  // namespace

// --- GrowthSpec --------------------------------------------------------------------------

GrowthSpec GrowthSpec::log(double scale) { return {GrowthFamily::Log, 1.0, scale, nullptr}; }

GrowthSpec GrowthSpec::log_power(double alpha, double scale) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ValidationError("LogPower exponent must lie in (0, 1]");
  return {GrowthFamily::LogPower, alpha, scale, nullptr};
}

GrowthSpec GrowthSpec::log_log(double scale) { return {GrowthFamily::LogLog, 1.0, scale, nullptr}; }

GrowthSpec GrowthSpec::custom(GrowthTable table, double scale) {
  if (table.x.empty() || table.x.size() != table.f.size() || table.x.size() != table.fprime.size())
    throw ValidationError("custom growth table needs equally long x, f, f' columns");
  if (table.x.front() != 1.0) throw ValidationError("custom growth table must start at x = 1");
  if (!std::is_sorted(table.x.begin(), table.x.end()) ||
      std::adjacent_find(table.x.begin(), table.x.end()) != table.x.end())
    throw ValidationError("custom growth table x column must be strictly increasing");
  return {GrowthFamily::Custom, 1.0, scale, std::make_shared<const GrowthTable>(std::move(table))};
}

double GrowthSpec::f(double x) const {
  if (!(x > 0.0)) return kNaN;
  if (x < 1.0) return f(1.0) + fprime(1.0) * std::log(x);
  const double l = std::log(x);
  switch (family) {
    case GrowthFamily::Log: return scale * (1.0 + l);
    case GrowthFamily::LogPower: return scale * std::pow(1.0 + l, alpha);
    case GrowthFamily::LogLog: return scale * (1.0 + std::log1p(l));
    case GrowthFamily::Custom: return scale * interpolate_log(*table, table->f, x);
  }
  return kNaN;
}

double GrowthSpec::fprime(double x) const {
  if (!(x > 0.0)) return kNaN;
  if (x < 1.0) return fprime(1.0) / x;
  const double l = std::log(x);
  switch (family) {
    case GrowthFamily::Log: return scale / x;
    case GrowthFamily::LogPower: return scale * alpha * std::pow(1.0 + l, alpha - 1.0) / x;
    case GrowthFamily::LogLog: return scale / (x * (1.0 + l));
    case GrowthFamily::Custom: return scale * interpolate_log(*table, table->fprime, x);
  }
  return kNaN;
}

std::string GrowthSpec::name() const {
  std::ostringstream os;
  switch (family) {
    case GrowthFamily::Log: os << "log"; break;
    case GrowthFamily::LogPower: os << "logpower(" << alpha << ")"; break;
    case GrowthFamily::LogLog: os << "loglog"; break;
    case GrowthFamily::Custom: os << "custom"; break;
  }
  if (scale != 1.0) os << "*" << scale;
  return os.str();
}

// --- BranchingProfile --------------------------------------------------------------------

BranchingProfile::BranchingProfile(std::vector<std::int64_t> branch_levels, std::int64_t max_level,
                                   std::vector<int> degrees)
    : levels_(std::move(branch_levels)), degrees_(std::move(degrees)), max_level_(max_level) {
  if (max_level_ < 0) throw ValidationError("max_level must be non-negative");
  if (degrees_.empty()) degrees_.assign(levels_.size(), 3);
  if (degrees_.size() != levels_.size())
    throw ValidationError("degree sequence length differs from branch level count");
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    if (levels_[i] < 0 || levels_[i] > max_level_)
      throw ValidationError("branch level " + std::to_string(levels_[i]) + " outside [0, max_level]");
    if (i > 0 && levels_[i] <= levels_[i - 1])
      throw ValidationError("branch levels must be strictly increasing");
    if (i > 0 && levels_[i] == levels_[i - 1] + 1)
      throw ValidationError("adjacent branch levels leave no room for a proper colouring");
    if (degrees_[i] < 3 || degrees_[i] > 16)
      throw ValidationError("branch degree " + std::to_string(degrees_[i]) + " outside [3, 16]");
  }
  unsigned offset = 0;
  std::int64_t ell = 1;
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    const auto width = static_cast<unsigned>(std::bit_width(static_cast<unsigned>(degrees_[i] - 2)));
    offsets_.push_back(offset);
    widths_.push_back(width);
    offset += width;
    if (offset > 64) throw ValidationError("too many branch levels to address vertices in 64 bits");
    if (ell > (std::int64_t{1} << 58) / (degrees_[i] - 1)) throw ValidationError("sphere sizes overflow");
    ell *= degrees_[i] - 1;
    ell_after_.push_back(ell);
  }
  if (max_level_ < (std::int64_t{1} << 22)) {
    level_table_.assign(static_cast<std::size_t>(max_level_) + 2, std::int8_t{-1});
    for (std::size_t i = 0; i < levels_.size(); ++i)
      level_table_[static_cast<std::size_t>(levels_[i])] = static_cast<std::int8_t>(i);
  }
}

int BranchingProfile::max_degree() const {
  return degrees_.empty() ? 2 : *std::max_element(degrees_.begin(), degrees_.end());
}

int BranchingProfile::branch_index_slow(std::int64_t level) const {
  auto it = std::lower_bound(levels_.begin(), levels_.end(), level);
  if (it == levels_.end() || *it != level) return -1;
  return static_cast<int>(it - levels_.begin());
}

std::size_t BranchingProfile::branches_below(std::int64_t level) const {
  return static_cast<std::size_t>(std::lower_bound(levels_.begin(), levels_.end(), level) - levels_.begin());
}

std::int64_t BranchingProfile::ell(std::int64_t n) const {
  if (n < 0 || n > max_level_ + 1)
    throw RangeError("ell(" + std::to_string(n) + ") outside [0, " + std::to_string(max_level_ + 1) + "]");
  const std::size_t k = branches_below(n);
  return k == 0 ? 1 : ell_after_[k - 1];
}

std::uint64_t BranchingProfile::digest() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xFF;
      h *= 0x100000001b3ULL;
    }
  };
  mix(static_cast<std::uint64_t>(max_level_));
  mix(levels_.size());
  for (auto b : levels_) mix(static_cast<std::uint64_t>(b));
  for (auto d : degrees_) mix(static_cast<std::uint64_t>(d));
  return h;
}

BranchingProfile BranchingProfile::truncated(std::int64_t max_level) const {
  std::vector<std::int64_t> levels;
  std::vector<int> degrees;
  for (std::size_t i = 0; i < levels_.size() && levels_[i] <= max_level; ++i) {
    levels.push_back(levels_[i]);
    degrees.push_back(degrees_[i]);
  }
  return BranchingProfile(std::move(levels), max_level, std::move(degrees));
}

// --- synthesis ---------------------------------------------------------------------------

double eval_w2(const GrowthSpec& spec, std::int64_t n, int k_max) {
  if (n < 1) throw RangeError("eval_w2 needs n >= 1");
  if (k_max < 0) k_max = static_cast<int>(std::ceil(std::log2(static_cast<double>(n)))) + 60;
  if (k_max < 1) throw RangeError("eval_w2 needs k_max >= 1");
  const double dn = static_cast<double>(n);
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= k_max; ++k) {
    const double fp = spec.fprime(std::ldexp(dn, -k));
    if (!std::isfinite(fp) || fp <= 0.0) {
      throw EvaluationError("f' is " + std::to_string(fp) + " at n=" + std::to_string(n) +
                            ", k=" + std::to_string(k));
    }
    best = std::min(best, std::ldexp(1.0, 2 * k) / (dn * fp));
  }
  return std::min(best, log_squared_cap(n));
}

void validate_growth(const GrowthSpec& spec, std::int64_t upto) {
  std::vector<double> grid;
  const std::int64_t dense = std::min<std::int64_t>(upto, 4096);
  for (std::int64_t n = 1; n <= dense; ++n) grid.push_back(static_cast<double>(n));
  for (double x = static_cast<double>(dense) * 1.01; x < static_cast<double>(upto); x *= 1.01)
    grid.push_back(std::floor(x));
  if (upto > dense) grid.push_back(static_cast<double>(upto));
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  double prev_f = -std::numeric_limits<double>::infinity();
  double prev_xfp = std::numeric_limits<double>::infinity();
  for (double x : grid) {
    const double fx = spec.f(x), fp = spec.fprime(x);
    auto fail = [&](const char* what) {
      std::ostringstream os;
      os << "growth spec " << spec.name() << ": " << what << " at n = " << static_cast<std::int64_t>(x);
      throw ValidationError(os.str());
    };
    if (!std::isfinite(fx) || !std::isfinite(fp)) fail("f or f' not finite");
    if (fp <= 0.0) fail("f' not positive");
    if (!(fx > prev_f)) fail("f not strictly increasing");
    const double xfp = x * fp;
    if (xfp > prev_xfp * (1.0 + 1e-12)) fail("x f'(x) increasing");
    prev_f = fx;
    prev_xfp = xfp;
  }
}

BranchingProfile synthesize_branching(const GrowthSpec& spec, std::int64_t N, SynthesisOptions options) {
  if (N < 2) throw RangeError("synthesize_branching needs N >= 2");
  validate_growth(spec, N + 1);
  const double fprime_one = spec.fprime(1.0);

  // first[j-1] = first n at which the running maximum of w2 reaches 2^j.
  std::vector<std::int64_t> first;
  int reached = 0;
  for (std::int64_t n = 1; n <= N + 1; ++n) {
    if (!w2_at_least(spec, n, fprime_one, std::ldexp(1.0, reached + 1))) continue;
    const double w = w2_pruned(spec, n, fprime_one);
    // 1e-12 keeps values that are a power of two up to rounding on the upper side.
    const int e = static_cast<int>(std::floor(std::log2(w) + 1e-12));
    while (reached < e) {
      ++reached;
      first.push_back(n);
    }
  }

  std::vector<std::int64_t> levels;
  for (std::int64_t hit : first) {
    std::int64_t b = hit - 1;
    if (!options.allow_root_branch) b = std::max<std::int64_t>(b, 1);
    if (!levels.empty()) b = std::max({b, 2 * levels.back() + 1, levels.back() + 2});
    if (b > N) break;
    levels.push_back(b);
  }
  return BranchingProfile(std::move(levels), N);
}

double analytic_resistance_sum(const BranchingProfile& profile, std::int64_t N) {
  if (N < 0 || N > profile.max_level())
    throw RangeError("analytic_resistance_sum: N=" + std::to_string(N) + " outside [0, max_level]");
  double total = 0.0;
  std::int64_t start = 1;
  for (std::int64_t b : profile.branch_levels()) {
    if (start > N) break;
    const std::int64_t cut = b + 1;  // ell changes at level b + 1
    if (cut <= start) continue;
    const std::int64_t end = std::min(cut - 1, N);
    total += harmonic_range(start, end) / static_cast<double>(profile.ell(start));
    start = end + 1;
  }
  if (start <= N) total += harmonic_range(start, N) / static_cast<double>(profile.ell(start));
  return total;
}

// --- validation --------------------------------------------------------------------------

bool ProfileReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const ProfileCheck& c) { return c.passed; });
}

const ProfileCheck* ProfileReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

ProfileReport validate_profile(const BranchingProfile& profile) {
  namespace cn = check_names;
  const std::int64_t N = profile.max_level();
  ProfileReport report;
  auto add = [&report](const char* name, std::int64_t first_bad, const std::string& what) {
    ProfileCheck c{name, first_bad < 0, ""};
    if (!c.passed) c.detail = what + " first fails at " + std::to_string(first_bad);
    report.checks.push_back(std::move(c));
  };
  auto first_failure = [&](auto&& ok, std::int64_t from, std::int64_t to) -> std::int64_t {
    for (std::int64_t n = from; n <= to; ++n)
      if (!ok(n)) return n;
    return -1;
  };
  auto at = [&profile](std::int64_t n) { return profile.ell(n); };

  add(cn::kPowerOfTwo, first_failure([&](std::int64_t n) { return std::has_single_bit(static_cast<std::uint64_t>(at(n))); }, 1, N), "n =");
  add(cn::kMonotone, first_failure([&](std::int64_t n) { return at(n) >= at(n - 1); }, 1, N), "n =");
  add(cn::kDoubling, first_failure([&](std::int64_t n) { return at(2 * n) <= 2 * at(n); }, 1, N / 2), "n =");

  const auto levels = profile.branch_levels();
  std::int64_t bad_sep = -1;
  for (std::size_t i = 1; i < levels.size(); ++i) {
    if (levels[i] <= 2 * levels[i - 1]) {
      bad_sep = static_cast<std::int64_t>(i);
      break;
    }
  }
  {
    ProfileCheck c{cn::kSeparation, bad_sep < 0, ""};
    if (!c.passed) {
      const auto i = static_cast<std::size_t>(bad_sep);
      c.detail = "b = " + std::to_string(levels[i]) + " <= 2 * " + std::to_string(levels[i - 1]);
    }
    report.checks.push_back(std::move(c));
  }

  const bool binary = std::all_of(profile.degrees().begin(), profile.degrees().end(), [](int d) { return d == 3; });
  if (binary) {
    add(cn::kDoublesAtBranch,
        first_failure([&](std::int64_t n) {
          const bool branch = profile.branch_index(n - 1) >= 0;
          return at(n) == (branch ? 2 : 1) * at(n - 1);
        }, 1, N),
        "n =");
  } else {
    report.checks.push_back({cn::kDoublesAtBranch, true, "skipped: degree sequence is not constant 3"});
  }

  add(cn::kSubpolynomial, first_failure([&](std::int64_t n) { return static_cast<double>(at(n)) <= log_squared_cap(n); }, 1, N), "n =");

  std::int64_t bad_volume = -1;
  std::int64_t volume = 1;
  for (std::int64_t r = 1; r <= N; ++r) {
    volume += at(r);
    if (static_cast<double>(volume) > static_cast<double>(r) * log_squared_cap(r)) {
      bad_volume = r;
      break;
    }
  }
  add(cn::kVolume, bad_volume, "r =");
  return report;
}

// --- CSV ---------------------------------------------------------------------------------

void write_profile_csv(std::ostream& out, const BranchingProfile& profile) {
  nlohmann::json header;
  header["branch_levels"] = std::vector<std::int64_t>(profile.branch_levels().begin(), profile.branch_levels().end());
  header["degrees"] = std::vector<int>(profile.degrees().begin(), profile.degrees().end());
  header["max_level"] = profile.max_level();
  out << "# " << header.dump() << "\n";
  out << "n,ell\n";
  std::int64_t ell = 1;
  std::size_t next = 0;
  const auto levels = profile.branch_levels();
  for (std::int64_t n = 1; n <= profile.max_level(); ++n) {
    while (next < levels.size() && levels[next] < n) ell = profile.ell(levels[next++] + 1);
    out << n << "," << ell << "\n";
  }
}

BranchingProfile read_profile_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("# ", 0) != 0)
    throw ValidationError("profile CSV must start with a '# {json}' header line");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line.substr(2));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("profile CSV header: ") + e.what());
  }
  BranchingProfile profile(header.at("branch_levels").get<std::vector<std::int64_t>>(),
                           header.at("max_level").get<std::int64_t>(),
                           header.value("degrees", std::vector<int>{}));
  if (!std::getline(in, line) || line != "n,ell") throw ValidationError("profile CSV missing 'n,ell' column header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    const std::int64_t n = std::stoll(line.substr(0, comma));
    const std::int64_t ell = std::stoll(line.substr(comma + 1));
    if (n < 1 || n > profile.max_level() || profile.ell(n) != ell)
      throw ValidationError("profile CSV row n=" + std::to_string(n) + " disagrees with its header");
  }
  return profile;
}

}  // namespace wreathwalk
