#pragma once

// Growth functions and the branching profiles synthesized from them.
//
// A profile is a spherically symmetric tree given by its branch levels b_1 < b_2 < ...
// and the degree d_i of the branch points at those levels. The number of vertices at
// level n is ell(n) = prod_{b_i < n} (d_i - 1); with all degrees 3 this doubles at each
// level b_i + 1.

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace wreathwalk {

enum class GrowthFamily { Log, LogPower, LogLog, Custom };

/// Tabulated f and f' on a grid starting at x = 1. Values between grid points are
/// interpolated linearly in ln x.
struct GrowthTable {
  std::vector<double> x;
  std::vector<double> f;
  std::vector<double> fprime;
};

/// A growth function f together with f'.
///
///   Log:          f(x) = scale * (1 + ln x)
///   LogPower(a):  f(x) = scale * (1 + ln x)^a,   0 < a <= 1
///   LogLog:       f(x) = scale * (1 + ln(1 + ln x))
///   Custom:       scale * tabulated values
///
/// Below x = 1 every family is continued as f(1) + f'(1) ln x.
struct GrowthSpec {
  GrowthFamily family = GrowthFamily::Log;
  double alpha = 1.0;
  double scale = 1.0;
  std::shared_ptr<const GrowthTable> table;

  static GrowthSpec log(double scale = 1.0);
  static GrowthSpec log_power(double alpha, double scale = 1.0);
  static GrowthSpec log_log(double scale = 1.0);
  static GrowthSpec custom(GrowthTable table, double scale = 1.0);

  double f(double x) const;
  double fprime(double x) const;
  std::string name() const;
};

class BranchingProfile {
 public:
  /// branch_levels strictly increasing, each in [0, max_level]. A branch level 0 makes the
  /// root a branch point. degrees defaults to 3 everywhere; each degree must lie in [3, 16].
  BranchingProfile(std::vector<std::int64_t> branch_levels, std::int64_t max_level,
                   std::vector<int> degrees = {});

  /// A ray: no branch points.
  static BranchingProfile ray(std::int64_t max_level) { return BranchingProfile({}, max_level); }

  std::int64_t max_level() const { return max_level_; }
  std::span<const std::int64_t> branch_levels() const { return levels_; }
  std::span<const int> degrees() const { return degrees_; }
  int degree(std::size_t i) const { return degrees_[i]; }
  int max_degree() const;
  bool root_branches() const { return !levels_.empty() && levels_.front() == 0; }

  /// Sphere size at level n >= 0 (ell(0) = 1). Defined up to max_level + 1.
  std::int64_t ell(std::int64_t n) const;

  /// Index i with b_i == level, or -1.
  int branch_index(std::int64_t level) const {
    if (!level_table_.empty()) {
      return (level >= 0 && level < static_cast<std::int64_t>(level_table_.size()))
                 ? level_table_[static_cast<std::size_t>(level)]
                 : -1;
    }
    return branch_index_slow(level);
  }
  /// #{i : b_i < level}.
  std::size_t branches_below(std::int64_t level) const;

  // Child choices are packed into a 64-bit path word; branch i owns a bit field.
  unsigned choice_offset(std::size_t i) const { return offsets_[i]; }
  unsigned choice_width(std::size_t i) const { return widths_[i]; }

  /// Stable digest of (branch levels, degrees, max level).
  std::uint64_t digest() const;

  /// Copy with a different materialized depth; branch levels beyond it are dropped.
  BranchingProfile truncated(std::int64_t max_level) const;

  friend bool operator==(const BranchingProfile& a, const BranchingProfile& b) {
    return a.max_level_ == b.max_level_ && a.levels_ == b.levels_ && a.degrees_ == b.degrees_;
  }

 private:
  int branch_index_slow(std::int64_t level) const;

  std::vector<std::int64_t> levels_;
  std::vector<int> degrees_;
  std::int64_t max_level_;
  std::vector<std::int64_t> ell_after_;  // ell(b_i + 1)
  std::vector<unsigned> offsets_, widths_;
  std::vector<std::int8_t> level_table_;
};

struct SynthesisOptions {
  bool allow_root_branch = false;
};

/// min over 0 <= k <= k_max of 4^k / (n f'(n 2^-k)), capped by ln^2(8n).
/// k_max < 0 selects ceil(log2 n) + 60. Throws EvaluationError when f' is zero, negative
/// or non-finite at some probe.
double eval_w2(const GrowthSpec& spec, std::int64_t n, int k_max = -1);

/// Checks that f is strictly increasing and x f'(x) non-increasing on a grid covering
/// [1, upto]. Throws ValidationError naming the first offending grid point.
void validate_growth(const GrowthSpec& spec, std::int64_t upto);

/// Branching profile with max_level N whose ell tracks the running maximum of eval_w2
/// rounded down to a power of two, repaired so that b_{i+1} >= 2 b_i + 1.
BranchingProfile synthesize_branching(const GrowthSpec& spec, std::int64_t N,
                                      SynthesisOptions options = {});

/// sum_{n=1}^{N} 1 / (n ell(n)).
double analytic_resistance_sum(const BranchingProfile& profile, std::int64_t N);

struct ProfileCheck {
  std::string name;
  bool passed = true;
  std::string detail;
};

struct ProfileReport {
  std::vector<ProfileCheck> checks;
  bool all_passed() const;
  const ProfileCheck* find(const std::string& name) const;
};

namespace check_names {
inline constexpr const char* kPowerOfTwo = "ell(n) is a power of two";
inline constexpr const char* kMonotone = "ell non-decreasing";
inline constexpr const char* kDoubling = "ell(2n) <= 2 ell(n)";
inline constexpr const char* kSeparation = "b_{i+1} > 2b_i";
inline constexpr const char* kDoublesAtBranch = "ell doubles exactly at b_i + 1";
inline constexpr const char* kSubpolynomial = "ell(n) <= ln^2(8n)";
inline constexpr const char* kVolume = "|B(o,r)| <= r ln^2(8r)";
}  // namespace check_names

ProfileReport validate_profile(const BranchingProfile& profile);

/// CSV with a leading "# {json}" header line carrying branch levels and degrees,
/// followed by "n,ell" rows for n = 1..max_level.
void write_profile_csv(std::ostream& out, const BranchingProfile& profile);
BranchingProfile read_profile_csv(std::istream& in);

}  // namespace wreathwalk
