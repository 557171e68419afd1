#include "qrc/ipc.hpp"

#include "qrc/csv.hpp"
#include "qrc/rng.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

namespace qrc {

double legendre(int degree, double x) {
  if (degree < 0) throw Error("Legendre degree must be >= 0");
  if (degree == 0) return 1.0;
  double prev = 1.0;
  double cur = x;
  for (int n = 1; n < degree; ++n) {
    const double next = ((2.0 * n + 1.0) * x * cur - n * prev) / (n + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

int TargetSpec::degree() const {
  int d = 0;
  for (const auto& t : terms) d += t.degree;
  return d;
}

int TargetSpec::max_delay() const {
  int m = 0;
  for (const auto& t : terms) m = std::max(m, t.delay);
  return m;
}

int TargetSpec::min_delay() const {
  if (terms.empty()) return 0;
  int m = terms.front().delay;
  for (const auto& t : terms) m = std::min(m, t.delay);
  return m;
}

std::string TargetSpec::str() const {
  std::string out;
  for (const auto& t : terms) {
    if (!out.empty()) out += ',';
    out += std::to_string(t.delay) + ':' + std::to_string(t.degree);
  }
  return out;
}

void TargetSpec::validate() const {
  if (terms.empty()) throw Error("empty target spec");
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (terms[i].delay < 1) throw Error("target delays must be >= 1");
    if (terms[i].degree < 1) throw Error("target degrees must be >= 1");
    for (std::size_t j = 0; j < i; ++j) {
      if (terms[j].delay == terms[i].delay) throw Error("target delays must be distinct");
    }
  }
}

TargetSpec TargetSpec::of(std::vector<TargetTerm> terms) {
  std::sort(terms.begin(), terms.end(), [](const TargetTerm& a, const TargetTerm& b) { return a.delay < b.delay; });
  TargetSpec spec{std::move(terms)};
  spec.validate();
  return spec;
}

std::vector<double> build_target(const TargetSpec& spec, std::span<const double> inputs) {
  spec.validate();
  const auto history = static_cast<std::size_t>(spec.max_delay());
  if (inputs.size() <= history) throw Error("input sequence shorter than the target's delay");
  std::vector<double> y(inputs.size() - history, 1.0);
  for (std::size_t k = history; k < inputs.size(); ++k) {
    double v = 1.0;
    for (const auto& t : spec.terms) v *= legendre(t.degree, 2.0 * inputs[k - static_cast<std::size_t>(t.delay)] - 1.0);
    y[k - history] = v;
  }
  return y;
}

RealVector build_target(const TargetSpec& spec, std::span<const double> inputs, std::size_t first_time,
                        std::size_t rows) {
  spec.validate();
  const auto history = static_cast<std::size_t>(spec.max_delay());
  if (first_time < history) throw Error("readout starts before the target's history is available");
  if (first_time + rows > inputs.size() + 1) throw Error("readout rows extend past the input sequence");
  RealVector y(static_cast<Eigen::Index>(rows));
  for (std::size_t r = 0; r < rows; ++r) {
    double v = 1.0;
    for (const auto& t : spec.terms) {
      v *= legendre(t.degree, 2.0 * inputs[first_time + r - static_cast<std::size_t>(t.delay)] - 1.0);
    }
    y(static_cast<Eigen::Index>(r)) = v;
  }
  return y;
}

namespace {

RealMatrix with_bias(const RealMatrix& x) {
  RealMatrix b(x.rows(), x.cols() + 1);
  b.leftCols(x.cols()) = x;
  b.col(x.cols()).setOnes();
  return b;
}

struct TruncatedSvd {
  RealMatrix u;      // rows x r
  RealMatrix w_map;  // cols x r, V Sigma^-1
};

TruncatedSvd truncated_svd(const RealMatrix& b, double rcond) {
  Eigen::BDCSVD<RealMatrix> svd(b, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RealVector& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) throw Error("design matrix is zero");
  Eigen::Index r = 0;
  while (r < s.size() && s(r) > rcond * s(0)) ++r;
  TruncatedSvd out;
  out.u = svd.matrixU().leftCols(r);
  out.w_map = svd.matrixV().leftCols(r) * s.head(r).cwiseInverse().asDiagonal();
  return out;
}

}  // namespace

LinearReadout LinearReadout::train(const RealMatrix& x, const RealVector& y, double rcond) {
  if (x.rows() != y.size()) throw Error("readout and target lengths differ");
  if (x.rows() < x.cols() + 1) throw Error("fewer rows than weights");
  if (y.cwiseAbs().maxCoeff() == 0.0) throw Error("degenerate all-zero target");
  const auto svd = truncated_svd(with_bias(x), rcond);
  LinearReadout out;
  out.weights_ = svd.w_map * (svd.u.transpose() * y);
  return out;
}

RealVector LinearReadout::predict(const RealMatrix& x) const {
  if (x.cols() + 1 != weights_.size()) throw Error("readout width does not match the trained weights");
  return x * weights_.head(x.cols()) + RealVector::Constant(x.rows(), weights_(x.cols()));
}

double raw_capacity(std::span<const double> prediction, std::span<const double> target) {
  if (prediction.size() != target.size() || target.empty()) throw Error("capacity needs equal, nonzero lengths");
  double err = 0.0;
  double power = 0.0;
  for (std::size_t k = 0; k < target.size(); ++k) {
    err += (prediction[k] - target[k]) * (prediction[k] - target[k]);
    power += target[k] * target[k];
  }
  if (power == 0.0) throw Error("zero-power target");
  return 1.0 - err / power;
}

double capacity(std::span<const double> prediction, std::span<const double> target) {
  return std::max(0.0, raw_capacity(prediction, target));
}

void IpcSettings::validate() const {
  if (d_max < 1) throw Error("d_max must be >= 1");
  if (max_delay_linear < 1 || max_delay < 1) throw Error("maximal delays must be >= 1");
  if (stop_after < 1) throw Error("stop_after must be >= 1");
  if (surrogates < 2) throw Error("need at least two surrogates");
  if (min_shift < 1) throw Error("min_shift must be >= 1");
  if (!(sigmas >= 0.0) || !(stop_sigmas >= 0.0)) throw Error("threshold sigmas must be non-negative");
  if (max_targets_per_degree < 1) throw Error("max_targets_per_degree must be >= 1");
}

double CapacityReport::odd_degree_sum() const {
  double s = 0.0;
  for (std::size_t d = 0; d < per_degree.size(); d += 2) s += per_degree[d];
  return s;
}

double CapacityReport::odd_threshold_sum() const {
  double s = 0.0;
  for (std::size_t d = 0; d < threshold_sum.size(); d += 2) s += threshold_sum[d];
  return s;
}

CapacityScorer::CapacityScorer(const RealMatrix& x_train, const RealMatrix& x_test, std::vector<int> shifts,
                               double rcond)
    : shifts_(std::move(shifts)) {
  if (x_train.rows() != x_test.rows() || x_train.cols() != x_test.cols()) {
    throw Error("train and test segments must have the same shape");
  }
  if (x_train.rows() < x_train.cols() + 1) throw Error("insufficient data rows for the readout width");
  for (int k : shifts_) {
    if (k <= 0 || k >= x_train.rows()) throw Error("surrogate shift out of range");
  }
  auto svd = truncated_svd(with_bias(x_train), rcond);
  u_ = std::move(svd.u);
  w_map_ = std::move(svd.w_map);
  b_test_ = with_bias(x_test);
  gram_ = b_test_.transpose() * b_test_;
}

namespace {

// Columns: a^T roll(y, k), roll(y, k)[t] = y[(t + k) mod L].
RealMatrix rolled_product(const RealMatrix& a, const RealMatrix& y, int k) {
  if (k == 0) return a.transpose() * y;
  const Eigen::Index L = a.rows();
  RealMatrix out = a.topRows(L - k).transpose() * y.bottomRows(L - k);
  out.noalias() += a.bottomRows(k).transpose() * y.topRows(k);
  return out;
}

}  // namespace

std::vector<TargetCapacity> CapacityScorer::score(const RealMatrix& y_train, const RealMatrix& y_test,
                                                  double sigmas) const {
  if (y_train.rows() != u_.rows() || y_test.rows() != b_test_.rows() || y_train.cols() != y_test.cols()) {
    throw Error("target batch does not match the readout split");
  }
  const Eigen::Index T = y_train.cols();
  const RealVector power = y_test.colwise().squaredNorm().transpose();
  for (Eigen::Index t = 0; t < T; ++t) {
    if (power(t) == 0.0) throw Error("zero-power target");
  }
  const std::size_t R = shifts_.size();
  RealMatrix caps(T, static_cast<Eigen::Index>(R + 1));
  for (std::size_t s = 0; s <= R; ++s) {
    const int k = s == 0 ? 0 : shifts_[s - 1];
    const RealMatrix w = w_map_ * rolled_product(u_, y_train, k);
    const RealMatrix h = rolled_product(b_test_, y_test, k);
    const RealMatrix gw = gram_ * w;
    // ||B w - y||^2 = w^T G w - 2 w^T h + ||y||^2, and ||roll(y)|| = ||y||.
    const RealVector explained = (2.0 * w.cwiseProduct(h) - w.cwiseProduct(gw)).colwise().sum().transpose();
    caps.col(static_cast<Eigen::Index>(s)) = explained.cwiseQuotient(power);
  }
  std::vector<TargetCapacity> out(static_cast<std::size_t>(T));
  for (Eigen::Index t = 0; t < T; ++t) {
    auto& c = out[static_cast<std::size_t>(t)];
    c.capacity = caps(t, 0);
    const RealVector sur = caps.row(t).tail(static_cast<Eigen::Index>(R)).transpose();
    c.surrogate_mean = sur.mean();
    c.surrogate_std = std::sqrt((sur.array() - c.surrogate_mean).square().sum() / static_cast<double>(R - 1));
    c.threshold = c.surrogate_mean + sigmas * c.surrogate_std;
    c.retained = c.capacity > c.threshold && c.capacity > 0.0;
  }
  return out;
}

std::vector<int> draw_surrogate_shifts(std::size_t length, const IpcSettings& settings) {
  const auto L = static_cast<long>(length);
  if (L - settings.min_shift <= settings.min_shift) throw Error("segment too short for the surrogate shifts");
  auto engine = make_engine(settings.seed, "ipc-surrogates");
  std::uniform_int_distribution<long> dist(settings.min_shift, L - settings.min_shift);
  std::vector<int> shifts;
  for (int i = 0; i < settings.surrogates; ++i) shifts.push_back(static_cast<int>(dist(engine)));
  return shifts;
}

namespace {

void partitions(int n, int max_part, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (n == 0) {
    out.push_back(cur);
    return;
  }
  for (int p = std::min(n, max_part); p >= 1; --p) {
    cur.push_back(p);
    partitions(n - p, p, cur, out);
    cur.pop_back();
  }
}

struct Family {
  FamilyCutoff cutoff;
  std::vector<std::vector<int>> orders;  // distinct orderings of the partition
  int empty_levels = 0;
  bool active = true;
};

// All specs of the family whose largest delay is tau, by increasing window.
std::vector<TargetSpec> family_level(const Family& f, int tau) {
  const int m = static_cast<int>(f.cutoff.partition.size());
  std::vector<TargetSpec> out;
  if (m == 1) {
    out.push_back(TargetSpec::of({{tau, f.cutoff.partition[0]}}));
    return out;
  }
  // Choose m-1 further delays below tau; window = tau - smallest delay.
  std::vector<std::vector<int>> delay_sets;
  std::vector<int> pick;
  auto rec = [&](auto&& self, int next) -> void {
    if (static_cast<int>(pick.size()) == m - 1) {
      delay_sets.push_back(pick);
      return;
    }
    for (int d = next; d < tau; ++d) {
      pick.push_back(d);
      self(self, d + 1);
      pick.pop_back();
    }
  };
  rec(rec, 1);
  std::stable_sort(delay_sets.begin(), delay_sets.end(),
                   [](const std::vector<int>& a, const std::vector<int>& b) { return a.front() > b.front(); });
  for (auto& ds : delay_sets) {
    ds.push_back(tau);
    for (const auto& order : f.orders) {
      std::vector<TargetTerm> terms;
      for (int i = 0; i < m; ++i) terms.push_back({ds[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(i)]});
      out.push_back(TargetSpec::of(std::move(terms)));
    }
  }
  return out;
}

class TargetBuilder {
 public:
  TargetBuilder(std::span<const double> inputs, int d_max, std::size_t first_time, std::size_t L)
      : first_time_(first_time), L_(L), table_(d_max + 1, static_cast<Eigen::Index>(inputs.size())) {
    for (Eigen::Index k = 0; k < table_.cols(); ++k) {
      const double x = 2.0 * inputs[static_cast<std::size_t>(k)] - 1.0;
      for (int d = 0; d <= d_max; ++d) table_(d, k) = legendre(d, x);
    }
  }

  void fill(const std::vector<TargetSpec>& specs, std::size_t begin, std::size_t count, RealMatrix& train,
            RealMatrix& test) const {
    train.resize(static_cast<Eigen::Index>(L_), static_cast<Eigen::Index>(count));
    test.resize(static_cast<Eigen::Index>(L_), static_cast<Eigen::Index>(count));
    for (std::size_t c = 0; c < count; ++c) {
      const auto& spec = specs[begin + c];
      const auto col = static_cast<Eigen::Index>(c);
      for (std::size_t r = 0; r < 2 * L_; ++r) {
        double v = 1.0;
        for (const auto& t : spec.terms) {
          v *= table_(t.degree, static_cast<Eigen::Index>(first_time_ + r - static_cast<std::size_t>(t.delay)));
        }
        if (r < L_) {
          train(static_cast<Eigen::Index>(r), col) = v;
        } else {
          test(static_cast<Eigen::Index>(r - L_), col) = v;
        }
      }
    }
  }

 private:
  std::size_t first_time_;
  std::size_t L_;
  RealMatrix table_;  // P_d(s~_k)
};

constexpr std::size_t kBatch = 256;

std::vector<TargetCapacity> score_all(const CapacityScorer& scorer, const TargetBuilder& builder,
                                      const std::vector<TargetSpec>& specs, double sigmas) {
  std::vector<TargetCapacity> out;
  out.reserve(specs.size());
  RealMatrix train, test;
  for (std::size_t begin = 0; begin < specs.size(); begin += kBatch) {
    const std::size_t count = std::min(kBatch, specs.size() - begin);
    builder.fill(specs, begin, count, train, test);
    auto scored = scorer.score(train, test, sigmas);
    for (std::size_t c = 0; c < count; ++c) {
      scored[c].spec = specs[begin + c];
      out.push_back(std::move(scored[c]));
    }
  }
  return out;
}

}  // namespace

CapacityReport total_ipc(const ReadoutMatrix& readout, std::span<const double> inputs, const IpcSettings& settings) {
  settings.validate();
  const auto L = static_cast<std::size_t>(readout.rows() / 2);
  if (L == 0 || L < static_cast<std::size_t>(readout.cols()) + 2) throw Error("insufficient data rows for IPC");
  const int history = std::max(settings.max_delay_linear, settings.d_max >= 2 ? settings.max_delay : 0);
  if (readout.first_time < static_cast<std::size_t>(history)) {
    throw Error("readout starts before the longest target delay has input history");
  }
  if (readout.first_time + 2 * L > inputs.size() + 1) throw Error("readout rows extend past the input sequence");

  CapacityReport report;
  report.settings = settings;
  report.M = static_cast<std::size_t>(readout.cols());
  report.train_rows = L;
  report.per_degree.assign(static_cast<std::size_t>(settings.d_max), 0.0);
  report.threshold_sum.assign(static_cast<std::size_t>(settings.d_max), 0.0);
  report.evaluated.assign(static_cast<std::size_t>(settings.d_max), 0);
  report.shifts = draw_surrogate_shifts(L, settings);

  const auto Li = static_cast<Eigen::Index>(L);
  const CapacityScorer scorer(readout.values.topRows(Li), readout.values.middleRows(Li, Li), report.shifts,
                              settings.rcond);
  report.rank = scorer.rank();
  const TargetBuilder builder(inputs, settings.d_max, readout.first_time, L);

  auto record = [&](std::vector<TargetCapacity>& scored) {
    for (auto& c : scored) {
      const auto d = static_cast<std::size_t>(c.spec.degree() - 1);
      report.evaluated[d] += 1;
      if (c.retained) {
        report.per_degree[d] += c.capacity;
        report.threshold_sum[d] += c.threshold;
      }
      report.targets.push_back(std::move(c));
    }
  };

  // Degree 1: every delay up to the linear cutoff.
  {
    std::vector<TargetSpec> specs;
    for (int i = 1; i <= settings.max_delay_linear; ++i) specs.push_back(TargetSpec::of({{i, 1}}));
    auto scored = score_all(scorer, builder, specs, settings.sigmas);
    record(scored);
  }

  // Degrees >= 2: families are the partitions of d over distinct delays,
  // swept in lockstep by their largest delay.
  std::vector<Family> families;
  for (int d = 2; d <= settings.d_max; ++d) {
    std::vector<std::vector<int>> parts;
    std::vector<int> cur;
    partitions(d, d, cur, parts);
    for (auto& p : parts) {
      Family f;
      f.cutoff.degree = d;
      f.cutoff.partition = p;
      std::vector<int> order = p;
      std::sort(order.begin(), order.end());
      do f.orders.push_back(order);
      while (std::next_permutation(order.begin(), order.end()));
      families.push_back(std::move(f));
    }
  }

  for (int tau = 1; tau <= settings.max_delay; ++tau) {
    std::vector<TargetSpec> specs;
    std::vector<std::pair<std::size_t, std::size_t>> ranges;  // per family: [begin, end) in specs
    for (auto& f : families) {
      const auto m = static_cast<int>(f.cutoff.partition.size());
      if (!f.active || m > tau) {
        ranges.emplace_back(specs.size(), specs.size());
        continue;
      }
      auto level = family_level(f, tau);
      const auto d = static_cast<std::size_t>(f.cutoff.degree - 1);
      std::size_t queued = 0;
      for (std::size_t g = 0; g < families.size(); ++g) {
        if (families[g].cutoff.degree == f.cutoff.degree && g < ranges.size()) queued += ranges[g].second - ranges[g].first;
      }
      if (report.evaluated[d] + queued + level.size() > settings.max_targets_per_degree) {
        f.active = false;
        ranges.emplace_back(specs.size(), specs.size());
        continue;
      }
      const std::size_t begin = specs.size();
      specs.insert(specs.end(), std::make_move_iterator(level.begin()), std::make_move_iterator(level.end()));
      ranges.emplace_back(begin, specs.size());
    }
    if (specs.empty()) continue;
    auto scored = score_all(scorer, builder, specs, settings.sigmas);
    for (std::size_t g = 0; g < families.size(); ++g) {
      auto& f = families[g];
      const auto [begin, end] = ranges[g];
      if (begin == end) continue;
      bool strong = false;
      for (std::size_t i = begin; i < end; ++i) {
        const auto& c = scored[i];
        if (c.capacity > c.surrogate_mean + settings.stop_sigmas * c.surrogate_std && c.capacity > 0.0) strong = true;
      }
      f.cutoff.last_delay = tau;
      f.cutoff.evaluated += end - begin;
      f.empty_levels = strong ? 0 : f.empty_levels + 1;
      if (f.empty_levels >= settings.stop_after) {
        f.active = false;
        f.cutoff.stopped_by_rule = true;
      }
    }
    record(scored);
  }

  for (auto& f : families) report.families.push_back(std::move(f.cutoff));
  report.total = std::accumulate(report.per_degree.begin(), report.per_degree.end(), 0.0);
  return report;
}

void write_capacity_targets_csv(std::ostream& out, const CapacityReport& report) {
  csv::write_row(out, {"target", "degree", "max_delay", "capacity", "threshold", "surrogate_mean", "surrogate_std",
                       "retained"});
  for (const auto& t : report.targets) {
    csv::write_row(out, {t.spec.str(), csv::num(t.spec.degree()), csv::num(t.spec.max_delay()), csv::num(t.capacity),
                         csv::num(t.threshold), csv::num(t.surrogate_mean), csv::num(t.surrogate_std),
                         t.retained ? "1" : "0"});
  }
}

void write_capacity_summary_csv(std::ostream& out, const CapacityReport& report) {
  std::vector<std::string> header;
  std::vector<std::string> row;
  for (std::size_t d = 0; d < report.per_degree.size(); ++d) {
    header.push_back("I_" + std::to_string(d + 1));
    row.push_back(csv::num(report.per_degree[d]));
  }
  for (const char* h : {"residual", "I_tot", "M", "normalized", "rank", "train_rows"}) header.emplace_back(h);
  row.push_back(csv::num(report.residual()));
  row.push_back(csv::num(report.total));
  row.push_back(csv::num(report.M));
  row.push_back(csv::num(report.normalized()));
  row.push_back(csv::num(report.rank));
  row.push_back(csv::num(report.train_rows));
  csv::write_row(out, header);
  csv::write_row(out, row);
}

}  // namespace qrc
