#include "blockstab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <fmt/format.h>

#include "blockstab/error.hpp"
#include "blockstab/rng.hpp"

namespace blockstab {

AssembledFeatures assemble_features(const std::vector<DisciplineInput>& inputs) {
  AssembledFeatures out;
  for (const auto& in : inputs) {
    auto skip = [&](const std::string& why) { out.warnings.push_back(in.name + ": skipped, " + why); };
    if (!in.first || !in.second) {
      skip("missing a period");
      continue;
    }
    if (!in.report || !in.into_out) {
      skip("no stability report");
      continue;
    }
    const auto& s1 = in.first->summary;
    const auto& s2 = in.second->summary;
    if (s1.n == 0 || in.first->density == 0.0) {
      skip("no co-authorship ties in the first period");
      continue;
    }
    DisciplineFeatures f;
    f.name = in.name;
    f.field = in.field;
    f.n1 = static_cast<double>(s1.n);
    f.n2 = static_cast<double>(s2.n);
    f.growth_n = 100.0 * (f.n2 - f.n1) / f.n1;
    f.density1 = in.first->density;
    f.density2 = in.second->density;
    f.growth_density = 100.0 * (f.density2 - f.density1) / f.density1;
    f.n_cores1 = static_cast<double>(s1.cores);
    f.n_cores2 = static_cast<double>(s2.cores);
    f.avg_core_size1 = s1.avg_core_size;
    f.avg_core_size2 = s2.avg_core_size;
    f.pct_semi1 = s1.pct_semi_periphery;
    f.pct_semi2 = s2.pct_semi_periphery;
    f.pct_per1 = s1.pct_periphery;
    f.pct_per2 = s2.pct_periphery;
    f.pct_cores = 0.5 * ((100.0 - f.pct_semi1 - f.pct_per1) + (100.0 - f.pct_semi2 - f.pct_per2));
    f.bridge_present1 = in.first->bridging_core;
    f.pct_into = 100.0 * in.into_out->pct_into;
    f.pct_out = 100.0 * in.into_out->pct_out;
    for (std::size_t i = 0; i < 9; ++i) {
      f.indices[i] = in.report->indices[i].adjusted;
      f.raw_indices[i] = in.report->indices[i].raw;
    }
    out.rows.push_back(std::move(f));
  }
  return out;
}

Standardized standardize(const Eigen::MatrixXd& x) {
  if (x.rows() < 2) throw Error(ErrorKind::invalid_argument, "standardization needs at least two rows");
  Standardized out{Eigen::MatrixXd::Zero(x.rows(), x.cols()), {}};
  const double n = static_cast<double>(x.rows());
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    const double mean = x.col(c).mean();
    const Eigen::VectorXd centered = x.col(c).array() - mean;
    const double sd = std::sqrt(centered.squaredNorm() / (n - 1.0));
    if (sd == 0.0 || sd < 1e-14 * std::max(1.0, std::abs(mean))) {
      out.zero_variance.push_back(static_cast<std::size_t>(c));
      continue;
    }
    out.z.col(c) = centered / sd;
  }
  return out;
}

double within_dispersion(const Eigen::MatrixXd& x, const std::vector<int>& assignment) {
  // Sum of pairwise squared distances / (2 n_r) equals the within-cluster sum
  // of squares around the centroid.
  std::map<int, std::vector<Eigen::Index>> clusters;
  for (std::size_t i = 0; i < assignment.size(); ++i) clusters[assignment[i]].push_back(static_cast<Eigen::Index>(i));
  double w = 0.0;
  for (const auto& [id, rows] : clusters) {
    Eigen::RowVectorXd centroid = Eigen::RowVectorXd::Zero(x.cols());
    for (auto r : rows) centroid += x.row(r);
    centroid /= static_cast<double>(rows.size());
    for (auto r : rows) w += (x.row(r) - centroid).squaredNorm();
  }
  return w;
}

namespace {

std::vector<std::vector<double>> rows_of(const Eigen::MatrixXd& x) {
  std::vector<std::vector<double>> out;
  out.reserve(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const Eigen::RowVectorXd row = x.row(r);
    out.emplace_back(row.data(), row.data() + row.size());
  }
  return out;
}

std::vector<std::string> index_labels(std::size_t n) {
  std::vector<std::string> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = fmt::format("{:08d}", i);
  return labels;
}

Dendrogram ward_on_rows(const Eigen::MatrixXd& x, const std::vector<std::string>& labels) {
  return ward_cluster(euclidean_distances(labels, rows_of(x)));
}

double safe_log(double w) { return std::log(std::max(w, std::numeric_limits<double>::min())); }

}  // namespace

GapResult gap_statistic(const Eigen::MatrixXd& x, std::size_t k_max, std::size_t references, std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(x.rows());
  if (n < 2) throw Error(ErrorKind::invalid_argument, "gap statistic needs at least two rows");
  if (k_max < 1 || k_max >= n) {
    throw Error(ErrorKind::invalid_argument, fmt::format("k_max = {} must lie in [1, {})", k_max, n));
  }
  if (references == 0) throw Error(ErrorKind::invalid_argument, "gap statistic needs reference sets");
  const auto labels = index_labels(n);

  GapResult out;
  const Dendrogram dend = ward_on_rows(x, labels);
  for (std::size_t k = 1; k <= k_max; ++k) out.log_w.push_back(safe_log(within_dispersion(x, cut_dendrogram(dend, k))));

  const Eigen::RowVectorXd lo = x.colwise().minCoeff();
  const Eigen::RowVectorXd hi = x.colwise().maxCoeff();
  std::vector<std::vector<double>> ref_log_w(k_max, std::vector<double>(references));
  for (std::size_t b = 0; b < references; ++b) {
    Rng rng(seed + b);
    Eigen::MatrixXd ref(x.rows(), x.cols());
    for (Eigen::Index r = 0; r < ref.rows(); ++r) {
      for (Eigen::Index c = 0; c < ref.cols(); ++c) ref(r, c) = lo(c) + (hi(c) - lo(c)) * uniform_real(rng);
    }
    const Dendrogram ref_dend = ward_on_rows(ref, labels);
    for (std::size_t k = 1; k <= k_max; ++k) {
      ref_log_w[k - 1][b] = safe_log(within_dispersion(ref, cut_dendrogram(ref_dend, k)));
    }
  }
  const double B = static_cast<double>(references);
  for (std::size_t k = 0; k < k_max; ++k) {
    const double mean = std::accumulate(ref_log_w[k].begin(), ref_log_w[k].end(), 0.0) / B;
    double ss = 0.0;
    for (double v : ref_log_w[k]) ss += (v - mean) * (v - mean);
    out.gap.push_back(mean - out.log_w[k]);
    out.sd.push_back(std::sqrt(ss / B) * std::sqrt(1.0 + 1.0 / B));
  }
  out.k = k_max;
  for (std::size_t k = 1; k < k_max; ++k) {
    if (out.gap[k - 1] >= out.gap[k] - out.sd[k]) {
      out.k = k;
      break;
    }
  }
  return out;
}

DisciplineClustering cluster_disciplines(const Eigen::MatrixXd& x, const std::vector<std::string>& labels,
                                         const std::vector<double>& order_key, const ClusterOptions& opts) {
  const auto n = static_cast<std::size_t>(x.rows());
  if (n < 2) throw Error(ErrorKind::invalid_argument, "clustering needs at least two disciplines");
  if (labels.size() != n || order_key.size() != n) throw Error(ErrorKind::invalid_argument, "row count mismatch");

  DisciplineClustering out;
  out.dendrogram = ward_on_rows(x, labels);
  if (opts.k) {
    out.k = *opts.k;
  } else {
    out.gap = gap_statistic(x, std::min(opts.k_max, n - 1), opts.references, opts.seed);
    out.k = out.gap->k;
  }
  const auto raw = cut_dendrogram(out.dendrogram, out.k);

  std::map<int, std::pair<double, std::size_t>> stats;  // sum of keys, count
  std::map<int, std::size_t> first_member;
  for (std::size_t i = 0; i < n; ++i) {
    auto& s = stats[raw[i]];
    s.first += order_key[i];
    ++s.second;
    first_member.try_emplace(raw[i], i);
  }
  std::vector<std::tuple<double, std::size_t, int>> order;
  for (const auto& [id, s] : stats) order.emplace_back(s.first / static_cast<double>(s.second), first_member[id], id);
  std::sort(order.begin(), order.end());
  std::map<int, int> renumber;
  for (std::size_t i = 0; i < order.size(); ++i) renumber[std::get<2>(order[i])] = static_cast<int>(i + 1);
  out.assignment.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.assignment[i] = renumber[raw[i]];
  return out;
}

std::vector<ClusterSummaryRow> cluster_summary(const std::vector<int>& assignment,
                                               const std::vector<DisciplineFeatures>& features) {
  if (assignment.size() != features.size()) throw Error(ErrorKind::invalid_argument, "assignment/feature mismatch");
  std::map<int, ClusterSummaryRow> rows;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    auto& row = rows[assignment[i]];
    const auto& f = features[i];
    row.cluster = assignment[i];
    ++row.members;
    row.pct_into += f.pct_into;
    row.pct_out += f.pct_out;
    row.core_size += 0.5 * (f.avg_core_size1 + f.avg_core_size2);
    row.researchers += 0.5 * (f.n1 + f.n2);
  }
  std::vector<ClusterSummaryRow> out;
  for (auto& [id, row] : rows) {
    const double m = static_cast<double>(row.members);
    row.pct_into /= m;
    row.pct_out /= m;
    row.core_size /= m;
    row.researchers /= m;
    out.push_back(row);
  }
  return out;
}

RegressionResult ols_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const std::vector<std::string>& names) {
  const auto n = static_cast<std::size_t>(x.rows());
  const auto p = static_cast<std::size_t>(x.cols());
  if (names.size() != p) throw Error(ErrorKind::invalid_argument, "one name per design column required");
  if (static_cast<std::size_t>(y.size()) != n) throw Error(ErrorKind::invalid_argument, "response length mismatch");
  if (p == 0 || !(x.col(0).array() == 1.0).all()) {
    throw Error(ErrorKind::invalid_argument, "column 0 must be the intercept");
  }
  if (n <= p) {
    throw Error(ErrorKind::singular_design, fmt::format("{} observations for {} parameters", n, p));
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  qr.setThreshold(1e-10);
  qr.compute(x);
  const auto rank = static_cast<std::size_t>(qr.rank());
  if (rank < p) {
    std::vector<std::string> dependent;
    const auto& perm = qr.colsPermutation().indices();
    for (std::size_t i = rank; i < p; ++i) dependent.push_back(names[static_cast<std::size_t>(perm(static_cast<Eigen::Index>(i)))]);
    std::sort(dependent.begin(), dependent.end());
    std::string list;
    for (const auto& d : dependent) list += (list.empty() ? "" : ", ") + d;
    throw Error(ErrorKind::singular_design, "design matrix is rank deficient; dependent columns: " + list);
  }

  RegressionResult r;
  r.names = names;
  r.n_obs = n;
  r.coefficients = qr.solve(y);
  r.residuals = y - x * r.coefficients;
  const double rss = r.residuals.squaredNorm();
  const double tss = (y.array() - y.mean()).matrix().squaredNorm();
  r.df_model = p - 1;
  r.df_residual = n - p;
  const double sigma2 = rss / static_cast<double>(r.df_residual);

  // (X'X)^-1 = P R^-1 R^-T P'
  const Eigen::MatrixXd R = qr.matrixR().topLeftCorner(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p))
                                .triangularView<Eigen::Upper>();
  const Eigen::MatrixXd r_inv =
      R.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p)));
  const Eigen::MatrixXd cov_perm = r_inv * r_inv.transpose();
  const auto& perm = qr.colsPermutation();
  const Eigen::MatrixXd cov = perm * cov_perm * perm.transpose();

  boost::math::students_t tdist(static_cast<double>(r.df_residual));
  r.std_errors.resize(static_cast<Eigen::Index>(p));
  r.t_values.resize(static_cast<Eigen::Index>(p));
  r.p_values.resize(static_cast<Eigen::Index>(p));
  for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(p); ++j) {
    r.std_errors(j) = std::sqrt(sigma2 * cov(j, j));
    r.t_values(j) = r.coefficients(j) / r.std_errors(j);
    r.p_values(j) = std::isfinite(r.t_values(j))
                        ? 2.0 * boost::math::cdf(boost::math::complement(tdist, std::abs(r.t_values(j))))
                        : 0.0;
  }
  r.r2 = tss > 0.0 ? 1.0 - rss / tss : 1.0;
  r.adj_r2 = 1.0 - (1.0 - r.r2) * static_cast<double>(n - 1) / static_cast<double>(r.df_residual);
  if (r.df_model > 0) {
    r.f_statistic = ((tss - rss) / static_cast<double>(r.df_model)) / sigma2;
    if (std::isfinite(r.f_statistic)) {
      boost::math::fisher_f fdist(static_cast<double>(r.df_model), static_cast<double>(r.df_residual));
      r.f_p_value = boost::math::cdf(boost::math::complement(fdist, std::max(0.0, r.f_statistic)));
    }
  }
  return r;
}

std::vector<VifValue> vif(const Eigen::MatrixXd& x, const std::vector<std::string>& names) {
  const Eigen::Index n = x.rows(), p = x.cols();
  if (p < 2) throw Error(ErrorKind::invalid_argument, "VIF needs at least two predictors");
  if (names.size() != static_cast<std::size_t>(p)) throw Error(ErrorKind::invalid_argument, "one name per predictor");
  std::vector<VifValue> out;
  for (Eigen::Index j = 0; j < p; ++j) {
    Eigen::MatrixXd others(n, p);
    others.col(0).setOnes();
    for (Eigen::Index c = 0, k = 1; c < p; ++c) {
      if (c != j) others.col(k++) = x.col(c);
    }
    const Eigen::VectorXd target = x.col(j);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(others);
    const Eigen::VectorXd resid = target - others * qr.solve(target);
    const double tss = (target.array() - target.mean()).matrix().squaredNorm();
    const double r2 = tss > 0.0 ? 1.0 - resid.squaredNorm() / tss : 1.0;
    VifValue v{names[static_cast<std::size_t>(j)], 1.0, false};
    if (1.0 - r2 <= 1e-12) {
      v.collinear = true;
      v.value = std::numeric_limits<double>::infinity();
    } else {
      v.value = 1.0 / (1.0 - r2);
    }
    out.push_back(v);
  }
  return out;
}

namespace {

int field_rank(const std::string& field) {
  static const std::vector<std::string> known = {"natural sciences and mathematics",
                                                 "engineering sciences and technologies",
                                                 "medical sciences",
                                                 "biotechnical sciences",
                                                 "social sciences",
                                                 "humanities"};
  auto it = std::find(known.begin(), known.end(), field);
  return it == known.end() ? static_cast<int>(known.size()) : static_cast<int>(it - known.begin());
}

}  // namespace

Design regression_design(const std::vector<DisciplineFeatures>& features, int model) {
  if (model != 1 && model != 2) throw Error(ErrorKind::invalid_argument, "model must be 1 or 2");
  Design d;
  std::vector<const DisciplineFeatures*> rows;
  for (const auto& f : features) {
    if (f.indices[7]) {
      rows.push_back(&f);
    } else {
      d.notes.push_back(f.name + " left out: MAWIS2 undefined");
    }
  }

  std::set<std::string> field_set;
  for (const auto* f : rows) field_set.insert(f->field);
  std::vector<std::string> fields(field_set.begin(), field_set.end());
  std::stable_sort(fields.begin(), fields.end(),
                   [](const auto& a, const auto& b) { return field_rank(a) < field_rank(b); });
  std::string reference;
  if (!fields.empty()) {
    reference = field_set.count("humanities") ? "humanities" : fields.front();
    fields.erase(std::find(fields.begin(), fields.end(), reference));
    d.notes.push_back("reference field: " + (reference.empty() ? std::string("(unnamed)") : reference));
  }

  d.names = {"intercept",
             "number of researchers (first period)",
             "growth of number of researchers",
             "growth of density",
             "average core size (first period)",
             "percentage of cores",
             "presence of the bridge (first period)"};
  if (model == 2) d.names.push_back("percentage of out-of-cores");
  for (const auto& f : fields) d.names.push_back(f);

  const auto n = static_cast<Eigen::Index>(rows.size());
  d.x.resize(n, static_cast<Eigen::Index>(d.names.size()));
  d.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& f = *rows[static_cast<std::size_t>(i)];
    d.disciplines.push_back(f.name);
    std::vector<double> row = {1.0,          f.n1,           f.growth_n, f.growth_density, f.avg_core_size1,
                               f.pct_cores, f.bridge_present1 ? 1.0 : 0.0};
    if (model == 2) row.push_back(f.pct_out);
    for (const auto& field : fields) row.push_back(f.field == field ? 1.0 : 0.0);
    for (std::size_t c = 0; c < row.size(); ++c) d.x(i, static_cast<Eigen::Index>(c)) = row[c];
    d.y(i) = *f.indices[7];
  }
  return d;
}

std::string format_regression(const std::string& title, const RegressionResult& fit,
                              const std::vector<VifValue>& vifs) {
  std::ostringstream out;
  out << title << '\n';
  out << fmt::format("{:<42} {:>10} {:>10} {:>6} {:>8}\n", "", "b", "SE(b)", "p", "VIF");
  for (std::size_t j = 0; j < fit.names.size(); ++j) {
    const auto idx = static_cast<Eigen::Index>(j);
    std::string vif_text;
    for (const auto& v : vifs) {
      if (v.name == fit.names[j]) vif_text = v.collinear ? "inf" : fmt::format("{:.2f}", v.value);
    }
    out << fmt::format("{:<42} {:>10.4f} {:>10.4f} {:>6.2f} {:>8}\n", fit.names[j].substr(0, 42),
                       fit.coefficients(idx), fit.std_errors(idx), fit.p_values(idx), vif_text);
  }
  out << fmt::format("Number of obs.: {}\n", fit.n_obs);
  out << fmt::format("Adjusted R^2: {:.4f}\n", fit.adj_r2);
  out << fmt::format("F statistic: {:.4f} ({}; {}), p = {:.4f}\n", fit.f_statistic, fit.df_model, fit.df_residual,
                     fit.f_p_value);
  out << "Method of estimation: least squares\n";
  return out.str();
}

}  // namespace blockstab
