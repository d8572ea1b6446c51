#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "blockstab/blockmodel.hpp"
#include "blockstab/equivalence.hpp"
#include "blockstab/stability.hpp"
#include "blockstab/transitions.hpp"

namespace blockstab {

/// Blockmodel facts for one discipline in one period.
struct PeriodFacts {
  BlockmodelSummary summary;
  double density = 0.0;
  bool bridging_core = false;
};

struct DisciplineInput {
  std::string name;
  std::string field;
  std::optional<PeriodFacts> first;
  std::optional<PeriodFacts> second;
  std::optional<StabilityReport> report;
  std::optional<IntoOut> into_out;
};

/// Discipline-level features. Percentages are on the 0..100 scale.
struct DisciplineFeatures {
  std::string name;
  std::string field;
  double n1 = 0, n2 = 0, growth_n = 0;
  double density1 = 0, density2 = 0, growth_density = 0;
  double n_cores1 = 0, n_cores2 = 0;
  double avg_core_size1 = 0, avg_core_size2 = 0;
  double pct_semi1 = 0, pct_semi2 = 0, pct_per1 = 0, pct_per2 = 0;
  double pct_cores = 0;  // mean share of core members over both periods
  bool bridge_present1 = false;
  double pct_into = 0, pct_out = 0;
  std::array<std::optional<double>, 9> indices{};  // adjusted, report column order
  std::array<std::optional<double>, 9> raw_indices{};
};

struct AssembledFeatures {
  std::vector<DisciplineFeatures> rows;
  std::vector<std::string> warnings;
};

/// Disciplines missing a period, the stability report, the into/out shares,
/// or any first-period ties are skipped with a warning.
AssembledFeatures assemble_features(const std::vector<DisciplineInput>& inputs);

struct Standardized {
  Eigen::MatrixXd z;
  std::vector<std::size_t> zero_variance;  // columns set to 0
};

/// Column z-scores with the sample (n-1) standard deviation.
Standardized standardize(const Eigen::MatrixXd& x);

/// Sum over clusters of the within-cluster sum of squared pairwise distances
/// divided by twice the cluster size.
double within_dispersion(const Eigen::MatrixXd& x, const std::vector<int>& assignment);

struct GapResult {
  std::size_t k = 1;
  std::vector<double> gap;       // index k-1
  std::vector<double> sd;        // s_k including the sqrt(1 + 1/B) factor
  std::vector<double> log_w;
};

/// Gap statistic over Ward clusterings with a uniform bounding-box reference
/// distribution; picks the smallest k with Gap(k) >= Gap(k+1) - s_{k+1}.
GapResult gap_statistic(const Eigen::MatrixXd& x, std::size_t k_max, std::size_t references = 100,
                        std::uint64_t seed = 20100101);

struct DisciplineClustering {
  std::vector<int> assignment;  // 1..k, cluster 1 has the lowest mean order key
  std::size_t k = 1;
  std::optional<GapResult> gap;
  Dendrogram dendrogram;
};

struct ClusterOptions {
  std::optional<std::size_t> k;  // chosen by the gap statistic when absent
  std::size_t k_max = 8;
  std::size_t references = 100;
  std::uint64_t seed = 20100101;
};

/// Ward clustering on Euclidean distances between rows. Clusters are
/// renumbered by ascending mean of `order_key` (ties by first member).
DisciplineClustering cluster_disciplines(const Eigen::MatrixXd& x, const std::vector<std::string>& labels,
                                         const std::vector<double>& order_key, const ClusterOptions& opts = {});

struct ClusterSummaryRow {
  int cluster = 0;
  std::size_t members = 0;
  double pct_into = 0, pct_out = 0;
  double core_size = 0;    // mean of the two period averages
  double researchers = 0;  // mean of N1 and N2
};

std::vector<ClusterSummaryRow> cluster_summary(const std::vector<int>& assignment,
                                               const std::vector<DisciplineFeatures>& features);

struct RegressionResult {
  std::vector<std::string> names;
  Eigen::VectorXd coefficients;
  Eigen::VectorXd std_errors;
  Eigen::VectorXd t_values;
  Eigen::VectorXd p_values;
  Eigen::VectorXd residuals;
  double r2 = 0.0;
  double adj_r2 = 0.0;
  double f_statistic = 0.0;
  std::size_t df_model = 0;
  std::size_t df_residual = 0;
  double f_p_value = 0.0;
  std::size_t n_obs = 0;
};

/// Least squares with an intercept in column 0. Throws
/// ErrorKind::singular_design naming the dependent columns.
RegressionResult ols_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const std::vector<std::string>& names);

struct VifValue {
  std::string name;
  double value = 1.0;
  bool collinear = false;  // perfect collinearity; value is +inf
};

/// VIF_j = 1 / (1 - R^2_j) from regressing predictor j on the others (plus
/// an intercept). `x` holds the predictors only.
std::vector<VifValue> vif(const Eigen::MatrixXd& x, const std::vector<std::string>& names);

struct Design {
  Eigen::MatrixXd x;  // intercept first
  Eigen::VectorXd y;  // MAWIS2
  std::vector<std::string> names;
  std::vector<std::string> disciplines;
  std::vector<std::string> notes;
};

/// Model 1 controls plus field dummies (humanities as reference); model 2
/// adds the out-of-cores percentage. Disciplines without MAWIS2 are left out.
Design regression_design(const std::vector<DisciplineFeatures>& features, int model);

/// Fixed-width table of coefficients, standard errors and p-values.
std::string format_regression(const std::string& title, const RegressionResult& fit,
                              const std::vector<VifValue>& vifs);

}  // namespace blockstab
